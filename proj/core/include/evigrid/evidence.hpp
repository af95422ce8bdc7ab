#pragma once

#include <cstdint>
#include <span>

namespace evigrid {

// Masses on the frame of discernment {occupied, free}; the empty set always
// carries zero mass, so occupied + free + theta == 1.
struct EvidenceMass {
  double occupied = 0.0;  // mass on {O}
  double free = 0.0;      // mass on {F}
  double theta = 1.0;     // mass on the whole frame

  static EvidenceMass vacuous() { return {0.0, 0.0, 1.0}; }
};

// Elementary per-observation evidences of the inverse sensor model. A
// reflection supports {O}, a transmission supports {F}; the remainder stays
// on the frame.
struct SensorEvidenceConfig {
  double reflection_occupied = 0.4;
  double reflection_theta = 0.6;
  double transmission_free = 0.1;
  double transmission_theta = 0.9;

  // Throws std::invalid_argument unless both pairs sum to 1 and all masses
  // lie in [0, 1].
  void validate() const;
};

struct VoxelCounts {
  std::uint32_t reflections = 0;    // rays ending in the voxel
  std::uint32_t transmissions = 0;  // rays passing through
};

// Closed-form combined evidence of one voxel holding m reflections and n
// transmissions:
//   occupied = (1 - reflection_theta^m) * transmission_theta^n
//   free     = (1 - transmission_theta^n) * reflection_theta^m
// Equivalent to aggregating each homogeneous observation group and combining
// the two groups once under Yager's rule; keeping integer counts makes the
// result independent of observation order.
EvidenceMass combine_counts(const VoxelCounts& counts,
                            const SensorEvidenceConfig& config);

// Conjunctive combination with the conflict mass assigned to the frame
// instead of renormalizing.
EvidenceMass yager_combine(const EvidenceMass& a, const EvidenceMass& b);

struct PillarBelief {
  double occupied = 0.0;
  double free = 0.0;
};

// Reduces the vertical stack of voxel evidences above one cell: the pillar is
// free only if every voxel is free (product of free masses), and occupied if
// any voxel is occupied (complement product of occupied masses).
// Throws std::invalid_argument on an empty pillar.
PillarBelief project_pillar(std::span<const EvidenceMass> voxels);

}  // namespace evigrid
