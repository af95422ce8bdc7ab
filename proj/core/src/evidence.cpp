#include "evigrid/evidence.hpp"

#include <cmath>
#include <stdexcept>

namespace evigrid {

void SensorEvidenceConfig::validate() const {
  const bool in_range =
      reflection_occupied >= 0.0 && reflection_occupied <= 1.0 &&
      reflection_theta >= 0.0 && reflection_theta <= 1.0 &&
      transmission_free >= 0.0 && transmission_free <= 1.0 &&
      transmission_theta >= 0.0 && transmission_theta <= 1.0;
  if (!in_range ||
      std::abs(reflection_occupied + reflection_theta - 1.0) > 1e-12 ||
      std::abs(transmission_free + transmission_theta - 1.0) > 1e-12) {
    throw std::invalid_argument("SensorEvidenceConfig: masses must be in "
                                "[0, 1] and each pair must sum to 1");
  }
}

EvidenceMass combine_counts(const VoxelCounts& counts,
                            const SensorEvidenceConfig& config) {
  const double rt = std::pow(config.reflection_theta,
                             static_cast<double>(counts.reflections));
  const double tt = std::pow(config.transmission_theta,
                             static_cast<double>(counts.transmissions));
  EvidenceMass e;
  e.occupied = (1.0 - rt) * tt;
  e.free = (1.0 - tt) * rt;
  e.theta = 1.0 - e.occupied - e.free;
  return e;
}

EvidenceMass yager_combine(const EvidenceMass& a, const EvidenceMass& b) {
  EvidenceMass e;
  e.occupied = a.occupied * b.occupied + a.occupied * b.theta +
               a.theta * b.occupied;
  e.free = a.free * b.free + a.free * b.theta + a.theta * b.free;
  const double conflict = a.occupied * b.free + a.free * b.occupied;
  e.theta = a.theta * b.theta + conflict;
  return e;
}

PillarBelief project_pillar(std::span<const EvidenceMass> voxels) {
  if (voxels.empty()) {
    throw std::invalid_argument("project_pillar: empty pillar");
  }
  double free_product = 1.0;
  double not_occupied_product = 1.0;
  for (const EvidenceMass& e : voxels) {
    free_product *= e.free;
    not_occupied_product *= 1.0 - e.occupied;
  }
  return {1.0 - not_occupied_product, free_product};
}

}  // namespace evigrid
