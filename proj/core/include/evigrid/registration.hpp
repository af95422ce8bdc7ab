#pragma once

#include <cstddef>

#include "evigrid/gicp.hpp"
#include "evigrid/pose_graph.hpp"
#include "evigrid/types.hpp"

namespace evigrid {

struct SequenceRegistrationOptions {
  std::size_t batch_size = 6;
  GicpOptions gicp;
  PoseGraphOptions graph;
  int threads = 0;  // 0 = hardware concurrency
};

struct SequenceRegistrationResult {
  ScanSequence sequence;  // input scans with poses relative to scan 0
  PoseGraph graph;        // optimized multi-edge graph, kept for diagnostics
  bool all_batches_converged = true;
};

// Two-stage registration: overlapping GICP batches (consecutive batches share
// one scan so adjacent-pose observations cover every boundary), then one
// multi-edge pose graph over the adjacent and batch-closing observations.
// Edge information matrices are scaled by the correspondence count of the
// generating batch solve. Batches are independent and run in parallel.
SequenceRegistrationResult register_sequence(
    const ScanSequence& seq, const SequenceRegistrationOptions& options = {});

}  // namespace evigrid
