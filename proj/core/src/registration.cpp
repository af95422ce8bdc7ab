#include "evigrid/registration.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>
#include <thread>
#include <vector>

namespace evigrid {

namespace {

struct BatchJob {
  std::size_t first_scan = 0;
  std::size_t scan_count = 0;
};

std::vector<BatchJob> plan_batches(std::size_t scan_count,
                                   std::size_t batch_size) {
  std::vector<BatchJob> jobs;
  const std::size_t stride = batch_size - 1;  // share one scan per boundary
  for (std::size_t start = 0; start + 1 < scan_count; start += stride) {
    jobs.push_back({start, std::min(batch_size, scan_count - start)});
  }
  return jobs;
}

}  // namespace

SequenceRegistrationResult register_sequence(
    const ScanSequence& seq, const SequenceRegistrationOptions& options) {
  seq.validate();
  const std::size_t n = seq.scans.size();
  if (n < 2) {
    throw std::invalid_argument("register_sequence: needs at least 2 scans");
  }
  if (options.batch_size < 2) {
    throw std::invalid_argument("register_sequence: batch size must be >= 2");
  }

  const auto jobs = plan_batches(n, options.batch_size);
  std::vector<BatchRegistrationResult> batch_results(jobs.size());

  const auto run_job = [&](std::size_t j) {
    GicpBatchProblem problem;
    problem.options = options.gicp;
    for (std::size_t k = 0; k < jobs[j].scan_count; ++k) {
      problem.scans.push_back(seq.scans[jobs[j].first_scan + k]);
      problem.initial_poses.emplace_back();
    }
    batch_results[j] = register_batch(problem);
  };

  unsigned threads = options.threads > 0
                         ? static_cast<unsigned>(options.threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  if (threads <= 1 || jobs.size() <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::vector<std::future<void>> futures;
    futures.reserve(jobs.size());
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      futures.push_back(std::async(std::launch::async, run_job, j));
    }
    for (auto& f : futures) f.get();
  }

  SequenceRegistrationResult result;
  result.sequence = seq;
  result.graph.nodes.assign(n, PoseSE3{});

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const BatchJob& job = jobs[j];
    const BatchRegistrationResult& batch = batch_results[j];
    result.all_batches_converged &= batch.converged;
    const double weight = static_cast<double>(
        std::max<std::size_t>(batch.correspondence_count, 1));
    const Matrix6d information = weight * Matrix6d::Identity();

    for (std::size_t k = 0; k + 1 < job.scan_count; ++k) {
      PoseGraphEdge edge;
      edge.from = job.first_scan + k;
      edge.to = job.first_scan + k + 1;
      edge.observation = compose(inverse(batch.poses[k]), batch.poses[k + 1]);
      edge.information = information;
      result.graph.edges.push_back(edge);
    }
    if (job.scan_count > 2) {
      PoseGraphEdge closing;
      closing.from = job.first_scan;
      closing.to = job.first_scan + job.scan_count - 1;
      closing.observation =
          compose(inverse(batch.poses.front()), batch.poses.back());
      closing.information = information;
      result.graph.edges.push_back(closing);
    }
  }

  // Seed nodes by chaining adjacent observations; they appear in scan order,
  // so one pass over the edge list suffices.
  std::vector<PoseSE3> chain(n);
  for (const PoseGraphEdge& e : result.graph.edges) {
    if (e.to == e.from + 1) {
      chain[e.to] = compose(chain[e.from], e.observation);
    }
  }
  result.graph.nodes = chain;

  const PoseGraphResult solved =
      optimize_pose_graph(result.graph, options.graph);
  result.graph.nodes = solved.nodes;
  result.sequence.poses = solved.nodes;
  return result;
}

}  // namespace evigrid
