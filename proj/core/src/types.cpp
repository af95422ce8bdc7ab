#include "evigrid/types.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "evigrid/pose.hpp"

namespace evigrid {

Point3::Point3(double x_, double y_, double z_, double intensity_)
    : x(x_), y(y_), z(z_), intensity(intensity_) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
    throw std::invalid_argument("Point3: non-finite coordinate");
  }
  if (!(intensity >= 0.0 && intensity <= 1.0)) {
    throw std::invalid_argument("Point3: intensity outside [0, 1]");
  }
}

bool ScanSequence::has_poses() const { return !poses.empty(); }

void ScanSequence::validate() const {
  if (!poses.empty() && poses.size() != scans.size()) {
    throw std::invalid_argument("ScanSequence: pose count != scan count");
  }
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    if (!std::isfinite(scans[i].timestamp)) {
      throw std::invalid_argument("ScanSequence: non-finite timestamp");
    }
    if (i > 0 && !(scans[i].timestamp > scans[i - 1].timestamp)) {
      throw std::invalid_argument(
          "ScanSequence: timestamps not strictly increasing");
    }
    if (!ids.insert(scans[i].scan_id).second) {
      throw std::invalid_argument("ScanSequence: duplicate scan_id '" +
                                  scans[i].scan_id + "'");
    }
  }
}

}  // namespace evigrid
