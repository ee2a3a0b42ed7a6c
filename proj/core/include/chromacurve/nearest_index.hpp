#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chromacurve/vec3.hpp"

namespace chromacurve {

// Exact nearest-neighbour lookup over a fixed set of 3D points.
//
// Points are sorted along their axis of largest spread; a query scans
// outward from its projected position and stops once the axis gap alone
// exceeds the best distance found. Ties resolve to the lowest input index,
// so results match a brute-force scan exactly.
class NearestPointIndex {
 public:
  struct Hit {
    std::size_t index = 0;
    double squaredDistance = 0.0;
  };

  NearestPointIndex() = default;
  explicit NearestPointIndex(std::span<const Vec3> points);

  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }

  // Precondition: !empty().
  Hit nearest(const Vec3& query) const;

 private:
  int axis_ = 0;
  std::vector<Vec3> points_;          // sorted by axis key
  std::vector<double> keys_;          // points_[i][axis_]
  std::vector<std::size_t> original_; // input index of points_[i]
};

}  // namespace chromacurve
