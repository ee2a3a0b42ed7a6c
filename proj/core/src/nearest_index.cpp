#include "chromacurve/nearest_index.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace chromacurve {

NearestPointIndex::NearestPointIndex(std::span<const Vec3> points) {
  if (points.empty()) return;
  double spread[3];
  for (int a = 0; a < 3; ++a) {
    auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                        [a](const Vec3& p, const Vec3& q) { return p[a] < q[a]; });
    spread[a] = (*hi)[a] - (*lo)[a];
  }
  axis_ = static_cast<int>(std::max_element(spread, spread + 3) - spread);

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return points[i][axis_] < points[j][axis_]; });
  points_.reserve(order.size());
  keys_.reserve(order.size());
  original_ = order;
  for (std::size_t i : order) {
    points_.push_back(points[i]);
    keys_.push_back(points[i][axis_]);
  }
}

NearestPointIndex::Hit NearestPointIndex::nearest(const Vec3& query) const {
  Hit best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
  auto consider = [&](std::size_t i) {
    const double d2 = squared_distance(query, points_[i]);
    if (d2 < best.squaredDistance || (d2 == best.squaredDistance && original_[i] < best.index)) {
      best.squaredDistance = d2;
      best.index = original_[i];
    }
  };

  const double key = query[axis_];
  const auto start = static_cast<std::size_t>(std::lower_bound(keys_.begin(), keys_.end(), key) - keys_.begin());
  std::size_t up = start;
  std::size_t down = start;
  bool up_open = up < keys_.size();
  bool down_open = down > 0;
  while (up_open || down_open) {
    if (up_open) {
      const double gap = keys_[up] - key;
      if (gap * gap > best.squaredDistance) {
        up_open = false;
      } else {
        consider(up);
        up_open = ++up < keys_.size();
      }
    }
    if (down_open) {
      const double gap = key - keys_[down - 1];
      if (gap * gap > best.squaredDistance) {
        down_open = false;
      } else {
        consider(down - 1);
        down_open = --down > 0;
      }
    }
  }
  return best;
}

}  // namespace chromacurve
