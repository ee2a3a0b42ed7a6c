#include "chromacurve/quantize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "chromacurve/error.hpp"
#include "chromacurve/nearest_index.hpp"

namespace chromacurve {
namespace {

bool color_less(const RgbPoint& a, const RgbPoint& b) {
  return std::tie(a.r, a.g, a.b) < std::tie(b.r, b.g, b.b);
}

// Distinct colors of an image with pixel counts, in lexicographic order, plus
// the bin of every pixel.
struct ColorHistogram {
  std::vector<RgbPoint> colors;
  std::vector<double> weights;
  std::vector<std::uint32_t> binOfPixel;
};

ColorHistogram build_histogram(const RasterImage& image) {
  const auto px = image.pixels();
  std::vector<std::uint32_t> order(px.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t i, std::uint32_t j) {
    return color_less(px[i], px[j]) || (px[i] == px[j] && i < j);
  });
  ColorHistogram h;
  h.binOfPixel.resize(px.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const RgbPoint& c = px[order[k]];
    if (h.colors.empty() || !(h.colors.back() == c)) {
      h.colors.push_back(c);
      h.weights.push_back(0.0);
    }
    h.weights.back() += 1.0;
    h.binOfPixel[order[k]] = static_cast<std::uint32_t>(h.colors.size() - 1);
  }
  return h;
}

// Weighted moments of a set of histogram bins.
struct Moments {
  double weight = 0.0;
  Vec3 sum{};
  double sumSquares = 0.0;

  void add(const RgbPoint& c, double w) {
    weight += w;
    sum += c * w;
    sumSquares += w * squared_norm(c);
  }
  Moments operator-(const Moments& o) const {
    Moments m;
    m.weight = weight - o.weight;
    m.sum = sum - o.sum;
    m.sumSquares = sumSquares - o.sumSquares;
    return m;
  }
  double sse() const { return weight > 0.0 ? std::max(0.0, sumSquares - squared_norm(sum) / weight) : 0.0; }
  RgbPoint mean() const { return sum * (1.0 / weight); }
};

struct Box {
  std::size_t begin = 0;
  std::size_t end = 0;  // range in the shared bin-order array
  Moments moments;
};

Moments box_moments(const ColorHistogram& h, const std::vector<std::uint32_t>& order, std::size_t b, std::size_t e) {
  Moments m;
  for (std::size_t i = b; i < e; ++i) m.add(h.colors[order[i]], h.weights[order[i]]);
  return m;
}

void sort_along(const ColorHistogram& h, std::vector<std::uint32_t>& order, const Box& box, int axis) {
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(box.begin), order.begin() + static_cast<std::ptrdiff_t>(box.end),
            [&](std::uint32_t i, std::uint32_t j) {
              const RgbPoint& a = h.colors[i];
              const RgbPoint& b = h.colors[j];
              if (a[axis] != b[axis]) return a[axis] < b[axis];
              return color_less(a, b);
            });
}

std::vector<RgbPoint> box_means(const std::vector<Box>& boxes) {
  std::vector<RgbPoint> out;
  out.reserve(boxes.size());
  for (const auto& b : boxes) out.push_back(b.moments.mean());
  return out;
}

// Recursive box split: repeatedly split the box with the largest summed
// squared error at the axis/threshold minimising the two halves' total error.
std::vector<RgbPoint> minimum_variance(const ColorHistogram& h, int paletteSize) {
  std::vector<std::uint32_t> order(h.colors.size());
  std::iota(order.begin(), order.end(), 0u);
  std::vector<Box> boxes{{0, order.size(), box_moments(h, order, 0, order.size())}};

  while (static_cast<int>(boxes.size()) < paletteSize) {
    std::size_t pick = boxes.size();
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (boxes[i].end - boxes[i].begin < 2 || boxes[i].moments.sse() <= 0.0) continue;
      if (pick == boxes.size() || boxes[i].moments.sse() > boxes[pick].moments.sse()) pick = i;
    }
    if (pick == boxes.size()) break;
    Box box = boxes[pick];

    int bestAxis = -1;
    std::size_t bestCut = 0;
    double bestCost = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
      sort_along(h, order, box, axis);
      Moments left;
      for (std::size_t k = box.begin + 1; k < box.end; ++k) {
        left.add(h.colors[order[k - 1]], h.weights[order[k - 1]]);
        if (h.colors[order[k - 1]][axis] == h.colors[order[k]][axis]) continue;
        const double cost = left.sse() + (box.moments - left).sse();
        if (cost < bestCost) {
          bestCost = cost;
          bestAxis = axis;
          bestCut = k;
        }
      }
    }
    if (bestAxis < 0) break;
    sort_along(h, order, box, bestAxis);
    Box lo{box.begin, bestCut, box_moments(h, order, box.begin, bestCut)};
    Box hi{bestCut, box.end, box_moments(h, order, bestCut, box.end)};
    boxes[pick] = lo;
    boxes.push_back(hi);
  }
  return box_means(boxes);
}

// Median cut: split the box with the longest side at the weighted median of
// that side.
std::vector<RgbPoint> median_cut(const ColorHistogram& h, int paletteSize) {
  std::vector<std::uint32_t> order(h.colors.size());
  std::iota(order.begin(), order.end(), 0u);
  std::vector<Box> boxes{{0, order.size(), box_moments(h, order, 0, order.size())}};

  auto longest_side = [&](const Box& b, int& axis) {
    double best = -1.0;
    for (int a = 0; a < 3; ++a) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = b.begin; i < b.end; ++i) {
        lo = std::min(lo, h.colors[order[i]][a]);
        hi = std::max(hi, h.colors[order[i]][a]);
      }
      if (hi - lo > best) {
        best = hi - lo;
        axis = a;
      }
    }
    return best;
  };

  while (static_cast<int>(boxes.size()) < paletteSize) {
    std::size_t pick = boxes.size();
    int pickAxis = 0;
    double pickExtent = 0.0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (boxes[i].end - boxes[i].begin < 2) continue;
      int axis = 0;
      const double extent = longest_side(boxes[i], axis);
      if (extent > pickExtent) {
        pick = i;
        pickAxis = axis;
        pickExtent = extent;
      }
    }
    if (pick == boxes.size()) break;
    Box box = boxes[pick];
    sort_along(h, order, box, pickAxis);

    const double half = box.moments.weight / 2.0;
    double acc = 0.0;
    std::size_t cut = box.begin + 1;
    for (std::size_t k = box.begin; k < box.end; ++k) {
      acc += h.weights[order[k]];
      if (acc >= half) {
        cut = k + 1;
        break;
      }
    }
    // Keep equal values on one side; move the cut to the nearest value change.
    auto value = [&](std::size_t k) { return h.colors[order[k]][pickAxis]; };
    std::size_t best = box.begin + 1;
    std::size_t bestGap = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = box.begin + 1; k < box.end; ++k) {
      if (value(k - 1) == value(k)) continue;
      const std::size_t gap = k > cut ? k - cut : cut - k;
      if (gap < bestGap) {
        bestGap = gap;
        best = k;
      }
    }
    cut = best;

    boxes[pick] = Box{box.begin, cut, box_moments(h, order, box.begin, cut)};
    boxes.push_back(Box{cut, box.end, box_moments(h, order, cut, box.end)});
  }
  return box_means(boxes);
}

// Octree of depth 8; the reducible node with the fewest pixels is merged
// into a leaf until the leaf count fits the palette.
std::vector<RgbPoint> octree(const ColorHistogram& h, int paletteSize) {
  struct Node {
    std::array<int, 8> child;
    int parent = -1;
    int depth = 0;
    int childCount = 0;
    bool leaf = false;
    Moments moments;
  };
  std::vector<Node> nodes(1);
  nodes[0].child.fill(-1);

  auto channel = [](double c) { return static_cast<int>(std::clamp(std::floor(c), 0.0, 255.0)); };
  for (std::size_t i = 0; i < h.colors.size(); ++i) {
    const RgbPoint& c = h.colors[i];
    const int r = channel(c.r), g = channel(c.g), b = channel(c.b);
    int node = 0;
    nodes[0].moments.add(c, h.weights[i]);
    for (int level = 0; level < 8; ++level) {
      const int shift = 7 - level;
      const int slot = (((r >> shift) & 1) << 2) | (((g >> shift) & 1) << 1) | ((b >> shift) & 1);
      if (nodes[node].child[slot] < 0) {
        Node n;
        n.child.fill(-1);
        n.parent = node;
        n.depth = level + 1;
        n.leaf = level == 7;
        nodes.push_back(n);
        const int id = static_cast<int>(nodes.size() - 1);
        nodes[node].child[slot] = id;
        ++nodes[node].childCount;
      }
      node = nodes[node].child[slot];
      nodes[node].moments.add(c, h.weights[i]);
    }
  }

  std::size_t leaves = 0;
  for (const auto& n : nodes) leaves += n.leaf ? 1 : 0;

  auto reducible = [&](int id) {
    const Node& n = nodes[id];
    if (n.leaf) return false;
    for (int c : n.child)
      if (c >= 0 && !nodes[c].leaf) return false;
    return true;
  };
  using Key = std::tuple<double, int, int>;  // (pixels, -depth, id)
  std::set<Key> queue;
  for (int id = 0; id < static_cast<int>(nodes.size()); ++id)
    if (reducible(id)) queue.emplace(nodes[id].moments.weight, -nodes[id].depth, id);

  while (leaves > static_cast<std::size_t>(paletteSize) && !queue.empty()) {
    const int id = std::get<2>(*queue.begin());
    queue.erase(queue.begin());
    Node& n = nodes[id];
    leaves -= static_cast<std::size_t>(n.childCount - 1);
    n.leaf = true;
    if (n.parent >= 0 && reducible(n.parent))
      queue.emplace(nodes[n.parent].moments.weight, -nodes[n.parent].depth, n.parent);
  }

  // Collect leaves in depth-first slot order.
  std::vector<RgbPoint> out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (nodes[id].leaf) {
      out.push_back(nodes[id].moments.mean());
      continue;
    }
    for (int s = 7; s >= 0; --s)
      if (nodes[id].child[s] >= 0) stack.push_back(nodes[id].child[s]);
  }
  return out;
}

std::vector<RgbPoint> kmeans(const ColorHistogram& h, const QuantizeOptions& options) {
  std::vector<RgbPoint> centers = median_cut(h, options.paletteSize);
  std::mt19937_64 rng(options.seed);
  std::vector<std::uint32_t> label(h.colors.size());
  std::vector<double> err(h.colors.size());
  for (int iter = 0; iter < options.kmeansMaxIterations; ++iter) {
    const NearestPointIndex index(centers);
    for (std::size_t i = 0; i < h.colors.size(); ++i) {
      const auto hit = index.nearest(h.colors[i]);
      label[i] = static_cast<std::uint32_t>(hit.index);
      err[i] = hit.squaredDistance * h.weights[i];
    }
    std::vector<Moments> acc(centers.size());
    for (std::size_t i = 0; i < h.colors.size(); ++i) acc[label[i]].add(h.colors[i], h.weights[i]);

    double shift = 0.0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      RgbPoint next = centers[c];
      if (acc[c].weight > 0.0) {
        next = acc[c].mean();
      } else {
        // Empty cluster: reseed on a bin drawn with probability proportional
        // to its current error.
        std::discrete_distribution<std::size_t> pickBin(err.begin(), err.end());
        const double total = std::accumulate(err.begin(), err.end(), 0.0);
        if (total > 0.0) {
          const std::size_t b = pickBin(rng);
          next = h.colors[b];
          err[b] = 0.0;
        }
      }
      shift = std::max(shift, distance(next, centers[c]));
      centers[c] = next;
    }
    if (shift < options.kmeansEpsilon) break;
  }
  return centers;
}

}  // namespace

std::string_view to_string(QuantizerMethod method) {
  switch (method) {
    case QuantizerMethod::MinimumVariance: return "minimum-variance";
    case QuantizerMethod::MedianCut: return "median-cut";
    case QuantizerMethod::Octree: return "octree";
    case QuantizerMethod::KMeans: return "k-means";
  }
  return "unknown";
}

QuantizerMethod parse_quantizer_method(std::string_view name) {
  for (QuantizerMethod m : kAllQuantizers)
    if (to_string(m) == name) return m;
  throw UnsupportedMethod("unknown quantization method '" + std::string(name) + "'");
}

RasterImage Palette::reconstruct() const {
  std::vector<RgbPoint> px(assignment.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) px[i] = colors[assignment[i]];
  return RasterImage(width, height, std::move(px));
}

Palette quantize(const RasterImage& image, QuantizerMethod method, const QuantizeOptions& options) {
  if (image.empty()) throw DegenerateInput("cannot quantize an empty image");
  if (options.paletteSize < 1) throw ConfigError("palette size must be at least 1");

  const ColorHistogram h = build_histogram(image);
  std::vector<RgbPoint> candidates;
  if (h.colors.size() <= static_cast<std::size_t>(options.paletteSize)) {
    candidates = h.colors;
  } else {
    switch (method) {
      case QuantizerMethod::MinimumVariance: candidates = minimum_variance(h, options.paletteSize); break;
      case QuantizerMethod::MedianCut: candidates = median_cut(h, options.paletteSize); break;
      case QuantizerMethod::Octree: candidates = octree(h, options.paletteSize); break;
      case QuantizerMethod::KMeans: candidates = kmeans(h, options); break;
    }
  }

  // Final nearest-color pass, evaluated once per distinct color.
  const NearestPointIndex index(candidates);
  std::vector<std::uint32_t> binColor(h.colors.size());
  std::vector<std::uint64_t> used(candidates.size(), 0);
  for (std::size_t b = 0; b < h.colors.size(); ++b) {
    binColor[b] = static_cast<std::uint32_t>(index.nearest(h.colors[b]).index);
    used[binColor[b]] += static_cast<std::uint64_t>(h.weights[b]);
  }

  Palette p;
  p.method = method;
  p.width = image.width();
  p.height = image.height();
  std::vector<std::uint32_t> remap(candidates.size(), 0);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (used[c] == 0) continue;
    remap[c] = static_cast<std::uint32_t>(p.colors.size());
    p.colors.push_back(candidates[c]);
    p.counts.push_back(used[c]);
  }
  p.assignment.resize(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) p.assignment[i] = remap[binColor[h.binOfPixel[i]]];
  return p;
}

double ErrorHistogram::fraction_below(double limit) const {
  // Exact when limit is a bin boundary.
  double acc = 0.0;
  for (std::size_t k = 0; k < bins.size(); ++k)
    if ((static_cast<double>(k) + 1.0) * binWidth <= limit) acc += bins[k];
  return acc;
}

ErrorHistogram error_histogram(const RasterImage& image, const Palette& palette, double binWidth) {
  if (palette.assignment.size() != image.size() || palette.width != image.width() ||
      palette.height != image.height())
    throw MismatchedDimensions("palette assignment does not cover the image");
  if (!(binWidth > 0.0)) throw ConfigError("histogram bin width must be positive");

  const auto px = image.pixels();
  std::vector<double> errors(px.size());
  ErrorHistogram out;
  out.binWidth = binWidth;
  double sum = 0.0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    errors[i] = distance(px[i], palette.colors[palette.assignment[i]]);
    sum += errors[i];
    out.maxError = std::max(out.maxError, errors[i]);
  }
  out.meanError = sum / static_cast<double>(px.size());
  out.bins.assign(static_cast<std::size_t>(std::floor(out.maxError / binWidth)) + 1, 0.0);
  std::vector<std::uint64_t> tally(out.bins.size(), 0);
  for (double e : errors) ++tally[std::min(out.bins.size() - 1, static_cast<std::size_t>(std::floor(e / binWidth)))];
  for (std::size_t k = 0; k < tally.size(); ++k)
    out.bins[k] = static_cast<double>(tally[k]) / static_cast<double>(px.size());
  return out;
}

std::string palette_to_json(const Palette& palette) {
  nlohmann::ordered_json doc;
  doc["method"] = std::string(to_string(palette.method));
  doc["paletteSize"] = palette.colors.size();
  auto colors = nlohmann::ordered_json::array();
  for (const auto& c : palette.colors) colors.push_back({c.r, c.g, c.b});
  doc["colors"] = std::move(colors);
  doc["counts"] = palette.counts;
  return doc.dump(2) + "\n";
}

std::string histogram_to_csv(const ErrorHistogram& histogram) {
  std::string out = "bin_start,fraction\n";
  char line[96];
  for (std::size_t k = 0; k < histogram.bins.size(); ++k) {
    std::snprintf(line, sizeof line, "%.6g,%.12g\n", static_cast<double>(k) * histogram.binWidth, histogram.bins[k]);
    out += line;
  }
  return out;
}

}  // namespace chromacurve
