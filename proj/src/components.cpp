#include "rgseg/components.hpp"

#include "rgseg/error.hpp"

namespace rgseg {

ComponentLabeling label_components(const Mask& mask, int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw ParameterError("connectivity must be 4 or 8");
  }
  const int h = mask.height();
  const int w = mask.width();
  ComponentLabeling out{h, w, std::vector<std::int32_t>(mask.size(), 0), {0}};
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask.data()[start] || out.labels[start] != 0) continue;
    const auto id = static_cast<std::int32_t>(out.sizes.size());
    std::size_t size = 0;
    out.labels[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      ++size;
      const int r = static_cast<int>(idx / w);
      const int c = static_cast<int>(idx % w);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          if (connectivity == 4 && dr != 0 && dc != 0) continue;
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
          const std::size_t n = static_cast<std::size_t>(rr) * w + cc;
          if (mask.data()[n] && out.labels[n] == 0) {
            out.labels[n] = id;
            stack.push_back(n);
          }
        }
      }
    }
    out.sizes.push_back(size);
  }
  return out;
}

Mask largest_component(const Mask& mask, int connectivity) {
  const ComponentLabeling labels = label_components(mask, connectivity);
  std::size_t best = 0;
  for (std::size_t id = 1; id < labels.sizes.size(); ++id) {
    if (best == 0 || labels.sizes[id] > labels.sizes[best]) best = id;
  }
  std::vector<std::uint8_t> bits(mask.size(), 0);
  if (best != 0) {
    for (std::size_t i = 0; i < bits.size(); ++i) {
      bits[i] = labels.labels[i] == static_cast<std::int32_t>(best);
    }
  }
  return Mask(mask.height(), mask.width(), std::move(bits));
}

}  // namespace rgseg
