#pragma once

#include <cstdint>
#include <vector>

#include "rgseg/image.hpp"

namespace rgseg {

struct ComponentLabeling {
  int height = 0;
  int width = 0;
  /// Per-pixel component id, 0 for background. Ids are 1..count() in the
  /// row-major order of each component's first pixel.
  std::vector<std::int32_t> labels;
  /// sizes[id] is the pixel count of component id; sizes[0] is unused (0).
  std::vector<std::size_t> sizes;

  std::size_t count() const { return sizes.empty() ? 0 : sizes.size() - 1; }
};

/// Throws ParameterError unless connectivity is 4 or 8.
ComponentLabeling label_components(const Mask& mask, int connectivity = 8);

/// Keeps only the largest component; ties go to the smallest id.
Mask largest_component(const Mask& mask, int connectivity = 8);

}  // namespace rgseg
