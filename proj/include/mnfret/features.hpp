#pragma once

#include <span>
#include <string>
#include <vector>

#include "mnfret/cube.hpp"

namespace mnfret {

enum class Padding { mirror, replicate };

struct Offset {
  int drow = 0;
  int dcol = 0;
  friend bool operator==(const Offset&, const Offset&) = default;
};

struct PixelCoord {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Column layout of every design matrix: offsets scanned row-major from
/// (-r,-r) to (r,r), the k components of one offset contiguous.
inline constexpr const char* kOffsetOrdering = "offset-major,row-scan,components-contiguous";

std::vector<Offset> canonical_offsets(std::size_t window);

struct DesignMatrix {
  /// samples x (components * window^2)
  RowMatrix values;
  std::size_t window = 1;
  std::size_t components = 0;
  std::vector<Offset> offsets;
  std::vector<PixelCoord> coords;
  std::string ordering = kOffsetOrdering;

  std::size_t samples() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t features() const { return static_cast<std::size_t>(values.cols()); }
};

/// One row per pixel in scan order. Neighbours outside the grid come from
/// mirror padding (reflection without repeating the edge) unless `padding`
/// says otherwise.
DesignMatrix extract_neighborhood(const ScoreCube& scores, std::size_t window,
                                  Padding padding = Padding::mirror);

/// Concatenates the rows of several design matrices built with the same layout.
DesignMatrix stack_rows(std::span<const DesignMatrix> parts);

}  // namespace mnfret
