#include "mnfret/features.hpp"

#include <algorithm>

#include "mnfret/error.hpp"

namespace mnfret {

namespace {

std::size_t pad_index(std::ptrdiff_t index, std::size_t size, Padding padding) {
  const auto n = static_cast<std::ptrdiff_t>(size);
  if (index >= 0 && index < n) return static_cast<std::size_t>(index);
  if (padding == Padding::replicate) return index < 0 ? 0 : size - 1;
  return static_cast<std::size_t>(index < 0 ? -index : 2 * (n - 1) - index);
}

}  // namespace

std::vector<Offset> canonical_offsets(std::size_t window) {
  const int r = static_cast<int>(window / 2);
  std::vector<Offset> offsets;
  offsets.reserve(window * window);
  for (int dr = -r; dr <= r; ++dr) {
    for (int dc = -r; dc <= r; ++dc) offsets.push_back({dr, dc});
  }
  return offsets;
}

DesignMatrix extract_neighborhood(const ScoreCube& scores, std::size_t window, Padding padding) {
  if (window == 0 || window % 2 == 0) {
    throw UsageError("neighborhood window must be odd and positive, got " + std::to_string(window));
  }
  if (window > std::min(scores.rows(), scores.cols())) {
    throw UsageError("neighborhood window " + std::to_string(window) + " exceeds the " +
                     std::to_string(scores.rows()) + "x" + std::to_string(scores.cols()) + " grid");
  }
  const std::size_t k = scores.components();
  DesignMatrix out;
  out.window = window;
  out.components = k;
  out.offsets = canonical_offsets(window);
  const std::size_t width = k * out.offsets.size();
  out.values.resize(static_cast<Eigen::Index>(scores.pixels()), static_cast<Eigen::Index>(width));
  out.coords.reserve(scores.pixels());

  for (std::size_t r = 0; r < scores.rows(); ++r) {
    for (std::size_t c = 0; c < scores.cols(); ++c) {
      const std::size_t i = r * scores.cols() + c;
      double* dst = out.values.data() + i * width;
      for (const auto& off : out.offsets) {
        const auto rr = pad_index(static_cast<std::ptrdiff_t>(r) + off.drow, scores.rows(), padding);
        const auto cc = pad_index(static_cast<std::ptrdiff_t>(c) + off.dcol, scores.cols(), padding);
        const auto src = scores.pixel(rr, cc);
        dst = std::copy(src.begin(), src.end(), dst);
      }
      out.coords.push_back({r, c});
    }
  }
  return out;
}

DesignMatrix stack_rows(std::span<const DesignMatrix> parts) {
  if (parts.empty()) throw UsageError("nothing to stack");
  DesignMatrix out;
  out.window = parts.front().window;
  out.components = parts.front().components;
  out.offsets = parts.front().offsets;
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    if (p.window != out.window || p.components != out.components) {
      throw UsageError("design matrices disagree on window or component count");
    }
    total += p.values.rows();
  }
  out.values.resize(total, parts.front().values.cols());
  Eigen::Index row = 0;
  for (const auto& p : parts) {
    out.values.middleRows(row, p.values.rows()) = p.values;
    row += p.values.rows();
    out.coords.insert(out.coords.end(), p.coords.begin(), p.coords.end());
  }
  return out;
}

}  // namespace mnfret
