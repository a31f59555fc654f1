#pragma once

// Little-endian float64 payloads and JSON sidecars shared by the cube, basis
// and model formats.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mnfret/error.hpp"

namespace mnfret::detail {

inline std::uint64_t to_little_endian(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    return __builtin_bswap64(bits);
  }
  return bits;
}

inline void write_f64_payload(const std::filesystem::path& path, std::span<const double> values) {
  std::vector<char> buffer(values.size() * sizeof(double));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(values[i]));
    std::memcpy(buffer.data() + i * sizeof(double), &bits, sizeof(bits));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<double> read_f64_payload(const std::filesystem::path& path,
                                            std::size_t expected_count) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("missing payload: " + path.string());
  if (size != expected_count * sizeof(double)) {
    throw IoError("payload size mismatch in " + path.string() + ": header declares " +
                  std::to_string(expected_count) + " values (" +
                  std::to_string(expected_count * sizeof(double)) + " bytes), file holds " +
                  std::to_string(size) + " bytes");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::vector<char> buffer(size);
  in.read(buffer.data(), static_cast<std::streamsize>(size));
  if (!in) throw IoError("short read: " + path.string());
  std::vector<double> values(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, buffer.data() + i * sizeof(double), sizeof(bits));
    values[i] = std::bit_cast<double>(to_little_endian(bits));
  }
  return values;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("missing header: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

/// Throws IoError naming the first non-finite value.
inline void require_finite(std::span<const double> values, const std::string& what) {
  std::size_t bad = 0;
  std::size_t first = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      if (bad == 0) first = i;
      ++bad;
    }
  }
  if (bad > 0) {
    throw IoError(what + ": " + std::to_string(bad) + " non-finite value(s), first at index " +
                  std::to_string(first));
  }
}

}  // namespace mnfret::detail
