#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>

#include "mnfret/error.hpp"

namespace mnfret::cli {

namespace fs = std::filesystem;

namespace {

using DigestContext = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

void digest_file(EVP_MD_CTX* ctx, const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot hash " + path.string());
  std::array<char, 1 << 16> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
}

std::string finish(EVP_MD_CTX* ctx) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md.data(), &len);
  std::string hex;
  char byte[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string sha256_files(const std::vector<fs::path>& paths) {
  DigestContext ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  for (const auto& p : paths) digest_file(ctx.get(), p);
  return finish(ctx.get());
}

std::string sha256_file(const fs::path& path) { return sha256_files({path}); }

void RunManifest::write(const fs::path& out_dir) const {
  nlohmann::ordered_json doc;
  doc["subcommand"] = subcommand;
  doc["tool_version"] = kToolVersion;
  doc["timestamp"] = utc_timestamp();
  doc["seed"] = seed;
  doc["config"] = config;
  auto entries = [](const std::vector<fs::path>& paths, const fs::path& base) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& p : paths) {
      const auto shown = base.empty() ? p.string() : fs::relative(p, base).string();
      list.push_back({{"path", shown}, {"sha256", sha256_file(p)}});
    }
    return list;
  };
  doc["inputs"] = entries(inputs, {});
  doc["outputs"] = entries(outputs, out_dir);
  std::ofstream out(out_dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write manifest in " + out_dir.string());
  out << doc.dump(2) << '\n';
}

}  // namespace mnfret::cli
