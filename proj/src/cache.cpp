#include "exseq/cache.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace exseq {

namespace {

constexpr char magic[4] = {'E', 'X', 'S', 'Q'};

std::filesystem::path cache_path(const std::string& key) {
  const char* dir = std::getenv("EXSEQ_CACHE_DIR");
  return std::filesystem::path(dir) / (key + ".bin");
}

}  // namespace

bool cache_enabled() {
  const char* dir = std::getenv("EXSEQ_CACHE_DIR");
  return dir && *dir;
}

std::string cell_key(const Mat& vertices) {
  // FNV-1a over the raw coordinate bytes
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, std::size_t n) {
    auto b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) h = (h ^ b[i]) * 1099511628211ull;
  };
  for (int i = 0; i < vertices.rows(); ++i)
    for (int j = 0; j < vertices.cols(); ++j) {
      double v = vertices(i, j);
      mix(&v, sizeof v);
    }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool cache_load(const std::string& key, std::vector<Mat>& out) {
  if (!cache_enabled()) return false;
  std::ifstream in(cache_path(key), std::ios::binary);
  if (!in) return false;
  char m[4];
  std::uint32_t ver = 0, count = 0;
  in.read(m, 4);
  in.read(reinterpret_cast<char*>(&ver), sizeof ver);
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in || std::memcmp(m, magic, 4) != 0 || ver != cache_version) return false;
  std::vector<Mat> mats(count);
  for (auto& a : mats) {
    std::int64_t r = 0, c = 0;
    in.read(reinterpret_cast<char*>(&r), sizeof r);
    in.read(reinterpret_cast<char*>(&c), sizeof c);
    if (!in || r < 0 || c < 0 || r * c > (std::int64_t(1) << 28)) return false;
    a.resize(r, c);
    in.read(reinterpret_cast<char*>(a.data()), static_cast<std::streamsize>(r * c * sizeof(double)));
    if (!in) return false;
  }
  out = std::move(mats);
  return true;
}

void cache_store(const std::string& key, const std::vector<Mat>& mats) {
  if (!cache_enabled()) return;
  std::error_code ec;
  auto path = cache_path(key);
  std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) return;
    std::uint32_t ver = cache_version, count = static_cast<std::uint32_t>(mats.size());
    os.write(magic, 4);
    os.write(reinterpret_cast<const char*>(&ver), sizeof ver);
    os.write(reinterpret_cast<const char*>(&count), sizeof count);
    for (const auto& a : mats) {
      std::int64_t r = a.rows(), c = a.cols();
      os.write(reinterpret_cast<const char*>(&r), sizeof r);
      os.write(reinterpret_cast<const char*>(&c), sizeof c);
      os.write(reinterpret_cast<const char*>(a.data()), static_cast<std::streamsize>(r * c * sizeof(double)));
    }
    if (!os) return;
  }
  std::filesystem::rename(tmp, path, ec);
}

}  // namespace exseq
