#pragma once

#include <sys/wait.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#ifndef CHAOSEDGE_TEST_DATA_DIR
#define CHAOSEDGE_TEST_DATA_DIR ""
#endif

namespace chaosedge::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "chaosedge-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path data_dir() {
  if (const char* env = std::getenv("CHAOSEDGE_DATA_DIR"); env && *env) return env;
  return CHAOSEDGE_TEST_DATA_DIR;
}

inline bool have_data() {
  const auto d = data_dir();
  std::error_code ec;
  return !d.empty() && std::filesystem::is_directory(d, ec);
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

inline CommandResult run_command(const std::string& cmd) {
  CommandResult r;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed: " + cmd);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Regular files under `a` and `b` (relative paths, excluding any named
/// `skip`) that are missing on one side or differ in content.
inline std::vector<std::string> tree_differences(const std::filesystem::path& a,
                                                 const std::filesystem::path& b,
                                                 const std::string& skip = "run.log") {
  namespace fs = std::filesystem;
  std::vector<std::string> diffs;
  auto walk = [&](const fs::path& root, const fs::path& other) {
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (!e.is_regular_file() || e.path().filename() == skip) continue;
      const auto rel = fs::relative(e.path(), root);
      if (!fs::exists(other / rel)) {
        diffs.push_back(rel.string() + " (missing)");
      } else if (&root == &a && slurp(e.path()) != slurp(other / rel)) {
        diffs.push_back(rel.string());
      }
    }
  };
  walk(a, b);
  walk(b, a);
  return diffs;
}

inline std::size_t count_files(const std::filesystem::path& root, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().extension() == ext) ++n;
  return n;
}

/// Raw IDX pair of 28x28 images in `dir` named <stem>-images-idx3-ubyte and
/// <stem>-labels-idx1-ubyte. Labels cycle 0..9; the image of class k has a
/// bright 4x4 block at a class-dependent spot over low uniform noise.
inline void write_idx_pair(const std::filesystem::path& dir, const std::string& images_name,
                           const std::string& labels_name, std::size_t n, std::uint32_t seed) {
  auto be32 = [](std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
  };
  std::vector<std::uint8_t> img, lbl;
  be32(img, 0x803);
  be32(img, static_cast<std::uint32_t>(n));
  be32(img, 28);
  be32(img, 28);
  be32(lbl, 0x801);
  be32(lbl, static_cast<std::uint32_t>(n));
  std::uint32_t state = seed * 2654435761u + 1u;
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<std::uint8_t>(i % 10);
    lbl.push_back(label);
    for (std::size_t r = 0; r < 28; ++r) {
      for (std::size_t c = 0; c < 28; ++c) {
        state = state * 1664525u + 1013904223u;
        const bool lit = r / 4 == 1 + label / 5 * 3u && c / 4 == 1u + label % 5;
        img.push_back(lit ? 255 : static_cast<std::uint8_t>(state >> 27));
      }
    }
  }
  std::ofstream(dir / images_name, std::ios::binary)
      .write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
  std::ofstream(dir / labels_name, std::ios::binary)
      .write(reinterpret_cast<const char*>(lbl.data()), static_cast<std::streamsize>(lbl.size()));
}

/// A miniature Fashion-MNIST directory (uncompressed files).
inline void write_tiny_fashion_mnist(const std::filesystem::path& dir, std::size_t n_train,
                                     std::size_t n_test) {
  std::filesystem::create_directories(dir);
  write_idx_pair(dir, "train-images-idx3-ubyte", "train-labels-idx1-ubyte", n_train, 1);
  write_idx_pair(dir, "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte", n_test, 2);
}

}  // namespace chaosedge::test
