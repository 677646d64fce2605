#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chaosedge::io {

/// Locale-independent "%.12g"; non-finite values print as nan / inf / -inf.
std::string fmt(double v);
/// Full round-trip precision ("%.17g").
std::string fmt_exact(double v);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);
void ensure_directory(const std::filesystem::path& dir);

}  // namespace chaosedge::io
