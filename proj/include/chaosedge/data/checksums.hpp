#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace chaosedge::data {

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct ChecksumEntry {
  std::string digest;
  std::string filename;
};

/// Parses `sha256sum`-style lines: "<64 hex>  <filename>". '#' starts a comment.
std::vector<ChecksumEntry> parse_checksum_manifest(const std::string& text);

struct ChecksumReport {
  std::vector<std::string> ok;
  std::vector<std::string> mismatched;
  std::vector<std::string> missing;
  bool passed() const noexcept { return mismatched.empty() && missing.empty(); }
};

ChecksumReport verify_checksums(const std::filesystem::path& data_dir,
                                const std::vector<ChecksumEntry>& expected);

}  // namespace chaosedge::data
