#include "chaosedge/data/checksums.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <fstream>
#include <memory>
#include <sstream>

#include "chaosedge/io/format.hpp"

namespace chaosedge::data {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::IoError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest init failed");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

std::vector<ChecksumEntry> parse_checksum_manifest(const std::string& text) {
  std::vector<ChecksumEntry> entries;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    ChecksumEntry e;
    if (!(fields >> e.digest >> e.filename)) continue;
    if (!e.filename.empty() && e.filename.front() == '*') e.filename.erase(0, 1);
    for (char& c : e.digest) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    entries.push_back(std::move(e));
  }
  return entries;
}

ChecksumReport verify_checksums(const std::filesystem::path& data_dir,
                                const std::vector<ChecksumEntry>& expected) {
  ChecksumReport report;
  for (const auto& e : expected) {
    const auto path = data_dir / e.filename;
    if (!std::filesystem::exists(path)) {
      report.missing.push_back(e.filename);
    } else if (sha256_file(path) != e.digest) {
      report.mismatched.push_back(e.filename);
    } else {
      report.ok.push_back(e.filename);
    }
  }
  return report;
}

}  // namespace chaosedge::data
