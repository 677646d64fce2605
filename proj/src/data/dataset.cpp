#include "chaosedge/data/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>

#include "chaosedge/io/format.hpp"

namespace chaosedge::data {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset) {
  return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
         (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& compressed,
                                 const std::string& name) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
    throw IdxParseError(name, "gzip stream", "inflateInit2 failed");
  }
  zs.next_in = const_cast<Bytef*>(compressed.data());
  zs.avail_in = static_cast<uInt>(compressed.size());
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[1 << 16];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk;
    zs.avail_out = sizeof chunk;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw IdxParseError(name, "gzip stream",
                          std::string("inflate failed: ") + (zs.msg ? zs.msg : "truncated data"));
    }
    out.insert(out.end(), chunk, chunk + (sizeof chunk - zs.avail_out));
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw IdxParseError(name, "gzip stream", "truncated compressed data");
    }
  }
  inflateEnd(&zs);
  return out;
}

void write_raw(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_raw(std::ifstream& in, void* p, std::size_t n, const std::string& name) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!in) throw io::IoError("truncated dataset cache " + name);
}

constexpr char kCacheMagic[4] = {'C', 'E', 'D', 'S'};
constexpr std::uint32_t kCacheVersion = 1;

}  // namespace

void Dataset::validate() const {
  if (images.rows() != labels.size()) {
    throw std::invalid_argument("dataset: image rows differ from label count");
  }
  for (double v : images.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("dataset: pixel outside [0, 1]");
  }
  for (auto l : labels) {
    if (l >= kNumClasses) throw std::invalid_argument("dataset: label outside [0, 9]");
  }
}

IdxParseError::IdxParseError(std::string file, std::string field, const std::string& detail)
    : std::runtime_error(file + ": bad " + field + ": " + detail),
      file_(std::move(file)),
      field_(std::move(field)) {}

std::vector<std::uint8_t> read_maybe_gzip(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) {
    return gunzip(bytes, path.string());
  }
  return bytes;
}

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
  const std::string img_name = images_path.string();
  const std::string lbl_name = labels_path.string();
  const auto img = read_maybe_gzip(images_path);
  const auto lbl = read_maybe_gzip(labels_path);

  if (img.size() < 16) throw IdxParseError(img_name, "image header", "file shorter than 16 bytes");
  if (read_be32(img, 0) != kImageMagic) {
    throw IdxParseError(img_name, "image magic",
                        "expected 0x00000803, got " + std::to_string(read_be32(img, 0)));
  }
  const std::size_t count = read_be32(img, 4);
  const std::size_t rows = read_be32(img, 8);
  const std::size_t cols = read_be32(img, 12);
  if (rows == 0 || cols == 0) throw IdxParseError(img_name, "image dims", "zero image size");
  const std::size_t dim = rows * cols;
  if (img.size() - 16 < count * dim) {
    throw IdxParseError(img_name, "pixel data",
                        "truncated: expected " + std::to_string(count * dim) + " bytes, found " +
                            std::to_string(img.size() - 16));
  }

  if (lbl.size() < 8) throw IdxParseError(lbl_name, "label header", "file shorter than 8 bytes");
  if (read_be32(lbl, 0) != kLabelMagic) {
    throw IdxParseError(lbl_name, "label magic",
                        "expected 0x00000801, got " + std::to_string(read_be32(lbl, 0)));
  }
  const std::size_t label_count = read_be32(lbl, 4);
  if (label_count != count) {
    throw IdxParseError(lbl_name, "label count",
                        std::to_string(label_count) + " labels for " + std::to_string(count) +
                            " images");
  }
  if (lbl.size() - 8 < label_count) {
    throw IdxParseError(lbl_name, "label data", "truncated label payload");
  }

  Dataset ds;
  ds.images = Matrix(count, dim);
  auto px = ds.images.values();
  for (std::size_t i = 0; i < count * dim; ++i) px[i] = static_cast<double>(img[16 + i]) / 255.0;
  ds.labels.assign(lbl.begin() + 8, lbl.begin() + 8 + static_cast<std::ptrdiff_t>(count));
  for (std::size_t i = 0; i < count; ++i) {
    if (ds.labels[i] >= kNumClasses) {
      throw IdxParseError(lbl_name, "label value",
                          "label " + std::to_string(ds.labels[i]) + " at index " +
                              std::to_string(i) + " is not a class id");
    }
  }
  return ds;
}

FashionMnistFiles locate_fashion_mnist(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw io::IoError("data directory not found: " + dir.string());
  }
  auto pick = [&](const std::string& stem) {
    const auto gz = dir / (stem + ".gz");
    if (std::filesystem::exists(gz)) return gz;
    const auto raw = dir / stem;
    if (std::filesystem::exists(raw)) return raw;
    throw io::IoError("missing " + stem + "[.gz] in " + dir.string());
  };
  return {pick("train-images-idx3-ubyte"), pick("train-labels-idx1-ubyte"),
          pick("t10k-images-idx3-ubyte"), pick("t10k-labels-idx1-ubyte")};
}

TrainTestSplit load_fashion_mnist(const std::filesystem::path& dir) {
  const auto files = locate_fashion_mnist(dir);
  return {load_idx(files.train_images, files.train_labels),
          load_idx(files.test_images, files.test_labels)};
}

BatchPlan plan_batches(std::size_t n_samples, std::size_t batch_size, RngStream& rng) {
  if (batch_size < 1 || batch_size > n_samples) {
    throw std::invalid_argument("plan_batches: batch size " + std::to_string(batch_size) +
                                " outside [1, " + std::to_string(n_samples) + "]");
  }
  BatchPlan plan;
  plan.batch_size = batch_size;
  plan.order.resize(n_samples);
  std::iota(plan.order.begin(), plan.order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(plan.order));
  plan.n_batches = n_samples / batch_size;
  return plan;
}

void gather(const Dataset& ds, std::span<const std::size_t> indices, Matrix& images,
            std::vector<std::uint8_t>& labels) {
  const std::size_t dim = ds.dim();
  images.resize(indices.size(), dim);
  labels.resize(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = ds.images.row(indices[r]);
    std::copy(src.begin(), src.end(), images.row(r).begin());
    labels[r] = ds.labels[indices[r]];
  }
}

Dataset subset(const Dataset& ds, std::size_t k, RngStream& rng) {
  const std::size_t s = ds.n_samples();
  if (k < 1 || k > s) {
    throw std::invalid_argument("subset: k=" + std::to_string(k) + " outside [1, " +
                                std::to_string(s) + "]");
  }
  std::vector<std::vector<std::size_t>> by_class(kNumClasses);
  for (std::size_t i = 0; i < s; ++i) by_class[ds.labels[i]].push_back(i);

  // Largest-remainder apportionment of k over the class sizes.
  std::vector<std::size_t> quota(kNumClasses);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double exact = static_cast<double>(k) * static_cast<double>(by_class[c].size()) /
                         static_cast<double>(s);
    quota[c] = static_cast<std::size_t>(exact);
    assigned += quota[c];
    remainders.emplace_back(exact - static_cast<double>(quota[c]), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < k; ++i, ++assigned) ++quota[remainders[i].second];

  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& pool = by_class[c];
    // Partial Fisher-Yates: the first quota[c] slots become the sample.
    for (std::size_t i = 0; i < quota[c]; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(quota[c]));
  }
  std::sort(chosen.begin(), chosen.end());
  Dataset out;
  gather(ds, chosen, out.images, out.labels);
  return out;
}

Dataset head(const Dataset& ds, std::size_t k) {
  k = std::min(k, ds.n_samples());
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Dataset out;
  gather(ds, idx, out.images, out.labels);
  return out;
}

void save_cache(const Dataset& ds, const std::filesystem::path& path) {
  if (path.has_parent_path()) io::ensure_directory(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io::IoError("cannot write " + path.string());
  const std::uint64_t s = ds.n_samples();
  const std::uint64_t n = ds.dim();
  write_raw(out, kCacheMagic, 4);
  write_raw(out, &kCacheVersion, sizeof kCacheVersion);
  write_raw(out, &s, sizeof s);
  write_raw(out, &n, sizeof n);
  write_raw(out, ds.images.data(), ds.images.size() * sizeof(double));
  write_raw(out, ds.labels.data(), ds.labels.size());
  if (!out) throw io::IoError("failed writing " + path.string());
}

Dataset load_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::IoError("cannot open " + path.string());
  const std::string name = path.string();
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t s = 0, n = 0;
  read_raw(in, magic, 4, name);
  if (std::memcmp(magic, kCacheMagic, 4) != 0) throw io::IoError(name + ": not a dataset cache");
  read_raw(in, &version, sizeof version, name);
  if (version != kCacheVersion) throw io::IoError(name + ": unsupported cache version");
  read_raw(in, &s, sizeof s, name);
  read_raw(in, &n, sizeof n, name);
  Dataset ds;
  ds.images = Matrix(s, n);
  ds.labels.resize(s);
  read_raw(in, ds.images.data(), s * n * sizeof(double), name);
  read_raw(in, ds.labels.data(), s, name);
  return ds;
}

}  // namespace chaosedge::data
