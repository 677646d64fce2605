#include "chaosedge/model/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "chaosedge/io/format.hpp"
#include "chaosedge/numerics/kernels.hpp"
#include "chaosedge/numerics/stats.hpp"

namespace chaosedge::model {

namespace {

void check_input(const NetworkParams& params, const Matrix& x) {
  if (x.cols() != params.n_units()) {
    throw ShapeError("network input has " + std::to_string(x.cols()) + " features, expected " +
                     std::to_string(params.n_units()));
  }
}

void check_labels(const NetworkParams& params, const Matrix& x,
                  std::span<const std::uint8_t> labels) {
  if (labels.size() != x.rows()) {
    throw ShapeError("label count " + std::to_string(labels.size()) + " differs from batch size " +
                     std::to_string(x.rows()));
  }
  for (auto l : labels) {
    if (l >= params.n_classes()) {
      throw std::invalid_argument("label " + std::to_string(l) + " outside [0, " +
                                  std::to_string(params.n_classes()) + ")");
    }
  }
}

double log_prob(double p) { return std::log(std::max(p, std::numeric_limits<double>::min())); }

constexpr char kCheckpointMagic[4] = {'C', 'E', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

void write_matrix(std::ofstream& out, const Matrix& m) {
  const std::uint64_t r = m.rows(), c = m.cols();
  out.write(reinterpret_cast<const char*>(&r), sizeof r);
  out.write(reinterpret_cast<const char*>(&c), sizeof c);
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Matrix read_matrix(std::ifstream& in, const std::string& name) {
  std::uint64_t r = 0, c = 0;
  in.read(reinterpret_cast<char*>(&r), sizeof r);
  in.read(reinterpret_cast<char*>(&c), sizeof c);
  if (!in || r * c > (std::uint64_t{1} << 32)) throw io::IoError(name + ": bad matrix header");
  Matrix m(r, c);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!in) throw io::IoError(name + ": truncated matrix data");
  return m;
}

}  // namespace

void softmax_rows(Matrix& logits) {
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    const double m = *std::max_element(row.begin(), row.end());
    double s = 0.0;
    for (double& v : row) {
      v = std::exp(v - m);
      s += v;
    }
    for (double& v : row) v /= s;
  }
}

void NetworkParams::validate() const {
  if (!w_hidden.is_square() || w_out.cols() != w_hidden.rows()) {
    throw ShapeError("network shapes inconsistent: hidden " + shape_string(w_hidden) +
                     ", output " + shape_string(w_out));
  }
  if (!w_hidden.all_finite() || !w_out.all_finite()) {
    throw std::domain_error("network weights contain non-finite values");
  }
}

NetworkParams init_network(std::size_t n_units, std::size_t n_classes, const InitSpec& spec,
                           RngStream& rng) {
  if (n_units == 0 || n_classes == 0) throw std::invalid_argument("init_network: empty layer");
  if (!(spec.j >= 0.0)) throw std::invalid_argument("init_network: J must be >= 0");
  if (!std::isfinite(spec.j0) || !std::isfinite(spec.j)) {
    throw std::invalid_argument("init_network: J0 and J must be finite");
  }
  const double n = static_cast<double>(n_units);
  const double out_std = spec.out_std.value_or(1.0 / std::sqrt(n));
  if (!(out_std >= 0.0)) throw std::invalid_argument("init_network: out_std must be >= 0");
  NetworkParams p;
  p.w_hidden = gaussian_matrix(n_units, n_units, spec.j0 / n, spec.j / std::sqrt(n), rng);
  p.w_out = gaussian_matrix(n_classes, n_units, 0.0, out_std, rng);
  return p;
}

void forward_into(const NetworkParams& params, const Matrix& x, ForwardCache& cache) {
  check_input(params, x);
  cache.x = x;
  kernels::matmul_abt(x, params.w_hidden, cache.h);
  kernels::tanh_inplace(cache.h.values());
  kernels::matmul_abt(cache.h, params.w_out, cache.p);
  softmax_rows(cache.p);
}

ForwardCache forward(const NetworkParams& params, const Matrix& x) {
  ForwardCache cache;
  forward_into(params, x, cache);
  return cache;
}

double loss_and_grads_into(const NetworkParams& params, const Matrix& x,
                           std::span<const std::uint8_t> labels, ForwardCache& cache,
                           Gradients& grads, BackpropScratch& scratch) {
  check_labels(params, x, labels);
  forward_into(params, x, cache);
  const std::size_t b = x.rows();
  const double inv_b = 1.0 / static_cast<double>(b);

  double loss = 0.0;
  scratch.d_logits = cache.p;
  for (std::size_t r = 0; r < b; ++r) {
    loss -= log_prob(cache.p(r, labels[r]));
    scratch.d_logits(r, labels[r]) -= 1.0;
  }
  for (double& v : scratch.d_logits.values()) v *= inv_b;

  kernels::matmul_atb(scratch.d_logits, cache.h, grads.g_out);
  kernels::matmul_into(scratch.d_logits, params.w_out, scratch.d_h);
  auto dh = scratch.d_h.values();
  const auto h = cache.h.values();
  for (std::size_t i = 0; i < dh.size(); ++i) dh[i] *= 1.0 - h[i] * h[i];
  kernels::matmul_atb(scratch.d_h, x, grads.g_hidden);
  return loss * inv_b;
}

LossAndGrads loss_and_grads(const NetworkParams& params, const Matrix& x,
                            std::span<const std::uint8_t> labels) {
  LossAndGrads out;
  BackpropScratch scratch;
  out.loss = loss_and_grads_into(params, x, labels, out.cache, out.grads, scratch);
  return out;
}

Evaluation evaluate(const NetworkParams& params, const data::Dataset& ds, std::size_t batch,
                    int workers) {
  const std::size_t s = ds.n_samples();
  if (s == 0) throw std::invalid_argument("evaluate: empty dataset");
  if (batch == 0) throw std::invalid_argument("evaluate: batch must be positive");
  const std::size_t chunks = (s + batch - 1) / batch;
  std::vector<double> loss_sum(chunks, 0.0);
  std::vector<std::size_t> correct(chunks, 0);

#pragma omp parallel for schedule(static) num_threads(kernels::resolve_workers(workers))
  for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(chunks); ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    const std::size_t begin = c * batch;
    const std::size_t end = std::min(s, begin + batch);
    std::vector<std::size_t> idx(end - begin);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
    Matrix x;
    std::vector<std::uint8_t> labels;
    data::gather(ds, idx, x, labels);
    const auto cache = forward(params, x);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const auto row = cache.p.row(r);
      loss_sum[c] -= log_prob(row[labels[r]]);
      const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
      if (best == labels[r]) ++correct[c];
    }
  }
  Evaluation e;
  std::size_t hits = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    e.loss += loss_sum[c];
    hits += correct[c];
  }
  e.loss /= static_cast<double>(s);
  e.accuracy = static_cast<double>(hits) / static_cast<double>(s);
  return e;
}

void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params,
                     const SeedLineage& lineage) {
  if (path.has_parent_path()) io::ensure_directory(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io::IoError("cannot write checkpoint " + path.string());
  out.write(kCheckpointMagic, 4);
  out.write(reinterpret_cast<const char*>(&kCheckpointVersion), sizeof kCheckpointVersion);
  out.write(reinterpret_cast<const char*>(&lineage.seed), sizeof lineage.seed);
  out.write(reinterpret_cast<const char*>(&lineage.epoch), sizeof lineage.epoch);
  write_matrix(out, params.w_hidden);
  write_matrix(out, params.w_out);
  if (!out) throw io::IoError("failed writing checkpoint " + path.string());
}

std::pair<NetworkParams, SeedLineage> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::IoError("cannot open checkpoint " + path.string());
  const std::string name = path.string();
  char magic[4];
  std::uint32_t version = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0) throw io::IoError(name + ": not a checkpoint");
  if (version != kCheckpointVersion) throw io::IoError(name + ": unsupported checkpoint version");
  SeedLineage lineage;
  in.read(reinterpret_cast<char*>(&lineage.seed), sizeof lineage.seed);
  in.read(reinterpret_cast<char*>(&lineage.epoch), sizeof lineage.epoch);
  NetworkParams p;
  p.w_hidden = read_matrix(in, name);
  p.w_out = read_matrix(in, name);
  p.validate();
  return {std::move(p), lineage};
}

}  // namespace chaosedge::model
