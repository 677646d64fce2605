#include "chaosedge/train/trainer.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "chaosedge/io/format.hpp"
#include "chaosedge/numerics/stats.hpp"

namespace chaosedge::train {

namespace {

using nlohmann::json;

void update(Matrix& w, Matrix& v, const Matrix& g, double alpha, double eta, double decay) {
  require_same_shape(w, g, "sgd_momentum_step: weights vs gradient");
  require_same_shape(w, v, "sgd_momentum_step: weights vs velocity");
  auto wv = w.values();
  auto vv = v.values();
  const auto gv = g.values();
  for (std::size_t i = 0; i < wv.size(); ++i) {
    vv[i] = alpha * vv[i] - eta * (gv[i] + decay * wv[i]);
    wv[i] += vv[i];
  }
}

EpochRecord make_record(std::size_t epoch, const model::NetworkParams& params, double train_loss,
                        const model::Evaluation& test) {
  const auto st = weight_stats(params.w_hidden);
  return {epoch, st.j0, st.j, st.j_squared, train_loss, test.loss, test.accuracy};
}

}  // namespace

void HyperParams::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be finite and >= 0");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in [0, 1)");
  if (batch == 0) throw std::invalid_argument("batch must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
}

Velocity zero_velocity(const model::NetworkParams& params) {
  return {Matrix(params.w_hidden.rows(), params.w_hidden.cols()),
          Matrix(params.w_out.rows(), params.w_out.cols())};
}

void sgd_momentum_step(model::NetworkParams& params, Velocity& velocity,
                       const model::Gradients& grads, const HyperParams& hyper) {
  const double decay = 2.0 * hyper.lambda;
  update(params.w_hidden, velocity.v_hidden, grads.g_hidden, hyper.alpha, hyper.eta, decay);
  update(params.w_out, velocity.v_out, grads.g_out, hyper.alpha, hyper.eta, decay);
}

double scale_factor(const HyperParams& hyper) {
  return hyper.eta / ((1.0 - hyper.alpha) * static_cast<double>(hyper.batch));
}

double noise_scale(const HyperParams& hyper, std::size_t n_samples) {
  if (n_samples == 0) throw std::invalid_argument("noise_scale: sample count must be >= 1");
  return scale_factor(hyper) * static_cast<double>(n_samples);
}

DivergenceError::DivergenceError(std::size_t epoch, std::size_t step)
    : std::runtime_error("training diverged: non-finite loss at epoch " + std::to_string(epoch) +
                         ", step " + std::to_string(step)),
      epoch_(epoch),
      step_(step) {}

std::size_t argmin_test_loss(const std::vector<EpochRecord>& records) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].test_loss < records[best].test_loss) best = i;
  }
  return best;
}

TrainingRun train(const data::Dataset& train_set, const data::Dataset& test_set,
                  const HyperParams& hyper, const TrainOptions& options) {
  hyper.validate();
  train_set.validate();
  test_set.validate();
  if (train_set.dim() != test_set.dim()) throw ShapeError("train/test feature dimensions differ");
  if (hyper.batch > train_set.n_samples()) {
    throw std::invalid_argument("batch " + std::to_string(hyper.batch) + " exceeds training set size " +
                                std::to_string(train_set.n_samples()));
  }

  TrainingRun run;
  run.hyper = hyper;
  run.init = options.init;
  run.n_train = train_set.n_samples();
  run.scale_factor = scale_factor(hyper);
  run.noise_scale = noise_scale(hyper, train_set.n_samples());

  RngStream init_rng(hyper.seed, 0);
  RngStream shuffle_rng(hyper.seed, 1);
  auto params = model::init_network(train_set.dim(), data::kNumClasses, options.init, init_rng);
  auto velocity = zero_velocity(params);

  auto eval = [&](const data::Dataset& ds) {
    return model::evaluate(params, ds, options.eval_batch, options.eval_workers);
  };
  auto push = [&](EpochRecord rec) {
    run.records.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
  };

  push(make_record(0, params, eval(train_set).loss, eval(test_set)));
  if (options.keep_best_params) run.best_params = params;

  model::ForwardCache cache;
  model::Gradients grads;
  model::BackpropScratch scratch;
  Matrix xb;
  std::vector<std::uint8_t> yb;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= hyper.epochs; ++epoch) {
    const auto plan = data::plan_batches(train_set.n_samples(), hyper.batch, shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t step = 0; step < plan.n_batches; ++step) {
      data::gather(train_set, plan.batch(step), xb, yb);
      const double loss = model::loss_and_grads_into(params, xb, yb, cache, grads, scratch);
      if (!std::isfinite(loss)) throw DivergenceError(epoch, step);
      loss_sum += loss;
      sgd_momentum_step(params, velocity, grads, hyper);
      if (options.step_stats_every > 0 && (step + 1) % options.step_stats_every == 0) {
        const auto st = weight_stats(params.w_hidden);
        run.step_records.push_back({epoch, step + 1, st.j0, st.j_squared});
      }
    }
    push(make_record(epoch, params, loss_sum / static_cast<double>(plan.n_batches), eval(test_set)));

    const std::size_t best = argmin_test_loss(run.records);
    if (best == epoch) {
      since_best = 0;
      if (options.keep_best_params) run.best_params = params;
    } else {
      ++since_best;
    }
    if (options.stop_at_j2 && run.records.back().j_squared >= *options.stop_at_j2 &&
        since_best >= options.patience) {
      run.stopped_early = epoch < hyper.epochs;
      break;
    }
  }

  run.optimal_epoch = run.records[argmin_test_loss(run.records)].epoch;
  run.final_params = std::move(params);
  return run;
}

std::string run_csv(const TrainingRun& run) {
  std::ostringstream out;
  out << kRunCsvHeader << '\n';
  for (const auto& r : run.records) {
    out << r.epoch << ',' << io::fmt_exact(r.j0) << ',' << io::fmt_exact(r.j) << ','
        << io::fmt_exact(r.j_squared) << ',' << io::fmt_exact(r.train_loss) << ','
        << io::fmt_exact(r.test_loss) << ',' << io::fmt_exact(r.test_accuracy) << '\n';
  }
  return out.str();
}

std::string run_json(const TrainingRun& run) {
  json j;
  j["hyper"] = {{"eta", run.hyper.eta},       {"alpha", run.hyper.alpha},
                {"batch", run.hyper.batch},   {"lambda", run.hyper.lambda},
                {"epochs", run.hyper.epochs}, {"seed", run.hyper.seed}};
  j["init"] = {{"j0", run.init.j0}, {"j", run.init.j}};
  if (run.init.out_std) j["init"]["out_std"] = *run.init.out_std;
  j["n_train"] = run.n_train;
  j["epochs_completed"] = run.records.empty() ? 0 : run.records.back().epoch;
  j["stopped_early"] = run.stopped_early;
  j["scale_factor"] = run.scale_factor;
  j["noise_scale"] = run.noise_scale;
  j["optimal_epoch"] = run.optimal_epoch;
  if (!run.records.empty()) {
    const auto& best = run.records.at(argmin_test_loss(run.records));
    j["optimal"] = {{"j0", best.j0},
                    {"j", best.j},
                    {"test_loss", best.test_loss},
                    {"test_accuracy", best.test_accuracy}};
  }
  return j.dump(2) + "\n";
}

void write_run(const std::filesystem::path& dir, const TrainingRun& run) {
  io::ensure_directory(dir);
  io::write_text_file(dir / "run.csv", run_csv(run));
  io::write_text_file(dir / "run.json", run_json(run));
  if (!run.step_records.empty()) {
    std::ostringstream out;
    out << "epoch,step,j0,j_squared\n";
    for (const auto& s : run.step_records) {
      out << s.epoch << ',' << s.step << ',' << io::fmt_exact(s.j0) << ','
          << io::fmt_exact(s.j_squared) << '\n';
    }
    io::write_text_file(dir / "steps.csv", out.str());
  }
}

TrainingRun read_run(const std::filesystem::path& dir) {
  TrainingRun run;
  const auto meta = json::parse(io::read_text_file(dir / "run.json"));
  const auto& h = meta.at("hyper");
  run.hyper.eta = h.at("eta").get<double>();
  run.hyper.alpha = h.at("alpha").get<double>();
  run.hyper.batch = h.at("batch").get<std::size_t>();
  run.hyper.lambda = h.at("lambda").get<double>();
  run.hyper.epochs = h.at("epochs").get<std::size_t>();
  run.hyper.seed = h.at("seed").get<std::uint64_t>();
  run.init.j0 = meta.at("init").at("j0").get<double>();
  run.init.j = meta.at("init").at("j").get<double>();
  if (meta.at("init").contains("out_std")) run.init.out_std = meta["init"]["out_std"].get<double>();
  run.n_train = meta.at("n_train").get<std::size_t>();
  run.stopped_early = meta.at("stopped_early").get<bool>();
  run.scale_factor = meta.at("scale_factor").get<double>();
  run.noise_scale = meta.at("noise_scale").get<double>();
  run.optimal_epoch = meta.at("optimal_epoch").get<std::size_t>();

  std::istringstream csv(io::read_text_file(dir / "run.csv"));
  std::string line;
  std::getline(csv, line);
  if (line != kRunCsvHeader) throw io::IoError((dir / "run.csv").string() + ": unexpected header");
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    EpochRecord r;
    char c = 0;
    fields >> r.epoch >> c >> r.j0 >> c >> r.j >> c >> r.j_squared >> c >> r.train_loss >> c >>
        r.test_loss >> c >> r.test_accuracy;
    if (fields.fail()) throw io::IoError((dir / "run.csv").string() + ": malformed row: " + line);
    run.records.push_back(r);
  }
  return run;
}

}  // namespace chaosedge::train
