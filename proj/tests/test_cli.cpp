#include <doctest.h>

#include <filesystem>
#include <string>

#include <json.hpp>

#include "test_support.hpp"

using namespace chaosedge;
namespace fs = std::filesystem;

#ifndef CHAOSEDGE_CLI
#error "CHAOSEDGE_CLI must name the command-line executable"
#endif

namespace {

test::CommandResult cli(const std::string& args) {
  return test::run_command(std::string("'") + CHAOSEDGE_CLI + "' " + args);
}

// Shared miniature dataset: 200 training and 100 test images.
const fs::path& tiny_data() {
  static test::TempDir dir;
  static const bool made = (test::write_tiny_fashion_mnist(dir / "fm", 200, 100), true);
  (void)made;
  static const fs::path path = dir / "fm";
  return path;
}

std::string data_flags() { return "--data-dir '" + tiny_data().string() + "' "; }

// Runs `args` with --workers 1 and --workers 2 into separate roots and
// returns the differing files.
std::vector<std::string> worker_differences(const std::string& args) {
  test::TempDir out;
  const auto a = cli(args + " --workers 1 --out '" + (out / "w1").string() + "'");
  const auto b = cli(args + " --workers 2 --out '" + (out / "w2").string() + "'");
  REQUIRE_MESSAGE(a.exit_code == 0, a.output);
  REQUIRE_MESSAGE(b.exit_code == 0, b.output);
  CHECK(test::count_files(out / "w1", ".csv") + test::count_files(out / "w1", ".json") > 0);
  return test::tree_differences(out / "w1", out / "w2");
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("single-point criterion at the anchor") {
    const auto r = cli("phase-map --single-point --j0 0 --j 1");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("criterion 1") != std::string::npos);
  }

  TEST_CASE("print-config emits the effective configuration") {
    const auto r = cli("train --print-config --eta 0.02 --batch 16");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j.at("eta").get<double>() == 0.02);
    CHECK(j.at("batch").get<int>() == 16);
  }

  TEST_CASE("config files: values apply, flags win, unknown keys fail") {
    test::TempDir dir;
    {
      std::ofstream(dir / "ok.json") << R"({"eta": 0.03, "alpha": 0.5})";
      std::ofstream(dir / "bad.json") << R"({"etaa": 0.03})";
      std::ofstream(dir / "broken.json") << "{";
    }
    const auto ok = cli("train --print-config --config '" + (dir / "ok.json").string() + "' --alpha 0.25");
    REQUIRE(ok.exit_code == 0);
    const auto j = nlohmann::json::parse(ok.output);
    CHECK(j.at("eta").get<double>() == 0.03);
    CHECK(j.at("alpha").get<double>() == 0.25);
    CHECK(cli("train --print-config --config '" + (dir / "bad.json").string() + "'").exit_code == 2);
    CHECK(cli("train --print-config --config '" + (dir / "broken.json").string() + "'").exit_code == 2);
    CHECK(cli("train --print-config --config '" + (dir / "none.json").string() + "'").exit_code == 2);
  }

  TEST_CASE("usage and data errors exit with 2") {
    CHECK(cli("train --eta").exit_code == 2);
    CHECK(cli("no-such-command").exit_code == 2);
    test::TempDir out;
    const auto r = cli("train --data-dir /nonexistent/fm --epochs 1 --out '" + out.path().string() + "'");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("/nonexistent/fm") != std::string::npos);
    CHECK(cli("train " + data_flags() + "--alpha 1.5 --epochs 1 --out '" + out.path().string() + "'").exit_code == 2);
  }

  TEST_CASE("checksum mismatch exits with 3, missing files with 2") {
    test::TempDir dir;
    test::write_tiny_fashion_mnist(dir / "fm", 20, 10);
    std::ofstream(dir / "bad.sha256")
        << "0000000000000000000000000000000000000000000000000000000000000000  train-images-idx3-ubyte\n";
    std::ofstream(dir / "gone.sha256")
        << "0000000000000000000000000000000000000000000000000000000000000000  nothing-here\n";
    const std::string base = "verify-checksums --data-dir '" + (dir / "fm").string() + "' --manifest ";
    CHECK(cli(base + "'" + (dir / "bad.sha256").string() + "'").exit_code == 3);
    CHECK(cli(base + "'" + (dir / "gone.sha256").string() + "'").exit_code == 2);
  }

  TEST_CASE("corrupt IDX data exits with 3") {
    test::TempDir dir;
    test::write_tiny_fashion_mnist(dir / "fm", 20, 10);
    std::ofstream(dir / "fm" / "train-labels-idx1-ubyte", std::ios::binary) << "garbage!";
    const auto r = cli("train --data-dir '" + (dir / "fm").string() + "' --epochs 1 --out '" +
                       (dir / "out").string() + "'");
    CHECK(r.exit_code == 3);
  }

  TEST_CASE("train writes its artifacts") {
    test::TempDir out;
    const auto r = cli("train " + data_flags() + "--epochs 2 --batch 20 --name t --out '" + out.path().string() + "'");
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    const auto dir = out / "train" / "t";
    for (const char* f : {"run.csv", "run.json", "config.json", "summary.md", "run.log", "final.ckpt", "best.ckpt"})
      CHECK_MESSAGE(fs::exists(dir / f), f);
    const auto cfg = nlohmann::json::parse(test::slurp(dir / "config.json"));
    CHECK_FALSE(cfg.contains("workers"));
    CHECK(cfg.at("epochs").get<int>() == 2);
  }

  TEST_CASE("every command is byte-identical across worker counts") {
    CHECK(worker_differences("phase-map --grid 6 --n-units 32 --tau 20").empty());
    CHECK(worker_differences("train " + data_flags() + "--epochs 2 --batch 20").empty());
    CHECK(worker_differences("sweep " + data_flags() +
                             "--vary eta --values 0.01 0.02 --epochs 5 --no-equalize --batch 20")
              .empty());
    CHECK(worker_differences("collapse " + data_flags() + "--epochs 5 --batch 20").empty());
    CHECK(worker_differences("weight-decay " + data_flags() +
                             "--lambdas 0 0.001 --n-seeds 2 --epochs 3 --batch 20")
              .empty());
    CHECK(worker_differences("estimate-lambda --a 0.004").empty());
  }

  TEST_CASE("global-check on a trained checkpoint is deterministic") {
    test::TempDir out;
    REQUIRE(cli("train " + data_flags() + "--epochs 1 --batch 20 --name g --out '" + out.path().string() + "'")
                .exit_code == 0);
    const auto ckpt = (out / "train" / "g" / "final.ckpt").string();
    CHECK(worker_differences("global-check " + data_flags() + "--max-images 40 --checkpoint '" + ckpt + "'")
              .empty());
    CHECK(cli("global-check " + data_flags() + "--checkpoint '" + (out / "none.ckpt").string() + "'").exit_code ==
          2);
  }
}
