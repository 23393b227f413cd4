#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "amtl/data.hpp"
#include "amtl/errors.hpp"
#include "amtl/numerics.hpp"
#include "oracles.hpp"

using namespace amtl;

namespace {

std::filesystem::path temp_dir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "amtl_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

bool problems_identical(const MtlProblem& a, const MtlProblem& b) {
  if (a.task_count() != b.task_count() || a.lambda != b.lambda ||
      a.regularizer != b.regularizer || a.l2_augment != b.l2_augment) {
    return false;
  }
  for (std::size_t t = 0; t < a.task_count(); ++t) {
    if (!(a.tasks[t].x == b.tasks[t].x) || a.tasks[t].y != b.tasks[t].y ||
        a.tasks[t].loss_kind != b.tasks[t].loss_kind) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("noiseless synthetic data fits its generator exactly") {
  const SyntheticSpec spec{4, 30, 10, 2, 0.0, 11, LossKind::Squared};
  const SyntheticProblem sp = gen_synthetic(spec, 0.0);
  CHECK(objective(sp.problem, sp.w_star) == 0.0);
}

TEST_CASE("synthetic generation is deterministic in the seed") {
  const SyntheticSpec spec{5, 100, 50, 2, 0.3, 7, LossKind::Squared};
  const SyntheticProblem a = gen_synthetic(spec);
  const SyntheticProblem b = gen_synthetic(spec);
  CHECK(problems_identical(a.problem, b.problem));
  CHECK(a.w_star == b.w_star);

  SyntheticSpec other = spec;
  other.seed = 8;
  CHECK(!problems_identical(a.problem, gen_synthetic(other).problem));
}

TEST_CASE("the generating model has the requested numerical rank") {
  const SyntheticSpec spec{5, 100, 50, 2, 0.0, 7, LossKind::Squared};
  const SyntheticProblem sp = gen_synthetic(spec);
  const SvdFactors f = thin_svd(sp.w_star);
  CHECK(f.s[0] > 0.1);
  CHECK(f.s[1] > 1e-6);
  CHECK(f.s[2] <= 1e-10);
}

TEST_CASE("logistic synthetic labels are plus or minus one") {
  const SyntheticSpec spec{3, 40, 8, 2, 0.2, 13, LossKind::Logistic};
  const SyntheticProblem sp = gen_synthetic(spec);
  for (const TaskDataset& t : sp.problem.tasks) {
    for (double v : t.y) CHECK((v == 1.0 || v == -1.0));
  }
}

TEST_CASE("gen_synthetic validates its spec") {
  SyntheticSpec spec{3, 10, 5, 1, 0.0, 1, LossKind::Squared};
  spec.true_rank = 0;
  CHECK_THROWS_AS(gen_synthetic(spec), ArgumentError);
  spec.true_rank = 4;  // > min(dim, t_count) = 3
  CHECK_THROWS_AS(gen_synthetic(spec), ArgumentError);
  spec.true_rank = 1;
  spec.noise_sigma = -1.0;
  CHECK_THROWS_AS(gen_synthetic(spec), ArgumentError);
}

TEST_CASE("csv round trip preserves the problem bit for bit") {
  const SyntheticSpec spec{3, 12, 6, 2, 0.4, 19, LossKind::Squared};
  const MtlProblem original = gen_synthetic(spec, 0.75, Regularizer::L21, 0.01).problem;
  const auto dir = temp_dir("roundtrip");
  save_csv_dir(original, dir);
  const MtlProblem reloaded = load_csv_dir(dir);
  CHECK(problems_identical(original, reloaded));
}

TEST_CASE("saving twice produces identical bytes") {
  const SyntheticSpec spec{2, 8, 4, 1, 0.1, 23, LossKind::Logistic};
  const MtlProblem p = gen_synthetic(spec).problem;
  const auto dir_a = temp_dir("bytes_a");
  const auto dir_b = temp_dir("bytes_b");
  save_csv_dir(p, dir_a);
  save_csv_dir(p, dir_b);
  for (const char* name : {"manifest.json", "task_000.csv", "task_001.csv"}) {
    std::ifstream fa(dir_a / name, std::ios::binary);
    std::ifstream fb(dir_b / name, std::ios::binary);
    const std::string a((std::istreambuf_iterator<char>(fa)), {});
    const std::string b((std::istreambuf_iterator<char>(fb)), {});
    CHECK(a == b);
    CHECK(!a.empty());
  }
}

TEST_CASE("ragged task dimensions are rejected naming the file") {
  const SyntheticSpec spec{3, 6, 4, 1, 0.0, 29, LossKind::Squared};
  const MtlProblem p = gen_synthetic(spec).problem;
  const auto dir = temp_dir("ragged");
  save_csv_dir(p, dir);
  // Rewrite task 1 with d=3 instead of d=4.
  {
    std::ofstream out(dir / "task_001.csv", std::ios::binary);
    out << "1,2,3,0.5\n0.1,0.2,0.3\n";
  }
  try {
    load_csv_dir(dir);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("task_001.csv") != std::string::npos);
  }
}

TEST_CASE("bad logistic labels are rejected naming file and line") {
  const auto dir = temp_dir("labels");
  {
    std::ofstream manifest(dir / "manifest.json", std::ios::binary);
    manifest << R"({"lambda": 1.0, "regularizer": "nuclear",
                    "tasks": [{"file": "task_000.csv", "loss": "logistic"}]})";
  }
  {
    std::ofstream out(dir / "task_000.csv", std::ios::binary);
    out << "1,2,1\n3,4,0\n";
  }
  try {
    load_csv_dir(dir);
    FAIL("expected ArgumentError");
  } catch (const ArgumentError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("task_000.csv") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }
}

TEST_CASE("missing manifest is an io error naming the path") {
  const auto dir = temp_dir("nomanifest");
  try {
    load_csv_dir(dir);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("manifest.json") != std::string::npos);
  }
}

TEST_CASE("malformed numeric fields name file and line") {
  const auto dir = temp_dir("badfloat");
  {
    std::ofstream manifest(dir / "manifest.json", std::ios::binary);
    manifest << R"({"tasks": [{"file": "task_000.csv", "loss": "squared"}]})";
  }
  {
    std::ofstream out(dir / "task_000.csv", std::ios::binary);
    out << "1,2,3\n1,abc,3\n";
  }
  try {
    load_csv_dir(dir);
    FAIL("expected ArgumentError");
  } catch (const ArgumentError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("task_000.csv") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }
}

TEST_CASE("ista recovers the generating model on easy instances") {
  const SyntheticSpec spec{4, 60, 12, 2, 0.0, 31, LossKind::Squared};
  const SyntheticProblem sp = gen_synthetic(spec, 0.01);
  const double eta = 1.0 / sp.problem.smooth_lipschitz();
  const DenseMatrix w = oracles::ista(sp.problem, eta, 3000);
  CHECK(subtract(w, sp.w_star).frobenius_norm() / sp.w_star.frobenius_norm() <= 0.1);
}
