#pragma once

#include <cstdint>
#include <filesystem>

#include "amtl/model.hpp"

namespace amtl {

// Synthetic problem family: per-task standard-normal features, responses from
// a shared rank-r model W* = A B / sqrt(r), plus optional Gaussian noise.
struct SyntheticSpec {
  std::size_t t_count = 5;
  std::size_t n_per_task = 100;
  std::size_t dim = 50;
  std::size_t true_rank = 2;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  LossKind loss_kind = LossKind::Squared;
};

struct SyntheticProblem {
  MtlProblem problem;
  DenseMatrix w_star;  // the generating d x T model
};

SyntheticProblem gen_synthetic(const SyntheticSpec& spec, double lambda = 1.0,
                               Regularizer regularizer = Regularizer::NuclearNorm,
                               double l2_augment = 0.0);

// On-disk task directory: manifest.json naming one headerless CSV per task
// (d feature columns then one label column, LF endings, round-trip floats).
MtlProblem load_csv_dir(const std::filesystem::path& dir);
void save_csv_dir(const MtlProblem& problem, const std::filesystem::path& dir);

}  // namespace amtl
