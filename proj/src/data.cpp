#include "amtl/data.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "amtl/errors.hpp"
#include "amtl/format.hpp"
#include "amtl/rng.hpp"

namespace amtl {

namespace {

std::string task_file_name(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "task_%03zu.csv", t);
  return buf;
}

LossKind parse_loss_kind(const std::string& s, const std::string& context) {
  if (s == "squared") return LossKind::Squared;
  if (s == "logistic") return LossKind::Logistic;
  throw ArgumentError("unknown loss kind '" + s + "' in " + context);
}

std::string loss_kind_name(LossKind k) {
  return k == LossKind::Squared ? "squared" : "logistic";
}

Regularizer parse_regularizer(const std::string& s, const std::string& context) {
  if (s == "nuclear") return Regularizer::NuclearNorm;
  if (s == "l21") return Regularizer::L21;
  throw ArgumentError("unknown regularizer '" + s + "' in " + context);
}

std::string regularizer_name(Regularizer r) {
  return r == Regularizer::NuclearNorm ? "nuclear" : "l21";
}

// Parses one headerless task CSV: d feature columns then the label column.
// expected_cols == 0 means "not yet known" (first task file fixes d).
TaskDataset load_task_csv(const std::filesystem::path& file, LossKind loss_kind,
                          std::size_t task_id, std::size_t expected_cols) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open task file " + file.string());
  std::vector<double> values;
  std::size_t cols = expected_cols;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t field_count = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string_view field =
          std::string_view(line).substr(pos, comma == std::string::npos
                                                 ? std::string::npos
                                                 : comma - pos);
      values.push_back(parse_double(
          field, file.string() + " line " + std::to_string(line_no)));
      ++field_count;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (field_count < 2) {
      throw DimensionError(file.string() + " line " + std::to_string(line_no) +
                           ": expected at least one feature and a label");
    }
    if (cols == 0) {
      cols = field_count;
    } else if (field_count != cols) {
      throw DimensionError(file.string() + " line " + std::to_string(line_no) +
                           ": has " + std::to_string(field_count) +
                           " columns, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw ArgumentError(file.string() + ": no samples");

  const std::size_t d = cols - 1;
  DenseMatrix x(rows, d);
  Vector y(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(i, j) = values[i * cols + j];
    y[i] = values[i * cols + d];
  }
  if (loss_kind == LossKind::Logistic) {
    for (std::size_t i = 0; i < rows; ++i) {
      if (y[i] != 1.0 && y[i] != -1.0) {
        throw ArgumentError(file.string() + " line " + std::to_string(i + 1) +
                            ": logistic label must be -1 or +1, got " +
                            format_double(y[i]));
      }
    }
  }
  return make_task(std::move(x), std::move(y), loss_kind, task_id);
}

}  // namespace

SyntheticProblem gen_synthetic(const SyntheticSpec& spec, double lambda,
                               Regularizer regularizer, double l2_augment) {
  if (spec.t_count == 0 || spec.n_per_task == 0 || spec.dim == 0) {
    throw ArgumentError("gen_synthetic: t_count, n_per_task and dim must be positive");
  }
  if (spec.true_rank == 0 || spec.true_rank > std::min(spec.dim, spec.t_count)) {
    throw ArgumentError("gen_synthetic: true_rank must lie in [1, min(dim, t_count)]");
  }
  if (spec.noise_sigma < 0.0) {
    throw ArgumentError("gen_synthetic: negative noise_sigma");
  }

  Rng rng(mix_seed(spec.seed, 0x57a9e11cULL));
  const std::size_t d = spec.dim;
  const std::size_t t_count = spec.t_count;
  const std::size_t r = spec.true_rank;

  DenseMatrix a(d, r);
  for (double& v : a.data()) v = rng.normal();
  DenseMatrix b(r, t_count);
  for (double& v : b.data()) v = rng.normal();
  DenseMatrix w_star = scale(gemm(a, b), 1.0 / std::sqrt(static_cast<double>(r)));

  std::vector<TaskDataset> tasks;
  tasks.reserve(t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    DenseMatrix x(spec.n_per_task, d);
    for (double& v : x.data()) v = rng.normal();
    Vector y = gemv(x, w_star.col(t));
    for (double& v : y) {
      if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
      if (spec.loss_kind == LossKind::Logistic) v = v >= 0.0 ? 1.0 : -1.0;
    }
    tasks.push_back(make_task(std::move(x), std::move(y), spec.loss_kind, t));
  }
  SyntheticProblem out{make_problem(std::move(tasks), lambda, regularizer, l2_augment),
                       std::move(w_star)};
  return out;
}

MtlProblem load_csv_dir(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw IoError("missing manifest " + manifest_path.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError("malformed manifest " + manifest_path.string() + ": " +
                        e.what());
  }
  if (!manifest.contains("tasks") || !manifest["tasks"].is_array() ||
      manifest["tasks"].empty()) {
    throw ArgumentError("manifest " + manifest_path.string() +
                        " lists no tasks");
  }
  try {
    const double lambda = manifest.value("lambda", 1.0);
    const double l2_augment = manifest.value("l2_augment", 0.0);
    const Regularizer reg =
        parse_regularizer(manifest.value("regularizer", std::string("nuclear")),
                          manifest_path.string());

    std::vector<TaskDataset> tasks;
    std::size_t expected_cols = 0;
    std::size_t task_id = 0;
    for (const auto& entry : manifest["tasks"]) {
      if (!entry.contains("file")) {
        throw ArgumentError("manifest " + manifest_path.string() + ": task " +
                            std::to_string(task_id) + " has no file");
      }
      const LossKind kind = parse_loss_kind(
          entry.value("loss", std::string("squared")), manifest_path.string());
      TaskDataset task = load_task_csv(dir / entry["file"].get<std::string>(), kind,
                                       task_id, expected_cols);
      expected_cols = task.dim() + 1;
      tasks.push_back(std::move(task));
      ++task_id;
    }
    return make_problem(std::move(tasks), lambda, reg, l2_augment);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError("malformed manifest " + manifest_path.string() + ": " +
                        e.what());
  }
}

void save_csv_dir(const MtlProblem& problem, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());

  nlohmann::json manifest;
  manifest["lambda"] = problem.lambda;
  manifest["l2_augment"] = problem.l2_augment;
  manifest["regularizer"] = regularizer_name(problem.regularizer);
  manifest["tasks"] = nlohmann::json::array();
  for (std::size_t t = 0; t < problem.task_count(); ++t) {
    manifest["tasks"].push_back(
        {{"file", task_file_name(t)},
         {"loss", loss_kind_name(problem.tasks[t].loss_kind)}});
  }
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << "\n";
  }

  for (std::size_t t = 0; t < problem.task_count(); ++t) {
    const TaskDataset& task = problem.tasks[t];
    std::ofstream out(dir / task_file_name(t), std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / task_file_name(t)).string());
    std::string line;
    for (std::size_t i = 0; i < task.sample_count(); ++i) {
      line.clear();
      for (std::size_t j = 0; j < task.dim(); ++j) {
        line += format_double(task.x(i, j));
        line += ',';
      }
      line += format_double(task.y[i]);
      line += '\n';
      out << line;
    }
  }
}

}  // namespace amtl
