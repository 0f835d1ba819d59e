#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparsereg/datagen.hpp"
#include "sparsereg/metrics.hpp"
#include "sparsereg/saddle.hpp"

namespace sparsereg {

enum class Method { Cio, Ss, Lasso, Enet, Mcp, Scad };

std::string_view method_name(Method m);
std::optional<Method> method_from_name(std::string_view name);

enum class Protocol { FixedK, CrossValidatedK, RocSweep };

struct SolverConfig {
  double cio_time_limit = 60.0;  // seconds; 180 by convention for classification
  double cio_epsilon = 1e-4;
  int ss_t_max = 200;
  double ss_gap_tol = 1e-4;
  int gamma_steps = 8;     // doubling schedule length for cio/ss
  int lambda_count = 100;  // path length for the penalized methods
  double lambda_ratio = 0.0;  // 0 = auto
  double enet_alpha = 0.5;
  double mcp_gamma = 3.0;
  double scad_gamma = 3.7;
};

struct ExperimentConfig {
  std::vector<Method> methods;
  // Template instance; spec.seed is the master seed and spec.n is
  // overridden by n_grid.
  SyntheticSpec spec;
  std::vector<Eigen::Index> n_grid;
  int replications = 10;
  Protocol protocol = Protocol::FixedK;
  std::vector<Eigen::Index> k_grid;  // CrossValidatedK / RocSweep; empty = default
  SolverConfig solver;
  Eigen::Index n_test = 1000;
  std::string output_dir = ".";

  void validate() const;
};

struct ResultRow {
  bool aggregate = false;
  std::string method;
  Eigen::Index n = 0, p = 0, k_true = 0;
  double snr = 0.0;
  std::string design;  // "toeplitz(rho)", "hardmi", "identity"
  Eigen::Index k = 0;  // budget (FixedK/Roc) or selected size (CV)
  double hyper = 0.0;  // selected gamma or lambda
  MetricsRecord metrics;
  MetricsRecord stddev;  // aggregate rows only
  std::uint64_t seed = 0;
  int replication = -1;
};

struct ResultsTable {
  std::vector<ResultRow> rows;
  int failures = 0;
};

// Runs every (n, replication, method) cell; failures are logged to
// stderr, counted, and skipped. Aggregate rows (mean and standard
// deviation per group) follow the raw rows.
ResultsTable run_experiment(const ExperimentConfig& config);

// Raw rows, one line each:
// method,n,p,k_true,snr,rho_or_design,k,gamma_or_lambda,A,FDR,TF,FF,
// MSE_val,MSE_test_or_1minusAUC,seconds,relative_time,seed
void write_results_csv(std::ostream& out, const ResultsTable& table);
// Aggregate rows with mean and standard-deviation columns per group.
void write_summary_csv(std::ostream& out, const ResultsTable& table);
// Reads a raw results file back and recomputes the aggregate rows.
ResultsTable read_results_csv(std::istream& in);

enum class PlotKind { AccuracyVsN, FdrVsN, MseVsN, RocTfFf, TimeVsN };

std::string_view plot_kind_name(PlotKind kind);
std::optional<PlotKind> plot_kind_from_name(std::string_view name);

// One series file per method under outdir, rows (x, mean, stddev); time
// series carry an extra log10 column, roc emits (k, FF, TF) sorted by k.
// Throws std::invalid_argument on an empty table.
std::vector<std::filesystem::path> emit_plot_data(const ResultsTable& table, PlotKind kind,
                                                  const std::filesystem::path& outdir);

// Plain-text key = value configuration document; '#' starts a comment.
// Unknown keys and malformed values raise ConfigError.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

struct Preset {
  std::string name;
  std::string description;
  std::string document;  // config-file text, parseable by parse_config
};

const std::vector<Preset>& presets();
const Preset* find_preset(std::string_view name);

}  // namespace sparsereg
