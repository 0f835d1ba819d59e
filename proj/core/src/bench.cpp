#include "sparsereg/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "sparsereg/cio.hpp"
#include "sparsereg/csv.hpp"
#include "sparsereg/penalties.hpp"
#include "sparsereg/rng.hpp"

namespace sparsereg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string design_label(const SyntheticSpec& spec) {
  switch (spec.covariance) {
    case CovarianceKind::Toeplitz: return "toeplitz(" + format_double(spec.rho) + ")";
    case CovarianceKind::HardMi: return "hardmi";
    case CovarianceKind::Identity: return "identity";
  }
  return "?";
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Cio: return "cio";
    case Method::Ss: return "ss";
    case Method::Lasso: return "lasso";
    case Method::Enet: return "enet";
    case Method::Mcp: return "mcp";
    case Method::Scad: return "scad";
  }
  return "?";
}

std::optional<Method> method_from_name(std::string_view name) {
  for (const Method m :
       {Method::Cio, Method::Ss, Method::Lasso, Method::Enet, Method::Mcp, Method::Scad}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view plot_kind_name(PlotKind kind) {
  switch (kind) {
    case PlotKind::AccuracyVsN: return "accuracy_vs_n";
    case PlotKind::FdrVsN: return "fdr_vs_n";
    case PlotKind::MseVsN: return "mse_vs_n";
    case PlotKind::RocTfFf: return "roc_tf_ff";
    case PlotKind::TimeVsN: return "time_vs_n";
  }
  return "?";
}

std::optional<PlotKind> plot_kind_from_name(std::string_view name) {
  for (const PlotKind k : {PlotKind::AccuracyVsN, PlotKind::FdrVsN, PlotKind::MseVsN,
                           PlotKind::RocTfFf, PlotKind::TimeVsN}) {
    if (plot_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw std::invalid_argument("config needs at least one method");
  if (n_grid.empty()) throw std::invalid_argument("config needs a non-empty n grid");
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (n_test < 1) throw std::invalid_argument("n_test must be >= 1");
  for (const auto n : n_grid) {
    if (n < 6) throw std::invalid_argument("every n must be at least 6 to allow splitting");
  }
  SyntheticSpec probe = spec;
  probe.n = n_grid.front();
  probe.validate();
}

namespace {

// ---- per-replication fitting ----------------------------------------

struct ReplicationData {
  Dataset train, valid, test;
  Criterion criterion = Criterion::Mse;
  LossModel subset_loss;     // cio/ss: ols or hinge
  LossModel penalized_loss;  // lasso/enet/mcp/scad: ols or logistic
  double baseline_seconds = 1.0;
};

double criterion_value(Criterion crit, const Dataset& d, const Eigen::VectorXd& w, double b) {
  if (crit == Criterion::Mse) return mse(d, w, b);
  const Eigen::VectorXd scores = d.X * w + Eigen::VectorXd::Constant(d.n(), b);
  return 1.0 - auc(scores, d.Y);
}

Support support_from_vector(const Eigen::VectorXd& w, Eigen::Index k) {
  Support s;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (std::abs(w(j)) > kSupportZeroTol) s.selected.push_back(j);
  }
  s.budget = std::max<Eigen::Index>(k, s.size());
  return s;
}

MethodFit make_subset_fit(Method method, const ReplicationData& rd, const SolverConfig& solver) {
  const LossModel loss = rd.subset_loss;
  if (method == Method::Ss) {
    return [loss, &solver](const Dataset& train, Eigen::Index k, double gamma,
                           const FitOutput* warm) {
      SubgradientConfig cfg;
      cfg.gamma = gamma;
      cfg.t_max = solver.ss_t_max;
      cfg.gap_tol = solver.ss_gap_tol;
      const auto start = Clock::now();
      const Eigen::VectorXd* warm_alpha =
          warm && warm->dual.size() == train.n() ? &warm->dual : nullptr;
      const auto res = subgradient_solve(train, loss, k, cfg, warm_alpha);
      FitOutput out;
      out.w = coefficients_from_support(res.support, train, loss, cfg.gamma);
      out.dual = res.alpha_avg;
      out.seconds = seconds_since(start);
      return out;
    };
  }
  return [loss, &solver](const Dataset& train, Eigen::Index k, double gamma,
                         const FitOutput* warm) {
    const auto start = Clock::now();
    Support warm_support;
    const Support* warm_ptr = nullptr;
    if (warm) {
      warm_support = support_from_vector(warm->w, k);
      if (warm_support.size() > 0 && warm_support.size() <= k) warm_ptr = &warm_support;
    }
    const auto res = cutting_plane_solve(train, loss, k, gamma, warm_ptr, solver.cio_epsilon,
                                         solver.cio_time_limit);
    FitOutput out;
    out.w = coefficients_from_support(res.support, train, loss, gamma);
    out.seconds = seconds_since(start);
    return out;
  };
}

struct PathFit {
  RegPath path;
  double seconds = 0.0;
  std::vector<double> valid_criterion;  // per path point, smaller is better
};

PathFit fit_penalized_path(Method method, const ReplicationData& rd, const SolverConfig& solver) {
  PenaltyFamily family = PenaltyFamily::L1;
  double alpha_mix = 1.0;
  double gamma_shape = 3.0;
  switch (method) {
    case Method::Lasso: break;
    case Method::Enet:
      family = PenaltyFamily::ElasticNet;
      alpha_mix = solver.enet_alpha;
      break;
    case Method::Mcp:
      family = PenaltyFamily::Mcp;
      gamma_shape = solver.mcp_gamma;
      break;
    case Method::Scad:
      family = PenaltyFamily::Scad;
      gamma_shape = solver.scad_gamma;
      break;
    default:
      throw std::logic_error("not a penalized method");
  }
  const auto grid = lambda_grid(rd.train, rd.penalized_loss, family, alpha_mix,
                                solver.lambda_count, solver.lambda_ratio);
  PathFit out;
  const auto start = Clock::now();
  out.path = cd_fit(rd.train, rd.penalized_loss, family, grid, alpha_mix, gamma_shape);
  out.seconds = seconds_since(start);
  out.valid_criterion.reserve(out.path.points.size());
  for (const auto& pt : out.path.points) {
    out.valid_criterion.push_back(criterion_value(rd.criterion, rd.valid, pt.w, pt.intercept));
  }
  return out;
}

struct FittedModel {
  Eigen::VectorXd w;
  double intercept = 0.0;
  Eigen::Index k_column = 0;  // value for the "k" CSV column
  double hyper = 0.0;
  double seconds = 0.0;
};

// FixedK for penalized methods: the path point whose support size is
// closest to k (exact when possible), ties by the validation criterion
// and then toward the smaller lambda.
FittedModel pick_fixed_k_point(const PathFit& fit, Eigen::Index k) {
  if (fit.path.points.empty()) throw std::runtime_error("empty regularization path");
  std::size_t best = 0;
  const auto key = [&](std::size_t i) {
    const auto& pt = fit.path.points[i];
    return std::make_tuple(std::abs(static_cast<Eigen::Index>(pt.support_size) - k),
                           fit.valid_criterion[i], pt.lambda);
  };
  for (std::size_t i = 1; i < fit.path.points.size(); ++i) {
    if (key(i) < key(best)) best = i;
  }
  const auto& pt = fit.path.points[best];
  return {pt.w, pt.intercept, k, pt.lambda, fit.seconds};
}

// CrossValidatedK for penalized methods: best validation value, ties
// toward the smaller support and then the smaller lambda.
FittedModel pick_cv_point(const PathFit& fit) {
  if (fit.path.points.empty()) throw std::runtime_error("empty regularization path");
  std::size_t best = 0;
  const auto key = [&](std::size_t i) {
    const auto& pt = fit.path.points[i];
    return std::make_tuple(fit.valid_criterion[i], pt.support_size, pt.lambda);
  };
  for (std::size_t i = 1; i < fit.path.points.size(); ++i) {
    if (key(i) < key(best)) best = i;
  }
  const auto& pt = fit.path.points[best];
  return {pt.w, pt.intercept, static_cast<Eigen::Index>(pt.support_size), pt.lambda,
          fit.seconds};
}

MetricsRecord build_metrics(const ReplicationData& rd, const FittedModel& model) {
  MetricsRecord rec;
  const auto counts = selection_metrics(model.w, *rd.test.w_true);
  rec.accuracy = counts.accuracy;
  rec.fdr = counts.fdr;
  rec.tf = counts.tf;
  rec.ff = counts.ff;
  rec.mse_val = criterion_value(rd.criterion, rd.valid, model.w, model.intercept);
  rec.mse_test = criterion_value(rd.criterion, rd.test, model.w, model.intercept);
  for (Eigen::Index j = 0; j < model.w.size(); ++j) {
    if (std::abs(model.w(j)) > kSupportZeroTol) ++rec.support_size;
  }
  rec.seconds = model.seconds;
  rec.relative_time = model.seconds / std::max(rd.baseline_seconds, 1e-9);
  return rec;
}

bool is_subset_method(Method m) { return m == Method::Cio || m == Method::Ss; }

ResultRow make_row(const ExperimentConfig& config, Eigen::Index n, int rep,
                   std::uint64_t rep_seed, Method method, const ReplicationData& rd,
                   const FittedModel& model) {
  ResultRow row;
  row.method = std::string(method_name(method));
  row.n = n;
  row.p = config.spec.p;
  row.k_true = config.spec.k_true;
  row.snr = config.spec.snr;
  row.design = design_label(config.spec);
  row.k = model.k_column;
  row.hyper = model.hyper;
  row.metrics = build_metrics(rd, model);
  row.seed = rep_seed;
  row.replication = rep;
  return row;
}

void append_aggregates(const ExperimentConfig& config, ResultsTable& table) {
  struct Key {
    std::string method;
    Eigen::Index n;
    Eigen::Index k;
    bool operator<(const Key& o) const {
      return std::tie(method, n, k) < std::tie(o.method, o.n, o.k);
    }
  };
  std::map<Key, std::vector<const ResultRow*>> groups;
  for (const auto& row : table.rows) {
    if (!row.aggregate) groups[{row.method, row.n, row.k}].push_back(&row);
  }

  std::vector<ResultRow> aggregates;
  for (const auto method : config.methods) {
    for (const auto n : config.n_grid) {
      for (const auto& [key, rows] : groups) {
        if (key.method != method_name(method) || key.n != n) continue;
        ResultRow agg;
        agg.aggregate = true;
        agg.method = key.method;
        agg.n = key.n;
        agg.k = key.k;
        agg.p = rows.front()->p;
        agg.k_true = rows.front()->k_true;
        agg.snr = rows.front()->snr;
        agg.design = rows.front()->design;
        agg.replication = -1;

        const double m = static_cast<double>(rows.size());
        const auto mean_std = [&](auto getter) {
          double sum = 0.0;
          for (const auto* r : rows) sum += getter(*r);
          const double mean = sum / m;
          double std_dev = 0.0;
          if (rows.size() > 1) {
            double ss = 0.0;
            for (const auto* r : rows) {
              const double d = getter(*r) - mean;
              ss += d * d;
            }
            std_dev = std::sqrt(ss / (m - 1.0));
          }
          return std::pair{mean, std_dev};
        };

        std::tie(agg.metrics.accuracy, agg.stddev.accuracy) =
            mean_std([](const ResultRow& r) { return r.metrics.accuracy; });
        std::tie(agg.metrics.fdr, agg.stddev.fdr) =
            mean_std([](const ResultRow& r) { return r.metrics.fdr; });
        std::tie(agg.metrics.tf, agg.stddev.tf) =
            mean_std([](const ResultRow& r) { return r.metrics.tf; });
        std::tie(agg.metrics.ff, agg.stddev.ff) =
            mean_std([](const ResultRow& r) { return r.metrics.ff; });
        std::tie(agg.metrics.mse_val, agg.stddev.mse_val) =
            mean_std([](const ResultRow& r) { return r.metrics.mse_val; });
        std::tie(agg.metrics.mse_test, agg.stddev.mse_test) =
            mean_std([](const ResultRow& r) { return r.metrics.mse_test; });
        std::tie(agg.metrics.support_size, agg.stddev.support_size) =
            mean_std([](const ResultRow& r) { return r.metrics.support_size; });
        std::tie(agg.metrics.seconds, agg.stddev.seconds) =
            mean_std([](const ResultRow& r) { return r.metrics.seconds; });
        std::tie(agg.metrics.relative_time, agg.stddev.relative_time) =
            mean_std([](const ResultRow& r) { return r.metrics.relative_time; });
        agg.hyper = mean_std([](const ResultRow& r) { return r.hyper; }).first;
        aggregates.push_back(std::move(agg));
      }
    }
  }
  for (auto& agg : aggregates) table.rows.push_back(std::move(agg));
}

}  // namespace

ResultsTable run_experiment(const ExperimentConfig& config) {
  config.validate();
  ResultsTable table;
  const bool classification = config.spec.task == Task::Classification;

  for (const auto n : config.n_grid) {
    for (int rep = 0; rep < config.replications; ++rep) {
      // Method-independent replication seed: every method sees the same
      // data within a replication, so comparisons are paired.
      const std::uint64_t rep_seed = mix_seed(config.spec.seed, static_cast<std::uint64_t>(n),
                                              static_cast<std::uint64_t>(rep));

      SyntheticSpec spec = config.spec;
      spec.n = n + config.n_test;
      spec.seed = rep_seed;
      const Dataset full = sample_dataset(spec);

      ReplicationData rd;
      rd.test = take_rows(full, n, config.n_test);
      const Dataset fit_rows = take_rows(full, 0, n);
      std::tie(rd.train, rd.valid) = split_train_validation(fit_rows);
      rd.criterion = classification ? Criterion::Auc : Criterion::Mse;
      rd.subset_loss.kind = classification ? LossKind::Hinge : LossKind::Ols;
      rd.penalized_loss.kind = classification ? LossKind::Logistic : LossKind::Ols;

      // Internal Lasso baseline for relative timing.
      PathFit lasso_baseline;
      try {
        lasso_baseline = fit_penalized_path(Method::Lasso, rd, config.solver);
        rd.baseline_seconds = lasso_baseline.seconds;
      } catch (const std::exception& e) {
        std::cerr << "warning: lasso baseline failed (n=" << n << ", rep=" << rep
                  << "): " << e.what() << '\n';
        rd.baseline_seconds = 1.0;
      }

      const auto gammas = gamma_schedule(rd.train, config.solver.gamma_steps);
      const Eigen::Index k_true = config.spec.k_true;
      std::vector<Eigen::Index> k_grid = config.k_grid;
      if (k_grid.empty() && config.protocol != Protocol::FixedK) {
        k_grid = default_k_grid(rd.train.p(), rd.train.n(), k_true);
      }

      for (const auto method : config.methods) {
        try {
          if (is_subset_method(method)) {
            const auto fit = make_subset_fit(method, rd, config.solver);
            if (config.protocol == Protocol::FixedK ||
                config.protocol == Protocol::CrossValidatedK) {
              const std::vector<Eigen::Index> ks =
                  config.protocol == Protocol::FixedK ? std::vector<Eigen::Index>{k_true}
                                                      : k_grid;
              const auto start = Clock::now();
              auto res = grid_search(fit, rd.train, rd.valid, ks, gammas, rd.criterion);
              FittedModel model{res.best.w, res.best.intercept, res.best_k, res.best_hyper,
                                seconds_since(start)};
              table.rows.push_back(make_row(config, n, rep, rep_seed, method, rd, model));
            } else {
              for (const auto k : k_grid) {
                const std::vector<Eigen::Index> ks{k};
                const auto start = Clock::now();
                auto res = grid_search(fit, rd.train, rd.valid, ks, gammas, rd.criterion);
                FittedModel model{res.best.w, res.best.intercept, k, res.best_hyper,
                                  seconds_since(start)};
                table.rows.push_back(make_row(config, n, rep, rep_seed, method, rd, model));
              }
            }
          } else {
            const PathFit path = (method == Method::Lasso && !lasso_baseline.path.points.empty())
                                     ? std::move(lasso_baseline)
                                     : fit_penalized_path(method, rd, config.solver);
            if (config.protocol == Protocol::FixedK) {
              table.rows.push_back(
                  make_row(config, n, rep, rep_seed, method, rd, pick_fixed_k_point(path, k_true)));
            } else if (config.protocol == Protocol::CrossValidatedK) {
              table.rows.push_back(
                  make_row(config, n, rep, rep_seed, method, rd, pick_cv_point(path)));
            } else {
              for (const auto k : k_grid) {
                // TF/FF at the target size by path interpolation; the
                // nearest path point fills the prediction columns.
                const auto counts = sparsity_interpolate(path.path, *rd.test.w_true, k);
                FittedModel model = pick_fixed_k_point(path, k);
                model.k_column = k;
                ResultRow row = make_row(config, n, rep, rep_seed, method, rd, model);
                row.metrics.tf = counts.tf;
                row.metrics.ff = counts.ff;
                row.metrics.accuracy = counts.tf / static_cast<double>(k_true);
                row.metrics.fdr =
                    counts.tf + counts.ff > 0.0 ? counts.ff / (counts.tf + counts.ff) : 0.0;
                table.rows.push_back(std::move(row));
              }
            }
          }
        } catch (const std::exception& e) {
          std::cerr << "warning: method " << method_name(method) << " failed (n=" << n
                    << ", rep=" << rep << "): " << e.what() << '\n';
          ++table.failures;
        }
      }
    }
  }

  append_aggregates(config, table);
  return table;
}

// ---- serialization ---------------------------------------------------

namespace {

constexpr std::string_view kRawHeader =
    "method,n,p,k_true,snr,rho_or_design,k,gamma_or_lambda,A,FDR,TF,FF,MSE_val,"
    "MSE_test_or_1minusAUC,seconds,relative_time,seed";

void write_raw_row(std::ostream& out, const ResultRow& row) {
  out << row.method << ',' << row.n << ',' << row.p << ',' << row.k_true << ','
      << format_double(row.snr) << ',' << row.design << ',' << row.k << ','
      << format_double(row.hyper) << ',' << format_double(row.metrics.accuracy) << ','
      << format_double(row.metrics.fdr) << ',' << format_double(row.metrics.tf) << ','
      << format_double(row.metrics.ff) << ',' << format_double(row.metrics.mse_val) << ','
      << format_double(row.metrics.mse_test) << ',' << format_double(row.metrics.seconds) << ','
      << format_double(row.metrics.relative_time) << ',' << row.seed << '\n';
}

}  // namespace

void write_results_csv(std::ostream& out, const ResultsTable& table) {
  out << kRawHeader << '\n';
  for (const auto& row : table.rows) {
    if (!row.aggregate) write_raw_row(out, row);
  }
}

void write_summary_csv(std::ostream& out, const ResultsTable& table) {
  out << "method,n,k,replications,A_mean,A_std,FDR_mean,FDR_std,TF_mean,TF_std,FF_mean,FF_std,"
         "MSE_val_mean,MSE_val_std,MSE_test_mean,MSE_test_std,support_mean,seconds_mean,"
         "seconds_std,relative_time_mean,relative_time_std\n";
  for (const auto& row : table.rows) {
    if (!row.aggregate) continue;
    int count = 0;
    for (const auto& raw : table.rows) {
      if (!raw.aggregate && raw.method == row.method && raw.n == row.n && raw.k == row.k) ++count;
    }
    out << row.method << ',' << row.n << ',' << row.k << ',' << count << ','
        << format_double(row.metrics.accuracy) << ',' << format_double(row.stddev.accuracy) << ','
        << format_double(row.metrics.fdr) << ',' << format_double(row.stddev.fdr) << ','
        << format_double(row.metrics.tf) << ',' << format_double(row.stddev.tf) << ','
        << format_double(row.metrics.ff) << ',' << format_double(row.stddev.ff) << ','
        << format_double(row.metrics.mse_val) << ',' << format_double(row.stddev.mse_val) << ','
        << format_double(row.metrics.mse_test) << ',' << format_double(row.stddev.mse_test) << ','
        << format_double(row.metrics.support_size) << ',' << format_double(row.metrics.seconds)
        << ',' << format_double(row.stddev.seconds) << ','
        << format_double(row.metrics.relative_time) << ','
        << format_double(row.stddev.relative_time) << '\n';
  }
}

ResultsTable read_results_csv(std::istream& in) {
  ResultsTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty results file");
  // Tolerate trailing \r from other tools.
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  if (line != kRawHeader) throw std::runtime_error("unrecognized results header");

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 17) throw std::runtime_error("malformed results row");
    ResultRow row;
    row.method = cells[0];
    row.n = std::stoll(cells[1]);
    row.p = std::stoll(cells[2]);
    row.k_true = std::stoll(cells[3]);
    row.snr = std::stod(cells[4]);
    row.design = cells[5];
    row.k = std::stoll(cells[6]);
    row.hyper = std::stod(cells[7]);
    row.metrics.accuracy = std::stod(cells[8]);
    row.metrics.fdr = std::stod(cells[9]);
    row.metrics.tf = std::stod(cells[10]);
    row.metrics.ff = std::stod(cells[11]);
    row.metrics.mse_val = std::stod(cells[12]);
    row.metrics.mse_test = std::stod(cells[13]);
    row.metrics.seconds = std::stod(cells[14]);
    row.metrics.relative_time = std::stod(cells[15]);
    row.seed = std::stoull(cells[16]);
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw std::runtime_error("results file has no rows");

  // Rebuild aggregates with groups in first-appearance order.
  ExperimentConfig pseudo;
  std::vector<std::string> seen_methods;
  std::vector<Eigen::Index> seen_n;
  for (const auto& row : table.rows) {
    if (std::find(seen_methods.begin(), seen_methods.end(), row.method) == seen_methods.end()) {
      seen_methods.push_back(row.method);
    }
    if (std::find(seen_n.begin(), seen_n.end(), row.n) == seen_n.end()) seen_n.push_back(row.n);
  }
  for (const auto& name : seen_methods) {
    if (const auto m = method_from_name(name)) pseudo.methods.push_back(*m);
  }
  pseudo.n_grid = seen_n;
  append_aggregates(pseudo, table);
  return table;
}

std::vector<std::filesystem::path> emit_plot_data(const ResultsTable& table, PlotKind kind,
                                                  const std::filesystem::path& outdir) {
  std::vector<const ResultRow*> aggregates;
  for (const auto& row : table.rows) {
    if (row.aggregate) aggregates.push_back(&row);
  }
  if (aggregates.empty()) throw std::invalid_argument("empty results table");

  std::vector<std::string> methods;
  for (const auto* row : aggregates) {
    if (std::find(methods.begin(), methods.end(), row->method) == methods.end()) {
      methods.push_back(row->method);
    }
  }

  std::filesystem::create_directories(outdir);
  std::vector<std::filesystem::path> written;
  for (const auto& method : methods) {
    std::vector<const ResultRow*> rows;
    for (const auto* row : aggregates) {
      if (row->method == method) rows.push_back(row);
    }
    const auto path =
        outdir / (std::string(plot_kind_name(kind)) + "_" + method + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());

    if (kind == PlotKind::RocTfFf) {
      std::sort(rows.begin(), rows.end(),
                [](const ResultRow* a, const ResultRow* b) { return a->k < b->k; });
      out << "k,ff,tf\n";
      for (const auto* row : rows) {
        out << row->k << ',' << format_double(row->metrics.ff) << ','
            << format_double(row->metrics.tf) << '\n';
      }
    } else {
      std::sort(rows.begin(), rows.end(),
                [](const ResultRow* a, const ResultRow* b) { return a->n < b->n; });
      if (kind == PlotKind::TimeVsN) {
        out << "x,mean,stddev,log10_mean\n";
      } else {
        out << "x,mean,stddev\n";
      }
      for (const auto* row : rows) {
        double mean = 0.0, stddev = 0.0;
        switch (kind) {
          case PlotKind::AccuracyVsN:
            mean = row->metrics.accuracy;
            stddev = row->stddev.accuracy;
            break;
          case PlotKind::FdrVsN:
            mean = row->metrics.fdr;
            stddev = row->stddev.fdr;
            break;
          case PlotKind::MseVsN:
            mean = row->metrics.mse_test;
            stddev = row->stddev.mse_test;
            break;
          case PlotKind::TimeVsN:
            mean = row->metrics.seconds;
            stddev = row->stddev.seconds;
            break;
          case PlotKind::RocTfFf:
            break;
        }
        out << row->n << ',' << format_double(mean) << ',' << format_double(stddev);
        if (kind == PlotKind::TimeVsN) {
          out << ',' << format_double(mean > 0 ? std::log10(mean) : 0.0);
        }
        out << '\n';
      }
    }
    written.push_back(path);
  }
  return written;
}

// ---- configuration files ---------------------------------------------

namespace {

std::string trim_copy(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(value);
  while (std::getline(ss, cur, ',')) {
    const auto t = trim_copy(cur);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
  }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  config.methods.clear();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim_copy(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim_copy(line.substr(0, eq));
    const std::string value = trim_copy(line.substr(eq + 1));
    if (value.empty()) throw ConfigError("config key '" + key + "' has no value");

    if (key == "methods") {
      for (const auto& name : split_list(value)) {
        const auto m = method_from_name(name);
        if (!m) throw ConfigError("unknown method '" + name + "'");
        config.methods.push_back(*m);
      }
    } else if (key == "protocol") {
      if (value == "fixed_k") config.protocol = Protocol::FixedK;
      else if (value == "cv_k") config.protocol = Protocol::CrossValidatedK;
      else if (value == "roc") config.protocol = Protocol::RocSweep;
      else throw ConfigError("unknown protocol '" + value + "'");
    } else if (key == "n_grid") {
      config.n_grid.clear();
      for (const auto& v : split_list(value)) config.n_grid.push_back(parse_int(key, v));
    } else if (key == "k_grid") {
      config.k_grid.clear();
      for (const auto& v : split_list(value)) config.k_grid.push_back(parse_int(key, v));
      std::sort(config.k_grid.begin(), config.k_grid.end());
    } else if (key == "replications") {
      config.replications = static_cast<int>(parse_int(key, value));
    } else if (key == "p") {
      config.spec.p = parse_int(key, value);
    } else if (key == "k_true") {
      config.spec.k_true = parse_int(key, value);
    } else if (key == "covariance") {
      if (value == "toeplitz") config.spec.covariance = CovarianceKind::Toeplitz;
      else if (value == "hardmi") config.spec.covariance = CovarianceKind::HardMi;
      else if (value == "identity") config.spec.covariance = CovarianceKind::Identity;
      else throw ConfigError("unknown covariance '" + value + "'");
    } else if (key == "rho") {
      config.spec.rho = parse_real(key, value);
    } else if (key == "snr") {
      config.spec.snr = parse_real(key, value);
    } else if (key == "task") {
      if (value == "regression") config.spec.task = Task::Regression;
      else if (value == "classification") config.spec.task = Task::Classification;
      else throw ConfigError("unknown task '" + value + "'");
    } else if (key == "weight_scheme") {
      if (value == "signed_unit") config.spec.weight_scheme = WeightScheme::SignedUnit;
      else if (value == "uniform_over_root") config.spec.weight_scheme = WeightScheme::UniformOverRoot;
      else throw ConfigError("unknown weight scheme '" + value + "'");
    } else if (key == "seed") {
      config.spec.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "n_test") {
      config.n_test = parse_int(key, value);
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else if (key == "gamma_steps") {
      config.solver.gamma_steps = static_cast<int>(parse_int(key, value));
    } else if (key == "lambda_count") {
      config.solver.lambda_count = static_cast<int>(parse_int(key, value));
    } else if (key == "lambda_ratio") {
      config.solver.lambda_ratio = parse_real(key, value);
    } else if (key == "enet_alpha") {
      config.solver.enet_alpha = parse_real(key, value);
    } else if (key == "mcp_gamma") {
      config.solver.mcp_gamma = parse_real(key, value);
    } else if (key == "scad_gamma") {
      config.solver.scad_gamma = parse_real(key, value);
    } else if (key == "cio_time_limit") {
      config.solver.cio_time_limit = parse_real(key, value);
    } else if (key == "cio_epsilon") {
      config.solver.cio_epsilon = parse_real(key, value);
    } else if (key == "ss_t_max") {
      config.solver.ss_t_max = static_cast<int>(parse_int(key, value));
    } else if (key == "ss_gap_tol") {
      config.solver.ss_gap_tol = parse_real(key, value);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  try {
    config.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = {
      {"toeplitz-low-noise",
       "Low noise / low correlation regression cell (rho=0.2, SNR=6) at desk scale",
       "methods = cio, ss, lasso, enet, mcp, scad\n"
       "protocol = fixed_k\n"
       "task = regression\n"
       "covariance = toeplitz\n"
       "rho = 0.2\n"
       "snr = 6\n"
       "p = 200\n"
       "k_true = 10\n"
       "n_grid = 100, 250, 500, 1000\n"
       "replications = 10\n"
       "seed = 20240601\n"
       "cio_time_limit = 10\n"},
      {"toeplitz-high-corr",
       "Low noise / high correlation regression cell (rho=0.7, SNR=6) at desk scale",
       "methods = cio, ss, lasso, enet, mcp, scad\n"
       "protocol = fixed_k\n"
       "task = regression\n"
       "covariance = toeplitz\n"
       "rho = 0.7\n"
       "snr = 6\n"
       "p = 200\n"
       "k_true = 10\n"
       "n_grid = 100, 250, 500, 1000\n"
       "replications = 10\n"
       "seed = 20240602\n"
       "cio_time_limit = 10\n"},
      {"toeplitz-medium-noise",
       "Medium noise regression cell (rho=0.2, SNR=1) at desk scale",
       "methods = cio, ss, lasso, enet, mcp, scad\n"
       "protocol = fixed_k\n"
       "task = regression\n"
       "covariance = toeplitz\n"
       "rho = 0.2\n"
       "snr = 1\n"
       "p = 100\n"
       "k_true = 5\n"
       "n_grid = 100, 250, 500, 1000\n"
       "replications = 10\n"
       "seed = 20240603\n"
       "cio_time_limit = 10\n"},
      {"toeplitz-high-noise",
       "High noise regression cell (rho=0.2, SNR=0.05) at desk scale",
       "methods = cio, ss, lasso, enet, mcp, scad\n"
       "protocol = fixed_k\n"
       "task = regression\n"
       "covariance = toeplitz\n"
       "rho = 0.2\n"
       "snr = 0.05\n"
       "p = 50\n"
       "k_true = 5\n"
       "n_grid = 250, 500, 1000, 2000\n"
       "replications = 10\n"
       "seed = 20240604\n"
       "cio_time_limit = 10\n"},
      {"hardmi",
       "Mutual-incoherence-violating design; l1 methods provably miss the support",
       "methods = cio, ss, lasso, enet, mcp, scad\n"
       "protocol = fixed_k\n"
       "task = regression\n"
       "covariance = hardmi\n"
       "weight_scheme = uniform_over_root\n"
       "snr = 6\n"
       "p = 100\n"
       "k_true = 10\n"
       "n_grid = 5000\n"
       "replications = 10\n"
       "seed = 20240605\n"
       "cio_time_limit = 10\n"},
      {"classification-low-noise",
       "Classification cell (rho=0.2, SNR=6); hinge loss for cio/ss, logistic otherwise",
       "methods = cio, ss, lasso, enet, mcp, scad\n"
       "protocol = fixed_k\n"
       "task = classification\n"
       "covariance = toeplitz\n"
       "rho = 0.2\n"
       "snr = 6\n"
       "p = 100\n"
       "k_true = 10\n"
       "n_grid = 200, 500, 1000\n"
       "replications = 10\n"
       "seed = 20240606\n"
       "cio_time_limit = 30\n"},
      {"roc-sweep",
       "True-vs-false feature sweep over support sizes (ROC-style curves)",
       "methods = cio, ss, lasso, enet, mcp, scad\n"
       "protocol = roc\n"
       "task = regression\n"
       "covariance = toeplitz\n"
       "rho = 0.2\n"
       "snr = 6\n"
       "p = 100\n"
       "k_true = 10\n"
       "n_grid = 500\n"
       "k_grid = 2, 5, 8, 10, 12, 16, 20, 30, 40\n"
       "replications = 10\n"
       "seed = 20240607\n"
       "cio_time_limit = 10\n"},
      {"cv-k",
       "Cross-validated support size on the low-noise Toeplitz cell",
       "methods = cio, ss, lasso, enet, mcp, scad\n"
       "protocol = cv_k\n"
       "task = regression\n"
       "covariance = toeplitz\n"
       "rho = 0.2\n"
       "snr = 6\n"
       "p = 100\n"
       "k_true = 10\n"
       "n_grid = 250, 500, 1000\n"
       "replications = 10\n"
       "seed = 20240608\n"
       "cio_time_limit = 10\n"},
  };
  return list;
}

const Preset* find_preset(std::string_view name) {
  for (const auto& preset : presets()) {
    if (preset.name == name) return &preset;
  }
  return nullptr;
}

}  // namespace sparsereg
