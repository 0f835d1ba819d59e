// bench: synthetic sparse-regression benchmark harness and single-fit CLI.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "sparsereg/bench.hpp"
#include "sparsereg/cio.hpp"
#include "sparsereg/csv.hpp"
#include "sparsereg/metrics.hpp"
#include "sparsereg/penalties.hpp"

namespace fs = std::filesystem;
using namespace sparsereg;

namespace {

int cmd_run(const std::string& config_path, const std::string& preset_name,
            const std::string& output_dir_override) {
  ExperimentConfig config;
  try {
    if (!preset_name.empty()) {
      const Preset* preset = find_preset(preset_name);
      if (!preset) {
        std::cerr << "error: unknown preset '" << preset_name << "'\n";
        return 1;
      }
      std::istringstream in(preset->document);
      config = parse_config(in);
    } else {
      config = parse_config_file(config_path);
    }
    if (!output_dir_override.empty()) config.output_dir = output_dir_override;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  const auto table = run_experiment(config);

  fs::create_directories(config.output_dir);
  const auto results_path = fs::path(config.output_dir) / "results.csv";
  const auto summary_path = fs::path(config.output_dir) / "results_summary.csv";
  {
    std::ofstream out(results_path);
    write_results_csv(out, table);
  }
  {
    std::ofstream out(summary_path);
    write_summary_csv(out, table);
  }

  std::size_t raw = 0, agg = 0;
  for (const auto& row : table.rows) (row.aggregate ? agg : raw)++;
  std::cout << "wrote " << results_path.string() << " (" << raw << " rows) and "
            << summary_path.string() << " (" << agg << " rows)\n";
  if (table.failures > 0) {
    std::cerr << table.failures << " cell(s) failed; see warnings above\n";
    return 2;
  }
  return 0;
}

int cmd_plot(const std::string& results_path, const std::string& kind_name,
             const std::string& out_dir) {
  const auto kind = plot_kind_from_name(kind_name);
  if (!kind) {
    std::cerr << "error: unknown plot kind '" << kind_name
              << "' (accuracy_vs_n, fdr_vs_n, mse_vs_n, roc_tf_ff, time_vs_n)\n";
    return 1;
  }
  try {
    std::ifstream in(results_path);
    if (!in) throw std::runtime_error("cannot open " + results_path);
    const auto table = read_results_csv(in);
    const fs::path outdir = out_dir.empty() ? fs::path(results_path).parent_path() : fs::path(out_dir);
    for (const auto& file : emit_plot_data(table, *kind, outdir)) {
      std::cout << file.string() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int cmd_presets(const std::string& show_name) {
  if (!show_name.empty()) {
    const Preset* preset = find_preset(show_name);
    if (!preset) {
      std::cerr << "error: unknown preset '" << show_name << "'\n";
      return 1;
    }
    std::cout << preset->document;
    return 0;
  }
  for (const auto& preset : presets()) {
    std::cout << preset.name << "\t" << preset.description << '\n';
  }
  return 0;
}

struct FitArgs {
  std::string method;
  std::string data_path;
  std::string response;
  std::string loss = "ols";
  Eigen::Index k = 0;
  double gamma = 0.0;
  double lambda = -1.0;
  bool no_standardize = false;
  bool no_header = false;
  double enet_alpha = 0.5;
  double mcp_gamma = 3.0;
  double scad_gamma = 3.7;
  double cio_time_limit = 60.0;
  std::string out_path;
  std::string trace_path;
};

void print_fit(const Dataset& data, const Eigen::VectorXd& w, double intercept,
               const std::string& out_path) {
  std::cout << "intercept " << format_double(intercept) << '\n';
  std::cout << "selected features:\n";
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (std::abs(w(j)) > kSupportZeroTol) {
      std::cout << "  " << (j + 1);
      if (!data.column_names.empty()) std::cout << " (" << data.column_names[static_cast<std::size_t>(j)] << ")";
      std::cout << "  " << format_double(w(j)) << '\n';
    }
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << "feature,index,coefficient\n";
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      const std::string name = data.column_names.empty()
                                   ? "x" + std::to_string(j + 1)
                                   : data.column_names[static_cast<std::size_t>(j)];
      out << name << ',' << (j + 1) << ',' << format_double(w(j)) << '\n';
    }
    std::cout << "wrote " << out_path << '\n';
  }
}

int cmd_fit(const FitArgs& args) {
  const auto method = method_from_name(args.method);
  if (!method) {
    std::cerr << "error: unknown method '" << args.method << "'\n";
    return 1;
  }
  const auto loss_kind = loss_from_name(args.loss);
  if (!loss_kind) {
    std::cerr << "error: unknown loss '" << args.loss << "'\n";
    return 1;
  }

  try {
    IngestOptions opts;
    opts.response = args.response;
    opts.standardize = !args.no_standardize;
    opts.has_header = !args.no_header;
    const Dataset data = ingest_matrix(fs::path(args.data_path), opts);

    LossModel model;
    model.kind = *loss_kind;

    if (*method == Method::Cio || *method == Method::Ss) {
      if (args.k < 1) {
        std::cerr << "error: --k is required for cio/ss\n";
        return 1;
      }
      const double gamma = args.gamma > 0.0
                               ? args.gamma
                               : 0.5 * gamma_zero_normalized(data, args.k);
      if (*method == Method::Ss) {
        SubgradientConfig cfg;
        cfg.gamma = gamma;
        const auto res = subgradient_solve(data, model, args.k, cfg);
        const auto w = coefficients_from_support(res.support, data, model, gamma);
        std::cout << "gamma " << format_double(gamma) << "  gap " << format_double(res.gap)
                  << "  iterations " << res.iterations << '\n';
        if (!args.trace_path.empty()) {
          std::ofstream out(args.trace_path);
          write_trace_csv(out, res.trace);
        }
        print_fit(data, w, 0.0, args.out_path);
      } else {
        const auto res = cutting_plane_solve(data, model, args.k, gamma, nullptr, 1e-4,
                                             args.cio_time_limit);
        const auto w = coefficients_from_support(res.support, data, model, gamma);
        std::cout << "gamma " << format_double(gamma) << "  value " << format_double(res.value)
                  << "  bound " << format_double(res.bound)
                  << (res.certified ? "  certified" : "  time-limited") << '\n';
        if (!args.trace_path.empty()) {
          std::ofstream out(args.trace_path);
          write_solver_log_csv(out, res.log);
        }
        print_fit(data, w, 0.0, args.out_path);
      }
      return 0;
    }

    // Penalized methods.
    if (model.kind != LossKind::Ols && model.kind != LossKind::Logistic) {
      std::cerr << "error: penalized methods support ols or logistic losses\n";
      return 1;
    }
    PenaltyFamily family = PenaltyFamily::L1;
    double alpha_mix = 1.0, gamma_shape = 3.0;
    if (*method == Method::Enet) {
      family = PenaltyFamily::ElasticNet;
      alpha_mix = args.enet_alpha;
    } else if (*method == Method::Mcp) {
      family = PenaltyFamily::Mcp;
      gamma_shape = args.mcp_gamma;
    } else if (*method == Method::Scad) {
      family = PenaltyFamily::Scad;
      gamma_shape = args.scad_gamma;
    }

    if (args.lambda >= 0.0) {
      const std::vector<double> path{args.lambda};
      const auto fit = cd_fit(data, model, family, path, alpha_mix, gamma_shape);
      const auto& pt = fit.points.front();
      std::cout << "lambda " << format_double(pt.lambda) << "  support " << pt.support_size
                << '\n';
      print_fit(data, pt.w, pt.intercept, args.out_path);
      return 0;
    }

    // No lambda given: select on a 2:1 train/validation split.
    const auto [train, valid] = split_train_validation(data);
    const auto grid = lambda_grid(train, model, family, alpha_mix);
    const auto fit = cd_fit(train, model, family, grid, alpha_mix, gamma_shape);
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fit.points.size(); ++i) {
      const auto& pt = fit.points[i];
      const double value = mse(valid, pt.w, pt.intercept);
      if (value < best_value) {
        best_value = value;
        best = i;
      }
    }
    // Refit at the selected lambda on the full data.
    const std::vector<double> final_path{fit.points[best].lambda};
    const auto final_fit = cd_fit(data, model, family, final_path, alpha_mix, gamma_shape);
    const auto& pt = final_fit.points.front();
    std::cout << "lambda " << format_double(pt.lambda) << " (validation MSE "
              << format_double(best_value) << ")  support " << pt.support_size << '\n';
    print_fit(data, pt.w, pt.intercept, args.out_path);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-regression benchmark harness"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment from a config file or preset");
  std::string run_config, run_preset, run_outdir;
  run->add_option("config", run_config, "config file path");
  run->add_option("--preset", run_preset, "built-in preset name (see 'bench presets')");
  run->add_option("--output-dir", run_outdir, "override the output directory");

  auto* plot = app.add_subcommand("plot", "emit plot-data series from a results file");
  std::string plot_results, plot_kind, plot_out;
  plot->add_option("results", plot_results, "results.csv produced by 'bench run'")->required();
  plot->add_option("--kind", plot_kind, "accuracy_vs_n|fdr_vs_n|mse_vs_n|roc_tf_ff|time_vs_n")
      ->required();
  plot->add_option("--out", plot_out, "output directory (defaults next to the results file)");

  auto* pres = app.add_subcommand("presets", "list built-in experiment presets");
  std::string preset_show;
  pres->add_option("--show", preset_show, "print the config document of one preset");

  auto* fit = app.add_subcommand("fit", "fit one method on a CSV design matrix");
  FitArgs fit_args;
  fit->add_option("--method", fit_args.method, "cio|ss|lasso|enet|mcp|scad")->required();
  fit->add_option("--data", fit_args.data_path, "CSV file with features and response")->required();
  fit->add_option("--response", fit_args.response, "response column name or 0-based index")
      ->required();
  fit->add_option("--loss", fit_args.loss, "ols|logistic|hinge|l2svm|l1svr|l2svr (default ols)");
  fit->add_option("--k", fit_args.k, "support size (cio/ss)");
  fit->add_option("--gamma", fit_args.gamma, "ridge coefficient (cio/ss); default p/(2nk max||x||^2)");
  fit->add_option("--lambda", fit_args.lambda, "penalty level; omitted = validation-selected");
  fit->add_flag("--no-standardize", fit_args.no_standardize, "skip column standardization");
  fit->add_flag("--no-header", fit_args.no_header, "data file has no header row");
  fit->add_option("--enet-alpha", fit_args.enet_alpha, "ElasticNet mixing (default 0.5)");
  fit->add_option("--mcp-gamma", fit_args.mcp_gamma, "MCP shape (default 3.0)");
  fit->add_option("--scad-gamma", fit_args.scad_gamma, "SCAD shape (default 3.7)");
  fit->add_option("--cio-time-limit", fit_args.cio_time_limit, "seconds (default 60)");
  fit->add_option("--out", fit_args.out_path, "write coefficients to this CSV file");
  fit->add_option("--trace", fit_args.trace_path, "write the solver trace/log to this CSV file");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (run_config.empty() && run_preset.empty()) {
      std::cerr << "error: give a config file or --preset\n";
      return 1;
    }
    return cmd_run(run_config, run_preset, run_outdir);
  }
  if (plot->parsed()) return cmd_plot(plot_results, plot_kind, plot_out);
  if (pres->parsed()) return cmd_presets(preset_show);
  if (fit->parsed()) return cmd_fit(fit_args);
  return 1;
}
