#include "crplab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "crplab/asymptotics.hpp"
#include "crplab/martingale.hpp"
#include "crplab/model.hpp"
#include "crplab/numeric.hpp"
#include "crplab/parallel.hpp"
#include "crplab/rng.hpp"
#include "crplab/stats.hpp"
#include "crplab/version.hpp"

namespace crplab {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    s += fmt_double(xs[i]);
  }
  return s + "]";
}

std::string fmt_list(const std::vector<std::int64_t>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(xs[i]);
  }
  return s + "]";
}

const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> names = {
      {"sample", Command::sample},     {"exact", Command::exact},
      {"constants", Command::constants}, {"lln", Command::lln},
      {"clt", Command::clt},           {"martingale", Command::martingale},
      {"diagnostics", Command::diagnostics}};
  return names;
}

std::string command_name(Command c) {
  for (const auto& [name, value] : command_names())
    if (value == c) return name;
  return "?";
}

void validate_config(const ExperimentConfig& cfg) {
  for (const double a : cfg.alphas)
    if (!(a >= 0.0 && a < 1.0))
      throw UsageError("--alpha " + fmt_double(a) + " is outside [0,1)");
  for (const double l : cfg.lambdas)
    if (!(l > 0.0)) throw UsageError("--lambda " + fmt_double(l) + " must be positive");
  for (const std::int64_t n : cfg.ns)
    if (n < 1) throw UsageError("--n " + std::to_string(n) + " must be >= 1");
  if (cfg.alphas.empty()) throw UsageError("--alpha is required (repeatable for grids)");
  const bool theta_mode = cfg.command == Command::exact && !cfg.thetas.empty();
  if (cfg.lambdas.empty() && !theta_mode)
    throw UsageError("--lambda is required (repeatable for grids)");
  if (!cfg.thetas.empty() && cfg.command != Command::exact)
    throw UsageError("--theta applies to the exact command only");
  if (cfg.ns.empty() && cfg.command != Command::constants)
    throw UsageError("--n is required for this command");
  if (cfg.replicates < 1)
    throw UsageError("--replicates " + std::to_string(cfg.replicates) + " must be >= 1");
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0))
    throw UsageError("--delta " + fmt_double(cfg.delta) + " must lie in (0,1]");
  if (!(cfg.eps > 0.0)) throw UsageError("--eps " + fmt_double(cfg.eps) + " must be positive");
}

std::string build_config_echo(const ExperimentConfig& cfg) {
  std::string s = "command=" + command_name(cfg.command);
  s += " lambda=" + fmt_list(cfg.lambdas);
  s += " alpha=" + fmt_list(cfg.alphas);
  s += " theta=" + fmt_list(cfg.thetas);
  s += " n=" + fmt_list(cfg.ns);
  s += " replicates=" + std::to_string(cfg.replicates);
  s += " seed=" + std::to_string(cfg.seed);
  s += " delta=" + fmt_double(cfg.delta);
  s += " eps=" + fmt_double(cfg.eps);
  return s;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class CellTimer {
 public:
  CellTimer(RunReport& report, std::string label)
      : report_(report), label_(std::move(label)), start_(std::chrono::steady_clock::now()) {}
  ~CellTimer() {
    const auto stop = std::chrono::steady_clock::now();
    report_.timings_ms.emplace_back(
        label_, std::chrono::duration<double, std::milli>(stop - start_).count());
  }

 private:
  RunReport& report_;
  std::string label_;
  std::chrono::steady_clock::time_point start_;
};

std::string cell_label(double lambda, double alpha, std::int64_t n) {
  std::string s = "lambda=" + fmt_double(lambda) + " alpha=" + fmt_double(alpha);
  if (n >= 0) s += " n=" + std::to_string(n);
  return s;
}

// Per-cell seeds: cells draw from disjoint stream families.
std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t ordinal) {
  return rng::stream_key(seed, ordinal);
}

void run_constants(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"lambda", "alpha", "m", "s2", "sigma2", "a"};
  for (const double lam : cfg.lambdas)
    for (const double al : cfg.alphas) {
      CellTimer timer(report, cell_label(lam, al, -1));
      const Constants c = constants(ScalingParams{al, lam});
      report.rows.push_back({lam, al, c.m, c.s2, c.sigma2 ? *c.sigma2 : kNaN, c.a});
    }
}

void run_exact(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"lambda", "alpha", "theta", "n", "k", "p"};
  const auto emit = [&](double lam, const ModelParams& params, std::int64_t n) {
    const KDistribution dist = exact_k_distribution(params, n);
    for (std::int64_t k = 1; k <= n; ++k)
      report.rows.push_back({lam, params.alpha, params.theta, static_cast<double>(n),
                             static_cast<double>(k), dist.pmf[static_cast<std::size_t>(k - 1)]});
  };
  if (!cfg.thetas.empty()) {
    for (const double th : cfg.thetas)
      for (const double al : cfg.alphas)
        for (const std::int64_t n : cfg.ns) {
          CellTimer timer(report, "theta=" + fmt_double(th) + " alpha=" + fmt_double(al) +
                                      " n=" + std::to_string(n));
          emit(kNaN, ModelParams{al, th}, n);
        }
    return;
  }
  for (const double lam : cfg.lambdas)
    for (const double al : cfg.alphas)
      for (const std::int64_t n : cfg.ns) {
        CellTimer timer(report, cell_label(lam, al, n));
        emit(lam, ScalingParams{al, lam}.at(n), n);
      }
}

void run_sample(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"lambda", "alpha", "n", "replicate", "k"};
  std::uint64_t ordinal = 0;
  for (const double lam : cfg.lambdas)
    for (const double al : cfg.alphas)
      for (const std::int64_t n : cfg.ns) {
        CellTimer timer(report, cell_label(lam, al, n));
        const auto ks = sample_k_batch(ScalingParams{al, lam}, n, cfg.replicates,
                                       cell_seed(cfg.seed, ordinal++));
        for (std::int64_t r = 0; r < cfg.replicates; ++r)
          report.rows.push_back({lam, al, static_cast<double>(n), static_cast<double>(r),
                                 static_cast<double>(ks[static_cast<std::size_t>(r)])});
      }
}

void run_lln(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"lambda",        "alpha",      "n",          "replicates",
                    "mean_k_over_n", "m_target",   "max_abs_gap", "exact_mean_over_n"};
  std::uint64_t ordinal = 0;
  for (const double lam : cfg.lambdas)
    for (const double al : cfg.alphas)
      for (const std::int64_t n : cfg.ns) {
        CellTimer timer(report, cell_label(lam, al, n));
        const ScalingParams scaling{al, lam};
        const double m_target = constants(scaling).m;
        const auto ks =
            sample_k_batch(scaling, n, cfg.replicates, cell_seed(cfg.seed, ordinal++));
        CompensatedSum mean;
        double max_gap = 0.0;
        for (const std::int64_t k : ks) {
          const double ratio = static_cast<double>(k) / static_cast<double>(n);
          mean.add(ratio);
          max_gap = std::max(max_gap, std::abs(ratio - m_target));
        }
        report.rows.push_back({lam, al, static_cast<double>(n),
                               static_cast<double>(cfg.replicates),
                               mean.value() / static_cast<double>(cfg.replicates), m_target,
                               max_gap,
                               exact_mean_k(scaling.at(n), n) / static_cast<double>(n)});
      }
}

void run_clt(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"lambda", "alpha", "n", "replicates", "ks", "fitted_slope"};
  std::uint64_t ordinal = 0;
  for (const double lam : cfg.lambdas)
    for (const double al : cfg.alphas) {
      const ScalingParams scaling{al, lam};
      KsReport ks_report;
      ks_report.replicates = cfg.replicates;
      for (const std::int64_t n : cfg.ns) {
        CellTimer timer(report, cell_label(lam, al, n));
        const auto ks =
            sample_k_batch(scaling, n, cfg.replicates, cell_seed(cfg.seed, ordinal++));
        ks_report.n_values.push_back(n);
        ks_report.ks.push_back(ks_to_normal(standardize(ks, scaling, n)));
      }
      const double slope = ks_report.n_values.size() >= 3 ? fit_rate(ks_report) : kNaN;
      for (std::size_t i = 0; i < ks_report.n_values.size(); ++i)
        report.rows.push_back({lam, al, static_cast<double>(ks_report.n_values[i]),
                               static_cast<double>(cfg.replicates), ks_report.ks[i], slope});
    }
}

void run_martingale(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"lambda",      "alpha",        "n",
                    "paths",       "delta",        "eps",
                    "increment_violations", "mean_y_final", "mean_v2",
                    "max_v2",      "hh_increment_term", "hh_variance_term",
                    "hh_ln",       "azuma_fraction", "azuma_bound",
                    "azuma_c"};
  for (const double al : cfg.alphas)
    if (al == 0.0)
      throw UsageError("--alpha 0 is not supported by the martingale command "
                       "(use diagnostics for the independent-increment regime)");
  std::uint64_t ordinal = 0;
  for (const double lam : cfg.lambdas)
    for (const double al : cfg.alphas)
      for (const std::int64_t n : cfg.ns) {
        CellTimer timer(report, cell_label(lam, al, n));
        const ScalingParams scaling{al, lam};
        const std::uint64_t seed = cell_seed(cfg.seed, ordinal++);
        const PathBatchStats stats =
            path_batch_stats(scaling, n, cfg.replicates, cfg.delta, seed);
        const double azuma =
            azuma_concentration_check(scaling, n, cfg.eps, cfg.replicates, seed);
        const AzumaBound bound = azuma_violation_bound(scaling, n, cfg.eps);
        report.rows.push_back({lam, al, static_cast<double>(n),
                               static_cast<double>(stats.paths), cfg.delta, cfg.eps,
                               static_cast<double>(stats.increment_violations),
                               stats.mean_y_final, stats.mean_v2, stats.max_v2,
                               stats.hall_heyde.increment_term, stats.hall_heyde.variance_term,
                               stats.hall_heyde.value(), azuma, bound.probability,
                               bound.c_constant});
      }
}

void run_diagnostics(const ExperimentConfig& cfg, RunReport& report) {
  report.columns = {"lambda",       "alpha",        "n",
                    "phi_gap",      "weighted_sum_gap", "n_phi_gap",
                    "n_weighted_sum_gap", "variance_sum", "petrov_sigma_n2",
                    "petrov_sigma_n2_over_n", "petrov_lyapunov", "petrov_degenerate"};
  for (const double lam : cfg.lambdas)
    for (const double al : cfg.alphas)
      for (const std::int64_t n : cfg.ns) {
        CellTimer timer(report, cell_label(lam, al, n));
        const ScalingParams scaling{al, lam};
        const PhiLimitGaps gaps = phi_limit_gaps(scaling, n);
        const double dn = static_cast<double>(n);
        double variance_sum = kNaN;
        double sigma_n2 = kNaN, sigma_n2_over_n = kNaN, lyapunov = kNaN, degenerate = kNaN;
        if (al > 0.0) {
          variance_sum = deterministic_variance_sum(scaling, n);
        } else {
          const VarianceReport petrov = petrov_diagnostics(lam, n);
          sigma_n2 = petrov.sigma_n2;
          sigma_n2_over_n = petrov.sigma_n2 / dn;
          lyapunov = petrov.lyapunov;
          degenerate = petrov.degenerate ? 1.0 : 0.0;
        }
        report.rows.push_back({lam, al, dn, gaps.phi_gap, gaps.weighted_sum_gap,
                               dn * gaps.phi_gap, dn * gaps.weighted_sum_gap, variance_sum,
                               sigma_n2, sigma_n2_over_n, lyapunov, degenerate});
      }
}

}  // namespace

ExperimentConfig parse_config(int argc, const char* const* argv) {
  ExperimentConfig cfg;
  std::string command;
  std::string format = "csv";

  CLI::App app{std::string(kToolName) +
               " - Ewens-Pitman / GCRP simulation and verification toolkit"};
  app.set_config("--config", "", "Read options from a TOML/INI file (flags override it)");
  app.add_option("--command", command, "One of: sample exact constants lln clt martingale diagnostics")
      ->required();
  app.add_option("--lambda", cfg.lambdas, "Scaling lambda > 0 (repeatable; grid with --alpha)");
  app.add_option("--alpha", cfg.alphas, "Discount alpha in [0,1) (repeatable)");
  app.add_option("--theta", cfg.thetas, "Fixed theta for the exact command (repeatable)");
  app.add_option("--n", cfg.ns, "Sample sizes (repeatable)");
  app.add_option("--replicates", cfg.replicates, "Monte Carlo replicates per cell");
  app.add_option("--seed", cfg.seed, "64-bit experiment seed");
  app.add_option("--delta", cfg.delta, "Exponent delta in (0,1] for the normalization rate");
  app.add_option("--eps", cfg.eps, "Concentration threshold for the martingale command");
  app.add_option("--out", cfg.out, "Output path (default: stdout; CRPLAB_OUT_DIR prefixes relative paths)");
  app.add_option("--format", format, "csv or json");
  app.add_option("--threads", cfg.threads, "Worker cap (never affects results; 0 = all cores)");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& err) {
    throw UsageError(err.what());
  }

  const auto it = command_names().find(command);
  if (it == command_names().end())
    throw UsageError("--command " + command + " is not a known command");
  cfg.command = it->second;

  if (format == "csv") {
    cfg.format = Format::csv;
  } else if (format == "json") {
    cfg.format = Format::json;
  } else {
    throw UsageError("--format " + format + " must be csv or json");
  }

  if (!cfg.out.empty() && std::filesystem::path(cfg.out).is_relative()) {
    if (const char* dir = std::getenv("CRPLAB_OUT_DIR"); dir != nullptr && *dir != '\0')
      cfg.out = (std::filesystem::path(dir) / cfg.out).string();
  }

  validate_config(cfg);
  return cfg;
}

std::string RunReport::results_section() const {
  std::string s;
  s += "# ";
  s += kToolName;
  s += " ";
  s += kToolVersion;
  s += "\n# ";
  s += config_echo;
  s += "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) s += ",";
    s += columns[i];
  }
  s += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ",";
      s += fmt_double(row[i]);
    }
    s += "\n";
  }
  return s;
}

std::string RunReport::render(Format format) const {
  if (format == Format::csv) {
    std::string s = results_section();
    s += "# threads=" + std::to_string(threads_used) + "\n";
    for (const auto& [label, ms] : timings_ms)
      s += "# timing " + label + " ms=" + fmt_double(ms) + "\n";
    return s;
  }
  nlohmann::ordered_json root;
  root["tool"] = kToolName;
  root["version"] = kToolVersion;
  root["config"] = config_echo;
  root["columns"] = columns;
  nlohmann::ordered_json results = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (std::isnan(row[i]))
        obj[columns[i]] = nullptr;
      else
        obj[columns[i]] = row[i];
    }
    results.push_back(std::move(obj));
  }
  root["results"] = std::move(results);
  nlohmann::ordered_json meta;
  meta["threads"] = threads_used;
  nlohmann::ordered_json timing = nlohmann::ordered_json::array();
  for (const auto& [label, ms] : timings_ms) timing.push_back({{"cell", label}, {"ms", ms}});
  meta["timing"] = std::move(timing);
  root["meta"] = std::move(meta);
  return root.dump(2) + "\n";
}

RunReport run(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.threads > 0) set_max_threads(cfg.threads);
  RunReport report;
  report.config = cfg;
  report.config_echo = build_config_echo(cfg);
  report.threads_used = max_threads();
  switch (cfg.command) {
    case Command::constants: run_constants(cfg, report); break;
    case Command::exact: run_exact(cfg, report); break;
    case Command::sample: run_sample(cfg, report); break;
    case Command::lln: run_lln(cfg, report); break;
    case Command::clt: run_clt(cfg, report); break;
    case Command::martingale: run_martingale(cfg, report); break;
    case Command::diagnostics: run_diagnostics(cfg, report); break;
  }
  return report;
}

void write_report_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dest(path);
  if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
  fs::path tmp = dest;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed to write " + tmp.string());
  }
  fs::rename(tmp, dest);
}

int run_cli(int argc, const char* const* argv) {
  const auto error_record = [](const char* kind, const std::string& message) {
    nlohmann::ordered_json rec;
    rec["error"] = kind;
    rec["message"] = message;
    std::cerr << rec.dump() << "\n";
  };
  try {
    const ExperimentConfig cfg = parse_config(argc, argv);
    const RunReport report = run(cfg);
    const std::string content = report.render(cfg.format);
    if (cfg.out.empty())
      std::cout << content;
    else
      write_report_atomic(cfg.out, content);
    return kExitOk;
  } catch (const HelpRequested& help) {
    std::cout << help.what();
    return kExitOk;
  } catch (const UsageError& err) {
    error_record("usage", err.what());
    return kExitUsage;
  } catch (const ContractError& err) {
    error_record("usage", err.what());
    return kExitUsage;
  } catch (const BudgetError& err) {
    error_record("budget", err.what());
    return kExitBudget;
  } catch (const std::exception& err) {
    error_record("internal", err.what());
    return kExitInternal;
  }
}

}  // namespace crplab
