#include "sevsteps/cli/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>

#include "sevsteps/cli/experiments.hpp"
#include "sevsteps/cli/report_io.hpp"
#include "sevsteps/cli/svg_plot.hpp"

#ifndef SEVSTEPS_VERSION
#define SEVSTEPS_VERSION "unknown"
#endif

namespace sevsteps::cli {

namespace {

using Clock = std::chrono::steady_clock;

/// Collects output files and summary lines for one command run.
class Run {
 public:
  Run(std::string command, const ExperimentConfig& config, std::ostream& out)
      : config_(config), out_(out), start_(Clock::now()) {
    manifest_.command = std::move(command);
    manifest_.version = SEVSTEPS_VERSION;
    manifest_.config = config.echo();
    if (config.sigma > 0.0) {
      say("note: sigma > 0 is heuristic coverage; the rough potential is not certified to lie in the sharp multiplier "
          "class on H^sigma");
    }
  }

  void file(const std::string& name, const std::string& text) {
    write_text(config_.output / name, text);
    manifest_.outputs.push_back(name);
  }

  void say(const std::string& line) {
    out_ << line << "\n";
    manifest_.results.push_back(line);
  }

  int finish(bool passed) {
    say(std::string("status: ") + (passed ? "PASS" : "FAIL"));
    manifest_.wall_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    write_text(config_.output / ("manifest_" + manifest_.command + ".txt"), render_manifest(manifest_));
    return passed ? kExitPass : kExitToleranceFailure;
  }

 private:
  const ExperimentConfig& config_;
  std::ostream& out_;
  Clock::time_point start_;
  Manifest manifest_;
};

std::string fixed(double v, int digits = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, v);
  return buffer;
}

std::vector<double> column(const ErrorReport& r, bool uniform) {
  std::vector<double> out;
  for (const auto& row : r.rows) out.push_back(uniform ? row.uniform.value : row.pointwise.value);
  return out;
}

std::vector<double> steps_of(const ErrorReport& r) {
  std::vector<double> out;
  for (const auto& row : r.rows) out.push_back(row.k);
  return out;
}

/// Reference slope line through the first point of the first series.
PlotSeries guide(const ErrorReport& r, double slope) {
  PlotSeries s{"k^" + fixed(slope, 2), {}, {}, false, true};
  if (r.rows.empty() || !(r.rows.front().uniform.value > 0.0)) return s;
  const double k0 = r.rows.front().k, e0 = r.rows.front().uniform.value;
  for (const auto& row : r.rows) {
    s.x.push_back(row.k);
    s.y.push_back(e0 * std::pow(row.k / k0, slope));
  }
  return s;
}

std::string fit_line(const std::string& label, const RateFit& f) {
  return label + " rate " + fixed(f.rate) + (f.model == RateModel::LogCorrected
                                                 ? " (c3 " + fixed(f.c3) + ", c4 " + fixed(f.c4) + ")"
                                                 : std::string()) +
         (f.unreliable ? " [unreliable]" : "");
}

int cmd_rates(const ExperimentConfig& config, std::ostream& out) {
  Run run("rates", config, out);
  const RatesResult result = run_rates(config);
  Table fits;
  fits.header = {"scheme", "model", "rate", "c3", "c4", "rms_log_residual", "unreliable", "in_band"};
  std::vector<PlotSeries> series;
  for (const auto& s : result.schemes) {
    run.file("rates_" + s.report.scheme + ".csv", to_csv(error_table(s.report)));
    series.push_back({s.report.scheme + " uniform", steps_of(s.report), column(s.report, true)});
    series.push_back({s.report.scheme + " pointwise", steps_of(s.report), column(s.report, false), true, true});
    if (s.exact) {
      run.say(s.report.scheme + ": errors at round-off level, rate exact");
      continue;
    }
    if (!s.fitted) {
      run.say(s.report.scheme + ": fewer than four step sizes, report only");
      continue;
    }
    for (const auto* f : {&s.plain, &s.log_corrected, &s.pointwise_plain}) {
      const std::string model = f == &s.pointwise_plain ? "pointwise_plain"
                                : f->model == RateModel::Plain ? "plain" : "log_corrected";
      fits.rows.push_back({s.report.scheme, model, format_number(f->rate), format_number(f->c3), format_number(f->c4),
                           format_number(f->rms_log_residual), f->unreliable ? "1" : "0", s.in_band ? "1" : "0"});
    }
    if (s.sqrt_log) {
      fits.rows.push_back({s.report.scheme, "sqrt_log_half", "0.5", format_number(s.sqrt_log->constant), "0",
                           format_number(s.sqrt_log->rms_log_residual), "0", s.in_band ? "1" : "0"});
    }
    run.say(s.report.scheme + ": " + fit_line("uniform plain", s.plain) + "; " +
            fit_line("log-corrected", s.log_corrected) + "; " + fit_line("pointwise plain", s.pointwise_plain) +
            (s.in_band ? " within " : " OUTSIDE ") + "[" + fixed(config.rate_min) + ", " + fixed(config.rate_max) +
            "]");
    if (s.sqrt_log) {
      run.say(s.report.scheme + ": informational fit C (1 + sqrt(log(T/k))) k^0.5 with C = " +
              fixed(s.sqrt_log->constant) + ", rms log residual " + fixed(s.sqrt_log->rms_log_residual));
    }
  }
  if (!result.schemes.empty() && !result.schemes.front().report.rows.empty()) {
    series.push_back(guide(result.schemes.front().report, 0.5));
  }
  run.file("rates_fits.csv", to_csv(fits));
  run.file("rates.svg", loglog_svg("Strong errors", "k", "error", series));
  run.say(std::string("error ordering (pointwise <= uniform <= N^(1/p) pointwise): ") +
          (result.ordering_ok ? "ok" : "VIOLATED"));
  return run.finish(result.passed);
}

int cmd_qualitative(const ExperimentConfig& config, std::ostream& out) {
  Run run("qualitative", config, out);
  const QualitativeResult result = run_qualitative(config);
  std::vector<PlotSeries> series;
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const auto& r = result.reports[i];
    run.file("qualitative_" + r.scheme + ".csv", to_csv(error_table(r)));
    series.push_back({r.scheme + " uniform", steps_of(r), column(r, true)});
    std::string values;
    for (double v : column(r, true)) values += " " + fixed(v);
    run.say(r.scheme + ": uniform errors" + values + (result.decreasing[i] ? " decreasing" : " NOT decreasing") +
            " (slack " + fixed(config.slack) + ")");
  }
  run.file("qualitative.svg", loglog_svg("Uniform strong error, irregular data", "k", "error", series));
  run.say(std::string("error ordering: ") + (result.ordering_ok ? "ok" : "VIOLATED"));
  return run.finish(result.passed);
}

int cmd_regularisation(const ExperimentConfig& config, std::ostream& out) {
  Run run("regularisation", config, out);
  const RegularisationResult result = run_regularisation(config);
  Table t;
  t.header = {"m", "sup_diff", "sup_diff_hw", "initial_defect", "M", "p", "seed"};
  PlotSeries diff{"sup difference", {}, {}}, defect{"initial defect", {}, {}, true, true};
  for (const auto& row : result.rows) {
    t.rows.push_back({format_number(row.m), format_number(row.sup_difference.value),
                      format_number(row.sup_difference.half_width), format_number(row.initial_defect),
                      std::to_string(config.M), format_number(config.p), std::to_string(config.seed)});
    diff.x.push_back(row.m);
    diff.y.push_back(row.sup_difference.value);
    defect.x.push_back(row.m);
    defect.y.push_back(row.initial_defect);
    run.say("m = " + fixed(row.m) + ": sup difference " + fixed(row.sup_difference.value) + " +- " +
            fixed(row.sup_difference.half_width));
  }
  run.file("regularisation_m.csv", to_csv(t));
  run.file("regularisation_lifted.csv", to_csv(error_table(result.lifted)));
  run.file("regularisation_m.svg", loglog_svg("Original vs regularised reference", "m", "difference", {diff, defect}));
  run.file("regularisation_lifted.svg",
           loglog_svg("Discretisation error, m = " + fixed(config.m_fixed), "k", "error",
                      {{result.lifted.scheme + " uniform", steps_of(result.lifted), column(result.lifted, true)},
                       {result.lifted.scheme + " pointwise", steps_of(result.lifted), column(result.lifted, false),
                        true, true}}));
  run.say("sup difference non-increasing in m: " + std::string(result.monotone_ok ? "yes" : "NO") + " (" +
          std::to_string(result.inversions) + " inversion(s))");
  std::string values;
  for (double v : column(result.lifted, true)) values += " " + fixed(v);
  run.say("lifted problem (m = " + fixed(config.m_fixed) + ") uniform errors" + values +
          (result.lifted_decreasing ? " decreasing" : " NOT decreasing"));
  run.say(std::string("error ordering: ") + (result.ordering_ok ? "ok" : "VIOLATED"));
  return run.finish(result.passed);
}

int cmd_inequalities(const ExperimentConfig& config, std::ostream& out) {
  Run run("inequalities", config, out);
  const InequalitiesResult result = run_inequalities(config);
  Table t;
  t.header = {"check", "lhs", "rhs", "ratio", "bound", "holds"};
  for (const auto& row : result.maximal) {
    t.rows.push_back({row.name, format_number(row.check.lhs), format_number(row.check.rhs),
                      format_number(row.check.ratio), format_number(row.check.bound), row.check.holds() ? "1" : "0"});
    run.say(row.name + ": ratio " + fixed(row.check.ratio) + " vs bound " + fixed(row.check.bound) +
            (row.check.holds() ? " ok" : " EXCEEDED"));
  }
  t.rows.push_back({"gronwall_continuous_violations", std::to_string(result.continuous_violations), "0", "0", "0",
                    result.continuous_violations == 0 ? "1" : "0"});
  t.rows.push_back({"gronwall_discrete_violations", std::to_string(result.discrete_violations), "0", "0", "0",
                    result.discrete_violations == 0 ? "1" : "0"});
  t.rows.push_back({"gronwall_hypothesis_rejections", std::to_string(result.hypothesis_rejections), "0", "0", "0",
                    result.hypothesis_rejections == 0 ? "1" : "0"});
  run.file("inequalities.csv", to_csv(t));
  run.say("gronwall: " + std::to_string(result.gronwall_cases) + " cases each, " +
          std::to_string(result.continuous_violations) + " continuous and " +
          std::to_string(result.discrete_violations) + " discrete violations, " +
          std::to_string(result.hypothesis_rejections) + " rejected inputs");
  return run.finish(result.passed);
}

int cmd_stability(const ExperimentConfig& config, std::ostream& out) {
  Run run("stability", config, out);
  const StabilityResult result = run_stability(config);
  std::vector<PlotSeries> series;
  for (const auto& s : result.schemes) {
    Table t;
    t.header = {"N_k", "k", "max_norm_moment", "max_norm_moment_hw", "M", "p", "seed"};
    PlotSeries line{s.scheme, {}, {}};
    for (const auto& row : s.rows) {
      t.rows.push_back({std::to_string(row.steps), format_number(row.k), format_number(row.moment.value),
                        format_number(row.moment.half_width), std::to_string(config.M), format_number(config.p),
                        std::to_string(config.seed)});
      line.x.push_back(static_cast<double>(row.steps));
      line.y.push_back(row.moment.value);
    }
    series.push_back(line);
    run.file("stability_" + s.scheme + ".csv", to_csv(t));
    run.say(s.scheme + ": max/min of ||max_j ||U^j|| ||_p over the step grid = " + fixed(s.ratio) +
            (s.ratio <= config.stability_ratio ? " ok" : " EXCEEDED"));
  }
  run.file("stability.svg", loglog_svg("Stability", "N_k", "moment of max norm", series));
  return run.finish(result.passed);
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"rates", "qualitative", "regularisation", "inequalities", "stability"};
  return names;
}

int run_command(const std::string& command, const ExperimentConfig& config, std::ostream& out) {
  try {
    if (command == "rates") return cmd_rates(config, out);
    if (command == "qualitative") return cmd_qualitative(config, out);
    if (command == "regularisation") return cmd_regularisation(config, out);
    if (command == "inequalities") return cmd_inequalities(config, out);
    if (command == "stability") return cmd_stability(config, out);
    out << "error: unknown command '" << command << "'\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    out << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Time discretisation experiments for semilinear stochastic evolution equations"};
  app.require_subcommand(1);
  std::string config_file;
  unsigned threads = 0;
  const std::map<std::string, std::string> descriptions{
      {"rates", "strong convergence rates for smooth data"},
      {"qualitative", "convergence without rate for irregular data"},
      {"regularisation", "resolvent regularisation study"},
      {"inequalities", "maximal inequalities and Gronwall checks"},
      {"stability", "moments of the maximal norm across step sizes"}};
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", config_file, "flat key = value configuration file")->required();
    sub->add_option("--threads", threads, "worker threads (default: SEVSTEPS_THREADS, then all cores)");
    sub->allow_extras();
    sub->footer("Any config key may be overridden with --key value.");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }
  const CLI::App* sub = app.get_subcommands().front();
  try {
    auto raw = read_config_file(config_file);
    const std::vector<std::string> extras = sub->remaining();
    for (std::size_t i = 0; i < extras.size(); ++i) {
      std::string key = extras[i];
      if (key.rfind("--", 0) != 0) throw ConfigurationError("unexpected argument '" + key + "'");
      key.erase(0, 2);
      std::string value;
      if (const auto eq = key.find('='); eq != std::string::npos) {
        value = key.substr(eq + 1);
        key.erase(eq);
      } else {
        if (i + 1 >= extras.size()) throw ConfigurationError("missing value for --" + key);
        value = extras[++i];
      }
      raw[key] = value;
    }
    if (threads > 0) raw["threads"] = std::to_string(threads);
    const ExperimentConfig config = make_config(raw);
    return run_command(sub->get_name(), config, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace sevsteps::cli
