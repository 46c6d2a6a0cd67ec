// aamkit: run scenarios, run condition checks, emit plot data.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "aamkit/diagnostics.hpp"
#include "aamkit/error.hpp"
#include "aamkit/scenario.hpp"
#include "aamkit/trace_io.hpp"

namespace {

using namespace aamkit;

enum Exit : int {
  kOk = 0,
  kViolations = 1,
  kConfig = 2,
  kRuntime = 3,
  kIo = 4,
};

struct Flags {
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_iter;
  std::optional<double> tol;
  std::optional<std::string> out;
  std::size_t jobs = 1;
};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

// Runs body, mapping library errors to exit codes and messages on err.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error:\n";
    for (const auto& p : e.problems()) err << "  " << p << '\n';
    return kConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntime;
  }
}

io::ScenarioConfig load(const std::string& path, const Flags& flags) {
  auto config = io::load_scenario(path);
  const io::Overrides cli{flags.seed, flags.max_iter, flags.tol, flags.out};
  io::apply_overrides(config, io::environment_overrides(), cli);
  return config;
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

int run_one(const std::string& path, const Flags& flags, std::ostream& out,
            std::ostream& err) {
  return guarded(err, [&] {
    const auto config = load(path, flags);
    const auto result = io::run_scenario(config);
    const auto trace_path = std::filesystem::path(config.output.trace_path);
    if (trace_path.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(trace_path.parent_path(), ec);
    }
    io::write_trace(config.output.trace_path, result.trace,
                    {config.name, config.hash(), config.seed});
    const auto summary = io::format_summary(config, result);
    if (!config.output.summary_path.empty()) {
      write_text(config.output.summary_path, summary);
    }
    out << summary << "trace: " << config.output.trace_path << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_run(const Flags& flags) {
  const std::size_t count = flags.configs.size();
  std::vector<std::string> outs(count), errs(count);
  std::vector<int> codes(count, kOk);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      std::ostringstream out, err;
      codes[k] = run_one(flags.configs[k], flags, out, err);
      outs[k] = out.str();
      errs[k] = err.str();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(flags.jobs, 1, std::max<std::size_t>(count, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = kOk;
  for (std::size_t k = 0; k < count; ++k) {
    if (count > 1) std::cout << "== " << flags.configs[k] << '\n';
    std::cout << outs[k];
    std::cerr << errs[k];
    if (code == kOk) code = codes[k];
  }
  return code;
}

void print_report(const ViolationReport& r) {
  std::cout << "condition: " << r.condition << '\n'
            << "samples: " << r.samples << '\n'
            << "violations: " << r.violations.size() << '\n'
            << "worst_slack: " << fmt(r.worst_slack) << '\n';
  const std::size_t shown = std::min<std::size_t>(r.violations.size(), 10);
  auto point = [](const Point& p) {
    std::string s = "(";
    for (std::size_t j = 0; j < p.size(); ++j) s += (j ? ", " : "") + fmt(p[j]);
    return s + ")";
  };
  for (std::size_t k = 0; k < shown; ++k) {
    const auto& v = r.violations[k];
    std::cout << "  sample " << v.sample << ": slack " << fmt(v.slack) << " P="
              << point(v.p) << " P~=" << point(v.p_tilde) << " Q=" << point(v.q);
    if (!v.q_tilde.empty()) std::cout << " Q~=" << point(v.q_tilde);
    std::cout << '\n';
  }
  if (shown < r.violations.size()) {
    std::cout << "  ... " << r.violations.size() - shown << " more\n";
  }
}

int cmd_check(const Flags& flags, const std::string& which, std::size_t samples) {
  if (samples == 0) {
    std::cerr << "usage error: --samples must be at least 1\n";
    return kConfig;
  }
  if (flags.configs.size() != 1) {
    std::cerr << "usage error: check takes exactly one --config\n";
    return kConfig;
  }
  return guarded(std::cerr, [&] {
    auto config = load(flags.configs.front(), flags);
    if (which == "three-point" || which == "four-point") {
      const auto setup = io::condition_setup(config);
      const auto report =
          which == "three-point"
              ? check_three_point(*setup.cost, *setup.p_set, *setup.q_set_prev, samples,
                                  config.seed)
              : check_four_point(*setup.cost, *setup.p_set, *setup.q_set, samples,
                                 config.seed);
      print_report(report);
      return static_cast<int>(report.ok() ? kOk : kViolations);
    }
    if (which == "drift") {
      config.modulus_samples = samples;
      const auto result = io::run_scenario(config);
      std::size_t steps = 0, failures = 0;
      double worst = std::numeric_limits<double>::infinity();
      for (const auto& r : result.trace.records) {
        if (!r.drift_ok) continue;
        ++steps;
        if (!*r.drift_ok) ++failures;
        if (r.drift_slack) worst = std::min(worst, *r.drift_slack);
      }
      std::cout << "condition: drift\n"
                << "steps: " << steps << '\n'
                << "violations: " << failures << '\n'
                << "worst_slack: " << fmt(steps ? worst : 0.0) << '\n'
                << "note: " << result.metric_note << '\n';
      for (const auto& r : result.trace.records) {
        if (r.drift_ok && !*r.drift_ok) {
          std::cout << "  n " << r.n << ": slack " << fmt(*r.drift_slack) << '\n';
        }
      }
      return static_cast<int>(failures == 0 ? kOk : kViolations);
    }
    // lemma1: needs the limit minimizer for b_n and the limit value as c.
    config.oracle = true;
    config.modulus_samples = samples;
    const auto result = io::run_scenario(config);
    const double c = *result.oracle_value;
    const auto report = lemma1_diagnostic(result.trace, c);
    std::cout << "condition: lemma1\n"
              << "c: " << fmt(c) << '\n'
              << "evaluable: " << (report.evaluable ? "yes" : "no") << '\n';
    if (!report.note.empty()) std::cout << "note: " << report.note << '\n';
    if (!report.evaluable) return static_cast<int>(kRuntime);
    std::cout << "steps: " << report.step_ok.size() << '\n'
              << "violations: " << report.failures << '\n'
              << "final_min_a: " << fmt(report.final_min_a) << '\n';
    return static_cast<int>(report.hypothesis_holds() ? kOk : kViolations);
  });
}

int cmd_plotdata(const std::string& path) {
  return guarded(std::cerr, [&] {
    io::TraceFile file;
    try {
      file = io::read_trace(path);
    } catch (const CorruptTraceError& e) {
      std::cerr << "corrupt trace: " << e.what() << '\n';
      return static_cast<int>(kRuntime);
    }
    const auto& t = file.trace;
    std::cout << "# scenario\t" << file.header.scenario << '\n';
    if (!t.eps_available) {
      std::cout << "# note\tfixed-set run: eps and gamma are not defined and are "
                   "emitted as 0\n";
    }
    std::cout << "n\tcost\teps\tgamma\tdrift_slack\n";
    for (const auto& r : t.records) {
      const double eps = t.eps_available ? r.eps : 0.0;
      const double gamma = t.eps_available ? r.gamma : 0.0;
      std::cout << r.n << '\t' << fmt(r.cost) << '\t' << fmt(eps) << '\t' << fmt(gamma)
                << '\t' << (r.drift_slack ? fmt(*r.drift_slack) : "nan") << '\n';
    }
    return static_cast<int>(kOk);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aamkit: adaptive alternating minimization over drifting constraint sets"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string("aamkit ") + io::kToolVersion + "\nscenario schema " +
                           io::kScenarioSchema + "\ntrace schema " + io::kTraceSchema);

  Flags flags;
  auto add_common = [&flags](CLI::App* sub) {
    sub->add_option("--seed", flags.seed, "Seed override (beats AAMKIT_SEED)");
    sub->add_option("--max-iter", flags.max_iter, "Iteration cap override")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", flags.tol, "Stopping tolerance override")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out,
                    "Output directory for trace and summary (beats AAMKIT_OUT)");
  };

  auto* run = app.add_subcommand("run", "Run scenarios and write trace + summary files");
  run->add_option("--config,config", flags.configs, "Scenario file(s)")->required();
  add_common(run);
  run->add_option("--jobs,-j", flags.jobs, "Scenario files processed in parallel")
      ->check(CLI::PositiveNumber);

  std::string which;
  std::size_t samples = 1000;
  auto* check = app.add_subcommand(
      "check", "Run a condition checker on a scenario; exit 1 when violations are found");
  check->add_option("which", which, "three-point | four-point | drift | lemma1")
      ->required()
      ->check(CLI::IsMember({"three-point", "four-point", "drift", "lemma1"}));
  check->add_option("--config", flags.configs, "Scenario file")->required();
  check->add_option("--samples", samples,
                    "Sampled tuples (three/four point) or modulus samples (drift, lemma1)");
  add_common(check);

  std::string trace_path;
  auto* plot = app.add_subcommand("plotdata",
                                  "Print n, cost, eps, gamma, drift slack columns of a trace");
  plot->add_option("trace", trace_path, "Trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  if (run->parsed()) return cmd_run(flags);
  if (check->parsed()) return cmd_check(flags, which, samples);
  return cmd_plotdata(trace_path);
}
