// pinchflow: run, sweep, classify and verify free-boundary mean curvature flow scenarios.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "pinchflow/pinchflow.hpp"

#ifndef PINCHFLOW_SCENARIO_DIR
#define PINCHFLOW_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;
using namespace pinchflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

fs::path output_root() {
  const char* env = std::getenv("PINCHFLOW_OUT");
  return env && *env ? fs::path(env) : fs::path("runs");
}

bool is_numerical(const std::exception& e) {
  return dynamic_cast<const NumericalBlowup*>(&e) || dynamic_cast<const InternalConsistencyFault*>(&e) ||
         dynamic_cast<const DegenerateState*>(&e);
}

int report_error(const std::exception& e) {
  std::fprintf(stderr, "pinchflow: %s\n", e.what());
  if (dynamic_cast<const ConfigError*>(&e)) return kExitValidation;
  if (is_numerical(e)) {
    if (auto* f = dynamic_cast<const InternalConsistencyFault*>(&e)) std::fprintf(stderr, "%s\n", f->dump().c_str());
    return kExitNumerical;
  }
  return kExitValidation;
}

void print_summary(const RunOutcome& r, const fs::path& dir) {
  const auto& rep = r.report;
  std::printf("%s: %s, stop %s", r.trajectory.profile_label.c_str(),
              r.info.analysis_error.empty() ? to_string(rep.type) : "Unclassified",
              to_string(r.trajectory.stop_reason));
  if (rep.T) std::printf(", T_est %.10g +- %.2g", rep.T->T, rep.T->uncertainty);
  if (rep.fit) std::printf(", p_fit %.6g (residual %.2g)", rep.fit->p, rep.fit->residual);
  std::printf("\n");
  for (const auto& v : rep.bound_verdicts) {
    std::printf("  %s: %s (%s)\n", v.theorem.c_str(), v.pass ? "pass" : "fail", v.detail.c_str());
  }
  if (!r.info.analysis_error.empty()) std::printf("  analysis: %s\n", r.info.analysis_error.c_str());
  std::printf("  written to %s\n", dir.string().c_str());
}

int cmd_run(const std::string& config_path) {
  const ScenarioConfig cfg = ScenarioConfig::load(config_path);
  const Scenario sc = cfg.resolve();
  const RunOutcome r = execute(sc);
  const fs::path dir = output_root() / sc.name;
  write_run_dir(r, dir, cfg.to_text());
  print_summary(r, dir);
  return kExitOk;
}

// Predicted exponent of the default certificate, if it predicts one.
std::optional<double> predicted_exponent(const Scenario& sc) {
  if (const auto* c = std::get_if<Type2Certificate>(&sc.certificate)) return 2.0 * c->delta / (c->alpha + 1.0);
  if (std::holds_alternative<Type1Certificate>(sc.certificate)) return 1.0;
  return std::nullopt;
}

// r(t) error against the exact shrinking sphere, for unperturbed cone runs.
std::optional<double> sphere_error(const Scenario& sc, const Trajectory& traj) {
  if (sc.profile_key != "cone" || sc.perturbation != 0.0) return std::nullopt;
  const double c = param_or(sc.profile_params, "c", 1.0);
  const SphereSolution sph(sc.boundary_height * std::sqrt(1.0 + c * c), sc.n, c);
  double err = 0.0;
  for (const auto& s : traj.samples) {
    if (s.t > 0.9 * sph.T()) break;
    err = std::max(err, std::abs(s.r - sph.r(s.t)) / sph.r(s.t));
  }
  return err;
}

struct SweepRow {
  std::string value;
  std::optional<RunOutcome> outcome;
  std::optional<double> predicted;
  std::optional<double> error;
  std::string failure;
};

int cmd_sweep(const std::string& config_path, const std::string& param, const std::string& values_csv, int jobs) {
  const ScenarioConfig base = ScenarioConfig::load(config_path);
  const Scenario base_sc = base.resolve();
  const std::string key = sweep_key(param);
  std::vector<std::string> values;
  for (const auto& v : io::split(values_csv, ',')) {
    const std::string t = detail::trim(v);
    if (t.empty()) continue;
    try {
      (void)io::to_double(t);
    } catch (const Error&) {
      throw ConfigError("--values: '" + t + "' is not a number");
    }
    values.push_back(t);
  }
  if (values.empty()) throw ConfigError("--values is empty");

  // Validate every member before starting any run.
  std::vector<ScenarioConfig> configs;
  for (const auto& v : values) {
    ScenarioConfig c = base;
    c.set(key, v);
    c.set("output.name", param + "_" + v);
    (void)c.resolve();
    configs.push_back(std::move(c));
  }

  const fs::path root = output_root() / (base_sc.name + "_sweep_" + param);
  auto work = [&](std::size_t i) {
    SweepRow row;
    row.value = values[i];
    try {
      const Scenario sc = configs[i].resolve();
      RunOutcome r = execute(sc);
      write_run_dir(r, root / sc.name, configs[i].to_text());
      row.predicted = predicted_exponent(sc);
      row.error = sphere_error(sc, r.trajectory);
      row.outcome = std::move(r);
    } catch (const std::exception& e) {
      row.failure = e.what();
    }
    return row;
  };

  const std::size_t workers = std::max(1, jobs);
  std::vector<SweepRow> rows(values.size());
  for (std::size_t start = 0; start < values.size(); start += workers) {
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t i = start; i < std::min(values.size(), start + workers); ++i) {
      batch.push_back(std::async(std::launch::async, work, i));
    }
    for (std::size_t j = 0; j < batch.size(); ++j) rows[start + j] = batch[j].get();
  }

  const bool with_order = param == "N";
  std::string table = "value,T_est,p_fit,predicted_exponent,verdict";
  if (with_order) table += ",error,order";
  table += "\n";
  bool failed = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& row = rows[i];
    auto opt = [](const std::optional<double>& x) { return x ? io::num(*x) : std::string(); };
    std::string verdict;
    std::optional<double> T, p;
    if (!row.outcome) {
      failed = true;
      verdict = "failed";
      std::fprintf(stderr, "pinchflow: %s=%s failed: %s\n", param.c_str(), row.value.c_str(), row.failure.c_str());
    } else {
      const auto& o = *row.outcome;
      if (o.report.T) T = o.report.T->T;
      if (o.report.fit) p = o.report.fit->p;
      if (!o.info.analysis_error.empty()) {
        verdict = "Unclassified";
      } else {
        verdict = to_string(o.report.type);
        for (const auto& v : o.report.bound_verdicts) verdict += v.pass ? ":pass" : ":fail";
      }
    }
    table += row.value + ',' + opt(T) + ',' + opt(p) + ',' + opt(row.predicted) + ',' + verdict;
    if (with_order) {
      std::optional<double> order;
      if (i > 0 && row.error && rows[i - 1].error && *row.error > 0.0) {
        order = std::log(*rows[i - 1].error / *row.error) /
                std::log(io::to_double(row.value) / io::to_double(rows[i - 1].value));
      }
      table += ',' + opt(row.error) + ',' + opt(order);
    }
    table += '\n';
  }
  fs::create_directories(root);
  io::write_atomic(root / "sweep_table.csv", table);
  std::fputs(table.c_str(), stdout);
  std::printf("written to %s\n", (root / "sweep_table.csv").string().c_str());
  return failed ? kExitNumerical : kExitOk;
}

int cmd_classify(const std::string& run_dir) {
  Scenario sc;
  const Trajectory traj = load_run_dir(run_dir, sc);
  SingularityReport rep;
  io::RunInfo info;
  const ProfileCurve profile = make_profile(sc.profile_key, sc.profile_params);
  info.C_sigma = visited_graph_floor(profile, traj);
  info.slope_bound = boundary_gradient_bound(info.C_sigma).bound;
  analyze(traj, sc, rep, info);
  io::Report out = io::build_report(traj, rep, sc.analysis, info);
  // Step statistics are not in the time series; keep the recorded ones.
  const auto original = io::parse_report(io::read_file(fs::path(run_dir) / "report.json"));
  for (const auto& k : out.keys()) {
    if (k.rfind("steps.", 0) == 0 || k.rfind("diagnostics.max_", 0) == 0) {
      auto it = original.find(k);
      if (it != original.end()) out.replace_raw(k, it->second);
    }
  }
  std::fputs(out.text().c_str(), stdout);
  return kExitOk;
}

int cmd_profiles() {
  for (const auto& p : profile_registry()) {
    std::string params;
    for (const auto& q : p.params) params += (params.empty() ? "" : " ") + q.name + "=" + io::num(q.default_value);
    std::printf("%-16s %-10s %s\n%-16s certificate: %s\n", p.key.c_str(), params.empty() ? "-" : params.c_str(),
                p.description.c_str(), "", p.default_certificate.c_str());
  }
  return kExitOk;
}

int cmd_verify(const std::string& scenario_dir, bool mutate_curvature, bool mutate_window, const std::vector<int>& only) {
  acceptance::Options opt;
  opt.scenario_dir = scenario_dir;
  opt.only.insert(only.begin(), only.end());
  if (mutate_curvature) opt.curvature = acceptance::curvature_without_multiplicity;
  if (mutate_window) {
    AnalysisConfig a;
    a.fit_skip_decades = 0.0;
    a.fit_span_decades = 0.5;
    opt.synthetic_analysis = a;
  }
  const auto results = acceptance::run_all(opt);
  acceptance::print(results);
  for (const auto& r : results) {
    if (!r.pass) return kExitFail;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotationally symmetric mean curvature flow with free boundary on a pinching support"};
  app.require_subcommand(1);

  std::string config, param, values, run_dir, scenario_dir = PINCHFLOW_SCENARIO_DIR;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool mutate_curvature = false, mutate_window = false;
  std::vector<int> only;

  auto* run = app.add_subcommand("run", "run one scenario and classify it");
  run->add_option("config", config, "scenario config file")->required();
  auto* sweep = app.add_subcommand("sweep", "run a scenario over a list of parameter values");
  sweep->add_option("config", config, "base scenario config file")->required();
  sweep->add_option("--param", param, "k, c, slope, a, boundary_height or N")->required();
  sweep->add_option("--values", values, "comma separated values")->required();
  sweep->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);
  auto* classify = app.add_subcommand("classify", "re-analyse a run directory");
  classify->add_option("run_dir", run_dir, "directory written by run")->required()->check(CLI::ExistingDirectory);
  auto* profiles = app.add_subcommand("profiles", "list registered support profiles");
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("--scenarios", scenario_dir, "scenario directory")->check(CLI::ExistingDirectory);
  verify->add_option("--only", only, "criterion ids to run");
  verify->add_flag("--mutate-curvature", mutate_curvature, "drop the rotational multiplicity from curvature");
  verify->add_flag("--mutate-fit-window", mutate_window, "fit only the last half decade");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run) return cmd_run(config);
    if (*sweep) return cmd_sweep(config, param, values, jobs);
    if (*classify) return cmd_classify(run_dir);
    if (*profiles) return cmd_profiles();
    if (*verify) return cmd_verify(scenario_dir, mutate_curvature, mutate_window, only);
  } catch (const std::exception& e) {
    return report_error(e);
  }
  return kExitOk;
}
