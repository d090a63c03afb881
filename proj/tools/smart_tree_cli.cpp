// smart-tree: fit cost models, build draft trees, simulate and sweep.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "smart/config.hpp"
#include "smart/cost_model.hpp"
#include "smart/errors.hpp"
#include "smart/policy.hpp"
#include "smart/report.hpp"
#include "smart/simulator.hpp"
#include "smart/synthetic.hpp"

#ifndef SMART_TREE_VERSION
#define SMART_TREE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace smart;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct CommonOptions {
  std::string config;
  std::string params;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct FitOptions {
  std::string samples;
  double c_t = 1.0;
};

struct BuildOptions {
  std::string policy;
  std::string trace;
  std::optional<std::size_t> k, d, budget, batch;
  std::optional<double> alpha;
};

struct SweepOptions {
  std::string axis;
  std::vector<std::string> values;
  std::string policy;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "key=value run configuration");
  cmd->add_option("--params", o.params, "fitted cost-model parameter file");
  cmd->add_option("--seed", o.seed, "override sim.seed");
}

SimConfig resolve_config(const CommonOptions& o) {
  SimConfig c = o.config.empty() ? SimConfig{} : load_config(o.config);
  if (!o.params.empty()) {
    try {
      c.params = load_params(o.params);
    } catch (const ParseError& e) {
      // a broken parameter file is a configuration problem for this run
      throw ConfigError(o.params + ": " + e.what());
    }
  }
  if (o.seed) c.seed = *o.seed;
  return c;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  auto out = open_out(path);
  fn(out);
}

std::string config_snapshot(const SimConfig& c) {
  std::ostringstream s;
  write_config(s, c);
  return s.str();
}

void write_manifest(const fs::path& path, const std::string& command, const CommonOptions& o,
                    const std::optional<SimConfig>& resolved,
                    const std::vector<std::string>& artifacts, nlohmann::json extra = {}) {
  nlohmann::json m;
  m["command"] = command;
  m["config_path"] = o.config.empty() ? nlohmann::json(nullptr) : nlohmann::json(o.config);
  m["params_path"] = o.params.empty() ? nlohmann::json(nullptr) : nlohmann::json(o.params);
  if (resolved) {
    m["config"] = config_snapshot(*resolved);
    m["seed"] = resolved->seed;
  }
  m["artifacts"] = artifacts;
  m["version"] = SMART_TREE_VERSION;
  if (!extra.is_null()) m["arguments"] = std::move(extra);
  open_out(path) << m.dump(2) << '\n';
}

int cmd_fit(const FitOptions& f, const CommonOptions& o) {
  if (o.out.empty()) throw ConfigError("fit: --out is required");
  const auto samples = load_samples(f.samples);
  bool have_draft = false, have_verify = false;
  for (const auto& s : samples) {
    (s.kind == SampleKind::draft ? have_draft : have_verify) = true;
  }
  if (!have_draft) throw ConfigError("fit: no draft samples in " + f.samples);
  if (!have_verify) throw ConfigError("fit: no verify samples in " + f.samples);

  const DraftFit df = fit_draft_model(samples);
  const VerifyFit vf = fit_verify_model(samples);
  CostModelParams p;
  p.lambda = df.lambda;
  p.gamma = vf.gamma;
  p.delta = vf.delta;
  p.rho = vf.rho;
  p.c_t = f.c_t;
  p.validate();

  write_file(o.out, [&](std::ostream& out) { write_params(out, p); });
  std::printf("draft  lambda=%.6g rmse=%.6g\n", df.lambda, df.rmse);
  std::printf("verify gamma=%.6g delta=%.6g rho=%.6g rmse=%.6g%s\n", vf.gamma, vf.delta, vf.rho,
              vf.rmse, vf.gamma_clamped ? " (gamma clamped)" : "");
  write_manifest(o.out + ".manifest.json", "fit", o, std::nullopt, {o.out},
                 {{"samples", f.samples}, {"c_T", f.c_t}});
  return 0;
}

int cmd_build(const BuildOptions& b, const CommonOptions& o) {
  SimConfig c = resolve_config(o);
  if (!b.policy.empty()) c.policy = parse_policy(b.policy);
  if (b.k) c.build.k = *b.k;
  if (b.d) c.build.d = *b.d;
  if (b.alpha) c.build.alpha = *b.alpha;
  if (b.budget) c.build.b_verify = *b.budget;
  if (b.batch) c.build.batch_size = *b.batch;
  c.validate();
  c.build.validate();
  c.params.validate();
  c.model.validate();

  const ModelPair models = build_models(c.model);
  const auto context = make_prompt(c, 0);
  std::optional<BuildTrace> trace;
  DraftTree tree;
  if (c.policy == PolicyKind::smart) {
    BuildResult r = smart_build(models.draft, context, c.params, c.build);
    tree = std::move(r.tree);
    trace = std::move(r.trace);
  } else {
    tree = baseline_build(models.draft, context, c.params, c.build);
  }

  std::vector<std::string> artifacts;
  if (!o.out.empty()) {
    write_file(o.out, [&](std::ostream& out) { write_tree(out, tree); });
    artifacts.push_back(o.out);
  } else {
    write_tree(std::cout, tree);
  }
  if (!b.trace.empty()) {
    if (!trace) throw ConfigError("build: --trace needs --policy smart");
    write_file(b.trace, [&](std::ostream& out) { write_trace_jsonl(out, *trace); });
    artifacts.push_back(b.trace);
  }

  const TreeReward r = tree_reward(tree, c.params);
  std::cerr << to_string(c.policy) << " tree: " << tree.size() << " nodes, depth "
            << tree.depth() << ", L=" << r.l_tree << ", expected speedup " << r.ratio;
  if (trace) std::cerr << ", " << to_string(trace->termination);
  std::cerr << '\n';
  if (!o.out.empty()) write_manifest(o.out + ".manifest.json", "build", o, c, artifacts);
  return 0;
}

void write_report_files(const fs::path& dir, std::span<const SimReport> reports,
                        std::vector<std::string>& artifacts) {
  write_file(dir / "reports.csv", [&](std::ostream& out) { write_reports_csv(out, reports); });
  open_out(dir / "reports.json") << reports_to_json(reports).dump(2) << '\n';
  artifacts.push_back((dir / "reports.csv").string());
  artifacts.push_back((dir / "reports.json").string());
}

int cmd_simulate(const SweepOptions& s, const CommonOptions& o) {
  SimConfig c = resolve_config(o);
  if (!s.policy.empty()) c.policy = parse_policy(s.policy);
  if (s.threads) c.threads = *s.threads;
  const SimReport report = run_decode(c);
  const std::vector<SimReport> reports{report};
  print_summary(std::cout, reports);
  if (!o.out.empty()) {
    std::vector<std::string> artifacts;
    write_report_files(o.out, reports, artifacts);
    write_manifest(fs::path(o.out) / "manifest.json", "simulate", o, c, artifacts);
  }
  return 0;
}

std::vector<double> parse_values(const std::vector<std::string>& raw) {
  std::vector<double> values;
  for (const auto& v : raw) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size()) throw ConfigError("sweep: bad value `" + v + "`");
    values.push_back(x);
  }
  if (values.empty()) throw ConfigError("sweep: --values is empty");
  return values;
}

int cmd_sweep(const SweepOptions& s, const CommonOptions& o) {
  SimConfig c = resolve_config(o);
  if (s.threads) c.threads = *s.threads;
  const SweepAxis axis = parse_axis(s.axis);
  const std::vector<double> values = parse_values(s.values);
  const auto points = run_sweep(c, axis, values);
  const auto reports = flatten(points);
  print_summary(std::cout, reports);
  if (!o.out.empty()) {
    std::vector<std::string> artifacts;
    write_report_files(o.out, reports, artifacts);
    const fs::path long_csv = fs::path(o.out) / "sweep_long.csv";
    write_file(long_csv, [&](std::ostream& out) { write_sweep_long_csv(out, axis, points); });
    artifacts.push_back(long_csv.string());
    write_manifest(fs::path(o.out) / "manifest.json", "sweep", o, c, artifacts,
                   {{"axis", s.axis}, {"values", values}});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Draft-tree construction and speculative decoding simulator", "smart-tree"};
  app.set_version_flag("--version", SMART_TREE_VERSION);
  app.require_subcommand(1);

  CommonOptions common;
  FitOptions fit;
  BuildOptions build;
  SweepOptions sweep;

  auto* fit_cmd = app.add_subcommand("fit", "fit draft and verify latency models");
  fit_cmd->add_option("samples", fit.samples, "CSV with kind,tree_size,latency_ms")->required();
  fit_cmd->add_option("--out", common.out, "parameter file to write")->required();
  fit_cmd->add_option("--c-t", fit.c_t, "per-token target latency stored as c_T")
      ->check(CLI::PositiveNumber);

  auto* build_cmd = app.add_subcommand("build", "build one draft tree");
  add_common(build_cmd, common);
  build_cmd->add_option("--policy", build.policy, "smart or baseline");
  build_cmd->add_option("--trace", build.trace, "per-layer JSON lines trace");
  build_cmd->add_option("--out", common.out, "tree file (stdout when omitted)");
  build_cmd->add_option("--k", build.k);
  build_cmd->add_option("--d", build.d);
  build_cmd->add_option("--alpha", build.alpha);
  build_cmd->add_option("--budget", build.budget, "b_verify");
  build_cmd->add_option("--batch", build.batch);

  auto* sim_cmd = app.add_subcommand("simulate", "decode with one policy");
  add_common(sim_cmd, common);
  sim_cmd->add_option("--policy", sweep.policy, "smart or baseline");
  sim_cmd->add_option("--threads", sweep.threads);
  sim_cmd->add_option("--out", common.out, "output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "run both policies along one axis");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--axis", sweep.axis, "batch, budget or alpha")->required();
  sweep_cmd->add_option("--values", sweep.values, "comma separated")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--threads", sweep.threads);
  sweep_cmd->add_option("--out", common.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, common);
    if (*build_cmd) return cmd_build(build, common);
    if (*sim_cmd) return cmd_simulate(sweep, common);
    return cmd_sweep(sweep, common);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
