#include <algorithm>
#include <cmath>
#include <thread>

#include "smart/errors.hpp"
#include "smart/simulator.hpp"

namespace smart {

std::string_view to_string(AcceptanceMode m) {
  switch (m) {
    case AcceptanceMode::greedy_match:
      return "greedy_match";
    case AcceptanceMode::stochastic:
      return "stochastic";
    case AcceptanceMode::sampled_match:
      return "sampled_match";
  }
  return "unknown";
}

std::string_view to_string(PolicyKind p) {
  return p == PolicyKind::smart ? "smart" : "baseline";
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::batch:
      return "batch";
    case SweepAxis::budget:
      return "budget";
    case SweepAxis::alpha:
      return "alpha";
  }
  return "unknown";
}

AcceptanceMode parse_acceptance_mode(std::string_view s) {
  if (s == "greedy_match") return AcceptanceMode::greedy_match;
  if (s == "stochastic") return AcceptanceMode::stochastic;
  if (s == "sampled_match") return AcceptanceMode::sampled_match;
  throw ConfigError("unknown acceptance mode `" + std::string(s) + "`");
}

PolicyKind parse_policy(std::string_view s) {
  if (s == "smart") return PolicyKind::smart;
  if (s == "baseline") return PolicyKind::baseline;
  throw ConfigError("unknown policy `" + std::string(s) + "`");
}

SweepAxis parse_axis(std::string_view s) {
  if (s == "batch") return SweepAxis::batch;
  if (s == "budget") return SweepAxis::budget;
  if (s == "alpha") return SweepAxis::alpha;
  throw ConfigError("unknown sweep axis `" + std::string(s) + "`");
}

void SimConfig::validate() const {
  model.validate();
  params.validate();
  build.validate();
  if (generation_length < 1) throw ConfigError("sim: generation_length must be >= 1");
  if (num_sequences < 1) throw ConfigError("sim: num_sequences must be >= 1");
  if (threads < 1) throw ConfigError("sim: threads must be >= 1");
}

StepOutcome model_step_cost(const CostModelParams& params, std::size_t tree_size,
                            std::size_t batch_size) {
  StepOutcome s;
  s.tree_size = tree_size;
  s.draft_ms = eval_draft_cost(params, static_cast<double>(tree_size));
  const double b = static_cast<double>(batch_size);
  s.verify_ms = eval_verify_cost(params, b * static_cast<double>(tree_size)).ms / b;
  return s;
}

namespace {

constexpr std::uint64_t kPromptStream = 0x70726f6d7074ULL;
constexpr std::uint64_t kStepStream = 0x73746570ULL;

}  // namespace

std::vector<Token> make_prompt(const SimConfig& config, std::size_t sequence) {
  KeyedStream rng({config.seed, kPromptStream, sequence});
  std::vector<Token> prompt(std::max<std::size_t>(config.model.order, 1));
  for (Token& t : prompt) {
    t = static_cast<Token>(rng() % config.model.vocab_size);
  }
  return prompt;
}

SequenceRun decode_sequence(const SimConfig& config, const ModelPair& models,
                            std::size_t sequence) {
  SequenceRun run;
  std::vector<Token> context = make_prompt(config, sequence);
  std::size_t step = 0;
  while (run.emitted.size() < config.generation_length) {
    DraftTree tree =
        config.policy == PolicyKind::smart
            ? smart_build(models.draft, context, config.params, config.build).tree
            : baseline_build(models.draft, context, config.params, config.build);

    KeyedStream rng({config.seed, kStepStream, sequence, step});
    const VerifyOutcome v =
        verify_tree(tree, models.target, models.draft, context, config.acceptance_mode, rng);

    std::vector<Token> produced;
    for (NodeId id : v.accepted) produced.push_back(tree.node(id).token);
    produced.push_back(v.bonus);
    const std::size_t remaining = config.generation_length - run.emitted.size();
    if (produced.size() > remaining) produced.resize(remaining);

    StepOutcome out = model_step_cost(config.params, tree.size(), config.build.batch_size);
    out.accepted = std::min(v.accepted.size(), produced.size() - 1);
    run.steps.push_back(out);
    run.emitted.insert(run.emitted.end(), produced.begin(), produced.end());
    context.insert(context.end(), produced.begin(), produced.end());
    ++step;
  }
  return run;
}

SimReport run_decode(const SimConfig& config) {
  config.validate();
  const ModelPair models = build_models(config.model);

  std::vector<SequenceRun> runs(config.num_sequences);
  const std::size_t workers = std::min(config.threads, config.num_sequences);
  if (workers <= 1) {
    for (std::size_t s = 0; s < runs.size(); ++s) runs[s] = decode_sequence(config, models, s);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < runs.size(); s += workers) {
          runs[s] = decode_sequence(config, models, s);
        }
      });
    }
  }

  SimReport r;
  r.policy = std::string(to_string(config.policy));
  r.batch_size = config.build.batch_size;
  r.budget = config.build.b_verify;
  r.alpha = config.build.alpha;
  for (const SequenceRun& run : runs) {
    r.total_tokens += run.emitted.size();
    for (const StepOutcome& s : run.steps) {
      ++r.steps;
      r.accepted_tokens += s.accepted;
      r.drafted_tokens += s.tree_size;
      r.total_spec_ms += s.draft_ms + s.verify_ms;
    }
  }
  r.total_ar_ms = config.params.c_t * static_cast<double>(r.total_tokens);
  r.speedup = r.total_spec_ms > 0.0 ? r.total_ar_ms / r.total_spec_ms : 0.0;
  r.acceptance_rate = r.drafted_tokens > 0 ? static_cast<double>(r.accepted_tokens) /
                                                 static_cast<double>(r.drafted_tokens)
                                           : 0.0;
  r.mean_tree_size =
      static_cast<double>(r.drafted_tokens) / static_cast<double>(std::max<std::size_t>(r.steps, 1));
  return r;
}

SimConfig apply_axis(SimConfig config, SweepAxis axis, double value) {
  auto as_count = [&](const char* what) {
    if (!(value >= 1.0) || value != std::floor(value)) {
      throw ConfigError(std::string("sweep: ") + what + " values must be positive integers");
    }
    return static_cast<std::size_t>(value);
  };
  switch (axis) {
    case SweepAxis::batch:
      config.build.batch_size = as_count("batch");
      break;
    case SweepAxis::budget:
      config.build.b_verify = as_count("budget");
      break;
    case SweepAxis::alpha:
      if (!(value > 0.0 && value <= 1.0)) {
        throw ConfigError("sweep: alpha values must lie in (0, 1]");
      }
      config.build.alpha = value;
      break;
  }
  config.build.validate();
  return config;
}

std::vector<SweepPoint> run_sweep(const SimConfig& base, SweepAxis axis,
                                  std::span<const double> values) {
  std::vector<SimConfig> configs;
  for (double v : values) configs.push_back(apply_axis(base, axis, v));

  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    SweepPoint p;
    p.value = values[i];
    SimConfig smart_cfg = configs[i];
    smart_cfg.policy = PolicyKind::smart;
    p.smart = run_decode(smart_cfg);
    SimConfig base_cfg = configs[i];
    base_cfg.policy = PolicyKind::baseline;
    p.baseline = run_decode(base_cfg);
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace smart
