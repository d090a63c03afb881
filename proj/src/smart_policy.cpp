#include <algorithm>
#include <limits>
#include <ostream>
#include <string>

#include "json.hpp"
#include "smart/errors.hpp"
#include "smart/policy.hpp"

namespace smart {

void BuildConfig::validate() const {
  if (k < 1) throw ConfigError("build: k must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("build: alpha must lie in (0, 1]");
  if (batch_size < 1) throw ConfigError("build: batch_size must be >= 1");
  if (rerank_g < 1) throw ConfigError("build: rerank_g must be >= 1");
  if (per_sequence_budget() < 1) {
    throw ConfigError("build: per-sequence budget b_verify / batch_size must be >= 1");
  }
}

Decision decision_rule(const DecisionInputs& in) {
  if (!(in.delta_spec > 0.0)) {
    throw DomainError("decision_rule: delta_spec must be positive");
  }
  const double global = in.c_spec > 0.0 ? in.c_target / in.c_spec : 0.0;
  Decision d;
  d.delta_j = in.alpha * in.delta_target / in.delta_spec - global;
  d.admitted = d.delta_j > 0.0;
  return d;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::max_depth:
      return "max_depth";
    case Termination::empty_active_set:
      return "empty_active_set";
    case Termination::budget_exhausted:
      return "budget_exhausted";
  }
  return "unknown";
}

std::string_view to_string(LayerScoring s) {
  return s == LayerScoring::frozen ? "frozen" : "sequential";
}

LayerScoring parse_scoring(std::string_view s) {
  if (s == "frozen") return LayerScoring::frozen;
  if (s == "sequential") return LayerScoring::sequential;
  throw ConfigError("unknown layer scoring `" + std::string(s) + "`");
}

std::size_t BuildTrace::candidate_evaluations() const noexcept {
  std::size_t total = 0;
  for (const auto& l : layers) total += l.candidates;
  return total;
}

namespace {

std::vector<Token> extend_context(std::span<const Token> context, const DraftTree& tree,
                                  NodeId node) {
  std::vector<Token> full(context.begin(), context.end());
  const auto drafted = tree.tokens_to(node);
  full.insert(full.end(), drafted.begin(), drafted.end());
  return full;
}

}  // namespace

BuildResult smart_build(const DraftDistribution& draft, std::span<const Token> context,
                        const CostModelParams& params, const BuildConfig& config) {
  config.validate();
  params.validate();
  if (params.lambda <= 0.0 && params.gamma * params.delta <= 0.0) {
    throw ConfigError("smart_build: cost model assigns no cost to drafted tokens");
  }
  const std::size_t budget = config.per_sequence_budget();

  BuildResult result;
  DraftTree& tree = result.tree;
  BuildTrace& trace = result.trace;
  std::vector<NodeId> active{kRoot};
  trace.termination = Termination::max_depth;

  for (std::size_t layer = 1; layer <= config.d; ++layer) {
    LayerRecord rec;
    rec.layer = layer;
    const TreeReward at_start = tree_reward(tree, params);
    rec.c_target = at_start.c_target;
    rec.c_spec = at_start.c_spec;
    rec.global_ratio = at_start.ratio;
    rec.paths = tree.leaf_count();

    struct Pending {
      CandidateScore score;
      double path_prob;
    };
    std::vector<Pending> pending;
    for (NodeId parent : active) {
      const auto full = extend_context(context, tree, parent);
      for (const TokenProb& tp : draft.top_k(full, config.k)) {
        Pending p;
        p.score.parent = parent;
        p.score.token = tp.token;
        p.score.draft_prob = tp.prob;
        p.path_prob = tree.node(parent).cum_prob * tp.prob;
        pending.push_back(std::move(p));
      }
    }
    rec.candidates = pending.size();
    std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
      if (a.path_prob != b.path_prob) return a.path_prob > b.path_prob;
      if (a.score.parent != b.score.parent) return a.score.parent < b.score.parent;
      return a.score.token < b.score.token;
    });

    // Scores `p` against `globals` on the current tree shape.
    auto score = [&](Pending& p, const TreeReward& globals) {
      CandidateScore& s = p.score;
      // The derivative is taken at the current size; at size 0 it is taken
      // at 1, where it stays finite for every rho.
      const Cost delta_spec = marginal_spec_cost(
          params, static_cast<double>(std::max<std::size_t>(tree.size(), 1)));
      s.delta_target = params.c_t * p.path_prob /
                       static_cast<double>(paths_after_adding(tree, s.parent));
      s.delta_spec = delta_spec.ms;
      s.c_target = globals.c_target;
      s.c_spec = globals.c_spec;
      if (delta_spec.saturated || globals.saturated) {
        s.delta_j = std::numeric_limits<double>::lowest();
        s.admitted = false;
        return;
      }
      const Decision dec = decision_rule(
          {s.delta_target, s.delta_spec, globals.c_target, globals.c_spec, config.alpha});
      s.delta_j = dec.delta_j;
      s.admitted = dec.admitted;
    };

    std::vector<NodeId> next;
    if (config.scoring == LayerScoring::frozen) {
      for (Pending& p : pending) score(p, at_start);
      for (Pending& p : pending) {
        if (!p.score.admitted) continue;
        ++rec.admitted;
        if (tree.size() >= budget) continue;
        p.score.node = tree.add_node(p.score.parent, p.score.token, p.score.draft_prob);
        next.push_back(*p.score.node);
      }
    } else {
      TreeReward current = at_start;
      for (Pending& p : pending) {
        score(p, current);
        if (!p.score.admitted) continue;
        ++rec.admitted;
        if (tree.size() >= budget) continue;
        p.score.node = tree.add_node(p.score.parent, p.score.token, p.score.draft_prob);
        next.push_back(*p.score.node);
        current = tree_reward(tree, params);
      }
    }
    rec.active_size = next.size();
    rec.tree_size = tree.size();
    rec.scores.reserve(pending.size());
    for (Pending& p : pending) rec.scores.push_back(std::move(p.score));
    trace.layers.push_back(std::move(rec));

    active = std::move(next);
    if (active.empty()) {
      trace.termination = Termination::empty_active_set;
      break;
    }
    if (tree.size() >= budget) {
      trace.termination = Termination::budget_exhausted;
      break;
    }
  }
  return result;
}

void write_trace_jsonl(std::ostream& out, const BuildTrace& trace) {
  for (const LayerRecord& rec : trace.layers) {
    nlohmann::json j;
    j["layer"] = rec.layer;
    j["active_size"] = rec.active_size;
    j["candidates"] = rec.candidates;
    j["admitted"] = rec.admitted;
    j["tree_size"] = rec.tree_size;
    j["global_ratio"] = rec.global_ratio;
    j["c_target"] = rec.c_target;
    j["c_spec"] = rec.c_spec;
    j["paths"] = rec.paths;
    const bool last = &rec == &trace.layers.back();
    j["termination"] = last ? nlohmann::json(std::string(to_string(trace.termination)))
                            : nlohmann::json(nullptr);
    auto& scores = j["scores"] = nlohmann::json::array();
    for (const CandidateScore& s : rec.scores) {
      scores.push_back({{"parent", s.parent.index},
                        {"token", s.token},
                        {"draft_prob", s.draft_prob},
                        {"delta_target", s.delta_target},
                        {"delta_spec", s.delta_spec},
                        {"delta_j", s.delta_j},
                        {"c_target", s.c_target},
                        {"c_spec", s.c_spec},
                        {"admitted", s.admitted},
                        {"node", s.node ? nlohmann::json(s.node->index)
                                        : nlohmann::json(nullptr)}});
    }
    out << j.dump() << '\n';
  }
}

}  // namespace smart
