#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smart/cost_model.hpp"
#include "smart/policy.hpp"
#include "smart/rng.hpp"
#include "smart/synthetic.hpp"

namespace smart {

enum class AcceptanceMode {
  /// Accept the child matching the target argmax; RNG-free.
  greedy_match,
  /// Speculative sampling: accept child t with min(1, p(t)/q(t)), falling
  /// back to the clamped residual max(0, p - q) on rejection.
  stochastic,
  /// Target samples the next token; accept the child carrying it.
  sampled_match,
};

enum class PolicyKind { smart, baseline };

std::string_view to_string(AcceptanceMode m);
std::string_view to_string(PolicyKind p);
AcceptanceMode parse_acceptance_mode(std::string_view s);
PolicyKind parse_policy(std::string_view s);

struct VerifyOutcome {
  std::vector<NodeId> accepted;  ///< root excluded, in path order
  Token bonus = 0;
};

/// Verifies `tree` built over `context` against the target. Exactly one
/// bonus token is produced. In stochastic mode, siblings are tried in
/// descending draft_prob order and each rejection replaces the target
/// distribution with its normalised residual against the draft.
VerifyOutcome verify_tree(const DraftTree& tree, const CategoricalModel& target,
                          const CategoricalModel& draft, std::span<const Token> context,
                          AcceptanceMode mode, KeyedStream& rng);

/// Draws an index from an unnormalised non-negative weight vector.
Token sample_categorical(const Eigen::VectorXd& weights, KeyedStream& rng);

struct SimConfig {
  SyntheticModelPair model;
  CostModelParams params;
  BuildConfig build;
  PolicyKind policy = PolicyKind::smart;
  std::size_t generation_length = 128;
  std::size_t num_sequences = 8;
  AcceptanceMode acceptance_mode = AcceptanceMode::greedy_match;
  std::uint64_t seed = 0;
  /// Worker threads for independent sequences; results do not depend on it.
  std::size_t threads = 1;

  void validate() const;
};

struct StepOutcome {
  std::size_t tree_size = 0;
  std::size_t accepted = 0;
  double draft_ms = 0.0;
  double verify_ms = 0.0;
};

struct SequenceRun {
  std::vector<StepOutcome> steps;
  std::vector<Token> emitted;
};

struct SimReport {
  std::string policy;
  std::size_t batch_size = 1;
  std::size_t budget = 0;  ///< b_verify
  double alpha = 0.0;
  std::size_t total_tokens = 0;
  std::size_t steps = 0;
  std::size_t accepted_tokens = 0;
  std::size_t drafted_tokens = 0;
  double total_spec_ms = 0.0;
  double total_ar_ms = 0.0;
  double speedup = 0.0;
  double acceptance_rate = 0.0;
  double mean_tree_size = 0.0;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

/// Per-step modeled time of a tree with `tree_size` drafted tokens when the
/// whole batch verifies b * tree_size tokens in one pass.
StepOutcome model_step_cost(const CostModelParams& params, std::size_t tree_size,
                            std::size_t batch_size);

/// Seeded starting context of `sequence`, max(order, 1) tokens long.
std::vector<Token> make_prompt(const SimConfig& config, std::size_t sequence);

/// Decodes one sequence. The final step is truncated so exactly
/// generation_length tokens are emitted.
SequenceRun decode_sequence(const SimConfig& config, const ModelPair& models,
                            std::size_t sequence);

SimReport run_decode(const SimConfig& config);

enum class SweepAxis { batch, budget, alpha };

std::string_view to_string(SweepAxis a);
SweepAxis parse_axis(std::string_view s);

struct SweepPoint {
  double value = 0.0;
  SimReport smart;
  SimReport baseline;
};

/// Runs both policies at every axis value with shared seeds. The baseline
/// keeps its fixed (k, d, rerank_g) tree on every axis.
std::vector<SweepPoint> run_sweep(const SimConfig& base, SweepAxis axis,
                                  std::span<const double> values);

/// Applies one axis value to a config; throws ConfigError for values that
/// are not valid on that axis.
SimConfig apply_axis(SimConfig config, SweepAxis axis, double value);

}  // namespace smart
