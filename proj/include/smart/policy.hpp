#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "smart/acceptance.hpp"
#include "smart/cost_model.hpp"
#include "smart/distribution.hpp"
#include "smart/draft_tree.hpp"

namespace smart {

/// How candidates within one layer see the tree's global reward.
enum class LayerScoring {
  /// Reward computed once at the start of the layer and shared by every
  /// candidate.
  frozen,
  /// Reward, path count and marginal cost refreshed after each admission.
  sequential,
};

std::string_view to_string(LayerScoring s);
/// Throws ConfigError on an unknown name.
LayerScoring parse_scoring(std::string_view s);

struct BuildConfig {
  std::size_t k = 8;            ///< candidates drawn per expanded node
  std::size_t d = 6;            ///< maximum depth
  double alpha = 0.8;           ///< discount on the marginal benefit
  std::size_t b_verify = 200;   ///< verification tokens per step, whole batch
  std::size_t batch_size = 1;
  std::size_t rerank_g = 60;    ///< nodes kept by the baseline re-rank
  LayerScoring scoring = LayerScoring::sequential;

  /// floor(b_verify / batch_size).
  std::size_t per_sequence_budget() const noexcept {
    return batch_size == 0 ? 0 : b_verify / batch_size;
  }

  /// Throws ConfigError unless k >= 1, 0 < alpha <= 1, batch_size >= 1,
  /// rerank_g >= 1 and the per-sequence budget is at least 1.
  void validate() const;
};

struct DecisionInputs {
  double delta_target = 0.0;
  double delta_spec = 0.0;
  double c_target = 0.0;
  double c_spec = 0.0;
  double alpha = 1.0;
};

struct Decision {
  double delta_j = 0.0;
  bool admitted = false;
};

/// delta_j = alpha * delta_target / delta_spec - c_target / c_spec, with the
/// global term taken as 0 when c_spec is 0. Admits iff delta_j > 0 strictly.
/// Throws DomainError when delta_spec <= 0.
Decision decision_rule(const DecisionInputs& in);

struct CandidateScore {
  NodeId parent;
  Token token = 0;
  double draft_prob = 0.0;
  double delta_target = 0.0;
  double delta_spec = 0.0;
  double delta_j = 0.0;
  bool admitted = false;
  /// Global terms the candidate was judged against.
  double c_target = 0.0;
  double c_spec = 0.0;
  /// Set when the candidate joined the tree (admitted and within budget).
  std::optional<NodeId> node;
};

enum class Termination { max_depth, empty_active_set, budget_exhausted };

std::string_view to_string(Termination t);

struct LayerRecord {
  std::size_t layer = 0;
  std::size_t active_size = 0;  ///< |A_l|, nodes that joined at this layer
  std::size_t candidates = 0;
  std::size_t admitted = 0;     ///< candidates with delta_j > 0
  std::size_t tree_size = 0;    ///< drafted nodes after the layer
  // Globals at the start of the layer.
  double c_target = 0.0;
  double c_spec = 0.0;
  double global_ratio = 0.0;
  std::size_t paths = 0;
  std::vector<CandidateScore> scores;
};

struct BuildTrace {
  std::vector<LayerRecord> layers;
  Termination termination = Termination::max_depth;

  std::size_t candidate_evaluations() const noexcept;
};

struct BuildResult {
  DraftTree tree;
  BuildTrace trace;
};

/// Greedy speedup-maximising construction. Layer by layer, every active node
/// is expanded with its top-k candidates. Candidates are visited in
/// descending path probability and join the tree while delta_j > 0 and the
/// per-sequence budget allows. config.scoring picks whether delta_j is taken
/// against the reward at the start of the layer or the live tree.
BuildResult smart_build(const DraftDistribution& draft, std::span<const Token> context,
                        const CostModelParams& params, const BuildConfig& config);

/// Likelihood-maximising two-stage baseline: expand the global top-k nodes
/// of each layer by cumulative probability to depth d, then keep the
/// rerank_g most probable nodes as a connected tree.
DraftTree baseline_build(const DraftDistribution& draft, std::span<const Token> context,
                         const CostModelParams& params, const BuildConfig& config);

/// Largest candidate tree the exhaustive oracle accepts.
inline constexpr std::size_t kMaxOracleCandidates = 20;

struct OracleResult {
  DraftTree tree;
  TreeReward reward;
  std::size_t subsets_evaluated = 0;
};

/// Exhaustive search over every ancestor-closed subset (size <= budget) of
/// the full k-ary candidate tree of depth d. Ties prefer the smaller tree,
/// then the lexicographically smaller sorted candidate set. Throws
/// CapacityError when the candidate tree exceeds kMaxOracleCandidates.
OracleResult brute_force_optimal(const DraftDistribution& draft,
                                 std::span<const Token> context,
                                 const CostModelParams& params,
                                 const BuildConfig& config);

/// One JSON object per layer.
void write_trace_jsonl(std::ostream& out, const BuildTrace& trace);

}  // namespace smart
