#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <vector>

#include "smart/draft_tree.hpp"

namespace smart {

struct TokenProb {
  Token token = 0;
  double prob = 0.0;

  friend bool operator==(const TokenProb&, const TokenProb&) = default;
};

/// Source of draft candidates. `context` is the full token sequence the next
/// token is conditioned on (committed prefix followed by drafted ancestors).
/// Implementations must be safe to query concurrently.
class DraftDistribution {
 public:
  virtual ~DraftDistribution() = default;

  /// At most k (token, prob) pairs sorted by descending probability, ties
  /// broken by ascending token. Tokens are distinct.
  virtual std::vector<TokenProb> top_k(std::span<const Token> context,
                                       std::size_t k) const = 0;
};

/// A distribution that can materialise its full probability vector.
class CategoricalModel : public DraftDistribution {
 public:
  virtual std::size_t vocab_size() const = 0;
  virtual Eigen::VectorXd probs(std::span<const Token> context) const = 0;

  std::vector<TokenProb> top_k(std::span<const Token> context,
                               std::size_t k) const override;
};

/// Descending-probability selection with ascending-index tie-break.
std::vector<TokenProb> top_k_of(const Eigen::VectorXd& probs, std::size_t k);

/// Index of the largest entry, lowest index on ties.
Token argmax_of(const Eigen::VectorXd& probs);

}  // namespace smart
