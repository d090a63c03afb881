#include "smart/distribution.hpp"

#include <algorithm>
#include <numeric>

namespace smart {

std::vector<TokenProb> top_k_of(const Eigen::VectorXd& probs, std::size_t k) {
  std::vector<Token> order(static_cast<std::size_t>(probs.size()));
  std::iota(order.begin(), order.end(), Token{0});
  const std::size_t n = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n),
                    order.end(), [&](Token a, Token b) {
                      if (probs[a] != probs[b]) return probs[a] > probs[b];
                      return a < b;
                    });
  std::vector<TokenProb> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({order[i], probs[order[i]]});
  return out;
}

Token argmax_of(const Eigen::VectorXd& probs) {
  Eigen::Index best = 0;
  probs.maxCoeff(&best);  // first maximal index
  return static_cast<Token>(best);
}

std::vector<TokenProb> CategoricalModel::top_k(std::span<const Token> context,
                                               std::size_t k) const {
  return top_k_of(probs(context), k);
}

}  // namespace smart
