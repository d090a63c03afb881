#include "smart/synthetic.hpp"

#include <cmath>
#include <random>

#include "smart/errors.hpp"
#include "smart/rng.hpp"

namespace smart {

void SyntheticModelPair::validate() const {
  if (vocab_size < 2) throw ConfigError("model: vocab_size must be >= 2");
  if (!(mismatch >= 0.0 && mismatch <= 1.0)) {
    throw ConfigError("model: mismatch must lie in [0, 1]");
  }
}

SyntheticTarget::SyntheticTarget(const SyntheticModelPair& spec)
    : vocab_size_(spec.vocab_size), order_(spec.order), seed_(spec.seed) {
  spec.validate();
}

Eigen::VectorXd SyntheticTarget::probs(std::span<const Token> context) const {
  // Key on the trailing `order_` tokens, padding short contexts.
  std::uint64_t key = mix_key({seed_, 0x7a7267ULL, order_});
  for (std::size_t i = 0; i < order_; ++i) {
    const std::size_t back = order_ - i;
    const Token t = back <= context.size() ? context[context.size() - back] : kRootToken;
    key = mix_key({key, static_cast<std::uint64_t>(static_cast<std::int64_t>(t))});
  }
  KeyedStream rng(key);
  std::gamma_distribution<double> gamma(kDirichletConcentration, 1.0);
  Eigen::VectorXd p(static_cast<Eigen::Index>(vocab_size_));
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = gamma(rng);
  const double sum = p.sum();
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    p.setConstant(1.0 / static_cast<double>(vocab_size_));
  } else {
    p /= sum;
  }
  return p;
}

MixtureDraft::MixtureDraft(SyntheticTarget target, double mismatch)
    : target_(std::move(target)), mismatch_(mismatch) {
  if (!(mismatch >= 0.0 && mismatch <= 1.0)) {
    throw ConfigError("model: mismatch must lie in [0, 1]");
  }
}

Eigen::VectorXd MixtureDraft::probs(std::span<const Token> context) const {
  Eigen::VectorXd p = target_.probs(context);
  if (mismatch_ == 0.0) return p;
  const double uniform = 1.0 / static_cast<double>(p.size());
  if (mismatch_ == 1.0) return Eigen::VectorXd::Constant(p.size(), uniform);
  p = (1.0 - mismatch_) * p.array() + mismatch_ * uniform;
  return p / p.sum();
}

ModelPair build_models(const SyntheticModelPair& spec) {
  spec.validate();
  SyntheticTarget target(spec);
  return {target, MixtureDraft(target, spec.mismatch)};
}

}  // namespace smart
