#pragma once

#include <cstdint>

#include "smart/distribution.hpp"

namespace smart {

/// Settings for a synthetic draft/target pair over a small vocabulary.
struct SyntheticModelPair {
  std::size_t vocab_size = 32;
  /// Number of trailing context tokens the target's tables condition on.
  std::size_t order = 2;
  std::uint64_t seed = 0;
  /// 0: draft equals target; 1: draft is uniform.
  double mismatch = 0.0;

  void validate() const;
};

inline constexpr double kDirichletConcentration = 0.3;

/// Categorical tables drawn from a symmetric Dirichlet per context. Tables
/// are generated on demand from a hash of (seed, trailing context), so they
/// need no storage and are identical across runs and threads.
class SyntheticTarget final : public CategoricalModel {
 public:
  explicit SyntheticTarget(const SyntheticModelPair& spec);

  std::size_t vocab_size() const override { return vocab_size_; }
  Eigen::VectorXd probs(std::span<const Token> context) const override;

 private:
  std::size_t vocab_size_;
  std::size_t order_;
  std::uint64_t seed_;
};

/// (1 - mismatch) * target + mismatch * uniform, renormalised.
class MixtureDraft final : public CategoricalModel {
 public:
  MixtureDraft(SyntheticTarget target, double mismatch);

  std::size_t vocab_size() const override { return target_.vocab_size(); }
  Eigen::VectorXd probs(std::span<const Token> context) const override;
  double mismatch() const noexcept { return mismatch_; }

 private:
  SyntheticTarget target_;
  double mismatch_;
};

struct ModelPair {
  SyntheticTarget target;
  MixtureDraft draft;
};

ModelPair build_models(const SyntheticModelPair& spec);

}  // namespace smart
