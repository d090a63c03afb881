#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace smart {

/// Device latency model, all times in milliseconds.
///
///   C_draft(x)  = lambda * x + beta
///   C_verify(x) = gamma * (exp(delta * x^rho) - 1) + eta
///
/// where x is the number of drafted tokens. beta and eta are held at 0 by the
/// fitting routines so both curves pass through the origin. c_t is the
/// per-token cost of plain autoregressive decoding with the target model.
struct CostModelParams {
  double lambda = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double rho = 1.0;
  double eta = 0.0;
  double c_t = 1.0;

  /// Throws ConfigError on negative or non-finite coefficients, rho <= 0 or
  /// c_t <= 0.
  void validate() const;

  friend bool operator==(const CostModelParams&, const CostModelParams&) = default;
};

/// Exponents of the verification curve are capped here; beyond it the cost
/// is reported as saturated instead of overflowing to infinity.
inline constexpr double kMaxExponent = 700.0;

struct Cost {
  double ms = 0.0;
  bool saturated = false;
};

double eval_draft_cost(const CostModelParams& params, double tree_size);
Cost eval_verify_cost(const CostModelParams& params, double tree_size);

/// Draft plus verification cost of a tree with `tree_size` drafted tokens.
Cost eval_spec_cost(const CostModelParams& params, double tree_size);

/// Analytic derivative of the speculative cost at `tree_size`:
///   lambda + gamma * delta * rho * x^(rho-1) * exp(delta * x^rho).
/// Throws DomainError for tree_size == 0 with rho < 1, where the derivative
/// is unbounded.
Cost marginal_spec_cost(const CostModelParams& params, double tree_size);

enum class SampleKind { draft, verify };

struct LatencySample {
  SampleKind kind = SampleKind::draft;
  std::size_t tree_size = 0;
  double latency_ms = 0.0;
};

struct DraftFit {
  double lambda = 0.0;
  double rmse = 0.0;
};

struct VerifyFit {
  double gamma = 0.0;
  double delta = 0.0;
  double rho = 1.0;
  double rmse = 0.0;
  /// Set when the unconstrained optimum had gamma < 0.
  bool gamma_clamped = false;
};

/// Least-squares slope through the origin over the draft samples in
/// `samples` (other kinds are ignored).
DraftFit fit_draft_model(std::span<const LatencySample> samples);

/// Fits (gamma, delta, rho) with eta = 0 over the verify samples in
/// `samples`. Requires at least four distinct positive sizes.
VerifyFit fit_verify_model(std::span<const LatencySample> samples);

/// Root-mean-square residual of the verify curve over the verify samples.
double verify_rmse(const CostModelParams& params,
                   std::span<const LatencySample> samples);

/// CSV with header `kind,tree_size,latency_ms`.
std::vector<LatencySample> parse_samples(std::istream& in);
std::vector<LatencySample> load_samples(const std::filesystem::path& path);
void write_samples(std::ostream& out, std::span<const LatencySample> samples);

/// Flat `key=value` text: lambda, beta, gamma, delta, rho, eta, c_T.
void write_params(std::ostream& out, const CostModelParams& params);
CostModelParams parse_params(std::istream& in);
CostModelParams load_params(const std::filesystem::path& path);

}  // namespace smart
