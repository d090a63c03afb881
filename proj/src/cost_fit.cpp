#include <Eigen/Core>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>
#include <algorithm>
#include <cmath>
#include <set>

#include "smart/cost_model.hpp"
#include "smart/errors.hpp"

namespace smart {

namespace {

struct Points {
  Eigen::ArrayXd x;
  Eigen::ArrayXd y;
};

Points collect(std::span<const LatencySample> samples, SampleKind kind) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& s : samples) {
    if (s.kind != kind) continue;
    xs.push_back(static_cast<double>(s.tree_size));
    ys.push_back(s.latency_ms);
  }
  Points p;
  p.x = Eigen::Map<const Eigen::ArrayXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  p.y = Eigen::Map<const Eigen::ArrayXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return p;
}

std::size_t distinct_positive(const Eigen::ArrayXd& x) {
  std::set<double> seen;
  for (double v : x) {
    if (v > 0.0) seen.insert(v);
  }
  return seen.size();
}

Eigen::ArrayXd verify_basis(const Eigen::ArrayXd& x, double delta, double rho) {
  return (delta * x.pow(rho)).min(kMaxExponent).unaryExpr(
      [](double e) { return std::expm1(e); });
}

// Closed-form gamma for fixed (delta, rho) plus the resulting residual sum.
struct InnerFit {
  double gamma = 0.0;
  double sse = 0.0;
  bool clamped = false;
};

InnerFit solve_gamma(const Points& pts, double delta, double rho) {
  const Eigen::ArrayXd g = verify_basis(pts.x, delta, rho);
  const double gg = (g * g).sum();
  InnerFit fit;
  if (gg > 0.0 && std::isfinite(gg)) fit.gamma = (g * pts.y).sum() / gg;
  if (fit.gamma < 0.0) {
    fit.gamma = 0.0;
    fit.clamped = true;
  }
  fit.sse = (pts.y - fit.gamma * g).square().sum();
  if (!std::isfinite(fit.sse)) fit.sse = std::numeric_limits<double>::infinity();
  return fit;
}

// Minimises f over [lo, hi]; returns the argmin.
template <typename F>
double golden_section(F&& f, double lo, double hi, int iterations = 80) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iterations && (b - a) > 1e-13 * (1.0 + std::abs(a)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

// Residuals over (log10 delta, rho) with gamma solved in closed form.
struct ProjectedResiduals : Eigen::DenseFunctor<double> {
  explicit ProjectedResiduals(const Points& pts)
      : Eigen::DenseFunctor<double>(2, static_cast<int>(pts.x.size())), pts(&pts) {}

  int operator()(const InputType& v, ValueType& out) const {
    const double delta = std::pow(10.0, v[0]);
    const InnerFit fit = solve_gamma(*pts, delta, v[1]);
    out = (pts->y - fit.gamma * verify_basis(pts->x, delta, v[1])).matrix();
    if (!out.allFinite()) out.setConstant(1e150);
    return 0;
  }

  const Points* pts;
};

constexpr int kDeltaSteps = 64;
constexpr int kRhoSteps = 40;
constexpr double kLogDeltaMin = -4.0;  // log10(1e-4)
constexpr double kLogDeltaMax = 0.0;   // log10(1)
constexpr double kRhoMin = 0.3;
constexpr double kRhoMax = 2.0;
constexpr int kMaxRefineRounds = 400;

}  // namespace

DraftFit fit_draft_model(std::span<const LatencySample> samples) {
  const Points pts = collect(samples, SampleKind::draft);
  if (distinct_positive(pts.x) < 1 || pts.x.size() < 2) {
    throw DegenerateFitError(
        "draft fit needs at least 2 samples and a positive tree_size");
  }
  std::set<double> sizes(pts.x.begin(), pts.x.end());
  if (sizes.size() < 2) {
    throw DegenerateFitError("draft fit needs at least 2 distinct tree sizes");
  }
  DraftFit fit;
  fit.lambda = (pts.x * pts.y).sum() / pts.x.square().sum();
  fit.rmse = std::sqrt((pts.y - fit.lambda * pts.x).square().mean());
  return fit;
}

VerifyFit fit_verify_model(std::span<const LatencySample> samples) {
  const Points pts = collect(samples, SampleKind::verify);
  if (distinct_positive(pts.x) < 4) {
    throw DegenerateFitError("verify fit needs at least 4 distinct positive tree sizes");
  }

  const double log_step = (kLogDeltaMax - kLogDeltaMin) / (kDeltaSteps - 1);
  const double rho_step = (kRhoMax - kRhoMin) / (kRhoSteps - 1);

  // Coarse grid: log-spaced delta, linear rho.
  double best_log_delta = kLogDeltaMin;
  double best_rho = kRhoMin;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kDeltaSteps; ++i) {
    const double log_delta = kLogDeltaMin + i * log_step;
    for (int j = 0; j < kRhoSteps; ++j) {
      const double rho = kRhoMin + j * rho_step;
      const double sse = solve_gamma(pts, std::pow(10.0, log_delta), rho).sse;
      if (sse < best_sse) {
        best_sse = sse;
        best_log_delta = log_delta;
        best_rho = rho;
      }
    }
  }

  // Coordinate refinement, one grid cell either side of the incumbent.
  auto sse_at = [&](double log_delta, double rho) {
    return solve_gamma(pts, std::pow(10.0, log_delta), rho).sse;
  };
  for (int round = 0; round < kMaxRefineRounds; ++round) {
    const double start_sse = best_sse;
    const double ld = golden_section(
        [&](double v) { return sse_at(v, best_rho); },
        std::max(kLogDeltaMin, best_log_delta - log_step),
        std::min(kLogDeltaMax, best_log_delta + log_step));
    if (const double s = sse_at(ld, best_rho); s < best_sse) {
      best_sse = s;
      best_log_delta = ld;
    }
    const double r = golden_section(
        [&](double v) { return sse_at(best_log_delta, v); },
        std::max(kRhoMin, best_rho - rho_step), std::min(kRhoMax, best_rho + rho_step));
    if (const double s = sse_at(best_log_delta, r); s < best_sse) {
      best_sse = s;
      best_rho = r;
    }
    if (!(best_sse < start_sse * (1.0 - 1e-12))) break;
  }

  // Levenberg-Marquardt polish; kept only if it stays in range and improves.
  {
    ProjectedResiduals residuals(pts);
    Eigen::NumericalDiff<ProjectedResiduals, Eigen::Central> numeric(residuals);
    Eigen::LevenbergMarquardt<decltype(numeric)> lm(numeric);
    lm.setMaxfev(2000);
    Eigen::VectorXd v(2);
    v << best_log_delta, best_rho;
    lm.minimize(v);
    const bool in_range = v.allFinite() && v[0] >= kLogDeltaMin && v[0] <= kLogDeltaMax &&
                          v[1] >= kRhoMin && v[1] <= kRhoMax;
    if (in_range) {
      if (const double s = sse_at(v[0], v[1]); s < best_sse) {
        best_sse = s;
        best_log_delta = v[0];
        best_rho = v[1];
      }
    }
  }

  const double delta = std::pow(10.0, best_log_delta);
  const InnerFit inner = solve_gamma(pts, delta, best_rho);
  VerifyFit fit;
  fit.gamma = inner.gamma;
  fit.delta = delta;
  fit.rho = best_rho;
  fit.gamma_clamped = inner.clamped;
  fit.rmse = std::sqrt(inner.sse / static_cast<double>(pts.x.size()));
  return fit;
}

double verify_rmse(const CostModelParams& params,
                   std::span<const LatencySample> samples) {
  double sse = 0.0;
  std::size_t n = 0;
  for (const auto& s : samples) {
    if (s.kind != SampleKind::verify) continue;
    const double r =
        s.latency_ms - eval_verify_cost(params, static_cast<double>(s.tree_size)).ms;
    sse += r * r;
    ++n;
  }
  return n == 0 ? 0.0 : std::sqrt(sse / static_cast<double>(n));
}

}  // namespace smart
