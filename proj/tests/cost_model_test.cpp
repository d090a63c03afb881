#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "smart/cost_model.hpp"
#include "smart/errors.hpp"
#include "test_support.hpp"

using namespace smart;
using smart::testing::rel_err;

namespace {

CostModelParams make(double lambda, double gamma, double delta, double rho, double c_t = 1.0) {
  CostModelParams p;
  p.lambda = lambda;
  p.gamma = gamma;
  p.delta = delta;
  p.rho = rho;
  p.c_t = c_t;
  return p;
}

// Reference curve written out independently of the library.
double verify_curve(double gamma, double delta, double rho, double x) {
  return gamma * (std::exp(delta * std::pow(x, rho)) - 1.0);
}

std::vector<LatencySample> verify_samples(double gamma, double delta, double rho,
                                          std::initializer_list<int> xs) {
  std::vector<LatencySample> out;
  for (int x : xs) {
    out.push_back({SampleKind::verify, static_cast<std::size_t>(x),
                   verify_curve(gamma, delta, rho, x)});
  }
  return out;
}

}  // namespace

TEST(CostEval, DraftCost) {
  EXPECT_DOUBLE_EQ(eval_draft_cost(make(2, 0, 0, 1), 10), 20.0);
  EXPECT_DOUBLE_EQ(eval_draft_cost(make(0, 0, 0, 1), 37), 0.0);
  EXPECT_NEAR(eval_draft_cost(make(0.35, 0, 0, 1), 60), 21.0, 1e-12);
  auto p = make(1, 0, 0, 1);
  p.beta = 0.5;
  EXPECT_DOUBLE_EQ(eval_draft_cost(p, 4), 4.5);
}

TEST(CostEval, VerifyCost) {
  auto p = make(0, 3, 0, 1.3);
  p.eta = 0.7;
  EXPECT_DOUBLE_EQ(eval_verify_cost(p, 40).ms, 0.7);

  const Cost c = eval_verify_cost(make(0, 1, 1, 1), 1);
  EXPECT_LE(rel_err(c.ms, 1.718281828459045), 1e-12);
  EXPECT_FALSE(c.saturated);

  EXPECT_EQ(eval_verify_cost(make(0.5, 2, 0.1, 0.7), 0).ms, 0.0);
  EXPECT_EQ(eval_spec_cost(make(0.5, 2, 0.1, 0.7), 0).ms, 0.0);
}

TEST(CostEval, SaturatesInsteadOfOverflowing) {
  const Cost c = eval_verify_cost(make(0, 1, 1, 2), 100);  // exponent 1e4
  EXPECT_TRUE(c.saturated);
  EXPECT_TRUE(std::isfinite(c.ms));
  EXPECT_GT(c.ms, 1e300);
  const Cost m = marginal_spec_cost(make(0, 1, 1, 2), 100);
  EXPECT_TRUE(m.saturated);
  EXPECT_TRUE(std::isfinite(m.ms));
  EXPECT_FALSE(eval_verify_cost(make(0, 1, 1, 1), 699).saturated);
}

TEST(CostEval, NegativeSizeIsDomainError) {
  EXPECT_THROW(eval_verify_cost(make(1, 1, 0.1, 1), -1), DomainError);
  EXPECT_THROW(eval_draft_cost(make(1, 1, 0.1, 1), -1), DomainError);
}

TEST(CostEval, ParamValidation) {
  EXPECT_THROW(make(-1, 0, 0, 1).validate(), ConfigError);
  EXPECT_THROW(make(1, -1, 0, 1).validate(), ConfigError);
  EXPECT_THROW(make(1, 1, -0.1, 1).validate(), ConfigError);
  EXPECT_THROW(make(1, 1, 0.1, 0).validate(), ConfigError);
  EXPECT_THROW(make(1, 1, 0.1, 1, 0).validate(), ConfigError);
  EXPECT_NO_THROW(make(1, 1, 0.1, 1).validate());
}

TEST(MarginalCost, ClosedForms) {
  const double lambda = 0.3, gamma = 1.7, delta = 0.04;
  for (double x : {1.0, 5.0, 30.0}) {
    const double expected = lambda + gamma * delta * std::exp(delta * x);
    EXPECT_LE(rel_err(marginal_spec_cost(make(lambda, gamma, delta, 1), x).ms, expected), 1e-12);
    EXPECT_DOUBLE_EQ(marginal_spec_cost(make(lambda, 0, delta, 1.4), x).ms, lambda);
  }
}

TEST(MarginalCost, ZeroSize) {
  EXPECT_THROW(marginal_spec_cost(make(1, 1, 0.1, 0.5), 0), DomainError);
  EXPECT_DOUBLE_EQ(marginal_spec_cost(make(1, 2, 0.1, 1), 0).ms, 1.2);
  EXPECT_DOUBLE_EQ(marginal_spec_cost(make(1, 2, 0.1, 1.5), 0).ms, 1.0);
}

TEST(MarginalCost, MatchesCentralDifferenceOnGrid) {
  for (double lambda : {0.0, 0.3}) {
    for (double gamma : {0.5, 2.0}) {
      for (double delta : {0.001, 0.01, 0.05}) {
        for (double rho : {0.5, 1.0, 1.5}) {
          const auto p = make(lambda, gamma, delta, rho);
          for (int x = 2; x <= 60; ++x) {
            const double fd =
                eval_spec_cost(p, x + 0.5).ms - eval_spec_cost(p, x - 0.5).ms;
            const double analytic = marginal_spec_cost(p, x).ms;
            ASSERT_LE(rel_err(analytic, fd), 0.02)
                << "lambda=" << lambda << " gamma=" << gamma << " delta=" << delta
                << " rho=" << rho << " x=" << x;
          }
        }
      }
    }
  }
}

TEST(CostProperty, VerifyCostIsMonotone) {
  KeyedStream rng({0x3030});
  for (int i = 0; i < 500; ++i) {
    const auto p = make(rng.uniform(), 3 * rng.uniform(), 0.1 * rng.uniform(),
                        0.2 + 2 * rng.uniform());
    double prev = eval_verify_cost(p, 0).ms;
    for (int x = 1; x <= 128; ++x) {
      const double cur = eval_verify_cost(p, x).ms;
      ASSERT_GE(cur, prev) << i << " x=" << x;
      prev = cur;
    }
  }
}

TEST(CostProperty, MarginalPositiveWhenAnyCost) {
  KeyedStream rng({0x3131});
  for (int i = 0; i < 500; ++i) {
    const bool linear_only = i % 3 == 0;
    const auto p = make(linear_only ? 0.01 + rng.uniform() : 0.0, 0.01 + 3 * rng.uniform(),
                        0.001 + 0.1 * rng.uniform(), 0.2 + 2 * rng.uniform());
    for (int x = 1; x <= 64; x += 7) ASSERT_GT(marginal_spec_cost(p, x).ms, 0.0);
  }
}

TEST(CostProperty, MarginalsTelescope) {
  KeyedStream rng({0x3232});
  for (int i = 0; i < 300; ++i) {
    const int n = 100 + static_cast<int>(rng() % 29);
    const double rho = 0.8 + 0.7 * rng.uniform();
    // keep delta * n^rho <= 5
    const double delta = 5.0 * rng.uniform() / std::pow(n, rho);
    const auto p = make(0.05 + rng.uniform(), 0.1 + 2 * rng.uniform(), delta, rho);
    double sum = 0.0;
    for (int x = 1; x <= n; ++x) sum += marginal_spec_cost(p, x).ms;
    const double exact = eval_spec_cost(p, n).ms - eval_spec_cost(p, 0).ms;
    ASSERT_LE(rel_err(sum, exact), 0.05) << "rho=" << rho << " delta=" << delta << " n=" << n;
  }
}

TEST(DraftFit, ExactLines) {
  std::vector<LatencySample> s;
  for (int x : {1, 4, 9, 20}) s.push_back({SampleKind::draft, static_cast<std::size_t>(x), 3.0 * x});
  const DraftFit f = fit_draft_model(s);
  EXPECT_DOUBLE_EQ(f.lambda, 3.0);
  EXPECT_NEAR(f.rmse, 0.0, 1e-9);

  const std::vector<LatencySample> t{
      {SampleKind::draft, 1, 2}, {SampleKind::draft, 2, 4}, {SampleKind::draft, 3, 6}};
  EXPECT_DOUBLE_EQ(fit_draft_model(t).lambda, 2.0);
}

TEST(DraftFit, IgnoresVerifySamples) {
  std::vector<LatencySample> s{{SampleKind::draft, 2, 1.0},
                               {SampleKind::draft, 4, 2.0},
                               {SampleKind::verify, 4, 100.0}};
  EXPECT_DOUBLE_EQ(fit_draft_model(s).lambda, 0.5);
}

TEST(DraftFit, Degenerate) {
  const std::vector<LatencySample> zeros{{SampleKind::draft, 0, 1.0}, {SampleKind::draft, 0, 2.0}};
  EXPECT_THROW(fit_draft_model(zeros), DegenerateFitError);
  const std::vector<LatencySample> one{{SampleKind::draft, 5, 1.0}};
  EXPECT_THROW(fit_draft_model(one), DegenerateFitError);
}

// Noise oracle: slope recovered from 5 noisy points, 100 seeds.
TEST(DraftFit, RecoversSlopeUnderOnePercentNoise) {
  const double truth = 1.4;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    KeyedStream rng({0x1a, seed});
    std::vector<LatencySample> s;
    for (int x : {8, 16, 32, 48, 64}) {
      const double noise = 1.0 + 0.02 * (rng.uniform() - 0.5);
      s.push_back({SampleKind::draft, static_cast<std::size_t>(x), truth * x * noise});
    }
    ASSERT_LE(rel_err(fit_draft_model(s).lambda, truth), 0.03) << "seed " << seed;
  }
}

TEST(VerifyFit, ReproducesCurveFromExactSamples) {
  const auto s = verify_samples(0.5, 0.05, 1.2, {8, 16, 32, 48, 64});
  const VerifyFit f = fit_verify_model(s);
  for (const auto& sample : s) {
    const double fitted = verify_curve(f.gamma, f.delta, f.rho, static_cast<double>(sample.tree_size));
    EXPECT_LE(rel_err(fitted, sample.latency_ms), 0.01) << "x=" << sample.tree_size;
  }
  EXPECT_FALSE(f.gamma_clamped);
}

TEST(VerifyFit, LinearDataBeatsConstantModel) {
  std::vector<LatencySample> s;
  for (int x : {4, 8, 16, 32, 64}) s.push_back({SampleKind::verify, static_cast<std::size_t>(x), 0.25 * x});
  const VerifyFit f = fit_verify_model(s);
  double mean = 0.0;
  for (const auto& v : s) mean += v.latency_ms;
  mean /= static_cast<double>(s.size());
  double sse = 0.0;
  for (const auto& v : s) sse += (v.latency_ms - mean) * (v.latency_ms - mean);
  const double constant_rmse = std::sqrt(sse / static_cast<double>(s.size()));
  EXPECT_LE(f.rmse, constant_rmse);
}

TEST(VerifyFit, RmseAgreesWithRegeneratedCurve) {
  const auto s = verify_samples(1.1, 0.02, 0.9, {2, 10, 30, 60, 90});
  const VerifyFit f = fit_verify_model(s);
  auto p = make(0, f.gamma, f.delta, f.rho);
  EXPECT_NEAR(verify_rmse(p, s), f.rmse, 1e-12);
}

TEST(VerifyFit, Degenerate) {
  const auto repeated = verify_samples(1, 0.1, 1, {8, 8, 8, 8, 8});
  EXPECT_THROW(fit_verify_model(repeated), DegenerateFitError);
  const auto three = verify_samples(1, 0.1, 1, {8, 16, 32});
  EXPECT_THROW(fit_verify_model(three), DegenerateFitError);
}

// The basis is non-negative, so only signed data (for example latencies with
// a fixed overhead already subtracted) can push gamma below zero.
TEST(VerifyFit, NegativeProjectionClampsGamma) {
  std::vector<LatencySample> s;
  for (int x : {4, 8, 16, 32, 64}) s.push_back({SampleKind::verify, static_cast<std::size_t>(x), -0.5 * x});
  const VerifyFit f = fit_verify_model(s);
  EXPECT_TRUE(f.gamma_clamped);
  EXPECT_EQ(f.gamma, 0.0);
}

TEST(SampleCsv, Parses) {
  std::istringstream in("kind,tree_size,latency_ms\ndraft,10,3.5\nverify,4,1.25\n");
  const auto s = parse_samples(in);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].kind, SampleKind::draft);
  EXPECT_EQ(s[0].tree_size, 10u);
  EXPECT_EQ(s[0].latency_ms, 3.5);
  EXPECT_EQ(s[1].kind, SampleKind::verify);

  std::istringstream header_only("kind,tree_size,latency_ms\n");
  EXPECT_TRUE(parse_samples(header_only).empty());
}

TEST(SampleCsv, Errors) {
  const std::pair<const char*, std::size_t> cases[] = {
      {"kind,tree_size,latency_ms\ndraft,10,-1\n", 2},
      {"kind,tree_size,latency_ms\nprefill,10,1\n", 2},
      {"kind,tree_size,latency_ms\ndraft,10,1\ndraft,x,1\n", 3},
      {"kind,tree_size,latency_ms\ndraft,10\n", 2},
      {"size,latency\n", 1},
  };
  for (const auto& [text, line] : cases) {
    std::istringstream in(text);
    try {
      (void)parse_samples(in);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << text;
    }
  }
}

TEST(SampleCsv, RoundTrip) {
  const std::vector<LatencySample> s{{SampleKind::draft, 3, 0.1}, {SampleKind::verify, 7, 2.0 / 3.0}};
  std::stringstream io;
  write_samples(io, s);
  const auto back = parse_samples(io);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].latency_ms, 2.0 / 3.0);
}

TEST(ParamsFile, RoundTripIsExact) {
  auto p = make(0.123456789012345, 1.0 / 3.0, 0.0421, 1.17, 19.5);
  p.beta = 0.01;
  p.eta = 2.5;
  std::stringstream io;
  write_params(io, p);
  EXPECT_EQ(parse_params(io), p);
}

TEST(ParamsFile, UnknownKeyIsParseError) {
  std::istringstream in("lambda=1\nmu=2\n");
  EXPECT_THROW(parse_params(in), ParseError);
}
