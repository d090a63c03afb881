#include "smart/cost_model.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "smart/errors.hpp"
#include "text_util.hpp"

namespace smart {

namespace {

void require_finite_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ConfigError(std::string("cost model: ") + name +
                      " must be finite and non-negative");
  }
}

void require_size(double x) {
  if (!(x >= 0.0)) throw DomainError("cost model: tree_size must be >= 0");
}

}  // namespace

void CostModelParams::validate() const {
  require_finite_nonneg(lambda, "lambda");
  require_finite_nonneg(gamma, "gamma");
  require_finite_nonneg(delta, "delta");
  if (!std::isfinite(beta)) throw ConfigError("cost model: beta must be finite");
  if (!std::isfinite(eta)) throw ConfigError("cost model: eta must be finite");
  if (!std::isfinite(rho) || rho <= 0.0) {
    throw ConfigError("cost model: rho must be positive");
  }
  if (!std::isfinite(c_t) || c_t <= 0.0) {
    throw ConfigError("cost model: c_T must be positive");
  }
}

double eval_draft_cost(const CostModelParams& params, double tree_size) {
  require_size(tree_size);
  return params.lambda * tree_size + params.beta;
}

Cost eval_verify_cost(const CostModelParams& params, double tree_size) {
  require_size(tree_size);
  // pow(0, rho) is 0 for rho > 0, so the origin constraint holds exactly.
  double exponent = params.delta * std::pow(tree_size, params.rho);
  bool saturated = false;
  if (exponent > kMaxExponent) {
    exponent = kMaxExponent;
    saturated = true;
  }
  return {params.gamma * std::expm1(exponent) + params.eta, saturated};
}

Cost eval_spec_cost(const CostModelParams& params, double tree_size) {
  const Cost verify = eval_verify_cost(params, tree_size);
  return {eval_draft_cost(params, tree_size) + verify.ms, verify.saturated};
}

Cost marginal_spec_cost(const CostModelParams& params, double tree_size) {
  require_size(tree_size);
  const double scale = params.gamma * params.delta * params.rho;
  if (scale == 0.0) return {params.lambda, false};
  if (tree_size == 0.0) {
    if (params.rho < 1.0) {
      throw DomainError("marginal_spec_cost: derivative unbounded at 0 for rho < 1");
    }
    // x^(rho-1) at 0 is 1 for rho == 1 and 0 for rho > 1.
    return {params.lambda + (params.rho == 1.0 ? scale : 0.0), false};
  }
  double exponent = params.delta * std::pow(tree_size, params.rho);
  bool saturated = false;
  if (exponent > kMaxExponent) {
    exponent = kMaxExponent;
    saturated = true;
  }
  const double slope =
      scale * std::pow(tree_size, params.rho - 1.0) * std::exp(exponent);
  return {params.lambda + slope, saturated};
}

std::vector<LatencySample> parse_samples(std::istream& in) {
  std::vector<LatencySample> samples;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    if (!header) {
      if (text != "kind,tree_size,latency_ms") {
        throw ParseError(line_no, "expected header `kind,tree_size,latency_ms`");
      }
      header = true;
      continue;
    }
    const auto fields = detail::split(text, ',');
    if (fields.size() != 3) throw ParseError(line_no, "expected 3 columns");
    LatencySample s;
    const auto kind = detail::trim(fields[0]);
    if (kind == "draft") {
      s.kind = SampleKind::draft;
    } else if (kind == "verify") {
      s.kind = SampleKind::verify;
    } else {
      throw ParseError(line_no, "unknown kind `" + std::string(kind) + "`");
    }
    const auto size = detail::parse_number<long long>(fields[1]);
    if (!size || *size < 0) {
      throw ParseError(line_no, "tree_size must be a non-negative integer");
    }
    const auto latency = detail::parse_number<double>(fields[2]);
    if (!latency || !std::isfinite(*latency) || *latency < 0.0) {
      throw ParseError(line_no, "latency_ms must be finite and non-negative");
    }
    s.tree_size = static_cast<std::size_t>(*size);
    s.latency_ms = *latency;
    samples.push_back(s);
  }
  if (!header) throw ParseError(line_no, "missing header");
  return samples;
}

std::vector<LatencySample> load_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  return parse_samples(in);
}

void write_samples(std::ostream& out, std::span<const LatencySample> samples) {
  out << "kind,tree_size,latency_ms\n";
  const auto precision = out.precision(17);
  for (const auto& s : samples) {
    out << (s.kind == SampleKind::draft ? "draft" : "verify") << ','
        << s.tree_size << ',' << s.latency_ms << '\n';
  }
  out.precision(precision);
}

void write_params(std::ostream& out, const CostModelParams& p) {
  const auto precision = out.precision(17);
  out << "lambda=" << p.lambda << '\n'
      << "beta=" << p.beta << '\n'
      << "gamma=" << p.gamma << '\n'
      << "delta=" << p.delta << '\n'
      << "rho=" << p.rho << '\n'
      << "eta=" << p.eta << '\n'
      << "c_T=" << p.c_t << '\n';
  out.precision(precision);
}

CostModelParams parse_params(std::istream& in) {
  CostModelParams p;
  const std::map<std::string, double*, std::less<>> fields{
      {"lambda", &p.lambda}, {"beta", &p.beta}, {"gamma", &p.gamma},
      {"delta", &p.delta},   {"rho", &p.rho},   {"eta", &p.eta},
      {"c_T", &p.c_t}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key=value");
    const auto key = detail::trim(text.substr(0, eq));
    const auto it = fields.find(key);
    if (it == fields.end()) {
      throw ParseError(line_no, "unknown parameter `" + std::string(key) + "`");
    }
    const auto value = detail::parse_number<double>(text.substr(eq + 1));
    if (!value) throw ParseError(line_no, "malformed value for " + std::string(key));
    *it->second = *value;
  }
  return p;
}

CostModelParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  return parse_params(in);
}

}  // namespace smart
