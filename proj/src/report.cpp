#include "smart/report.hpp"

#include <cstdio>
#include <ostream>

namespace smart {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_reports_csv(std::ostream& out, std::span<const SimReport> reports) {
  out << "policy,batch,budget,alpha,tokens,spec_ms,ar_ms,speedup,beta,mean_tree_size\n";
  for (const SimReport& r : reports) {
    out << r.policy << ',' << r.batch_size << ',' << r.budget << ',' << num(r.alpha) << ','
        << r.total_tokens << ',' << num(r.total_spec_ms) << ',' << num(r.total_ar_ms) << ','
        << num(r.speedup) << ',' << num(r.acceptance_rate) << ','
        << num(r.mean_tree_size) << '\n';
  }
}

nlohmann::json reports_to_json(std::span<const SimReport> reports) {
  auto arr = nlohmann::json::array();
  for (const SimReport& r : reports) {
    arr.push_back({{"policy", r.policy},
                   {"batch", r.batch_size},
                   {"budget", r.budget},
                   {"alpha", r.alpha},
                   {"tokens", r.total_tokens},
                   {"steps", r.steps},
                   {"accepted_tokens", r.accepted_tokens},
                   {"drafted_tokens", r.drafted_tokens},
                   {"spec_ms", r.total_spec_ms},
                   {"ar_ms", r.total_ar_ms},
                   {"speedup", r.speedup},
                   {"beta", r.acceptance_rate},
                   {"mean_tree_size", r.mean_tree_size}});
  }
  return arr;
}

std::vector<SimReport> flatten(std::span<const SweepPoint> points) {
  std::vector<SimReport> out;
  for (const SweepPoint& p : points) {
    out.push_back(p.smart);
    out.push_back(p.baseline);
  }
  return out;
}

void write_sweep_long_csv(std::ostream& out, SweepAxis axis,
                          std::span<const SweepPoint> points) {
  out << "axis,value,policy,metric,metric_value\n";
  for (const SweepPoint& p : points) {
    for (const SimReport* r : {&p.smart, &p.baseline}) {
      const std::pair<const char*, double> metrics[] = {
          {"speedup", r->speedup},
          {"beta", r->acceptance_rate},
          {"mean_tree_size", r->mean_tree_size},
          {"spec_ms", r->total_spec_ms},
          {"ar_ms", r->total_ar_ms},
      };
      for (const auto& [name, value] : metrics) {
        out << to_string(axis) << ',' << num(p.value) << ',' << r->policy << ',' << name
            << ',' << num(value) << '\n';
      }
    }
  }
}

void print_summary(std::ostream& out, std::span<const SimReport> reports) {
  char line[160];
  std::snprintf(line, sizeof line, "%-9s %6s %7s %6s %8s %6s %10s\n", "policy", "batch",
                "budget", "alpha", "speedup", "beta", "mean_|T|");
  out << line;
  for (const SimReport& r : reports) {
    std::snprintf(line, sizeof line, "%-9s %6zu %7zu %6.2f %7.2fx %6.2f %10.2f\n",
                  r.policy.c_str(), r.batch_size, r.budget, r.alpha, r.speedup,
                  r.acceptance_rate, r.mean_tree_size);
    out << line;
  }
}

}  // namespace smart
