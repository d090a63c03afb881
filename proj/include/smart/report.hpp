#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"
#include "smart/simulator.hpp"

namespace smart {

/// `policy,batch,budget,alpha,tokens,spec_ms,ar_ms,speedup,beta,mean_tree_size`
void write_reports_csv(std::ostream& out, std::span<const SimReport> reports);
nlohmann::json reports_to_json(std::span<const SimReport> reports);

/// Plot-ready long format: `axis,value,policy,metric,metric_value`.
void write_sweep_long_csv(std::ostream& out, SweepAxis axis,
                          std::span<const SweepPoint> points);

/// Sweep reports flattened smart-then-baseline per axis value.
std::vector<SimReport> flatten(std::span<const SweepPoint> points);

/// Fixed-width summary with speedups to two decimals.
void print_summary(std::ostream& out, std::span<const SimReport> reports);

}  // namespace smart
