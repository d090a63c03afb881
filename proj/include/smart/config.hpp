#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "smart/simulator.hpp"

namespace smart {

/// Flat `section.key=value` lines; `#` starts a comment. Later lines win.
std::map<std::string, std::string> parse_key_values(std::istream& in);

/// Applies recognised keys on top of `base`:
///   model.{vocab_size,order,seed,mismatch}
///   params.{lambda,beta,gamma,delta,rho,eta,c_T}
///   build.{k,d,alpha,b_verify,batch_size,rerank_g,scoring}
///   sim.{policy,generation_length,num_sequences,acceptance_mode,seed,threads}
/// Throws ConfigError on unknown keys or malformed values.
SimConfig apply_key_values(SimConfig base, const std::map<std::string, std::string>& kv);

SimConfig load_config(const std::filesystem::path& path);

/// Canonical snapshot accepted back by load_config.
void write_config(std::ostream& out, const SimConfig& config);

}  // namespace smart
