#include "smart/config.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>

#include "smart/errors.hpp"
#include "text_util.hpp"

namespace smart {

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = detail::trim(text.substr(0, hash));
    }
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    kv[std::string(detail::trim(text.substr(0, eq)))] =
        std::string(detail::trim(text.substr(eq + 1)));
  }
  return kv;
}

namespace {

template <typename T>
T number(const std::string& key, const std::string& value) {
  const auto parsed = detail::parse_number<T>(value);
  if (!parsed) throw ConfigError("config: malformed value for " + key + ": `" + value + "`");
  return *parsed;
}

}  // namespace

SimConfig apply_key_values(SimConfig c, const std::map<std::string, std::string>& kv) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto size = [](std::size_t& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) {
      field = number<std::size_t>(k, v);
    };
  };
  auto real = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = number<double>(k, v); };
  };
  auto u64 = [](std::uint64_t& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) {
      field = number<std::uint64_t>(k, v);
    };
  };
  const std::map<std::string, Setter, std::less<>> setters{
      {"model.vocab_size", size(c.model.vocab_size)},
      {"model.order", size(c.model.order)},
      {"model.seed", u64(c.model.seed)},
      {"model.mismatch", real(c.model.mismatch)},
      {"params.lambda", real(c.params.lambda)},
      {"params.beta", real(c.params.beta)},
      {"params.gamma", real(c.params.gamma)},
      {"params.delta", real(c.params.delta)},
      {"params.rho", real(c.params.rho)},
      {"params.eta", real(c.params.eta)},
      {"params.c_T", real(c.params.c_t)},
      {"build.k", size(c.build.k)},
      {"build.d", size(c.build.d)},
      {"build.alpha", real(c.build.alpha)},
      {"build.b_verify", size(c.build.b_verify)},
      {"build.batch_size", size(c.build.batch_size)},
      {"build.rerank_g", size(c.build.rerank_g)},
      {"build.scoring",
       [&c](const std::string&, const std::string& v) { c.build.scoring = parse_scoring(v); }},
      {"sim.policy",
       [&c](const std::string&, const std::string& v) { c.policy = parse_policy(v); }},
      {"sim.generation_length", size(c.generation_length)},
      {"sim.num_sequences", size(c.num_sequences)},
      {"sim.acceptance_mode",
       [&c](const std::string&, const std::string& v) {
         c.acceptance_mode = parse_acceptance_mode(v);
       }},
      {"sim.seed", u64(c.seed)},
      {"sim.threads", size(c.threads)},
  };
  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("config: unknown key `" + key + "`");
    it->second(key, value);
  }
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return apply_key_values(SimConfig{}, parse_key_values(in));
}

void write_config(std::ostream& out, const SimConfig& c) {
  const auto precision = out.precision(17);
  out << "model.vocab_size=" << c.model.vocab_size << '\n'
      << "model.order=" << c.model.order << '\n'
      << "model.seed=" << c.model.seed << '\n'
      << "model.mismatch=" << c.model.mismatch << '\n'
      << "params.lambda=" << c.params.lambda << '\n'
      << "params.beta=" << c.params.beta << '\n'
      << "params.gamma=" << c.params.gamma << '\n'
      << "params.delta=" << c.params.delta << '\n'
      << "params.rho=" << c.params.rho << '\n'
      << "params.eta=" << c.params.eta << '\n'
      << "params.c_T=" << c.params.c_t << '\n'
      << "build.k=" << c.build.k << '\n'
      << "build.d=" << c.build.d << '\n'
      << "build.alpha=" << c.build.alpha << '\n'
      << "build.b_verify=" << c.build.b_verify << '\n'
      << "build.batch_size=" << c.build.batch_size << '\n'
      << "build.rerank_g=" << c.build.rerank_g << '\n'
      << "build.scoring=" << to_string(c.build.scoring) << '\n'
      << "sim.policy=" << to_string(c.policy) << '\n'
      << "sim.generation_length=" << c.generation_length << '\n'
      << "sim.num_sequences=" << c.num_sequences << '\n'
      << "sim.acceptance_mode=" << to_string(c.acceptance_mode) << '\n'
      << "sim.seed=" << c.seed << '\n'
      << "sim.threads=" << c.threads << '\n';
  out.precision(precision);
}

}  // namespace smart
