#include "wdq/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace wdq {

namespace {

DistributionSpec law_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("config: missing '") + key + "'");
  const auto& node = j.at(key);
  std::string family = node.at("family").get<std::string>();
  std::vector<double> params = node.value("params", std::vector<double>{});
  return DistributionSpec::from_name(family, params);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  RunConfig c;
  ModelParams& p = c.params;
  p.theta_law = law_from(j, "theta");
  p.x_law = law_from(j, "x");
  if (j.contains("mu")) p.x_law = p.x_law.with_mean(j.at("mu").get<double>());
  p.r = j.value("r", 0.0);
  p.beta = j.value("beta", 0.2);
  p.horizon = j.value("T", 1.0);
  p.w0 = j.value("w0", 0.0);
  p.eta = j.value("eta", 0.0);
  p.md_offset = j.value("md_offset", 0.0);
  c.seed = j.value("seed", std::uint64_t{1});
  p.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace wdq
