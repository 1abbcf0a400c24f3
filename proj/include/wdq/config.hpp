#pragma once

#include <cstdint>
#include <string>

#include "wdq/distributions.hpp"

namespace wdq {

struct RunConfig {
  ModelParams params;
  std::uint64_t seed = 1;
};

// JSON keys: theta.family, theta.params, x.family, x.params, mu, r, beta, T, w0, seed;
// optional eta, md_offset. `mu`, when given, translates the X law to that mean.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

}  // namespace wdq
