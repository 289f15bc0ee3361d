#pragma once

// Command-line front end: configuration, experiment orchestration, artifact
// emission.  Commands write a summary.json (with the config hash and the
// tolerance set), CSV data, and optional SVG plots into the output directory.
// Exit codes: 0 pass, 1 numerical failure, 2 usage/config error.

#include <string>
#include <vector>

namespace hkfloer {

int run_cli(const std::vector<std::string>& args);

}  // namespace hkfloer
