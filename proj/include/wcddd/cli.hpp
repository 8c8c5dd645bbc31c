#pragma once

#include <iostream>

#include "json.hpp"
#include "wcddd/config.hpp"
#include "wcddd/records.hpp"

namespace wcddd {

struct RunOutput {
    Table table;
    nlohmann::json summary;
    std::string verdict = "pass";
    std::string plot;  // empty unless requested
};

// Executes a validated configuration without touching the filesystem.
RunOutput execute(const RunConfig& cfg);

// Parses argv, runs the subcommand and writes results.csv, summary.json and optionally plot.svg.
// Returns 0 on pass or completion, 2 on a fail finding, 1 on usage or configuration errors.
int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace wcddd
