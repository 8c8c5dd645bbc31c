#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wcddd/funcspace.hpp"
#include "wcddd/grid.hpp"
#include "wcddd/weights.hpp"

namespace wcddd {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Help requests and parse failures; code 0 for --help.
struct CliExit {
    int code = 1;
    std::string text;
};

struct RunConfig {
    std::string subcommand;
    std::string function = "tent";
    std::string function_params = "{}";
    std::string weight = R"({"kind":"constant"})";
    int n = 1;
    double lo = -2.0;
    double hi = 2.0;
    int j_min = -6;
    int j_max = 2;
    std::string shifts = "all";  // "all" or "zero"
    double p = 1.0;
    double q = 1.0;
    double beta = 2.0;
    double gamma = 1.0;
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    int lambda_count = 64;
    double tol = 1e-9;
    double ceiling = 100.0;
    bool exploratory = false;
    std::string out;
    std::uint64_t seed = 1;
    bool plot = false;
    // sharpness
    std::string sweep_case = "a1";
    int deltas = 7;
    // verify-bsvy
    int samples = 256;
    int directions = 64;
    // wavelet-check
    int order = 4;
    int depth = 12;
    int generations = 8;
    // good-cubes
    int cubes = 12;
    double sigma = 0.5;
    double exponent = 1.0;
    // classify-weight
    std::string battery = "tent,linear_ramp,smoothed_indicator";
    int doublings = 3;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    // Flat key = value text accepted back by --config.
    std::string to_toml() const;
};

const std::vector<std::string>& subcommand_names();

// CLI flags override keys read from --config. Throws CliExit on help or parse failure.
RunConfig parse_args(int argc, const char* const* argv);

// Throws ConfigError naming the violated rule (Omega_{p,n}, Gamma_{p,q}, scale condition).
void validate(const RunConfig& cfg);

WeightPtr make_weight(const RunConfig& cfg);
FunctionPtr make_function(const RunConfig& cfg);
std::vector<FunctionPtr> make_battery(const RunConfig& cfg);
GridWindow make_grid(const RunConfig& cfg);
Box make_box(const RunConfig& cfg);

// Output directory: --out, else $WCDDD_OUT_DIR, else ".".
std::string output_dir(const RunConfig& cfg);

}  // namespace wcddd
