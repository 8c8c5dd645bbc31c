#include "wcddd/config.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "CLI11.hpp"
#include "wcddd/bsvy.hpp"
#include "wcddd/cddd.hpp"
#include "wcddd/records.hpp"

namespace wcddd {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, subcommand, function, function_params, weight, n,
                                                lo, hi, j_min, j_max, shifts, p, q, beta, gamma, lambda_lo,
                                                lambda_hi, lambda_count, tol, ceiling, exploratory, out, seed,
                                                plot, sweep_case, deltas, samples, directions, order, depth,
                                                generations, cubes, sigma, exponent, battery, doublings)

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j = *this;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) { return j.get<RunConfig>(); }

std::string RunConfig::to_toml() const {
    std::ostringstream os;
    const auto j = to_json();
    for (const auto& [key, v] : j.items()) {
        if (key == "subcommand") continue;
        os << key << " = ";
        if (v.is_string()) {
            os << '\'' << v.get<std::string>() << '\'';
        } else if (v.is_boolean()) {
            os << (v.get<bool>() ? "true" : "false");
        } else if (v.is_number_float()) {
            os << format_double(v.get<double>());
        } else {
            os << v.dump();
        }
        os << '\n';
    }
    return os.str();
}

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{"verify-cddd",  "verify-bsvy",     "mean-functional",
                                                "good-cubes",   "sharpness",       "classify-weight",
                                                "wavelet-check", "ap-constant"};
    return names;
}

namespace {

const char* kSchemas =
    "CSV columns per subcommand:\n"
    "  verify-cddd, mean-functional: lambda,functional,n_cubes,boundary_share\n"
    "  verify-bsvy:     lambda,functional,tail_flag\n"
    "  good-cubes:      j,m,own,descendants,good\n"
    "  sharpness:       param,beta,lambda,lhs_cert,lhs_full,weight_mass,lower_mass,gradient_pth,ap_estimate,certified\n"
    "  classify-weight: series,beta,window,lhs,norm,ratio\n"
    "  wavelet-check:   e,j,m,value\n"
    "  ap-constant:     lo,hi,ratio\n"
    "Exit status: 0 pass or complete, 2 fail finding, 1 usage or configuration error.\n"
    "Output directory: --out, else $WCDDD_OUT_DIR, else the working directory.";

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
    RunConfig c;
    CLI::App app{"Weighted CDDD/BSVY functionals, sharpness sweeps and wavelet checks", "wcddd"};
    app.footer(kSchemas);
    app.set_config("--config", "", "TOML config file; command-line flags override its keys");
    app.require_subcommand(1);
    app.fallthrough();
    for (const auto& name : subcommand_names()) app.add_subcommand(name)->fallthrough();

    app.add_option("--function", c.function, "catalog function name")->capture_default_str();
    app.add_option("--function_params", c.function_params, "catalog parameters as JSON")->capture_default_str();
    app.add_option("--weight", c.weight, "weight spec as JSON, e.g. {\"kind\":\"power\",\"center\":0.5,\"exponent\":-0.5}")
        ->capture_default_str();
    app.add_option("--n", c.n, "dimension")->check(CLI::Range(1, 2))->capture_default_str();
    app.add_option("--lo", c.lo, "window lower corner (every axis)")->capture_default_str();
    app.add_option("--hi", c.hi, "window upper corner (every axis)")->capture_default_str();
    app.add_option("--j_min", c.j_min, "finest grid generation (edge 2^j_min)")->capture_default_str();
    app.add_option("--j_max", c.j_max, "coarsest grid generation")->capture_default_str();
    app.add_option("--shifts", c.shifts, "all | zero")->check(CLI::IsMember({"all", "zero"}))->capture_default_str();
    app.add_option("--p", c.p, "integrability exponent p")->capture_default_str();
    app.add_option("--q", c.q, "exponent q")->capture_default_str();
    app.add_option("--beta", c.beta, "smoothness exponent beta")->capture_default_str();
    app.add_option("--gamma", c.gamma, "exponent gamma")->capture_default_str();
    app.add_option("--lambda_lo", c.lambda_lo, "lambda grid start (0: from data)")->capture_default_str();
    app.add_option("--lambda_hi", c.lambda_hi, "lambda grid end (0: from data)")->capture_default_str();
    app.add_option("--lambda_count", c.lambda_count, "lambda grid size")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--tol", c.tol, "tolerance")->capture_default_str();
    app.add_option("--ceiling", c.ceiling, "ratio ceiling")->capture_default_str();
    app.add_flag("--exploratory", c.exploratory, "run outside the admissible parameter ranges");
    app.add_option("--out", c.out, "output directory");
    app.add_option("--seed", c.seed, "random seed")->capture_default_str();
    app.add_flag("--plot", c.plot, "also write plot.svg");
    app.add_option("--case,--sweep_case", c.sweep_case, "sharpness case: a1 | ap | beta_limit")
        ->check(CLI::IsMember({"a1", "ap", "beta_limit"}))
        ->capture_default_str();
    app.add_option("--deltas", c.deltas, "sweep points 2^-k, k = 2..deltas+1")->capture_default_str();
    app.add_option("--samples", c.samples, "BSVY radial samples")->capture_default_str();
    app.add_option("--directions", c.directions, "BSVY directions (n = 2)")->capture_default_str();
    app.add_option("--order", c.order, "Daubechies order N")->capture_default_str();
    app.add_option("--depth", c.depth, "cascade depth")->capture_default_str();
    app.add_option("--generations", c.generations, "wavelet generations 0..generations")->capture_default_str();
    app.add_option("--cubes", c.cubes, "random family size for good-cubes")->capture_default_str();
    app.add_option("--sigma", c.sigma, "good-cube exponent sigma")->capture_default_str();
    app.add_option("--exponent", c.exponent, "domination exponent (gamma or alpha)")->capture_default_str();
    app.add_option("--battery", c.battery, "comma-separated catalog functions")->capture_default_str();
    app.add_option("--doublings", c.doublings, "classifier window doublings")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw CliExit{0, app.help()};
    } catch (const CLI::CallForAllHelp&) {
        throw CliExit{0, app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::ParseError& e) {
        throw CliExit{1, e.what()};
    }
    for (const auto* sub : app.get_subcommands()) c.subcommand = sub->get_name();
    return c;
}

void validate(const RunConfig& c) {
    const auto& names = subcommand_names();
    if (std::find(names.begin(), names.end(), c.subcommand) == names.end())
        throw ConfigError("unknown subcommand '" + c.subcommand + "'");
    if (!(c.p >= 1.0)) throw ConfigError("p must be >= 1");
    if (!(c.hi > c.lo)) throw ConfigError("window needs lo < hi");
    if (c.j_min > c.j_max) throw ConfigError("j_min must not exceed j_max");
    if (!nlohmann::json::accept(c.function_params) || !nlohmann::json::accept(c.weight))
        throw ConfigError("function_params and weight must be JSON");
    try {
        make_weight(c);
        make_function(c);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (c.exploratory) return;
    const std::string& s = c.subcommand;
    if (s == "verify-cddd" && !in_omega_set(c.p, c.beta, c.n))
        throw ConfigError("beta = " + format_double(c.beta) + " lies outside Omega_{p,n}");
    if (s == "verify-bsvy") {
        if (!in_gamma_set(c.p, c.q, c.gamma))
            throw ConfigError("gamma = " + format_double(c.gamma) + " lies outside Gamma_{p,q}");
        if (!scale_condition(c.n, c.p, c.q)) throw ConfigError("scale condition n(1/p - 1/q) < 1 fails");
    }
    if (s == "mean-functional" && c.beta >= 1.0 / c.p - 1.0 && c.beta <= 1.0 / c.p)
        throw ConfigError("mean functional needs beta outside [1/p - 1, 1/p]");
    if (s == "wavelet-check") {
        if (c.order <= c.n + 1) throw ConfigError("wavelet order N must exceed n + 1");
        if (!(c.beta < 1.0 - 1.0 / c.n || c.beta > 1.0))
            throw ConfigError("beta must lie in (-inf, 1 - 1/n) u (1, inf)");
    }
    if (s == "sharpness" && c.deltas < 5) throw ConfigError("sharpness needs deltas >= 5 for the slope fit");
}

WeightPtr make_weight(const RunConfig& c) {
    auto spec = nlohmann::json::parse(c.weight);
    if (!spec.contains("n")) spec["n"] = c.n;
    auto w = weight_from_json(spec);
    if (w->dim() != c.n) throw ConfigError("weight dimension differs from n");
    return w;
}

FunctionPtr make_function(const RunConfig& c) {
    return catalog(c.function, nlohmann::json::parse(c.function_params), c.n);
}

std::vector<FunctionPtr> make_battery(const RunConfig& c) {
    std::vector<FunctionPtr> out;
    std::stringstream ss(c.battery);
    std::string name;
    while (std::getline(ss, name, ','))
        if (!name.empty()) out.push_back(catalog(name, nlohmann::json::object(), c.n));
    if (out.empty()) throw ConfigError("empty battery");
    return out;
}

GridWindow make_grid(const RunConfig& c) {
    std::vector<Rational> lo(static_cast<std::size_t>(c.n), Rational(c.lo)),
        hi(static_cast<std::size_t>(c.n), Rational(c.hi));
    auto shifts = c.shifts == "zero" ? std::vector<Shift>{Shift::zero(c.n)} : Shift::all(c.n);
    return make_window(lo, hi, c.j_min, c.j_max, shifts);
}

Box make_box(const RunConfig& c) {
    return Box{Eigen::VectorXd::Constant(c.n, c.lo), Eigen::VectorXd::Constant(c.n, c.hi)};
}

std::string output_dir(const RunConfig& c) {
    if (!c.out.empty()) return c.out;
    if (const char* env = std::getenv("WCDDD_OUT_DIR"); env && *env) return env;
    return ".";
}

}  // namespace wcddd
