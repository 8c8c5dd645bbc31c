#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace wcddd {

// Verdicts are "pass", "fail" or "inconclusive".
struct VerificationRecord {
    std::string check;
    nlohmann::json params = nlohmann::json::object();
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    std::string verdict = "pass";
    std::string reason;
    nlohmann::json diagnostics = nlohmann::json::object();

    bool passed() const { return verdict == "pass"; }
    nlohmann::json to_json() const;
};

// 17 significant digits, locale-independent; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string csv() const;
};

void write_file(const std::string& path, const std::string& content);
// Pretty JSON with floats routed through format_double.
std::string dump_json(const nlohmann::json& j);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal log-log SVG line plot.
std::string svg_loglog(const std::vector<PlotSeries>& series, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel);

}  // namespace wcddd
