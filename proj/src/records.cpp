#include "wcddd/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wcddd {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

std::string Table::csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << content;
}

namespace {

void dump(const nlohmann::json& j, std::ostringstream& os, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    std::string pad2(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad2 << nlohmann::json(it.key()).dump() << ": ";
                dump(it.value(), os, indent + 1);
            }
            os << "\n" << pad << "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << pad2;
                dump(j[i], os, indent + 1);
            }
            os << "\n" << pad << "]";
            return;
        }
        case nlohmann::json::value_t::number_float: {
            double v = j.get<double>();
            if (std::isfinite(v))
                os << format_double(v);
            else
                os << '"' << format_double(v) << '"';
            return;
        }
        default:
            os << j.dump();
    }
}

}  // namespace

std::string dump_json(const nlohmann::json& j) {
    std::ostringstream os;
    dump(j, os, 0);
    os << "\n";
    return os.str();
}

nlohmann::json VerificationRecord::to_json() const {
    return {{"check", check},   {"params", params}, {"lhs", lhs},
            {"rhs", rhs},       {"ratio", ratio},   {"verdict", verdict},
            {"reason", reason}, {"diagnostics", diagnostics}};
}

std::string svg_loglog(const std::vector<PlotSeries>& series, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel) {
    const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!(s.x[i] > 0) || !(s.y[i] > 0)) continue;
            xmin = std::min(xmin, std::log10(s.x[i]));
            xmax = std::max(xmax, std::log10(s.x[i]));
            ymin = std::min(ymin, std::log10(s.y[i]));
            ymax = std::max(ymax, std::log10(s.y[i]));
        }
    if (!(xmax >= xmin)) xmin = 0, xmax = 1;
    if (!(ymax >= ymin)) ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) { return L + (std::log10(x) - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (std::log10(y) - ymin) / (ymax - ymin) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title
       << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
       << xlabel << " (log10 " << format_double(xmin) << " .. " << format_double(xmax) << ")</text>\n";
    os << "<text x=\"16\" y=\"" << H / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 " << H / 2
       << ")\" text-anchor=\"middle\">" << ylabel << " (log10 " << format_double(ymin) << " .. "
       << format_double(ymax) << ")</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        os << "<polyline fill=\"none\" stroke=\"" << colors[k % 5] << "\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            if (s.x[i] > 0 && s.y[i] > 0) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << W - R - 150 << "\" y=\"" << T + 16 * (k + 1) << "\" font-size=\"12\" fill=\""
           << colors[k % 5] << "\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace wcddd
