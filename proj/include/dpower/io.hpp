#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpower/power_lattice.hpp"
#include "dpower/report.hpp"

namespace dpower {

using ojson = nlohmann::ordered_json;

// Emitted values never carry a negative zero.
inline double unsigned_zero(double v) { return v == 0.0 ? 0.0 : v; }

inline ojson complex_json(cplx z) { return ojson::array({unsigned_zero(z.real()), unsigned_zero(z.imag())}); }

inline ojson report_json(const Report& r) {
    ojson checks = ojson::array();
    for (const auto& c : r.checks) {
        ojson item;
        item["name"] = c.name;
        item["pass"] = c.pass;
        item["max_residual"] = c.max_residual;
        item["samples"] = c.samples;
        if (!c.note.empty()) item["note"] = c.note;
        checks.push_back(std::move(item));
    }
    ojson out;
    out["suite"] = r.suite;
    out["pass"] = r.pass();
    out["checks"] = std::move(checks);
    return out;
}

inline ojson lattice_json(const Grid2& g, const HyperParams& hp) {
    ojson params;
    params["r"] = to_string(hp.r);
    params["x"] = complex_json(hp.x);
    params["C0"] = complex_json(hp.C0);
    params["C1"] = complex_json(hp.C1);
    ojson grid = ojson::array();
    for (const auto& [k, v] : g.values) {
        ojson cell;
        cell["n"] = k.first;
        cell["m"] = k.second;
        cell["re"] = unsigned_zero(v.real());
        cell["im"] = unsigned_zero(v.imag());
        grid.push_back(std::move(cell));
    }
    ojson out;
    out["params"] = std::move(params);
    out["grid"] = std::move(grid);
    return out;
}

// Shortest decimal that reads back to the same double.
inline std::string shortest_double(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline std::string lattice_csv(const Grid2& g) {
    std::ostringstream os;
    os << "n,m,re,im\n";
    for (const auto& [k, v] : g.values) {
        os << k.first << ',' << k.second << ',' << shortest_double(unsigned_zero(v.real())) << ','
           << shortest_double(unsigned_zero(v.imag()))
           << '\n';
    }
    return os.str();
}

inline constexpr double svg_size = 800.0;
inline constexpr double svg_margin = 40.0;

// Edges between lattice neighbours, drawn in the complex plane after an
// aspect-preserving fit of the bounding box into the viewport.
inline std::string lattice_svg(const Grid2& g) {
    double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
    double lo_y = lo_x, hi_y = -lo_x;
    for (const auto& [k, v] : g.values) {
        lo_x = std::min(lo_x, v.real());
        hi_x = std::max(hi_x, v.real());
        lo_y = std::min(lo_y, v.imag());
        hi_y = std::max(hi_y, v.imag());
    }
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-300});
    const double scale = (svg_size - 2 * svg_margin) / span;
    auto px = [&](cplx z) { return svg_margin + (z.real() - lo_x) * scale; };
    auto py = [&](cplx z) { return svg_size - svg_margin - (z.imag() - lo_y) * scale; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n";
    os << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
    os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    for (const auto& [k, v] : g.values) {
        const auto [n, m] = k;
        for (auto [dn, dm] : {std::pair{1, 0}, std::pair{0, 1}}) {
            if (!g.has(n + dn, m + dm)) continue;
            const cplx w = g.at(n + dn, m + dm);
            os << "<line x1=\"" << shortest_double(px(v)) << "\" y1=\"" << shortest_double(py(v)) << "\" x2=\""
               << shortest_double(px(w)) << "\" y2=\"" << shortest_double(py(w)) << "\"/>\n";
        }
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace dpower
