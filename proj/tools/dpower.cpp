#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dpower/dpower.hpp"

namespace {

using namespace dpower;

struct RunConfig {
    std::uint64_t seed = 1;
    int samples = 200;
    std::optional<double> tol;
    std::string r = "2/3";
    double x_re = -1.0;
    double x_im = 0.0;
    std::string c0 = "1";
    std::string c1 = "1";
    std::optional<int> grid;
    std::string format = "json";
    std::string out = "-";
    std::string method = "iterate";
};

inline constexpr double verify_default_tol = 1e-9;
inline constexpr double compare_default_tol = 1e-7;
inline constexpr double cube_default_tol = 1e-8;
inline constexpr int lattice_default_grid = 10;
inline constexpr int compare_default_grid = 6;
inline constexpr int cube_default_grid = 3;
inline constexpr int orbit_depth = 8;
inline constexpr int weyl_grid_extent = 6;
inline constexpr int kappa_length = 8;

// "re" or "re,im".
cplx parse_complex(const std::string& text) {
    std::istringstream is(text);
    double re = 0.0, im = 0.0;
    char comma = 0;
    if (!(is >> re)) throw ConfigError("malformed complex value '" + text + "'");
    if (is >> comma) {
        if (comma != ',' || !(is >> im)) throw ConfigError("malformed complex value '" + text + "'");
        if (is >> comma) throw ConfigError("malformed complex value '" + text + "'");
    }
    return {re, im};
}

HyperParams hyper_params(const RunConfig& cfg) {
    HyperParams hp;
    hp.r = parse_rational(cfg.r);
    hp.x = {cfg.x_re, cfg.x_im};
    hp.C0 = parse_complex(cfg.c0);
    hp.C1 = parse_complex(cfg.c1);
    return hp;
}

void validate(const RunConfig& cfg) {
    if (cfg.samples < 1) throw ConfigError("--samples must be at least 1");
    if (cfg.tol && !(*cfg.tol > 0.0)) throw ConfigError("--tol must be positive");
    if (cfg.grid && *cfg.grid < 1) throw ConfigError("--grid must be at least 1");
    const cplx x(cfg.x_re, cfg.x_im);
    if (std::abs(x) < tol::branch_point || std::abs(x - 1.0) < tol::branch_point) {
        throw ConfigError("x must avoid 0 and 1");
    }
    hyper_params(cfg);
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + cfg.out + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("write to '" + cfg.out + "' failed");
}

int finish(const RunConfig& cfg, ojson doc, bool pass) {
    doc["pass"] = pass;
    emit(cfg, doc.dump(2) + "\n");
    return pass ? 0 : 1;
}

int cmd_verify(const RunConfig& cfg) {
    const double tol = cfg.tol.value_or(verify_default_tol);
    // Quantities built from several birational steps get one extra digit.
    const double z_tol = 10.0 * tol;
    const int per_x = (cfg.samples + 2) / 3;
    const int grids = std::max(1, std::min(cfg.samples, 20));

    std::vector<Report> suites;
    suites.push_back(verify_relations_weights());
    suites.push_back(verify_relations_params());
    suites.push_back(verify_relations_tau(per_x, cfg.seed, tol, default_x_values()));
    suites.push_back(verify_theorem41(default_param_state(), cfg.seed, grids, tol));
    suites.push_back(verify_weight_correspondence());
    suites.push_back(verify_4a1_relations(cfg.samples, cfg.seed));
    suites.push_back(verify_relations_z(cfg.samples, cfg.seed, z_tol));
    suites.push_back(cross_check_z_levels(cfg.samples, cfg.seed, z_tol));
    suites.push_back(verify_inverse_similarity_suite(cfg.samples, cfg.seed, z_tol));
    suites.push_back(verify_weyl_grids(grids, cfg.seed, weyl_grid_extent, z_tol));
    suites.push_back(verify_orbit_lemma(orbit_depth));

    ojson doc;
    doc["command"] = "verify";
    doc["seed"] = cfg.seed;
    doc["samples"] = cfg.samples;
    doc["tol"] = tol;
    ojson list = ojson::array();
    bool pass = true;
    for (const auto& s : suites) {
        list.push_back(report_json(s));
        pass = pass && s.pass();
    }
    doc["suites"] = std::move(list);
    return finish(cfg, std::move(doc), pass);
}

int cmd_lattice(const RunConfig& cfg, const std::string& method) {
    const HyperParams hp = hyper_params(cfg);
    const int n = cfg.grid.value_or(lattice_default_grid);
    Grid2 g;
    if (method == "closed") {
        if (2 * n > 2 * max_tau_order) throw ConfigError("--method closed needs --grid <= 8");
        g.x = hp.x;
        g.params = {0, 0, hp.r};
        for (int a = 0; a <= n; ++a) {
            for (int b = 0; b <= n; ++b) {
                try {
                    g.set(a, b, z_closed_form(a, b, hp));
                } catch (const Error& e) {
                    throw std::runtime_error(std::string(e.what()) + " at cell " + cell_name(a, b));
                }
            }
        }
    } else {
        g = iterate_special_quadrant(hp, n, n);
    }
    if (cfg.format == "csv") {
        emit(cfg, lattice_csv(g));
    } else if (cfg.format == "svg") {
        emit(cfg, lattice_svg(g));
    } else {
        emit(cfg, lattice_json(g, hp).dump(2) + "\n");
    }
    return 0;
}

int cmd_compare(const RunConfig& cfg) {
    const HyperParams hp = hyper_params(cfg);
    const int n = cfg.grid.value_or(compare_default_grid);
    if (2 * n > 2 * max_tau_order) throw ConfigError("compare needs n + m <= 16, so --grid <= 8");
    const double tol = cfg.tol.value_or(compare_default_tol);
    const CompareResult res = compare_three_ways(hp, n, tol, cfg.seed);

    ojson doc;
    doc["command"] = "compare";
    doc["params"] = lattice_json(Grid2{}, hp)["params"];
    doc["N"] = n;
    doc["tol"] = tol;
    ojson cells = ojson::array();
    for (const auto& c : res.cells) {
        ojson item;
        item["n"] = c.n;
        item["m"] = c.m;
        item["closed"] = complex_json(c.closed);
        item["iterated"] = complex_json(c.iterated);
        item["deviation"] = c.deviation;
        cells.push_back(std::move(item));
    }
    doc["cells"] = std::move(cells);
    doc["max_deviation"] = res.max_deviation;
    doc["report"] = report_json(res.report);
    return finish(cfg, std::move(doc), res.report.pass());
}

int cmd_cube(const RunConfig& cfg) {
    const double tol = cfg.tol.value_or(cube_default_tol);
    const int size = cfg.grid.value_or(cube_default_grid);
    const cplx x(cfg.x_re, cfg.x_im);
    std::mt19937_64 rng(cfg.seed);
    const ParamState p = random_param_state(rng);
    const TauState s = random_tau_state(rng(), p, x);
    const Grid3 cube = cube_grid(s, size);
    const double zeta0 = to_double(a1_params(p)(zeta, 0));

    std::vector<Report> suites;
    suites.push_back(cube_residuals(cube, tol));
    Report cac_random = cac_check(random_kappas(cfg.seed, kappa_length), cfg.seed, cfg.samples, tol / 10.0);
    cac_random.suite += " (random kappa)";
    suites.push_back(std::move(cac_random));
    Report cac_special = cac_check(kappa_specialization(x, zeta0, kappa_length), cfg.seed + 1, cfg.samples, tol / 10.0);
    cac_special.suite += " (lattice specialization)";
    suites.push_back(std::move(cac_special));

    ojson doc;
    doc["command"] = "cube";
    doc["seed"] = cfg.seed;
    doc["size"] = size;
    doc["x"] = complex_json(x);
    doc["tol"] = tol;
    ojson list = ojson::array();
    bool pass = true;
    for (const auto& r : suites) {
        list.push_back(report_json(r));
        pass = pass && r.pass();
    }
    doc["suites"] = std::move(list);
    return finish(cfg, std::move(doc), pass);
}

void add_common_options(CLI::App& app, RunConfig& cfg) {
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--samples", cfg.samples, "random samples per suite (CAC trials for cube)");
    app.add_option("--tol", cfg.tol, "tolerance (verify 1e-9, compare 1e-7, cube 1e-8 by default)");
    app.add_option("--r", cfg.r, "r = a0+a2+a4 as p/q");
    app.add_option("--x-re", cfg.x_re, "real part of x");
    app.add_option("--x-im", cfg.x_im, "imaginary part of x");
    app.add_option("--c0", cfg.c0, "C0 as re or re,im");
    app.add_option("--c1", cfg.c1, "C1 as re or re,im");
    app.add_option("--grid", cfg.grid, "grid extent (lattice 10, compare 6, cube 3 by default)");
    app.add_option("--format", cfg.format, "lattice output format")->check(CLI::IsMember({"json", "csv", "svg"}));
    app.add_option("--out", cfg.out, "output path, - for standard output");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete power function: relation suites, lattice generation and cross-checks"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    add_common_options(app, cfg);
    auto* verify = app.add_subcommand("verify", "run all relation and consistency suites");
    auto* lattice = app.add_subcommand("lattice", "emit a lattice grid as JSON, CSV or SVG");
    lattice->add_option("--method", cfg.method, "iterate or closed")->check(CLI::IsMember({"iterate", "closed"}));
    auto* compare = app.add_subcommand("compare", "closed forms against direct iteration");
    auto* cube = app.add_subcommand("cube", "cube face equations and consistency around the cube");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        validate(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (lattice->parsed()) return cmd_lattice(cfg, cfg.method);
        if (compare->parsed()) return cmd_compare(cfg);
        if (cube->parsed()) return cmd_cube(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateX& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
