// Runs each acceptance criterion and prints one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "dpower/dpower.hpp"

using namespace dpower;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Folds a report into an outcome, remembering the first failing check.
void absorb(Outcome& o, const Report& r) {
    if (r.checks.empty()) {
        o.pass = false;
        if (o.detail.empty()) o.detail = r.suite + ": no checks ran";
    }
    for (const auto& c : r.checks) {
        if (c.pass) continue;
        if (o.pass) {
            char buf[64];
            std::snprintf(buf, sizeof buf, " (worst %.3g)", c.max_residual);
            o.detail = r.suite + ": " + c.name + buf;
        }
        o.pass = false;
    }
}

void require(Outcome& o, bool ok, const std::string& what) {
    if (!ok && o.pass) o.detail = what;
    o.pass = o.pass && ok;
}

HyperParams hyper(Rational r, cplx x) {
    HyperParams hp;
    hp.r = r;
    hp.x = x;
    return hp;
}

TauState generic_state(std::uint64_t seed, cplx x) {
    std::mt19937_64 rng(seed);
    const ParamState p = random_param_state(rng);
    return random_tau_state(rng(), p, x);
}

Outcome linear_relations() {
    Outcome o;
    absorb(o, verify_relations_weights());
    absorb(o, verify_relations_params());
    return o;
}

Outcome tau_relations_suite() {
    Outcome o;
    const Report r = verify_relations_tau(67, 2024, 1e-9);
    absorb(o, r);
    for (const auto& c : r.checks) require(o, c.samples >= 200, c.name + ": fewer than 200 states");
    return o;
}

Outcome reduction_theorem() {
    Outcome o;
    absorb(o, verify_theorem41(default_param_state(), 41, 20, 1e-9));
    return o;
}

Outcome constructed_solutions() {
    Outcome o;
    const Report r = verify_weyl_grids(20, 4, 6, 1e-8);
    absorb(o, r);
    return o;
}

Outcome closed_form_reproduction() {
    Outcome o;
    for (auto [r, x] : {std::pair{Rational(2, 3), cplx(-1.0)}, std::pair{Rational(1, 3), cplx(-1.0)},
                        std::pair{Rational(2, 5), cplx(0.5)}}) {
        const HyperParams hp = hyper(r, x);
        const CompareResult res = compare_three_ways(hp, 6, 1e-7, 1);
        absorb(o, res.report);
        require(o, res.max_deviation <= 1e-7, "closed form deviates from iteration at r = " + to_string(r));
        const cplx expected1 = hp.C1 * std::pow(x, to_double(r));
        require(o, std::abs(z_closed_form(0, 0, hp)) <= initial_cell_tolerance, "z(0,0) is not 0");
        require(o, std::abs(z_closed_form(1, 0, hp) - hp.C0) <= initial_cell_tolerance, "z(1,0) is not C0");
        require(o, std::abs(z_closed_form(0, 1, hp) - expected1) <= initial_cell_tolerance, "z(0,1) is not C1 x^r");
    }
    return o;
}

Outcome cubic_lattice() {
    Outcome o;
    absorb(o, cac_check(random_kappas(6, 8), 6, 100, 1e-9));
    for (cplx x : default_x_values()) {
        const Grid3 g = cube_grid(generic_state(12, x), 3);
        absorb(o, cube_residuals(g, 1e-8));
        absorb(o, cac_check(kappa_specialization(x, to_double(g.zeta0), 8), 7, 100, 1e-9));
    }
    return o;
}

Outcome appendix_suites() {
    Outcome o;
    absorb(o, verify_4a1_relations(20, 3));
    const Report z = verify_relations_z(100, 1, 1e-8);
    absorb(o, z);
    // Infinite-order certificates are parameter probes, not quadruple samples.
    for (const auto& c : z.checks)
        if (c.name.find("^infinity") == std::string::npos)
            require(o, c.samples >= 100, c.name + ": fewer than 100 quadruples");
    absorb(o, cross_check_z_levels(100, 1, 1e-8));
    return o;
}

Outcome orbit_suite() {
    Outcome o;
    for (int depth = 4; depth <= 8; ++depth) absorb(o, verify_orbit_lemma(depth));
    return o;
}

Outcome identity_map() {
    Outcome o;
    const Grid2 g = iterate_special_quadrant(hyper(Rational(1, 2), cplx(-1.0)), 8, 8);
    double worst = 0.0;
    for (int n = 0; n <= 8; ++n)
        for (int m = 0; m <= 8; ++m) worst = std::max(worst, std::abs(g.at(n, m) - cplx(n, m)));
    require(o, worst <= 1e-10, "identity grid deviates by " + std::to_string(worst));
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "linear relations on weights and parameters", 1.0, linear_relations},
        {2, "tau relations with phases", 30.0, tau_relations_suite},
        {3, "projective reduction theorem", 10.0, reduction_theorem},
        {4, "constructed solutions from Weyl grids", 60.0, constructed_solutions},
        {5, "closed form versus iteration", 10.0, closed_form_reproduction},
        {6, "cubic lattice consistency and face equations", 60.0, cubic_lattice},
        {7, "subgroup relations and z-level cross-check", 60.0, appendix_suites},
        {8, "orbit suite at depths 4 to 8", 60.0, orbit_suite},
        {9, "identity map at r = 1/2", 10.0, identity_map},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.budget_seconds) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "runtime %.2fs exceeds %.0fs", secs, c.budget_seconds);
            require(o, false, buf);
        }
        std::printf("%s criterion %d: %s [%.2fs]%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    o.detail.empty() ? "" : " ", o.detail.c_str());
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
