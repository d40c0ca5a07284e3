#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dpower/numerics.hpp"
#include "dpower/rational.hpp"
#include "dpower/report.hpp"
#include "dpower/root_data.hpp"
#include "dpower/weyl_tau.hpp"

namespace dpower {

// Generators of the 4A1 subgroup, written as words in the D4 generators.
enum class A1Gen {
    s_beta0,
    s_beta1,
    s_gamma0,
    s_gamma1,
    s_zeta0,
    s_zeta1,
    s_mu0,
    s_mu1,
    pi_beta_gamma,
    pi_beta_zeta,
    pi_beta_mu,
    pi_gamma_zeta,
    pi_gamma_mu,
    pi_zeta_mu,
    r1,
    r2,
    r3,
};

inline constexpr std::array<A1Gen, 17> all_a1_gens = {
    A1Gen::s_beta0,       A1Gen::s_beta1,      A1Gen::s_gamma0,      A1Gen::s_gamma1,
    A1Gen::s_zeta0,       A1Gen::s_zeta1,      A1Gen::s_mu0,         A1Gen::s_mu1,
    A1Gen::pi_beta_gamma, A1Gen::pi_beta_zeta, A1Gen::pi_beta_mu,    A1Gen::pi_gamma_zeta,
    A1Gen::pi_gamma_mu,   A1Gen::pi_zeta_mu,   A1Gen::r1,            A1Gen::r2,
    A1Gen::r3};

// The 3A1 part, which also acts on the z-variables.
inline constexpr std::array<A1Gen, 9> three_a1_gens = {
    A1Gen::s_beta0, A1Gen::s_beta1,    A1Gen::s_gamma0,    A1Gen::s_gamma1,  A1Gen::s_zeta0,
    A1Gen::s_zeta1, A1Gen::pi_beta_mu, A1Gen::pi_gamma_mu, A1Gen::pi_zeta_mu};

inline std::string a1_gen_name(A1Gen g) {
    static const std::array<const char*, 17> names = {
        "s_beta0",  "s_beta1",  "s_gamma0", "s_gamma1", "s_zeta0",  "s_zeta1",
        "s_mu0",    "s_mu1",    "pi_bg",    "pi_bz",    "pi_bm",    "pi_gz",
        "pi_gm",    "pi_zm",    "r1",       "r2",       "r3"};
    return names[static_cast<int>(g)];
}

inline Word a1_generator_word(A1Gen g) {
    switch (g) {
        case A1Gen::s_beta0: return parse_word("s4 s3 s1 s0 s2 s4 s3 s1 s0");
        case A1Gen::s_beta1: return parse_word("s2");
        case A1Gen::s_gamma0: return parse_word("s0 s3 s2 s0 s3");
        case A1Gen::s_gamma1: return parse_word("s1 s4 s2 s1 s4");
        case A1Gen::s_zeta0: return parse_word("sigma2 s1 s3 s2 s1 s3 sigma2");
        case A1Gen::s_zeta1: return parse_word("s1 s3 s2 s1 s3");
        case A1Gen::s_mu0: return parse_word("s0 s1 s2 s0 s1");
        case A1Gen::s_mu1: return parse_word("s3 s4 s2 s3 s4");
        case A1Gen::pi_beta_gamma: return parse_word("sigma2 s4 s3 s1 s0");
        case A1Gen::pi_beta_zeta: return parse_word("sigma3 s4 s3 s1 s0");
        case A1Gen::pi_beta_mu: return parse_word("sigma1 s4 s3 s1 s0");
        case A1Gen::pi_gamma_zeta: return parse_word("sigma1");
        case A1Gen::pi_gamma_mu: return parse_word("sigma3");
        case A1Gen::pi_zeta_mu: return parse_word("sigma2");
        case A1Gen::r1: return parse_word("s1 s4");
        case A1Gen::r2: return parse_word("s1 s3");
        case A1Gen::r3: return parse_word("s3 s4");
    }
    return {};
}

using A1Word = std::vector<A1Gen>;

inline Word flatten(const A1Word& w) {
    Word out;
    for (A1Gen g : w) out = out + a1_generator_word(g);
    return out;
}

enum Family : int { beta = 0, gamma = 1, zeta = 2, mu = 3 };

// Pairs (X0, X1) for X in beta, gamma, zeta, mu, with X0 + X1 = 1.
struct A1Params {
    std::array<std::array<Rational, 2>, 4> v{};

    Rational& operator()(Family f, int i) { return v[f][i]; }
    const Rational& operator()(Family f, int i) const { return v[f][i]; }

    friend bool operator==(const A1Params&, const A1Params&) = default;
};

// Coefficients of beta1, gamma1, zeta1, mu1 in a0..a4.
inline constexpr std::array<std::array<int, 5>, 4> a1_coefficients = {{
    {0, 0, 1, 0, 0},
    {0, 1, 1, 0, 1},
    {0, 1, 1, 1, 0},
    {0, 0, 1, 1, 1},
}};

inline A1Params a1_params(const ParamState& p) {
    A1Params out;
    for (int f = 0; f < 4; ++f) {
        Rational one = 0;
        for (int j = 0; j < 5; ++j) one += a1_coefficients[f][j] * p.a[j];
        out.v[f] = {Rational(1) - one, one};
    }
    return out;
}

// The tabulated action of each generator on the A1 parameters.
inline A1Params a1_table_action(A1Gen g, const A1Params& p) {
    A1Params o = p;
    auto reflect = [&](Family f, int i) {
        const Rational x = p(f, i);
        o(f, i) = -x;
        o(f, 1 - i) = p(f, 1 - i) + 2 * x;
    };
    auto swap_pair = [&](Family f) { o.v[f] = {p(f, 1), p(f, 0)}; };
    auto relabel = [&](std::array<Family, 4> src) {
        for (int f = 0; f < 4; ++f) o.v[f] = p.v[src[f]];
    };
    switch (g) {
        case A1Gen::s_beta0: reflect(beta, 0); break;
        case A1Gen::s_beta1: reflect(beta, 1); break;
        case A1Gen::s_gamma0: reflect(gamma, 0); break;
        case A1Gen::s_gamma1: reflect(gamma, 1); break;
        case A1Gen::s_zeta0: reflect(zeta, 0); break;
        case A1Gen::s_zeta1: reflect(zeta, 1); break;
        case A1Gen::s_mu0: reflect(mu, 0); break;
        case A1Gen::s_mu1: reflect(mu, 1); break;
        case A1Gen::pi_beta_gamma: swap_pair(beta); swap_pair(gamma); break;
        case A1Gen::pi_beta_zeta: swap_pair(beta); swap_pair(zeta); break;
        case A1Gen::pi_beta_mu: swap_pair(beta); swap_pair(mu); break;
        case A1Gen::pi_gamma_zeta: swap_pair(gamma); swap_pair(zeta); break;
        case A1Gen::pi_gamma_mu: swap_pair(gamma); swap_pair(mu); break;
        case A1Gen::pi_zeta_mu: swap_pair(zeta); swap_pair(mu); break;
        case A1Gen::r1: relabel({gamma, beta, mu, zeta}); break;
        case A1Gen::r2: relabel({zeta, mu, beta, gamma}); break;
        case A1Gen::r3: relabel({mu, zeta, gamma, beta}); break;
    }
    return o;
}

inline Word rho_word(int i) {
    switch (i) {
        case 1: return a1_generator_word(A1Gen::s_beta0) + a1_generator_word(A1Gen::pi_beta_mu);
        case 2: return a1_generator_word(A1Gen::s_gamma0) + a1_generator_word(A1Gen::pi_gamma_mu);
        default: return a1_generator_word(A1Gen::s_zeta0) + a1_generator_word(A1Gen::pi_zeta_mu);
    }
}

// z0 of a state: the tau0 slot after rho0^2, divided by tau0.
inline cplx z0_functional(const TauState& s) {
    if (std::abs(s[t0]) <= tol::degenerate) throw DegenerateDenominator("tau0 vanishes");
    const Word r0 = rho_word(0);
    return apply_word(r0 + r0, s)[t0] / s[t0];
}

// Affinely independent parameter points; two linear maps agreeing on all of
// them agree on the whole normalized hyperplane.
inline std::vector<ParamState> parameter_probe_points(std::uint64_t seed, int extra = 0) {
    std::vector<ParamState> pts;
    pts.push_back(ParamState::from_free(0, 0, 0, 0));
    pts.push_back(ParamState::from_free(1, 0, 0, 0));
    pts.push_back(ParamState::from_free(0, 1, 0, 0));
    pts.push_back(ParamState::from_free(0, 0, 1, 0));
    pts.push_back(ParamState::from_free(0, 0, 0, 1));
    pts.push_back(default_param_state());
    std::mt19937_64 rng(seed);
    for (int i = 0; i < extra; ++i) pts.push_back(random_param_state(rng));
    return pts;
}

inline A1Params a1_after(const Word& w, const ParamState& p) { return a1_params(apply_word_params(w, p)); }

namespace detail {

inline Rational a1_form(int f, int g) {
    Rational s = 0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) s += a1_coefficients[f][i] * cartan[i][j] * a1_coefficients[g][j];
    return s;
}

inline double tau_vector_gap(const TauState& a, const TauState& b) {
    double worst = 0.0;
    for (int k = 0; k < 9; ++k) worst = std::max(worst, relative_gap(a.tau[k], b.tau[k]));
    return worst;
}

// Nearest fourth root of unity to each slot ratio a/b.
inline TauVector quarter_phase(const TauState& a, const TauState& b) {
    TauVector out{};
    for (int k = 0; k < 9; ++k) {
        const cplx q = a.tau[k] / b.tau[k];
        const double turn = std::round(std::arg(q) / (0.5 * pi_v<double>()));
        out[k] = std::polar(1.0, turn * 0.5 * pi_v<double>());
        out[k] = {std::round(out[k].real()), std::round(out[k].imag())};
    }
    return out;
}

inline std::string format_phase(const TauVector& ph) {
    std::string s = "(";
    for (int k = 0; k < 9; ++k) {
        if (k) s += ", ";
        const cplx v = ph[k];
        s += v.real() > 0.5 ? "1" : v.real() < -0.5 ? "-1" : v.imag() > 0 ? "i" : "-i";
    }
    return s + ")";
}

}  // namespace detail

inline Report verify_theorem41(const ParamState& p, std::uint64_t seed = 41, int tau_samples = 20,
                                double tolerance = 1e-9) {
    Report rep{"projective reduction theorem", {}};
    const auto probes = parameter_probe_points(seed, 4);
    const std::array<Family, 3> moved = {zeta, beta, gamma};  // rho0, rho1, rho2

    for (int i = 0; i < 3; ++i) {
        const Word r = rho_word(i);
        const Word r2 = r + r;
        const std::string tag = "rho" + std::to_string(i);

        // (i) rho^2 is a translation, rho swaps mu0 and mu1.
        ParamState shift;
        for (int j = 0; j < 5; ++j) shift.a[j] = apply_word_params(r2, p).a[j] - p.a[j];
        bool translation = shift.a != ParamState{}.a;
        bool multiples = true;
        for (const auto& q : probes) {
            const ParamState img = apply_word_params(r2, q);
            for (int j = 0; j < 5; ++j) translation = translation && img.a[j] - q.a[j] == shift.a[j];
            for (int k = 1; k <= 5; ++k) {
                const ParamState far = apply_word_params(power(r2, k), q);
                for (int j = 0; j < 5; ++j) multiples = multiples && far.a[j] - q.a[j] == k * shift.a[j];
            }
        }
        rep.add(tag + "^2 is a translation of (a0..a4)", translation, 0.0, probes.size());
        rep.add(tag + "^(2k) shifts by k times the rho^2 vector (k <= 5)", multiples, 0.0, probes.size());

        bool swap = true;
        for (const auto& q : probes) {
            const A1Params base = a1_params(q);
            swap = swap && a1_after(r, q)(mu, 0) == base(mu, 1) && a1_after(r2, q)(mu, 0) == base(mu, 0);
        }
        rep.add(tag + " swaps mu0 and mu1 (not a translation)", swap, 0.0, probes.size());

        // (iv) shift table: the moved pair goes up by one, the other two stay.
        const A1Params base = a1_params(p);
        const A1Params img = a1_after(r, p);
        bool shift_ok = true;
        for (int f = 0; f < 3; ++f) {
            const Family fam = static_cast<Family>(f);
            if (fam == moved[i]) {
                shift_ok = shift_ok && img(fam, 0) == base(fam, 0) + Rational(1) && img(fam, 1) == base(fam, 1) - Rational(1);
            } else {
                shift_ok = shift_ok && img.v[fam] == base.v[fam];
            }
        }
        shift_ok = shift_ok && img(mu, 0) == base(mu, 1) && img(mu, 1) == base(mu, 0);
        rep.add(tag + " shift table", shift_ok);
    }

    // (ii) commutativity, exact on parameters and numeric on tau.
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            const Word lhs = rho_word(i) + rho_word(j);
            const Word rhs = rho_word(j) + rho_word(i);
            bool exact = true;
            for (const auto& q : probes) exact = exact && apply_word_params(lhs, q) == apply_word_params(rhs, q);
            const std::string tag = "rho" + std::to_string(i) + " rho" + std::to_string(j) + " = rho" +
                                    std::to_string(j) + " rho" + std::to_string(i);
            rep.add(tag + " on parameters", exact, 0.0, probes.size());

            // On tau the two orders differ by one fixed quarter phase per
            // slot, inherited from the phase-modified sigma relations.
            Tally tally(tag + " on tau up to a fixed quarter phase", tolerance);
            Tally zt(tag + " on z0", tolerance);
            std::optional<TauVector> phase;
            const auto xs = default_x_values();
            for (int n = 0; n < tau_samples; ++n) {
                std::mt19937_64 rng(sample_seed(seed, static_cast<std::uint64_t>(n)));
                const TauState s = random_tau_state(rng(), p, xs[n % xs.size()]);
                try {
                    const TauState a = apply_word(lhs, s);
                    const TauState b = apply_word(rhs, s);
                    if (!phase) phase = detail::quarter_phase(a, b);
                    TauState rotated = b;
                    for (int k = 0; k < 9; ++k) rotated.tau[k] *= (*phase)[k];
                    tally.observe(detail::tau_vector_gap(a, rotated));
                    zt.observe(relative_gap(z0_functional(a), z0_functional(b)));
                } catch (const Error& e) {
                    tally.fail(e.what());
                    zt.fail(e.what());
                }
            }
            tally.commit(rep);
            if (phase) rep.checks.back().note = "phase " + detail::format_phase(*phase);
            zt.commit(rep);
        }
    }

    // (iii) bilinear forms through (a_i|a_j) = A_ij.
    const std::array<std::pair<int, int>, 3> orth = {{{beta, gamma}, {gamma, zeta}, {zeta, beta}}};
    const char* label = "bgz";
    for (auto [f, g] : orth) {
        rep.add(std::string("(") + label[f] + "1|" + label[g] + "1) = 0", detail::a1_form(f, g) == Rational(0));
    }
    for (int f : {beta, gamma, zeta}) {
        rep.add(std::string("(") + label[f] + "1|" + label[f] + "1) = 2", detail::a1_form(f, f) == Rational(2));
    }
    return rep;
}

struct A1Relation {
    std::string name;
    A1Word lhs;
    A1Word rhs;
};

inline std::vector<A1Relation> four_a1_relations() {
    using G = A1Gen;
    std::vector<A1Relation> rel;
    const std::array<std::array<G, 2>, 4> refl = {{{G::s_beta0, G::s_beta1},
                                                   {G::s_gamma0, G::s_gamma1},
                                                   {G::s_zeta0, G::s_zeta1},
                                                   {G::s_mu0, G::s_mu1}}};
    for (const auto& pair : refl)
        for (G g : pair) rel.push_back({a1_gen_name(g) + "^2", {g, g}, {}});
    for (int f = 0; f < 4; ++f)
        for (int e = f + 1; e < 4; ++e)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const G a = refl[f][i];
                    const G b = refl[e][j];
                    rel.push_back({a1_gen_name(a) + " " + a1_gen_name(b) + " commute", {a, b}, {b, a}});
                }
    for (G p : {G::pi_beta_gamma, G::pi_beta_zeta, G::pi_beta_mu, G::pi_gamma_zeta, G::pi_gamma_mu,
                G::pi_zeta_mu})
        rel.push_back({a1_gen_name(p) + "^2", {p, p}, {}});
    rel.push_back({"pi_gz = pi_bg pi_bz", {G::pi_gamma_zeta}, {G::pi_beta_gamma, G::pi_beta_zeta}});
    rel.push_back({"pi_gm = pi_bg pi_bm", {G::pi_gamma_mu}, {G::pi_beta_gamma, G::pi_beta_mu}});
    rel.push_back({"pi_zm = pi_bz pi_bm", {G::pi_zeta_mu}, {G::pi_beta_zeta, G::pi_beta_mu}});
    rel.push_back({"pi_bg pi_bz = pi_bz pi_bg", {G::pi_beta_gamma, G::pi_beta_zeta},
                   {G::pi_beta_zeta, G::pi_beta_gamma}});
    rel.push_back({"pi_bg pi_bm = pi_bm pi_bg", {G::pi_beta_gamma, G::pi_beta_mu},
                   {G::pi_beta_mu, G::pi_beta_gamma}});
    rel.push_back({"pi_bz pi_bm = pi_bm pi_bz", {G::pi_beta_zeta, G::pi_beta_mu},
                   {G::pi_beta_mu, G::pi_beta_zeta}});
    for (G r : {G::r1, G::r2, G::r3}) rel.push_back({a1_gen_name(r) + "^2", {r, r}, {}});
    rel.push_back({"r3 = r1 r2", {G::r3}, {G::r1, G::r2}});
    rel.push_back({"r3 = r2 r1", {G::r3}, {G::r2, G::r1}});

    // pi conjugation: the two swapped families exchange their indices.
    const std::array<std::pair<G, std::array<bool, 4>>, 3> pis = {{
        {G::pi_beta_gamma, {true, true, false, false}},
        {G::pi_beta_zeta, {true, false, true, false}},
        {G::pi_beta_mu, {true, false, false, true}},
    }};
    for (const auto& [p, swaps] : pis)
        for (int f = 0; f < 4; ++f)
            for (int i = 0; i < 2; ++i) {
                const G src = refl[f][i];
                const G dst = refl[f][swaps[f] ? 1 - i : i];
                rel.push_back({a1_gen_name(p) + " " + a1_gen_name(src) + " = " + a1_gen_name(dst) + " " +
                                   a1_gen_name(p),
                               {p, src},
                               {dst, p}});
            }

    // r conjugation permutes the families.
    const std::array<std::pair<G, std::array<int, 4>>, 2> rs = {{
        {G::r1, {gamma, beta, mu, zeta}},
        {G::r2, {zeta, mu, beta, gamma}},
    }};
    for (const auto& [r, img] : rs)
        for (int f = 0; f < 4; ++f)
            for (int i = 0; i < 2; ++i) {
                const G src = refl[f][i];
                const G dst = refl[img[f]][i];
                rel.push_back({a1_gen_name(r) + " " + a1_gen_name(src) + " = " + a1_gen_name(dst) + " " +
                                   a1_gen_name(r),
                               {r, src},
                               {dst, r}});
            }
    const std::array<G, 6> pi_list = {G::pi_beta_gamma, G::pi_beta_zeta, G::pi_beta_mu,
                                      G::pi_gamma_zeta, G::pi_gamma_mu,  G::pi_zeta_mu};
    const std::array<G, 6> r1_img = {G::pi_beta_gamma, G::pi_gamma_mu, G::pi_gamma_zeta,
                                     G::pi_beta_mu,    G::pi_beta_zeta, G::pi_zeta_mu};
    const std::array<G, 6> r2_img = {G::pi_zeta_mu,  G::pi_beta_zeta, G::pi_gamma_zeta,
                                     G::pi_beta_mu,  G::pi_gamma_mu,  G::pi_beta_gamma};
    for (int k = 0; k < 6; ++k) {
        rel.push_back({"r1 " + a1_gen_name(pi_list[k]) + " = " + a1_gen_name(r1_img[k]) + " r1",
                       {G::r1, pi_list[k]},
                       {r1_img[k], G::r1}});
        rel.push_back({"r2 " + a1_gen_name(pi_list[k]) + " = " + a1_gen_name(r2_img[k]) + " r2",
                       {G::r2, pi_list[k]},
                       {r2_img[k], G::r2}});
    }
    return rel;
}

inline Report verify_4a1_relations(int samples, std::uint64_t seed) {
    Report rep{"4A1 relations on parameters", {}};
    const auto probes = parameter_probe_points(seed, samples);
    for (const auto& r : four_a1_relations()) {
        const Word lhs = flatten(r.lhs);
        const Word rhs = flatten(r.rhs);
        bool ok = true;
        for (const auto& q : probes) ok = ok && apply_word_params(lhs, q) == apply_word_params(rhs, q);
        rep.add(r.name, ok, 0.0, probes.size());
    }

    // (s_X0 s_X1) has infinite order: it moves X1 by the same nonzero amount
    // everywhere.
    const std::array<std::pair<A1Gen, A1Gen>, 4> pairs = {{{A1Gen::s_beta0, A1Gen::s_beta1},
                                                           {A1Gen::s_gamma0, A1Gen::s_gamma1},
                                                           {A1Gen::s_zeta0, A1Gen::s_zeta1},
                                                           {A1Gen::s_mu0, A1Gen::s_mu1}}};
    for (int f = 0; f < 4; ++f) {
        const Word w = flatten({pairs[f].first, pairs[f].second});
        const Family fam = static_cast<Family>(f);
        const Rational step = a1_after(w, probes[0])(fam, 1) - a1_params(probes[0])(fam, 1);
        bool ok = step != Rational(0);
        for (const auto& q : probes) ok = ok && a1_after(w, q)(fam, 1) - a1_params(q)(fam, 1) == step;
        rep.add("(" + a1_gen_name(pairs[f].first) + " " + a1_gen_name(pairs[f].second) +
                    ")^infinity: translation by " + to_string(step),
                ok, 0.0, probes.size());
    }

    // The words reproduce the tabulated parameter actions.
    for (A1Gen g : all_a1_gens) {
        bool ok = true;
        for (const auto& q : probes) ok = ok && a1_after(a1_generator_word(g), q) == a1_table_action(g, a1_params(q));
        rep.add(a1_gen_name(g) + " matches its parameter table", ok, 0.0, probes.size());
    }
    return rep;
}

struct ZQuad {
    cplx z0, z1, z2, z12;
    A1Params params;
    cplx x;
};

inline ZQuad z_quad_from_tau(const TauState& s) {
    const Word r1 = rho_word(1);
    const Word r2 = rho_word(2);
    ZQuad q;
    q.z0 = z0_functional(s);
    q.z1 = z0_functional(apply_word(r1, s));
    q.z2 = z0_functional(apply_word(r2, s));
    q.z12 = z0_functional(apply_word(r1 + r2, s));
    q.params = a1_params(s.params);
    q.x = s.ctx.x;
    return q;
}

// (z0+z1)(z12+z2) / ((z1+z12)(z2+z0)), which equals 1/x.
inline cplx cross_ratio(const ZQuad& q) {
    return (q.z0 + q.z1) * (q.z12 + q.z2) / ((q.z1 + q.z12) * (q.z2 + q.z0));
}

inline double cross_ratio_gap(const ZQuad& q) { return std::abs(cross_ratio(q) * q.x - 1.0); }

// Predicted pair sums (z0+z1, z12+z2, z1+z12, z2+z0) from a single tau state.
inline std::array<cplx, 4> pair_sums_from_tau(const TauState& s) {
    const cplx I(0.0, 1.0);
    const cplx x = s.ctx.x;
    const cplx rx = s.ctx.sqrt_x;
    const cplx q = -I * rx * s[t2_sigma2] / s[t2];
    const cplx k = I * to_double(a1_params(s.params)(zeta, 0)) * s[t1] * s[t3] / (s[t0] * s[t4]);
    return {k * q / rx, k * (x - q) / (rx * (1.0 - q)), k * (x - q) * q / (rx * (1.0 - q)), k * rx};
}

inline cplx z12_from_three(cplx z0, cplx z1, cplx z2, cplx x) {
    const cplx den = x * (z0 + z1) - (z2 + z0);
    const double scale = std::abs(x * (z0 + z1)) + std::abs(z2 + z0);
    if (std::abs(den) <= tol::degenerate * std::max(scale, 1.0)) {
        throw DegenerateDenominator("x(z0+z1) - (z2+z0) vanishes");
    }
    return -(x * z2 * (z0 + z1) - z1 * (z2 + z0)) / den;
}

inline constexpr double similarity_degenerate = 1e-10;

// zeta0 z0 = -beta1 (z1+z0)(z0+w1)/(z1-w1) - gamma1 (z2+z0)(z0+w2)/(z2-w2)
// with w_i = rho_i^{-1}(z0).
inline Report verify_inverse_similarity(const TauState& s, double tolerance = 1e-8) {
    Report rep{"inverse-shift similarity identity", {}};
    const ZQuad q = z_quad_from_tau(s);
    const cplx w1 = z0_functional(apply_word(inverse(rho_word(1)), s));
    const cplx w2 = z0_functional(apply_word(inverse(rho_word(2)), s));
    const double b1 = to_double(q.params(beta, 1));
    const double g1 = to_double(q.params(gamma, 1));
    const double e0 = to_double(q.params(zeta, 0));
    auto guard = [](cplx a, cplx b, const char* what) {
        if (std::abs(a - b) <= similarity_degenerate * (std::abs(a) + std::abs(b))) {
            throw DegenerateDenominator(std::string(what) + " vanishes");
        }
    };
    guard(q.z1, w1, "z1 - rho1^-1(z0)");
    guard(q.z2, w2, "z2 - rho2^-1(z0)");
    const cplx lhs = e0 * q.z0;
    const cplx term1 = -b1 * (q.z1 + q.z0) * (q.z0 + w1) / (q.z1 - w1);
    const cplx term2 = -g1 * (q.z2 + q.z0) * (q.z0 + w2) / (q.z2 - w2);
    const double scale = std::abs(lhs) + std::abs(term1) + std::abs(term2);
    const double gap = std::abs(lhs - term1 - term2) / std::max(scale, 1e-300);
    rep.add("zeta0 z0 = beta/gamma inverse-shift terms", gap <= tolerance, gap);
    return rep;
}

namespace detail {

inline void guard_z(cplx d, double scale, const char* what) {
    if (std::abs(d) <= tol::degenerate * std::max(scale, 1.0)) throw DegenerateDenominator(what);
}

inline ZQuad s_beta0_z(const ZQuad& q) {
    const auto& p = q.params;
    const double b = to_double(p(beta, 0)), g = to_double(p(gamma, 0)), e = to_double(p(zeta, 0)),
                 m = to_double(p(mu, 0));
    const cplx z0 = q.z0, z1 = q.z1, z2 = q.z2, z12 = q.z12;
    const cplx d0 = 2 * b * z0 + (b - g - e + m) * z1 - (b + g - e - m) * z12;
    const cplx d2 = 2 * b * z2 - (b - g - e + m) * z1 + (b + g - e - m) * z12;
    const double scale = std::abs(z0) + std::abs(z1) + std::abs(z2) + std::abs(z12);
    guard_z(d0, scale, "s_beta0: denominator of z0 image vanishes");
    guard_z(d2, scale, "s_beta0: denominator of z2 image vanishes");
    ZQuad o = q;
    o.z0 = (2 * b * z1 * z12 - (b + g + e - m) * z0 * z1 + (b - g + e + m) * z0 * z12) / d0;
    o.z2 = (2 * b * z1 * z12 + (b + g + e - m) * z1 * z2 - (b - g + e + m) * z2 * z12) / d2;
    // z1 is fixed; z12 follows from the cross-ratio relation.
    o.z12 = z12_from_three(o.z0, o.z1, o.z2, q.x);
    o.params = a1_table_action(A1Gen::s_beta0, p);
    return o;
}

inline ZQuad s_gamma0_z(const ZQuad& q) {
    const auto& p = q.params;
    const double b = to_double(p(beta, 0)), g = to_double(p(gamma, 0)), e = to_double(p(zeta, 0)),
                 m = to_double(p(mu, 0));
    const cplx z0 = q.z0, z1 = q.z1, z2 = q.z2, z12 = q.z12;
    const cplx d0 = 2 * g * z0 - (b + g - e - m) * z12 - (b - g + e - m) * z2;
    const cplx d1 = 2 * g * z1 + (b + g - e - m) * z12 + (b - g + e - m) * z2;
    const double scale = std::abs(z0) + std::abs(z1) + std::abs(z2) + std::abs(z12);
    guard_z(d0, scale, "s_gamma0: denominator of z0 image vanishes");
    guard_z(d1, scale, "s_gamma0: denominator of z1 image vanishes");
    ZQuad o = q;
    o.z0 = (2 * g * z2 * z12 - (b - g - e - m) * z0 * z12 - (b + g + e - m) * z0 * z2) / d0;
    o.z1 = (2 * g * z2 * z12 + (b - g - e - m) * z1 * z12 + (b + g + e - m) * z1 * z2) / d1;
    o.z12 = z12_from_three(o.z0, o.z1, o.z2, q.x);
    o.params = a1_table_action(A1Gen::s_gamma0, p);
    return o;
}

inline ZQuad s_zeta0_z(const ZQuad& q) {
    for (cplx z : {q.z0, q.z1, q.z2, q.z12})
        if (std::abs(z) <= tol::degenerate) throw DegenerateDenominator("s_zeta0: a z-variable vanishes");
    ZQuad o = q;
    o.z0 = -1.0 / q.z0;
    o.z1 = -1.0 / q.z1;
    o.z2 = -1.0 / q.z2;
    o.z12 = -1.0 / q.z12;
    o.params = a1_table_action(A1Gen::s_zeta0, q.params);
    return o;
}

inline ZQuad pi_zeta_mu_z(const ZQuad& q) {
    const auto& p = q.params;
    const double b0 = to_double(p(beta, 0)), b1 = to_double(p(beta, 1));
    const double g0 = to_double(p(gamma, 0)), g1 = to_double(p(gamma, 1));
    const double e0 = to_double(p(zeta, 0));
    const double m0 = to_double(p(mu, 0)), m1 = to_double(p(mu, 1));
    const cplx z0 = q.z0, z1 = q.z1, z2 = q.z2, z12 = q.z12;
    const cplx den = 2.0 * (z0 + z2) * (z1 + z12);
    const double scale = 2.0 * (std::abs(z0) + std::abs(z2)) * (std::abs(z1) + std::abs(z12));
    guard_z(den, scale, "pi_zm: 2(z0+z2)(z1+z12) vanishes");
    ZQuad o = q;
    o.z0 = -e0 * ((b0 - g1 + e0 - m1) * z0 + (b0 + g1 - e0 - m1) * z1 + (b1 - g1 - e0 + m0) * z2 +
                  (b1 + g1 - e0 + m0) * z12) /
           den;
    o.z1 = -e0 * ((b1 + g1 - e0 - m0) * z0 + (b1 - g1 + e0 - m0) * z1 + (b0 + g1 - e0 + m1) * z2 +
                  (b0 - g1 - e0 + m1) * z12) /
           den;
    o.z2 = -e0 * ((b1 - g0 - e0 + m1) * z0 + (b1 + g0 - e0 + m1) * z1 + (b0 - g0 + e0 - m0) * z2 +
                  (b0 + g0 - e0 - m0) * z12) /
           den;
    o.z12 = -e0 * ((b0 + g0 - e0 + m0) * z0 + (b0 - g0 - e0 + m0) * z1 + (b1 + g0 - e0 - m1) * z2 +
                   (b1 - g0 + e0 - m1) * z12) /
            den;
    o.params = a1_table_action(A1Gen::pi_zeta_mu, p);
    return o;
}

}  // namespace detail

// Direct rational action on (z0, z1, z2, z12) for the nine 3A1 generators.
inline ZQuad apply_gen_z(A1Gen g, const ZQuad& q) {
    ZQuad o = q;
    switch (g) {
        case A1Gen::s_beta0: return detail::s_beta0_z(q);
        case A1Gen::s_gamma0: return detail::s_gamma0_z(q);
        case A1Gen::s_zeta0: return detail::s_zeta0_z(q);
        case A1Gen::pi_zeta_mu: return detail::pi_zeta_mu_z(q);
        case A1Gen::pi_beta_mu:
            o.z0 = q.z1;
            o.z1 = q.z0;
            o.z2 = q.z12;
            o.z12 = q.z2;
            o.params = a1_table_action(g, q.params);
            return o;
        case A1Gen::pi_gamma_mu:
            o.z0 = q.z2;
            o.z1 = q.z12;
            o.z2 = q.z0;
            o.z12 = q.z1;
            o.params = a1_table_action(g, q.params);
            return o;
        case A1Gen::s_beta1:
            return apply_gen_z(A1Gen::pi_beta_mu,
                               apply_gen_z(A1Gen::s_beta0, apply_gen_z(A1Gen::pi_beta_mu, q)));
        case A1Gen::s_gamma1:
            return apply_gen_z(A1Gen::pi_gamma_mu,
                               apply_gen_z(A1Gen::s_gamma0, apply_gen_z(A1Gen::pi_gamma_mu, q)));
        case A1Gen::s_zeta1:
            return apply_gen_z(A1Gen::pi_zeta_mu,
                               apply_gen_z(A1Gen::s_zeta0, apply_gen_z(A1Gen::pi_zeta_mu, q)));
        default:
            throw std::invalid_argument(a1_gen_name(g) + " has no action on the z-variables");
    }
}

inline ZQuad apply_word_z(const A1Word& w, ZQuad q) {
    for (A1Gen g : w) q = apply_gen_z(g, q);
    return q;
}

inline double zquad_gap(const ZQuad& a, const ZQuad& b) {
    double worst = std::max({relative_gap(a.z0, b.z0), relative_gap(a.z1, b.z1), relative_gap(a.z2, b.z2),
                             relative_gap(a.z12, b.z12)});
    if (!(a.params == b.params)) worst = std::max(worst, 1.0);
    return worst;
}

// A random state with generic parameters and x cycling through the defaults.
inline TauState sample_tau_state(std::uint64_t seed, std::uint64_t index) {
    std::mt19937_64 rng(sample_seed(seed, index));
    const ParamState p = random_param_state(rng);
    const auto xs = default_x_values();
    return random_tau_state(rng(), p, xs[index % xs.size()]);
}

inline std::vector<A1Relation> three_a1_z_relations() {
    using G = A1Gen;
    std::vector<A1Relation> rel;
    const std::array<std::array<G, 2>, 3> refl = {
        {{G::s_beta0, G::s_beta1}, {G::s_gamma0, G::s_gamma1}, {G::s_zeta0, G::s_zeta1}}};
    for (const auto& pair : refl)
        for (G g : pair) rel.push_back({a1_gen_name(g) + "^2", {g, g}, {}});
    for (int f = 0; f < 3; ++f)
        for (int e = f + 1; e < 3; ++e)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const G a = refl[f][i];
                    const G b = refl[e][j];
                    rel.push_back({"(" + a1_gen_name(a) + " " + a1_gen_name(b) + ")^2", {a, b, a, b}, {}});
                }
    const std::array<G, 3> pis = {G::pi_beta_mu, G::pi_gamma_mu, G::pi_zeta_mu};
    for (G p : pis) rel.push_back({a1_gen_name(p) + "^2", {p, p}, {}});
    for (int f = 0; f < 3; ++f)
        for (int e = 0; e < 3; ++e)
            for (int k = 0; k < 2; ++k) {
                const G src = refl[e][k];
                const G dst = refl[e][e == f ? 1 - k : k];
                rel.push_back({a1_gen_name(pis[f]) + " " + a1_gen_name(src) + " = " + a1_gen_name(dst) + " " +
                                   a1_gen_name(pis[f]),
                               {pis[f], src},
                               {dst, pis[f]}});
            }
    return rel;
}

inline Report verify_relations_z(int samples, std::uint64_t seed, double tolerance = 1e-8) {
    Report rep{"3A1 relations on z", {}};
    const auto rels = three_a1_z_relations();
    std::vector<Tally> tallies;
    for (const auto& r : rels) tallies.emplace_back(r.name, tolerance);
    Tally invariant("cross-ratio preserved by every generator", tolerance);
    for (int n = 0; n < samples; ++n) {
        ZQuad q;
        try {
            q = z_quad_from_tau(sample_tau_state(seed, static_cast<std::uint64_t>(n)));
        } catch (const Error& e) {
            for (auto& t : tallies) t.fail(e.what());
            continue;
        }
        for (std::size_t i = 0; i < rels.size(); ++i) {
            try {
                tallies[i].observe(zquad_gap(apply_word_z(rels[i].lhs, q), apply_word_z(rels[i].rhs, q)));
            } catch (const Error& e) {
                tallies[i].fail(e.what());
            }
        }
        for (A1Gen g : three_a1_gens) {
            try {
                invariant.observe(cross_ratio_gap(apply_gen_z(g, q)));
            } catch (const Error& e) {
                invariant.fail(e.what());
            }
        }
    }
    for (const auto& t : tallies) t.commit(rep);
    invariant.commit(rep);

    // Infinite order, certified on parameters.
    const std::array<std::pair<A1Gen, A1Gen>, 3> pairs = {{{A1Gen::s_beta0, A1Gen::s_beta1},
                                                           {A1Gen::s_gamma0, A1Gen::s_gamma1},
                                                           {A1Gen::s_zeta0, A1Gen::s_zeta1}}};
    const auto probes = parameter_probe_points(seed, 4);
    for (int f = 0; f < 3; ++f) {
        const Family fam = static_cast<Family>(f);
        auto step_at = [&](const ParamState& p) {
            const A1Params a = a1_params(p);
            const A1Params b = a1_table_action(pairs[f].second, a1_table_action(pairs[f].first, a));
            return b(fam, 1) - a(fam, 1);
        };
        const Rational step = step_at(probes[0]);
        bool ok = step != Rational(0);
        for (const auto& p : probes) ok = ok && step_at(p) == step;
        rep.add("(" + a1_gen_name(pairs[f].first) + " " + a1_gen_name(pairs[f].second) +
                    ")^infinity: translation by " + to_string(step),
                ok, 0.0, probes.size());
    }
    return rep;
}

inline Report cross_check_z_levels(int samples, std::uint64_t seed, double tolerance = 1e-8) {
    Report rep{"z-level versus tau-level generators", {}};
    std::vector<Tally> tallies;
    for (A1Gen g : three_a1_gens) tallies.emplace_back(a1_gen_name(g), tolerance);
    for (int n = 0; n < samples; ++n) {
        const TauState s = sample_tau_state(seed, static_cast<std::uint64_t>(n));
        ZQuad q;
        try {
            q = z_quad_from_tau(s);
        } catch (const Error& e) {
            for (auto& t : tallies) t.fail(e.what());
            continue;
        }
        for (std::size_t i = 0; i < three_a1_gens.size(); ++i) {
            const A1Gen g = three_a1_gens[i];
            try {
                const ZQuad direct = apply_gen_z(g, q);
                const ZQuad via_tau = z_quad_from_tau(apply_word(a1_generator_word(g), s));
                tallies[i].observe(zquad_gap(direct, via_tau));
            } catch (const Error& e) {
                tallies[i].fail(e.what());
            }
        }
    }
    for (const auto& t : tallies) t.commit(rep);
    return rep;
}

// Weight-lattice picture of the rho translations on the sublattice L.
inline Report verify_weight_correspondence(int reach = 4) {
    Report rep{"rho actions on the weight lattice", {}};
    const Word r0 = rho_word(0), r1 = rho_word(1), r2 = rho_word(2);
    const Weight v0 = weight_of({-1, 1, 0, 1, -1, 0, 0});
    const Weight v1 = weight_of({-1, -1, 2, -1, -1, 0, 0});
    const Weight v2 = weight_of({-1, 1, 0, -1, 1, 0, 0});
    rep.add("rho0^2 displacement v0", displacement_vector(r0 + r0, h(0)) == v0);
    rep.add("rho1^2 displacement v1", displacement_vector(r1 + r1, h(0)) == v1);
    rep.add("rho2^2 displacement v2", displacement_vector(r2 + r2, h(0)) == v2);

    const std::array<Weight, 4> bases = {h(0), weight_of({0, -1, 1, 0, 0, 1, 0}),
                                         weight_of({0, 0, 0, 0, 1, 1, 1}),
                                         weight_of({0, 0, 1, -1, 0, 0, 1})};
    rep.add("base point of L(1) is rho1(h0)", act_word_weight(r1, h(0)) == bases[1]);
    rep.add("base point of L(2) is rho2(h0)", act_word_weight(r2, h(0)) == bases[2]);
    rep.add("base point of L(12) is rho1 rho2(h0)", act_word_weight(r1 + r2, h(0)) == bases[3]);

    const Word t13i = inverse(translation_word(Translation::T13));
    const Word t40i = inverse(translation_word(Translation::T40));
    const Word t34i = inverse(translation_word(Translation::T34));
    const Word t14 = translation_word(Translation::T14);
    const Word rho0_sq_alt = t13i + t40i + t34i + t34i;

    auto in_span = [&](const Weight& d) {
        if (d[2] % 2 != 0) return false;
        const std::int64_t p = d[2] / 2;
        const std::int64_t q = d[1] + p;
        return p * v1 + q * v2 == d;
    };

    bool lattice = true, rho1_table = true, rho2_table = true, rho0_words = true, piecewise = true,
         labels = true;
    std::size_t count = 0;
    for (int l1 = -reach; l1 <= reach; ++l1) {
        for (int l2 = -reach; l2 <= reach; ++l2) {
            ++count;
            const Word path = power(r1, l1) + power(r2, l2);
            const Weight pt = act_word_weight(path, h(0));
            const int cls = (l1 & 1) + 2 * (l2 & 1);  // 0, 1, 2, 3 = L(0), L(1), L(2), L(12)
            lattice = lattice && in_span(pt - bases[cls]);

            const bool even_class = cls == 0 || cls == 3;
            const Weight d1 = displacement_vector(r1, pt);
            const Weight want1 = even_class ? weight_of({-1, -1, 1, 0, 0, 1, 0})
                                            : weight_of({0, 0, 1, -1, -1, -1, 0});
            rho1_table = rho1_table && d1 == want1;
            static const std::array<Weight, 4> want2 = {
                weight_of({-1, 0, 0, 0, 1, 1, 1}), weight_of({0, 1, 0, -1, 0, -1, 1}),
                weight_of({0, 1, 0, -1, 0, -1, -1}), weight_of({-1, 0, 0, 0, 1, 1, -1})};
            rho2_table = rho2_table && displacement_vector(r2, pt) == want2[cls];

            rho0_words = rho0_words && act_word_weight(r0 + r0, pt) == act_word_weight(rho0_sq_alt, pt);
            const Word r1_alt = (even_class ? t40i : t13i) + t14;
            const Word r2_alt = even_class ? t40i : t13i;
            piecewise = piecewise && act_word_weight(r1, pt) == act_word_weight(r1_alt, pt) &&
                        act_word_weight(r2, pt) == act_word_weight(r2_alt, pt);

            const TauLabel lab = tau_label(l1, l2);
            labels = labels && tau_label_weight(lab.denominator) == pt &&
                     tau_label_weight(lab.numerator) == act_word_weight(r0 + r0, pt);
        }
    }
    rep.add("rho1^l1 rho2^l2 (h0) lies in its class coset of Z v1 + Z v2", lattice, 0.0, count);
    rep.add("rho1 displacement table", rho1_table, 0.0, count);
    rep.add("rho2 displacement table", rho2_table, 0.0, count);
    rep.add("rho0^2 = T13^-1 T40^-1 T34^-2 on L", rho0_words, 0.0, count);
    rep.add("piecewise translation words for rho1, rho2 on L", piecewise, 0.0, count);
    rep.add("tau labels match rho-generated weights", labels, 0.0, count);
    return rep;
}

}  // namespace dpower
