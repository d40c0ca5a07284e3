#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dpower/numerics.hpp"
#include "dpower/rational.hpp"
#include "dpower/report.hpp"
#include "dpower/root_data.hpp"

namespace dpower {

struct ParamState {
    std::array<Rational, 5> a{};

    // a4 is fixed by a0 + a1 + 2 a2 + a3 + a4 = 1.
    static ParamState from_free(Rational a0, Rational a1, Rational a2, Rational a3) {
        ParamState p;
        p.a = {a0, a1, a2, a3, Rational(1) - (a0 + a1 + 2 * a2 + a3)};
        return p;
    }

    Rational weighted_sum() const {
        Rational s = 0;
        for (int i = 0; i < 5; ++i) s += null_coefficients[i] * a[i];
        return s;
    }
    bool normalized() const { return weighted_sum() == Rational(1); }

    friend bool operator==(const ParamState&, const ParamState&) = default;
};

// Generic rationals away from every reflection hyperplane used here.
inline ParamState default_param_state() {
    return ParamState::from_free(Rational(3, 10), Rational(1, 5), Rational(1, 7), Rational(9, 70));
}

inline ParamState random_param_state(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-60, 60);
    static constexpr std::array<int, 4> dens = {97, 89, 83, 79};
    return ParamState::from_free(Rational(num(rng), dens[0]), Rational(num(rng), dens[1]),
                                 Rational(num(rng), dens[2]), Rational(num(rng), dens[3]));
}

// Linear map on (a0..a4) as a 5x5 matrix acting on column vectors.
inline IntMatrix<5> param_matrix(Gen g) {
    IntMatrix<5> m{};
    if (is_reflection(g)) {
        // s_i(a_j) = a_j - A_ij a_i
        const int i = reflection_index(g);
        for (int j = 0; j < 5; ++j) {
            m[j][j] += 1;
            m[j][i] -= cartan[i][j];
        }
        return m;
    }
    if (g == Gen::sigma3) return mat_mul(param_matrix(Gen::sigma2), param_matrix(Gen::sigma1));
    const auto& perm = g == Gen::sigma1 ? sigma1_perm : sigma2_perm;
    for (int j = 0; j < 5; ++j) m[j][perm[j]] = 1;
    return m;
}

// Words act on states left to right: the leftmost generator is applied
// first, so the composite matrix is M_gk ... M_g1.
inline IntMatrix<5> word_param_matrix(const Word& w) {
    IntMatrix<5> m = identity_matrix<5>();
    for (Gen g : w) m = mat_mul(param_matrix(g), m);
    return m;
}

inline ParamState apply_matrix(const IntMatrix<5>& m, const ParamState& p) {
    ParamState out;
    for (int i = 0; i < 5; ++i) {
        Rational s = 0;
        for (int j = 0; j < 5; ++j) s += m[i][j] * p.a[j];
        out.a[i] = s;
    }
    return out;
}

inline ParamState apply_gen_params(Gen g, const ParamState& p) {
    if (g == Gen::sigma3) return apply_gen_params(Gen::sigma2, apply_gen_params(Gen::sigma1, p));
    ParamState out;
    if (is_reflection(g)) {
        const int i = reflection_index(g);
        for (int j = 0; j < 5; ++j) out.a[j] = p.a[j] - cartan[i][j] * p.a[i];
        return out;
    }
    const auto& perm = g == Gen::sigma1 ? sigma1_perm : sigma2_perm;
    for (int j = 0; j < 5; ++j) out.a[j] = p.a[perm[j]];
    return out;
}

inline ParamState apply_word_params(const Word& w, ParamState p) {
    for (Gen g : w) p = apply_gen_params(g, p);
    return p;
}

inline Report verify_relations_params() {
    Report rep{"linear relations on parameters", {}};
    for (const auto& r : fundamental_relations()) {
        rep.add(r.name, word_param_matrix(r.lhs) == word_param_matrix(r.rhs));
    }
    return rep;
}

// Slots of the nine tau-variables: tau_0..tau_4 followed by the four
// companions of tau_2.
enum TauSlot : int {
    t0 = 0,
    t1,
    t2,
    t3,
    t4,
    t2_sigma1,
    t2_sigma2,
    t2_sigma3,
    t2_s2,
};

inline constexpr std::array<const char*, 9> tau_slot_names = {
    "tau0", "tau1", "tau2", "tau3", "tau4", "tau2^sigma1", "tau2^sigma2", "tau2^sigma3", "tau2^s2"};

using TauVector = std::array<cplx, 9>;

struct TauState {
    ParamState params;
    BranchContext ctx;
    TauVector tau{};

    cplx& operator[](TauSlot s) { return tau[s]; }
    const cplx& operator[](TauSlot s) const { return tau[s]; }
};

// Relative residual of
//   x tau2 + x^(1/2)(x-1)^(1/2) tau2^sigma1 = -i x^(1/2) tau2^sigma2
//                                           = tau2 - i (x-1)^(1/2) tau2^sigma3.
inline double constraint_residual(const TauState& s) {
    const cplx I(0.0, 1.0);
    const auto& c = s.ctx;
    const cplx lhs = c.x * s[t2] + c.sqrt_x * c.sqrt_xm1 * s[t2_sigma1];
    const cplx mid = -I * c.sqrt_x * s[t2_sigma2];
    const cplx rhs = s[t2] - I * c.sqrt_xm1 * s[t2_sigma3];
    const double scale = std::abs(c.x * s[t2]) + std::abs(c.sqrt_x * c.sqrt_xm1 * s[t2_sigma1]) +
                         std::abs(mid) + std::abs(s[t2]) + std::abs(c.sqrt_xm1 * s[t2_sigma3]);
    return (std::abs(lhs - mid) + std::abs(mid - rhs)) / std::max(scale, 1e-300);
}

inline constexpr double constraint_tolerance = 1e-9;

namespace detail {

inline void require_nonzero(cplx d, const char* what, Gen g) {
    if (std::abs(d) <= tol::degenerate) {
        throw DegenerateDenominator(std::string(gen_name(g)) + ": " + what + " vanishes");
    }
}

}  // namespace detail

// One generator of the birational representation. Unnamed variables are
// unchanged; x (and hence the branch context) is fixed by every generator.
inline TauState apply_gen_tau(Gen g, const TauState& s) {
    if (g == Gen::sigma3) return apply_gen_tau(Gen::sigma2, apply_gen_tau(Gen::sigma1, s));

    const cplx I(0.0, 1.0);
    const cplx u = s.ctx.u;
    const cplx v = s.ctx.v;
    const cplx u2 = s.ctx.sqrt_x;
    const cplx v2 = s.ctx.sqrt_xm1;
    const auto& T = s.tau;
    const cplx t0134 = T[t0] * T[t1] * T[t3] * T[t4];
    auto a = [&](int i) { return to_double(s.params.a[i]); };

    TauState o = s;
    o.params = apply_gen_params(g, s.params);
    switch (g) {
        case Gen::s0:
            detail::require_nonzero(T[t0], "tau0", g);
            o[t0] = u2 * v2 * T[t2_sigma1] / T[t0];
            o[t2_s2] = (u2 * v2 * T[t2_sigma1] * T[t2_s2] - a(0) / u2 * t0134) / (T[t0] * T[t0]);
            break;
        case Gen::s1:
            detail::require_nonzero(T[t1], "tau1", g);
            o[t1] = T[t2] / T[t1];
            o[t2_s2] = T[t2_s2] * T[t2] / (T[t1] * T[t1]);
            break;
        case Gen::s2: {
            detail::require_nonzero(T[t2], "tau2", g);
            const cplx u4 = u2 * u2;
            o[t2] = T[t2_s2];
            o[t2_s2] = T[t2];
            o[t2_sigma1] = (T[t2_sigma1] * T[t2_s2] + a(2) / (u4 * v2) * t0134) / T[t2];
            o[t2_sigma2] = (T[t2_sigma2] * T[t2_s2] + I * a(2) / u4 * t0134) / T[t2];
            o[t2_sigma3] = (T[t2_sigma3] * T[t2_s2] + I * a(2) / (u2 * v2) * t0134) / T[t2];
            break;
        }
        case Gen::s3:
            detail::require_nonzero(T[t3], "tau3", g);
            o[t3] = -I * v2 * T[t2_sigma3] / T[t3];
            o[t2_s2] = (-I * v2 * T[t2_sigma3] * T[t2_s2] - a(3) / u2 * t0134) / (T[t3] * T[t3]);
            break;
        case Gen::s4:
            detail::require_nonzero(T[t4], "tau4", g);
            o[t4] = -I * u2 * T[t2_sigma2] / T[t4];
            o[t2_s2] = (-I * u2 * T[t2_sigma2] * T[t2_s2] - a(4) / u2 * t0134) / (T[t4] * T[t4]);
            break;
        case Gen::sigma1:
            detail::require_nonzero(T[t2], "tau2", g);
            o[t0] = u * v * T[t1];
            o[t1] = T[t0] / (u * v);
            o[t3] = v / u * T[t4];
            o[t4] = u / v * T[t3];
            o[t2] = T[t2_sigma1];
            o[t2_sigma1] = T[t2];
            o[t2_sigma2] = T[t2_sigma3];
            o[t2_sigma3] = T[t2_sigma2];
            o[t2_s2] = -(T[t2_sigma1] * T[t2_s2] + a(2) / (u2 * u2 * v2) * t0134) / T[t2];
            break;
        case Gen::sigma2: {
            detail::require_nonzero(T[t2], "tau2", g);
            const cplx w = std::polar(1.0, -pi_v<double>() / 4);  // e^{-i pi/4}
            o[t0] = w * u * T[t3];
            o[t1] = T[t4] / (u * w);
            o[t3] = w / u * T[t0];
            o[t4] = u * T[t1] / w;
            o[t2] = T[t2_sigma2];
            o[t2_sigma1] = -T[t2_sigma3];
            o[t2_sigma2] = -T[t2];
            o[t2_sigma3] = T[t2_sigma1];
            o[t2_s2] = (T[t2_sigma2] * T[t2_s2] + I * a(2) / (u2 * u2) * t0134) / T[t2];
            break;
        }
        case Gen::sigma3:
            break;
    }
    const double res = constraint_residual(o);
    if (!(res <= constraint_tolerance)) {
        throw ConstraintViolation(std::string("linear constraint broken by ") +
                                  std::string(gen_name(g)) + " (residual " + std::to_string(res) + ")");
    }
    return o;
}

// Left to right: the state after w = g1 g2 ... gk is obtained by applying
// g1 first. This is the composition order under which the relations and
// phases of the representation come out as stated.
inline TauState apply_word(const Word& w, TauState s) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        try {
            s = apply_gen_tau(w[i], s);
        } catch (const DegenerateDenominator& e) {
            throw DegenerateDenominator("step " + std::to_string(i) + " of [" + format_word(w) +
                                        "]: " + e.what());
        }
    }
    return s;
}

inline TauState random_tau_state(std::uint64_t seed, const ParamState& p, cplx x) {
    const BranchContext ctx = make_branch_context(x);
    std::mt19937_64 rng(seed);
    // Area-uniform on 0.5 <= |tau| <= 2.
    std::uniform_real_distribution<double> rad2(0.25, 4.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi_v<double>());
    auto draw = [&] { return std::polar(std::sqrt(rad2(rng)), phase(rng)); };
    const cplx I(0.0, 1.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        TauState s{p, ctx, {}};
        for (TauSlot k : {t0, t1, t2, t3, t4, t2_sigma2, t2_s2}) s[k] = draw();
        const cplx common = -I * ctx.sqrt_x * s[t2_sigma2];
        s[t2_sigma1] = (common - ctx.x * s[t2]) / (ctx.sqrt_x * ctx.sqrt_xm1);
        s[t2_sigma3] = (s[t2] - common) / (I * ctx.sqrt_xm1);
        if (std::abs(s[t2_sigma1]) >= 1e-3 && std::abs(s[t2_sigma3]) >= 1e-3) return s;
    }
    throw ResampleExhausted("could not draw a non-degenerate tau state");
}

struct TauRelation {
    std::string name;
    Word lhs;
    Word rhs;
    TauVector phase;  // lhs(tau_k) = phase_k * rhs(tau_k)
};

inline TauVector unit_phases() {
    TauVector p;
    p.fill(cplx(1.0, 0.0));
    return p;
}

inline std::vector<TauRelation> tau_relations() {
    const cplx I(0.0, 1.0);
    std::vector<TauRelation> out;
    for (const auto& r : fundamental_relations()) {
        if (r.name == "sigma2^2" || r.name == "sigma1 s2 = s2 sigma1" ||
            r.name == "sigma1 sigma2 = sigma2 sigma1") {
            continue;
        }
        out.push_back({r.name, r.lhs, r.rhs, unit_phases()});
    }
    const TauVector quarter = {-I, I, -1.0, -I, I, -1.0, -1.0, -1.0, -1.0};
    out.push_back({"sigma2^2 (with phases)", {Gen::sigma2, Gen::sigma2}, {}, quarter});
    TauVector flip = unit_phases();
    for (TauSlot k : {t2, t2_sigma1, t2_sigma2, t2_sigma3, t2_s2}) flip[k] = -1.0;
    out.push_back({"sigma1 s2 = s2 sigma1 (tau2 family negated)",
                   {Gen::sigma1, Gen::s2},
                   {Gen::s2, Gen::sigma1},
                   flip});
    out.push_back({"sigma1 sigma2 = sigma2 sigma1 (with phases)",
                   {Gen::sigma1, Gen::sigma2},
                   {Gen::sigma2, Gen::sigma1},
                   quarter});
    return out;
}

inline double tau_relation_gap(const TauRelation& r, const TauState& s) {
    const TauState a = apply_word(r.lhs, s);
    const TauState b = apply_word(r.rhs, s);
    double worst = 0.0;
    for (int k = 0; k < 9; ++k) worst = std::max(worst, relative_gap(a.tau[k], r.phase[k] * b.tau[k]));
    if (!(a.params == b.params)) worst = std::max(worst, 1.0);
    return worst;
}

inline std::vector<cplx> default_x_values() { return {cplx(-1.0, 0.0), cplx(2.0, 1.0), cplx(0.5, 0.0)}; }

// Per-sample seeds are derived from the base seed so that every sample is
// reproducible on its own.
inline std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
    return seed * 0x9E3779B97F4A7C15ULL + index * 0xBF58476D1CE4E5B9ULL + 1;
}

inline Report verify_relations_tau(int samples, std::uint64_t seed, double tolerance,
                                   const std::vector<cplx>& xs = default_x_values()) {
    Report rep{"tau relations", {}};
    const auto rels = tau_relations();
    std::vector<Tally> tallies;
    for (const auto& r : rels) tallies.emplace_back(r.name, tolerance);
    std::uint64_t index = 0;
    for (cplx x : xs) {
        for (int n = 0; n < samples; ++n, ++index) {
            std::mt19937_64 rng(sample_seed(seed, index));
            const ParamState p = random_param_state(rng);
            const TauState s = random_tau_state(rng(), p, x);
            for (std::size_t i = 0; i < rels.size(); ++i) {
                try {
                    tallies[i].observe(tau_relation_gap(rels[i], s));
                } catch (const Error& e) {
                    tallies[i].fail(e.what());
                }
            }
        }
    }
    for (const auto& t : tallies) t.commit(rep);
    return rep;
}

}  // namespace dpower
