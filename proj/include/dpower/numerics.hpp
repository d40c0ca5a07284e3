#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "dpower/errors.hpp"

namespace dpower {

using cplx = std::complex<double>;

// Quad-precision complex used where long recurrences or determinant ratios
// would otherwise lose too many digits.
using qcplx = boost::multiprecision::cpp_complex_quad;

namespace tol {
inline constexpr double pole = 1e-10;
inline constexpr double degenerate = 1e-13;
inline constexpr double branch_point = 1e-14;
inline constexpr double series_radius = 0.75;
inline constexpr double slow_series_radius = 0.95;
}  // namespace tol

template <class C>
struct scalar_traits {
    using real = typename C::value_type;
};

template <class Backend, boost::multiprecision::expression_template_option ET>
struct scalar_traits<boost::multiprecision::number<Backend, ET>> {
    using real = typename boost::multiprecision::component_type<
        boost::multiprecision::number<Backend, ET>>::type;
};

template <class C>
using real_of = typename scalar_traits<C>::real;

template <class C>
C from_cplx(const cplx& z) {
    using R = real_of<C>;
    return C(R(z.real()), R(z.imag()));
}

template <class C>
cplx to_cplx(const C& z) {
    using std::imag;
    using std::real;
    return {static_cast<double>(real(z)), static_cast<double>(imag(z))};
}

template <class R>
R pi_v() {
    return boost::math::constants::pi<R>();
}

// Principal power exp(e * log(b)).
template <class C>
C principal_pow(const C& base, const C& expo) {
    using std::exp;
    using std::log;
    return exp(expo * log(base));
}

// k >= 0 when z lies within `tolerance` of -k.
template <class C>
std::optional<int> nonpositive_integer(const C& z, double tolerance = tol::pole) {
    using std::imag;
    using std::real;
    const double re = static_cast<double>(real(z));
    const double im = static_cast<double>(imag(z));
    if (std::abs(im) > tolerance) return std::nullopt;
    const double k = std::round(re);
    if (k > 0.0 || std::abs(re - k) > tolerance) return std::nullopt;
    return static_cast<int>(-k);
}

namespace detail {

inline cplx gamma_lanczos(cplx z) {
    // g = 7, n = 9 coefficients; about 15 significant digits for Re z >= 1/2.
    static constexpr std::array<double, 9> coef = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    z -= 1.0;
    cplx acc = coef[0];
    for (int i = 1; i < 9; ++i) acc += coef[i] / (z + static_cast<double>(i));
    const cplx t = z + 7.5;
    return std::sqrt(2.0 * pi_v<double>()) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

// Stirling series after an upward shift; enough terms for 34 digits.
template <class C>
C gamma_stirling(C z) {
    using R = real_of<C>;
    using std::exp;
    using std::log;
    using std::real;
    static_assert(std::numeric_limits<R>::digits10 <= 36, "Stirling table sized for quad precision");
    static constexpr std::array<std::pair<std::int64_t, std::int64_t>, 15> bernoulli = {{
        {1, 6},
        {-1, 30},
        {1, 42},
        {-1, 30},
        {5, 66},
        {-691, 2730},
        {7, 6},
        {-3617, 510},
        {43867, 798},
        {-174611, 330},
        {854513, 138},
        {-236364091, 2730},
        {8553103, 6},
        {-23749461029, 870},
        {8615841276005, 14322},
    }};
    C shift(1);
    while (real(z) < R(25)) {
        shift *= z;
        z += C(1);
    }
    const C inv = C(1) / z;
    const C inv2 = inv * inv;
    C power = inv;
    C series(0);
    for (std::size_t k = 1; k <= bernoulli.size(); ++k) {
        const auto [num, den] = bernoulli[k - 1];
        const std::int64_t twok = static_cast<std::int64_t>(2 * k);
        series += C(R(num) / (R(den) * R(twok * (twok - 1)))) * power;
        power *= inv2;
    }
    const R half = R(1) / 2;
    const C lg = (z - C(half)) * log(z) - z + C(half * log(2 * pi_v<R>())) + series;
    return exp(lg) / shift;
}

}  // namespace detail

template <class C>
C complex_gamma(const C& z) {
    using R = real_of<C>;
    using std::real;
    using std::sin;
    if (auto k = nonpositive_integer(z)) {
        throw PoleError("Gamma pole at z = " + std::to_string(-*k));
    }
    if (real(z) < R(1) / 2) {
        const C p(pi_v<R>());
        return p / (sin(p * z) * complex_gamma(C(1) - z));
    }
    if constexpr (std::is_same_v<R, double>) {
        return detail::gamma_lanczos(z);
    } else {
        return detail::gamma_stirling(z);
    }
}

// 1/Gamma, which is entire: zero at the poles of Gamma.
template <class C>
C reciprocal_gamma(const C& z) {
    if (nonpositive_integer(z)) return C(0);
    return C(1) / complex_gamma(z);
}

// Residue of Gamma at -k.
template <class C>
C gamma_residue(int k) {
    using R = real_of<C>;
    R v(1);
    for (int j = 2; j <= k; ++j) v /= R(j);
    return C(k % 2 == 0 ? v : R(-v));
}

template <class C>
C pochhammer(const C& u, int j) {
    using R = real_of<C>;
    C p(1);
    for (int i = 0; i < j; ++i) p *= u + C(R(i));
    return p;
}

namespace detail {

template <class C>
C hyp_series(const C& a, const C& b, const C& c, const C& x, int max_terms) {
    using R = real_of<C>;
    using std::abs;
    const R eps = std::numeric_limits<R>::epsilon();
    C sum(1);
    C term(1);
    int quiet = 0;
    for (int j = 0; j < max_terms; ++j) {
        const C jj{R(j)};
        term *= (a + jj) * (b + jj) / ((c + jj) * C(R(j + 1))) * x;
        sum += term;
        if (abs(term) <= eps * abs(sum)) {
            if (++quiet >= 2) return sum;
        } else {
            quiet = 0;
        }
    }
    throw NonConvergence("2F1 power series did not converge");
}

template <class C>
C hyp_finite(const C& a, const C& b, const C& c, const C& x, int last) {
    using R = real_of<C>;
    C sum(1);
    C term(1);
    for (int j = 0; j < last; ++j) {
        const C jj{R(j)};
        term *= (a + jj) * (b + jj) / ((c + jj) * C(R(j + 1))) * x;
        sum += term;
    }
    return sum;
}

}  // namespace detail

template <class C>
C gauss_2f1(const C& a, const C& b, const C& c, const C& x) {
    using R = real_of<C>;
    using std::abs;

    std::optional<int> stop;
    if (auto ka = nonpositive_integer(a)) stop = *ka;
    if (auto kb = nonpositive_integer(b)) stop = stop ? std::min(*stop, *kb) : *kb;
    const auto kc = nonpositive_integer(c);
    if (stop) {
        if (kc && *kc < *stop) {
            throw ParameterPole("2F1: c = " + std::to_string(-*kc) +
                                " is reached before the series terminates");
        }
        return detail::hyp_finite(a, b, c, x, *stop);
    }
    if (kc) throw ParameterPole("2F1: c = " + std::to_string(-*kc) + " is a pole");

    const R ax = abs(x);
    if (ax == R(0)) return C(1);
    if (ax <= R(tol::series_radius)) return detail::hyp_series(a, b, c, x, 20000);

    const C one(1);
    const C t = x / (x - one);
    const R at = abs(t);
    if (at <= R(tol::series_radius)) {
        return principal_pow(one - x, C(-a)) * gauss_2f1(a, c - b, c, t);
    }

    const C w = one - x;
    if (abs(w) <= R(tol::series_radius)) {
        const C s = c - a - b;
        using std::imag;
        using std::real;
        const double sr = static_cast<double>(real(s));
        if (std::abs(static_cast<double>(imag(s))) < tol::pole &&
            std::abs(sr - std::round(sr)) < tol::pole) {
            throw NonConvergence("2F1: c-a-b is an integer; the 1-x connection formula degenerates");
        }
        const C g = complex_gamma(c);
        const C first = g * complex_gamma(s) * reciprocal_gamma(c - a) * reciprocal_gamma(c - b);
        const C second = g * complex_gamma(C(-s)) * reciprocal_gamma(a) * reciprocal_gamma(b);
        C out(0);
        if (first != C(0)) out += first * gauss_2f1(a, b, a + b - c + one, w);
        if (second != C(0)) {
            out += second * principal_pow(w, s) * gauss_2f1(c - a, c - b, s + one, w);
        }
        return out;
    }

    // Neither transform lands inside the fast disc; fall back to the
    // slower of the two convergent series.
    if (std::min(ax, at) < R(tol::slow_series_radius)) {
        if (ax <= at) return detail::hyp_series(a, b, c, x, 200000);
        return principal_pow(one - x, C(-a)) * detail::hyp_series(a, c - b, c, t, 200000);
    }
    throw NonConvergence("2F1: no linear transformation brings x into the convergence disc");
}

template <class C>
class Matrix {
public:
    explicit Matrix(std::size_t n = 0) : n_(n), data_(n * n, C(0)) {}

    std::size_t size() const { return n_; }
    C& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const C& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        Matrix out(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i)
            for (std::size_t k = 0; k < a.n_; ++k)
                for (std::size_t j = 0; j < a.n_; ++j) out(i, j) += a(i, k) * b(k, j);
        return out;
    }

private:
    std::size_t n_;
    std::vector<C> data_;
};

// Gaussian elimination with partial pivoting by magnitude.
template <class C>
C det_complex(Matrix<C> m) {
    using R = real_of<C>;
    using std::abs;
    const std::size_t n = m.size();
    if (n == 0) return C(1);
    R scale(0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max<R>(scale, abs(m(i, j)));
    if (scale == R(0)) return C(0);
    const R floor = std::numeric_limits<R>::epsilon() * scale;

    C det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        R best = abs(m(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const R v = abs(m(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best <= floor) return C(0);
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
            det = -det;
        }
        const C p = m(col, col);
        det *= p;
        for (std::size_t r = col + 1; r < n; ++r) {
            const C f = m(r, col) / p;
            if (f == C(0)) continue;
            for (std::size_t j = col; j < n; ++j) m(r, j) -= f * m(col, j);
        }
    }
    return det;
}

struct BranchContext {
    cplx x;
    cplx u;         // principal x^(1/4)
    cplx v;         // principal (x-1)^(1/4)
    cplx sqrt_x;    // u*u
    cplx sqrt_xm1;  // v*v
};

inline BranchContext make_branch_context(cplx x) {
    if (std::abs(x) < tol::branch_point || std::abs(x - 1.0) < tol::branch_point) {
        throw DegenerateX("x must avoid 0 and 1");
    }
    // A signed zero in the imaginary part would flip the branch of negative x.
    if (x.imag() == 0.0) x = cplx(x.real(), 0.0);
    const cplx xm1(x.real() - 1.0, x.imag());
    BranchContext ctx;
    ctx.x = x;
    ctx.u = std::pow(x, 0.25);
    ctx.v = std::pow(xm1, 0.25);
    ctx.sqrt_x = ctx.u * ctx.u;
    ctx.sqrt_xm1 = ctx.v * ctx.v;
    return ctx;
}

// |a-b| scaled by the larger magnitude (absolute when both are tiny).
inline double relative_gap(cplx a, cplx b) {
    const double s = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / s;
}

}  // namespace dpower
