#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dpower/errors.hpp"
#include "dpower/report.hpp"

namespace dpower {

// Generators of the extended affine Weyl group of type D4^(1).
enum class Gen : std::uint8_t { s0, s1, s2, s3, s4, sigma1, sigma2, sigma3 };

inline constexpr std::array<Gen, 8> all_gens = {Gen::s0,     Gen::s1,     Gen::s2,     Gen::s3,
                                                Gen::s4,     Gen::sigma1, Gen::sigma2, Gen::sigma3};

inline constexpr bool is_reflection(Gen g) { return static_cast<int>(g) <= 4; }
inline constexpr int reflection_index(Gen g) { return static_cast<int>(g); }
inline constexpr Gen reflection(int i) { return static_cast<Gen>(i); }

inline std::string_view gen_name(Gen g) {
    static constexpr std::array<std::string_view, 8> names = {"s0", "s1", "s2", "s3",
                                                              "s4", "sigma1", "sigma2", "sigma3"};
    return names[static_cast<int>(g)];
}

using Word = std::vector<Gen>;

inline Word parse_word(std::string_view text) {
    Word w;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) {
        auto it = std::find_if(all_gens.begin(), all_gens.end(),
                               [&](Gen g) { return gen_name(g) == tok; });
        if (it == all_gens.end()) throw ConfigError("unknown generator '" + tok + "'");
        w.push_back(*it);
    }
    return w;
}

inline std::string format_word(const Word& w) {
    std::string out;
    for (Gen g : w) {
        if (!out.empty()) out += ' ';
        out += gen_name(g);
    }
    return out;
}

inline Word operator+(Word a, const Word& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// Every generator is an involution on the linear level.
inline Word inverse(const Word& w) { return Word(w.rbegin(), w.rend()); }

inline Word power(const Word& w, int k) {
    const Word base = k >= 0 ? w : inverse(w);
    Word out;
    for (int i = 0; i < std::abs(k); ++i) out = out + base;
    return out;
}

// sigma3 written out as sigma1 sigma2.
inline Word expand_sigma3(const Word& w) {
    Word out;
    for (Gen g : w) {
        if (g == Gen::sigma3) {
            out.push_back(Gen::sigma1);
            out.push_back(Gen::sigma2);
        } else {
            out.push_back(g);
        }
    }
    return out;
}

using Vec7 = std::array<std::int64_t, 7>;

template <class Tag>
struct Vector7 {
    Vec7 c{};

    static Vector7 unit(int i) {
        Vector7 v;
        v.c[i] = 1;
        return v;
    }
    std::int64_t operator[](int i) const { return c[i]; }
    std::int64_t& operator[](int i) { return c[i]; }

    friend Vector7 operator+(Vector7 a, const Vector7& b) {
        for (int i = 0; i < 7; ++i) a.c[i] += b.c[i];
        return a;
    }
    friend Vector7 operator-(Vector7 a, const Vector7& b) {
        for (int i = 0; i < 7; ++i) a.c[i] -= b.c[i];
        return a;
    }
    friend Vector7 operator-(Vector7 a) {
        for (auto& x : a.c) x = -x;
        return a;
    }
    friend Vector7 operator*(std::int64_t k, Vector7 a) {
        for (auto& x : a.c) x *= k;
        return a;
    }
    friend auto operator<=>(const Vector7&, const Vector7&) = default;
    friend bool operator==(const Vector7&, const Vector7&) = default;
};

struct WeightTag {};
struct CorootTag {};
using Weight = Vector7<WeightTag>;
using Coroot = Vector7<CorootTag>;

inline Weight h(int i) { return Weight::unit(i); }
inline Coroot coroot(int i) { return Coroot::unit(i); }

inline Weight weight_of(std::initializer_list<std::int64_t> coords) {
    Weight w;
    std::copy(coords.begin(), coords.end(), w.c.begin());
    return w;
}

inline std::string format_weight(const Weight& w) {
    std::string out;
    for (int i = 0; i < 7; ++i) {
        if (w[i] == 0) continue;
        const std::int64_t k = w[i];
        if (!out.empty()) out += k > 0 ? "+" : "-";
        else if (k < 0) out += "-";
        if (std::abs(k) != 1) out += std::to_string(std::abs(k));
        out += "h" + std::to_string(i);
    }
    return out.empty() ? "0" : out;
}

inline constexpr std::array<std::array<int, 5>, 5> cartan = {{
    {2, 0, -1, 0, 0},
    {0, 2, -1, 0, 0},
    {-1, -1, 2, -1, -1},
    {0, 0, -1, 2, 0},
    {0, 0, -1, 0, 2},
}};

// Diagram automorphisms as index permutations of the nodes 0..4.
inline constexpr std::array<int, 5> sigma1_perm = {1, 0, 2, 4, 3};
inline constexpr std::array<int, 5> sigma2_perm = {3, 4, 2, 0, 1};

// Null root coefficients: delta = a0 + a1 + 2 a2 + a3 + a4.
inline constexpr std::array<int, 5> null_coefficients = {1, 1, 2, 1, 1};

inline Coroot delta_check() {
    Coroot d;
    for (int i = 0; i < 5; ++i) d[i] = null_coefficients[i];
    return d;
}

inline std::int64_t pairing(const Coroot& g, const Weight& w) {
    std::int64_t s = 0;
    for (int i = 0; i < 7; ++i) s += g[i] * w[i];
    return s;
}

inline Weight simple_root(int i) {
    Weight a;
    if (i < 5) {
        for (int j = 0; j < 5; ++j) a[j] = cartan[i][j];
    } else {
        a[i] = 2;
    }
    return a;
}

template <std::size_t N>
using IntMatrix = std::array<std::array<std::int64_t, N>, N>;

template <std::size_t N>
IntMatrix<N> identity_matrix() {
    IntMatrix<N> m{};
    for (std::size_t i = 0; i < N; ++i) m[i][i] = 1;
    return m;
}

template <std::size_t N>
IntMatrix<N> mat_mul(const IntMatrix<N>& a, const IntMatrix<N>& b) {
    IntMatrix<N> out{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < N; ++k)
            if (a[i][k] != 0)
                for (std::size_t j = 0; j < N; ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

template <std::size_t N>
IntMatrix<N> transpose(const IntMatrix<N>& a) {
    IntMatrix<N> t{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) t[i][j] = a[j][i];
    return t;
}

// Column j holds the coordinates of g(h_j).
inline IntMatrix<7> weight_matrix(Gen g) {
    IntMatrix<7> m = identity_matrix<7>();
    if (is_reflection(g)) {
        // s_i(l) = l - <a_i^, l> a_i: only the h_i column changes.
        const int i = reflection_index(g);
        const Weight a = simple_root(i);
        for (int r = 0; r < 7; ++r) m[r][i] -= a[r];
        return m;
    }
    if (g == Gen::sigma3) return mat_mul(weight_matrix(Gen::sigma1), weight_matrix(Gen::sigma2));
    const bool first = g == Gen::sigma1;
    const auto& perm = first ? sigma1_perm : sigma2_perm;
    const int extra = first ? 5 : 6;   // h5 for sigma1, h6 for sigma2
    const int other = first ? 6 : 5;
    m = IntMatrix<7>{};
    for (int j = 0; j < 5; ++j) {
        m[perm[j]][j] = 1;
        m[extra][j] = null_coefficients[j];
    }
    m[extra][extra] = -1;
    m[other][other] = 1;
    return m;
}

// Action on the coroot lattice: the same table with a -> a^ for the D4
// nodes; the images of a5^, a6^ are the ones forced by the invariance of
// the pairing (sigma1 sends a5^ to delta^ - a5^).
inline IntMatrix<7> coroot_matrix(Gen g) {
    IntMatrix<7> m = identity_matrix<7>();
    if (is_reflection(g)) {
        const int i = reflection_index(g);
        for (int j = 0; j < 5; ++j) m[i][j] -= cartan[i][j];
        return m;
    }
    if (g == Gen::sigma3) return mat_mul(coroot_matrix(Gen::sigma1), coroot_matrix(Gen::sigma2));
    const bool first = g == Gen::sigma1;
    const auto& perm = first ? sigma1_perm : sigma2_perm;
    const int extra = first ? 5 : 6;
    m = identity_matrix<7>();
    for (int j = 0; j < 5; ++j) {
        m[j][j] = 0;
        m[perm[j]][j] = 1;
    }
    for (int r = 0; r < 5; ++r) m[r][extra] = null_coefficients[r];
    m[extra][extra] = -1;
    return m;
}

template <class Tag>
Vector7<Tag> apply_matrix(const IntMatrix<7>& m, const Vector7<Tag>& v) {
    Vector7<Tag> out;
    for (int i = 0; i < 7; ++i) {
        std::int64_t s = 0;
        for (int j = 0; j < 7; ++j) s += m[i][j] * v[j];
        out[i] = s;
    }
    return out;
}

inline Weight act_weight(Gen g, const Weight& w) { return apply_matrix(weight_matrix(g), w); }
inline Coroot act_coroot(Gen g, const Coroot& c) { return apply_matrix(coroot_matrix(g), c); }

// Rightmost generator acts first, as for composed linear maps.
inline Weight act_word_weight(const Word& w, Weight l) {
    for (auto it = w.rbegin(); it != w.rend(); ++it) l = act_weight(*it, l);
    return l;
}

inline Coroot act_word_coroot(const Word& w, Coroot c) {
    for (auto it = w.rbegin(); it != w.rend(); ++it) c = act_coroot(*it, c);
    return c;
}

inline IntMatrix<7> word_weight_matrix(const Word& w) {
    IntMatrix<7> m = identity_matrix<7>();
    for (Gen g : w) m = mat_mul(m, weight_matrix(g));
    return m;
}

struct Relation {
    std::string name;
    Word lhs;
    Word rhs;
};

inline int coxeter_exponent(int i, int j) {
    if (i == j) return 1;
    return (i == 2) != (j == 2) ? 3 : 2;
}

// The defining relations: (s_i s_j)^m = 1, sigma_k^2 = 1, the
// sigma-conjugation rules and sigma1 sigma2 = sigma2 sigma1.
inline std::vector<Relation> fundamental_relations() {
    std::vector<Relation> rel;
    for (int i = 0; i < 5; ++i) {
        for (int j = i; j < 5; ++j) {
            const Word pair{reflection(i), reflection(j)};
            const int m = coxeter_exponent(i, j);
            std::string name = i == j ? "s" + std::to_string(i) + "^2"
                                      : "(s" + std::to_string(i) + " s" + std::to_string(j) + ")^" +
                                            std::to_string(m);
            rel.push_back({name, power(pair, m), {}});
        }
    }
    rel.push_back({"sigma1^2", {Gen::sigma1, Gen::sigma1}, {}});
    rel.push_back({"sigma2^2", {Gen::sigma2, Gen::sigma2}, {}});
    for (int j = 0; j < 5; ++j) {
        rel.push_back({"sigma1 s" + std::to_string(j) + " = s" + std::to_string(sigma1_perm[j]) +
                           " sigma1",
                       {Gen::sigma1, reflection(j)},
                       {reflection(sigma1_perm[j]), Gen::sigma1}});
    }
    for (int j = 0; j < 5; ++j) {
        rel.push_back({"sigma2 s" + std::to_string(j) + " = s" + std::to_string(sigma2_perm[j]) +
                           " sigma2",
                       {Gen::sigma2, reflection(j)},
                       {reflection(sigma2_perm[j]), Gen::sigma2}});
    }
    rel.push_back({"sigma1 sigma2 = sigma2 sigma1", {Gen::sigma1, Gen::sigma2}, {Gen::sigma2, Gen::sigma1}});
    return rel;
}

inline Report verify_relations_weights() {
    Report rep{"linear relations on P", {}};
    for (const auto& r : fundamental_relations()) {
        const bool ok = word_weight_matrix(r.lhs) == word_weight_matrix(r.rhs);
        rep.add(r.name, ok);
    }
    return rep;
}

struct OrbitLabel {
    int k = 0;
    int l = 0;
    int m = 0;
    friend bool operator==(const OrbitLabel&, const OrbitLabel&) = default;
};

// Breadth-first samples of the orbits M_0..M_4 up to a word length.
// Each weight remembers the first word that reached it.
class OrbitIndex {
public:
    explicit OrbitIndex(int depth) : depth_(depth) {
        for (int k = 0; k < 5; ++k) orbits_[k] = explore(h(k), depth);
    }

    int depth() const { return depth_; }
    const std::map<Weight, Word>& orbit(int k) const { return orbits_[k]; }

    std::optional<OrbitLabel> classify(const Weight& w) const {
        const std::int64_t d = pairing(delta_check(), w);
        const std::int64_t p5 = pairing(coroot(5), w);
        const std::int64_t p6 = pairing(coroot(6), w);
        if (d == 2) {
            if (!orbits_[2].count(w)) return std::nullopt;
            return OrbitLabel{2, static_cast<int>(p5 / 2), static_cast<int>(p6 / 2)};
        }
        if (d != 1) return std::nullopt;
        for (int k : {0, 1, 3, 4}) {
            if (orbits_[k].count(w)) return OrbitLabel{k, static_cast<int>(p5), static_cast<int>(p6)};
        }
        return std::nullopt;
    }

private:
    static std::map<Weight, Word> explore(const Weight& base, int depth) {
        // sigma3 adds nothing new to the reachable set.
        static constexpr std::array<Gen, 7> moves = {Gen::s0, Gen::s1, Gen::s2, Gen::s3,
                                                     Gen::s4, Gen::sigma1, Gen::sigma2};
        std::map<Weight, Word> seen{{base, {}}};
        std::vector<Weight> frontier{base};
        for (int level = 0; level < depth && !frontier.empty(); ++level) {
            std::vector<Weight> next;
            for (const Weight& w : frontier) {
                const Word& word = seen.at(w);
                for (Gen g : moves) {
                    Weight img = act_weight(g, w);
                    if (seen.count(img)) continue;
                    Word extended{g};
                    extended.insert(extended.end(), word.begin(), word.end());
                    seen.emplace(img, std::move(extended));
                    next.push_back(img);
                }
            }
            frontier = std::move(next);
        }
        return seen;
    }

    int depth_;
    std::array<std::map<Weight, Word>, 5> orbits_;
};

inline std::optional<OrbitLabel> classify_orbit(const Weight& w, int depth = 8) {
    return OrbitIndex(depth).classify(w);
}

// Drops the h5, h6 coordinates of an element of M_0.
inline Weight project_p(const Weight& w, const OrbitIndex& index) {
    auto label = index.classify(w);
    if (!label || label->k != 0) throw NotInOrbit(format_weight(w) + " is not in the M0 sample");
    Weight out = w;
    out[5] = 0;
    out[6] = 0;
    return out;
}

inline Weight project_p(const Weight& w, int depth = 8) { return project_p(w, OrbitIndex(depth)); }

inline Report verify_orbit_lemma(int depth) {
    Report rep{"orbit lemma (depth " + std::to_string(depth) + ")", {}};
    const OrbitIndex index(depth);

    bool sizes = true;
    std::size_t total = 0;
    for (int k = 0; k < 5; ++k) {
        sizes = sizes && index.orbit(k).size() > 1;
        total += index.orbit(k).size();
    }
    rep.add("orbit samples are nontrivial", sizes, 0.0, total);

    bool disjoint = true;
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b)
            for (const auto& [w, word] : index.orbit(a))
                if (index.orbit(b).count(w)) disjoint = false;
    rep.add("M_k samples pairwise disjoint", disjoint, 0.0, total);

    bool delta_ok = true;
    for (int k = 0; k < 5; ++k)
        for (const auto& [w, word] : index.orbit(k))
            if (pairing(delta_check(), w) != (k == 2 ? 2 : 1)) delta_ok = false;
    rep.add("<delta^, l> = 1 on M0,M1,M3,M4 and 2 on M2", delta_ok, 0.0, total);

    bool range_ok = true;
    bool parity_ok = true;
    for (int k = 0; k < 5; ++k) {
        const std::int64_t scale = k == 2 ? 2 : 1;
        for (const auto& [w, word] : index.orbit(k)) {
            const std::int64_t p5 = pairing(coroot(5), w);
            const std::int64_t p6 = pairing(coroot(6), w);
            if ((p5 != 0 && p5 != scale) || (p6 != 0 && p6 != scale)) range_ok = false;
            const auto n1 = std::count(word.begin(), word.end(), Gen::sigma1);
            const auto n2 = std::count(word.begin(), word.end(), Gen::sigma2);
            if (p5 != scale * (n1 % 2) || p6 != scale * (n2 % 2)) parity_ok = false;
        }
    }
    rep.add("(l,m) in {0,1}", range_ok, 0.0, total);
    rep.add("(l,m) equals the sigma1/sigma2 parity of the word", parity_ok, 0.0, total);

    std::set<Weight> images;
    for (const auto& [w, word] : index.orbit(0)) images.insert(project_p(w, index));
    rep.add("p injective on M0", images.size() == index.orbit(0).size(), 0.0, index.orbit(0).size());

    bool functional = true;
    for (int k : {0, 1, 3, 4}) {
        std::map<std::array<std::int64_t, 5>, std::pair<std::int64_t, std::int64_t>> seen;
        for (const auto& [w, word] : index.orbit(k)) {
            std::array<std::int64_t, 5> n{w[0], w[1], w[2], w[3], w[4]};
            auto lm = std::make_pair(w[5], w[6]);
            auto [it, fresh] = seen.emplace(n, lm);
            if (!fresh && it->second != lm) functional = false;
        }
    }
    rep.add("(l,m) determined by (n0..n4)", functional, 0.0, total);
    return rep;
}

inline Weight displacement_vector(const Word& w, const Weight& base) {
    return act_word_weight(w, base) - base;
}

enum class Translation { T13, T40, T34, T14 };

inline Word translation_word(Translation t) {
    switch (t) {
        case Translation::T13: return parse_word("s1 s2 s0 s4 s2 s1 sigma3");
        case Translation::T40: return parse_word("s4 s2 s1 s3 s2 s4 sigma3");
        case Translation::T34: return parse_word("s3 s2 s0 s1 s2 s3 sigma1");
        case Translation::T14: return parse_word("s1 s4 s2 s0 s3 s2 sigma2");
    }
    return {};
}

struct TauLabel {
    std::array<int, 4> numerator{};
    std::array<int, 4> denominator{};
    int sign = 1;
};

// Exponents (k,l,m,n) of the translation monomials whose tau-values give
// the lattice point (l1,l2) as a ratio; the sign is (-1)^(l1-1).
inline TauLabel tau_label(int l1, int l2) {
    TauLabel t;
    const int s = l1 + l2;
    if (s % 2 == 0) {
        const int half = s / 2;
        t.numerator = {-half - 1, -half - 1, -2, l1};
        t.denominator = {-half, -half, 0, l1};
    } else {
        const int up = (s + 1) / 2;
        const int down = (s - 1) / 2;
        t.numerator = {-up, -up - 1, -2, l1};
        t.denominator = {-down, -up, 0, l1};
    }
    t.sign = ((l1 - 1) % 2 == 0) ? 1 : -1;
    return t;
}

inline Word translation_monomial(const std::array<int, 4>& e) {
    return power(translation_word(Translation::T13), e[0]) +
           power(translation_word(Translation::T40), e[1]) +
           power(translation_word(Translation::T34), e[2]) +
           power(translation_word(Translation::T14), e[3]);
}

inline Weight tau_label_weight(const std::array<int, 4>& e) {
    return act_word_weight(translation_monomial(e), h(0));
}

}  // namespace dpower
