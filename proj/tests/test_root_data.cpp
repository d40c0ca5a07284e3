#include <catch_amalgamated.hpp>

#include <random>

#include "dpower/root_data.hpp"

using namespace dpower;

namespace {

Word random_word(std::mt19937_64& rng, int length) {
    std::uniform_int_distribution<int> pick(0, 7);
    Word w;
    for (int i = 0; i < length; ++i) w.push_back(all_gens[pick(rng)]);
    return w;
}

Weight random_weight(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> d(-3, 3);
    Weight w;
    for (int i = 0; i < 7; ++i) w[i] = d(rng);
    return w;
}

constexpr std::array<Translation, 4> translations = {Translation::T13, Translation::T40, Translation::T34,
                                                     Translation::T14};

}  // namespace

TEST_CASE("pairing is dual on fundamental weights", "[root_data]") {
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) CHECK(pairing(coroot(i), h(j)) == (i == j ? 1 : 0));
    CHECK(pairing(delta_check(), h(2)) == 2);
    CHECK(pairing(delta_check(), h(0)) == 1);
    CHECK(pairing(delta_check(), h(5)) == 0);
}

TEST_CASE("simple roots follow the D4 Cartan matrix", "[root_data]") {
    CHECK(simple_root(2) == weight_of({-1, -1, 2, -1, -1, 0, 0}));
    CHECK(simple_root(0) == weight_of({2, 0, -1, 0, 0, 0, 0}));
    for (int i = 0; i < 5; ++i) CHECK(pairing(delta_check(), simple_root(i)) == 0);
}

TEST_CASE("generator action on fundamental weights", "[root_data]") {
    CHECK(act_weight(Gen::s2, h(2)) == weight_of({1, 1, -1, 1, 1, 0, 0}));
    CHECK(act_weight(Gen::s0, h(1)) == h(1));
    CHECK(act_weight(Gen::sigma1, h(0)) == h(1) + h(5));
    CHECK(act_weight(Gen::sigma2, h(2)) == h(2) + 2 * h(6));
    CHECK(act_weight(Gen::sigma1, h(5)) == -h(5));
    for (int i = 0; i < 5; ++i) CHECK(act_weight(reflection(i), h(i)) == h(i) - simple_root(i));
}

TEST_CASE("word parsing and formatting round trip", "[root_data]") {
    const Word w = parse_word("s0 s2 sigma1 sigma3");
    CHECK(w == Word{Gen::s0, Gen::s2, Gen::sigma1, Gen::sigma3});
    CHECK(format_word(w) == "s0 s2 sigma1 sigma3");
    CHECK_THROWS_AS(parse_word("s0 t7"), ConfigError);
    CHECK(expand_sigma3(w) == Word{Gen::s0, Gen::s2, Gen::sigma1, Gen::sigma1, Gen::sigma2});
}

TEST_CASE("all defining relations hold on weights", "[root_data]") {
    const Report r = verify_relations_weights();
    CHECK(r.checks.size() == 28);
    for (const auto& c : r.checks) {
        INFO(c.name);
        CHECK(c.pass);
    }
}

TEST_CASE("pairing is invariant when coroots move by the transposed inverse", "[root_data]") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Word w = random_word(rng, 6);
        const Weight l = random_weight(rng);
        Coroot g;
        for (int i = 0; i < 7; ++i) g[i] = static_cast<std::int64_t>(rng() % 7) - 3;
        CHECK(pairing(act_word_coroot(w, g), act_word_weight(w, l)) == pairing(g, l));
    }
    for (Gen gen : all_gens) CHECK(act_coroot(gen, delta_check()) == delta_check());
}

TEST_CASE("sigma3 matches sigma1 sigma2", "[root_data]") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Weight l = random_weight(rng);
        CHECK(act_weight(Gen::sigma3, l) == act_word_weight({Gen::sigma1, Gen::sigma2}, l));
    }
}

TEST_CASE("translations shift D4 weights by a multiple of the level", "[root_data]") {
    const Weight t13 = displacement_vector(translation_word(Translation::T13), h(0));
    CHECK(t13 == weight_of({0, -1, 0, 1, 0, 1, 1}));
    CHECK(displacement_vector(translation_word(Translation::T34), h(0)) == weight_of({0, 0, 0, -1, 1, 1, 0}));
    for (Translation t : translations) {
        const Word w = translation_word(t);
        const Weight step = displacement_vector(w, h(0));
        for (int b = 0; b < 5; ++b) {
            CHECK(displacement_vector(w, h(b)) == pairing(delta_check(), h(b)) * step);
        }
    }
}

TEST_CASE("translations commute with each other", "[root_data]") {
    for (Translation a : translations)
        for (Translation b : translations)
            CHECK(word_weight_matrix(translation_word(a) + translation_word(b)) ==
                  word_weight_matrix(translation_word(b) + translation_word(a)));
}

TEST_CASE("inverse and power of words", "[root_data]") {
    const Word t = translation_word(Translation::T40);
    CHECK(word_weight_matrix(t + inverse(t)) == identity_matrix<7>());
    CHECK(power(t, 0).empty());
    CHECK(word_weight_matrix(power(t, -2) + power(t, 2)) == identity_matrix<7>());
}

TEST_CASE("orbit classification of base weights", "[root_data][orbit]") {
    for (int k = 0; k < 5; ++k) {
        const auto label = classify_orbit(h(k));
        REQUIRE(label);
        CHECK(*label == OrbitLabel{k, 0, 0});
    }
    // sigma1 h0 = h1 + h5 stays in the orbit of h0 with l = 1.
    const auto moved = classify_orbit(act_weight(Gen::sigma1, h(0)));
    REQUIRE(moved);
    CHECK(*moved == OrbitLabel{0, 1, 0});
    CHECK_FALSE(classify_orbit(h(5)));
    CHECK_FALSE(classify_orbit(2 * h(0)));
}

TEST_CASE("projection p drops the extra coordinates on M0", "[root_data][orbit]") {
    const OrbitIndex index(8);
    const Weight w = act_word_weight(translation_word(Translation::T13), h(0));
    CHECK(project_p(w, index) == weight_of({1, -1, 0, 1, 0, 0, 0}));
    CHECK_THROWS_AS(project_p(h(1), index), NotInOrbit);
}

TEST_CASE("orbit lemma holds at increasing depth", "[root_data][orbit]") {
    for (int depth : {4, 6, 8}) {
        const Report r = verify_orbit_lemma(depth);
        for (const auto& c : r.checks) {
            INFO(r.suite << ": " << c.name);
            CHECK(c.pass);
        }
    }
}

TEST_CASE("tau labels", "[root_data]") {
    const TauLabel even = tau_label(2, 0);
    CHECK(even.numerator == std::array<int, 4>{-2, -2, -2, 2});
    CHECK(even.denominator == std::array<int, 4>{-1, -1, 0, 2});
    CHECK(even.sign == -1);
    const TauLabel odd = tau_label(1, 2);
    CHECK(odd.numerator == std::array<int, 4>{-2, -3, -2, 1});
    CHECK(odd.denominator == std::array<int, 4>{-1, -2, 0, 1});
    CHECK(odd.sign == 1);
    CHECK(tau_label(-1, 0).sign == 1);
    CHECK(tau_label_weight({0, 0, 0, 0}) == h(0));
    // Every labelled weight lies on level one of the M0 orbit.
    for (int l1 = -2; l1 <= 2; ++l1)
        for (int l2 = -2; l2 <= 2; ++l2) {
            const TauLabel t = tau_label(l1, l2);
            CHECK(pairing(delta_check(), tau_label_weight(t.numerator)) == 1);
            CHECK(pairing(delta_check(), tau_label_weight(t.denominator)) == 1);
        }
}
