#include <catch_amalgamated.hpp>

#include <regex>

#include "dpower/io.hpp"

using namespace dpower;

namespace {

HyperParams hyper(Rational r, cplx x) {
    HyperParams hp;
    hp.r = r;
    hp.x = x;
    return hp;
}

int count_of(const std::string& text, const std::string& needle) {
    int n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("lattice JSON has one record per grid point", "[io]") {
    const HyperParams hp = hyper(Rational(2, 3), cplx(-1.0));
    const ojson doc = lattice_json(iterate_special_quadrant(hp, 10, 10), hp);
    CHECK(doc["grid"].size() == 121);
    CHECK(doc["params"]["r"] == "2/3");
    CHECK(doc["params"]["x"] == ojson::array({-1.0, 0.0}));
    CHECK(doc["params"]["C0"] == ojson::array({1.0, 0.0}));

    const ojson& first = doc["grid"][0];
    CHECK(first["n"] == 0);
    CHECK(first["m"] == 0);
    CHECK(first["re"].get<double>() == 0.0);
    CHECK(first["im"].get<double>() == 0.0);
    CHECK_FALSE(std::signbit(first["im"].get<double>()));

    // Field order is fixed.
    auto it = doc.begin();
    CHECK(it.key() == "params");
    CHECK((++it).key() == "grid");
    CHECK(first.begin().key() == "n");
}

TEST_CASE("lattice JSON is deterministic and round-trips doubles", "[io]") {
    const HyperParams hp = hyper(Rational(2, 5), cplx(0.5));
    const std::string a = lattice_json(iterate_special_quadrant(hp, 6, 6), hp).dump(2);
    const std::string b = lattice_json(iterate_special_quadrant(hp, 6, 6), hp).dump(2);
    CHECK(a == b);
    const ojson back = ojson::parse(a);
    const Grid2 g = iterate_special_quadrant(hp, 6, 6);
    for (const auto& cell : back["grid"]) {
        const cplx v = g.at(cell["n"].get<int>(), cell["m"].get<int>());
        CHECK(cell["re"].get<double>() == v.real());
        CHECK(cell["im"].get<double>() == v.imag());
    }
}

TEST_CASE("emitted grids never contain a negative zero", "[io]") {
    const HyperParams hp = hyper(Rational(1, 2), cplx(-1.0));
    const Grid2 g = iterate_special_quadrant(hp, 4, 4);
    REQUIRE(std::signbit(g.at(0, 2).real()));
    const ojson doc = lattice_json(g, hp);
    for (const auto& cell : doc["grid"]) {
        CHECK_FALSE(std::signbit(cell["re"].get<double>()));
        CHECK_FALSE(std::signbit(cell["im"].get<double>()));
    }
    CHECK(lattice_csv(g).find("-0,") == std::string::npos);
    CHECK_FALSE(std::signbit(complex_json(cplx(-0.0, 1.0))[0].get<double>()));
}

TEST_CASE("shortest round-trip formatting", "[io]") {
    CHECK(shortest_double(0.1) == "0.1");
    CHECK(shortest_double(-2.0) == "-2");
    CHECK(shortest_double(1.0 / 3.0) == "0.3333333333333333");
    for (double v : {1e-300, 123456.789, -7.25e17, 2.0 / 3.0}) CHECK(std::strtod(shortest_double(v).c_str(), nullptr) == v);
}

TEST_CASE("lattice CSV", "[io]") {
    const HyperParams hp = hyper(Rational(1, 2), cplx(-1.0));
    const std::string csv = lattice_csv(iterate_special_quadrant(hp, 4, 4));
    CHECK(csv.rfind("n,m,re,im\n", 0) == 0);
    CHECK(count_of(csv, "\n") == 26);
    // The identity map puts z(2,3) at 2 + 3i.
    CHECK(csv.find("\n2,3,2,3\n") != std::string::npos);
}

TEST_CASE("lattice SVG draws every neighbour edge", "[io]") {
    const HyperParams hp = hyper(Rational(2, 3), cplx(-1.0));
    const std::string svg = lattice_svg(iterate_special_quadrant(hp, 10, 10));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("viewBox=\"0 0 800 800\"") != std::string::npos);
    CHECK(count_of(svg, "<line ") == 220);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("r = 1/2 draws a square grid", "[io]") {
    const HyperParams hp = hyper(Rational(1, 2), cplx(-1.0));
    const std::string svg = lattice_svg(iterate_special_quadrant(hp, 8, 8));
    const std::regex line(R"re(x1="([^"]+)" y1="([^"]+)" x2="([^"]+)" y2="([^"]+)")re");
    int lines = 0;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), line); it != std::sregex_iterator(); ++it) {
        const double ax = std::stod((*it)[1].str());
        const double ay = std::stod((*it)[2].str());
        const double bx = std::stod((*it)[3].str());
        const double by = std::stod((*it)[4].str());
        const bool horizontal = std::abs(ay - by) < 1e-6 && std::abs(std::abs(ax - bx) - 90.0) < 1e-6;
        const bool vertical = std::abs(ax - bx) < 1e-6 && std::abs(std::abs(ay - by) - 90.0) < 1e-6;
        CHECK((horizontal || vertical));
        ++lines;
    }
    CHECK(lines == 144);
}

TEST_CASE("report JSON", "[io]") {
    Report r{"demo", {}};
    r.add("first", true, 1e-12, 10);
    r.add("second", false, 0.5, 3, "too large");
    const ojson j = report_json(r);
    CHECK(j["suite"] == "demo");
    CHECK(j["pass"] == false);
    CHECK(j["checks"].size() == 2);
    CHECK(j["checks"][0]["samples"] == 10);
    CHECK_FALSE(j["checks"][0].contains("note"));
    CHECK(j["checks"][1]["note"] == "too large");
    CHECK(complex_json(cplx(1.5, -2.0)) == ojson::array({1.5, -2.0}));
}
