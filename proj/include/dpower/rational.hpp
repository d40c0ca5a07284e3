#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

#include "dpower/errors.hpp"

namespace dpower {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& q) {
    return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

template <class Real>
Real to_real(const Rational& q) {
    return Real(q.numerator()) / Real(q.denominator());
}

inline std::string to_string(const Rational& q) {
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

// Accepts "p/q" or a bare integer "p".
inline Rational parse_rational(std::string_view text) {
    auto parse_int = [&](std::string_view s) -> std::int64_t {
        if (s.empty()) throw ConfigError("empty integer in rational '" + std::string(text) + "'");
        std::size_t pos = 0;
        std::int64_t v = 0;
        try {
            v = std::stoll(std::string(s), &pos);
        } catch (const std::exception&) {
            throw ConfigError("malformed rational '" + std::string(text) + "'");
        }
        if (pos != s.size()) throw ConfigError("malformed rational '" + std::string(text) + "'");
        return v;
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    std::int64_t den = parse_int(text.substr(slash + 1));
    if (den == 0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash)), den);
}

}  // namespace dpower
