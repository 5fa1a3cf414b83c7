#pragma once

#include <boost/rational.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "errors.hpp"

namespace treembed {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Accepts "p/q", integers and plain decimals ("0.3" -> 3/10).
inline Rational parse_rational(const std::string& text) {
    auto fail = [&] { throw ParseError("not a rational: '" + text + "'", "value"); };
    if (text.empty()) fail();
    try {
        auto slash = text.find('/');
        if (slash != std::string::npos) {
            std::size_t a = 0, b = 0;
            std::int64_t p = std::stoll(text.substr(0, slash), &a);
            std::int64_t q = std::stoll(text.substr(slash + 1), &b);
            if (a != slash || b != text.size() - slash - 1 || q == 0) fail();
            return Rational(p, q);
        }
        auto dot = text.find('.');
        if (dot == std::string::npos) {
            std::size_t a = 0;
            std::int64_t p = std::stoll(text, &a);
            if (a != text.size()) fail();
            return Rational(p);
        }
        std::string frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 15) fail();
        for (char c : frac)
            if (c < '0' || c > '9') fail();
        std::string head = text.substr(0, dot);
        bool neg = !head.empty() && head[0] == '-';
        std::int64_t whole = 0;
        if (!head.empty() && head != "-" && head != "+") {
            std::size_t a = 0;
            whole = std::stoll(head, &a);
            if (a != head.size()) fail();
        }
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        std::int64_t num = std::stoll(frac);
        Rational r = Rational(std::llabs(whole)) + Rational(num, den);
        return neg ? -r : r;
    } catch (const std::logic_error&) {
        fail();
    }
    return {};
}

inline long double to_real(const Rational& r) {
    return static_cast<long double>(r.numerator()) / static_cast<long double>(r.denominator());
}

inline std::int64_t floor_of(const Rational& r) {
    std::int64_t q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
    return q;
}

inline std::int64_t ceil_of(const Rational& r) { return -floor_of(-r); }

}  // namespace treembed
