#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>
#include <type_traits>

namespace pidsx {

/// Exact probability type used by the discrete path.
using rational = boost::multiprecision::cpp_rational;

template <typename S>
inline constexpr bool is_exact_v = std::is_same_v<S, rational>;

template <typename S>
double to_double(const S& x) {
    if constexpr (is_exact_v<S>)
        return x.template convert_to<double>();
    else
        return static_cast<double>(x);
}

template <typename S>
S from_double(double x) {
    // cpp_rational's double constructor is exact (binary fraction).
    return S(x);
}

inline double log2_ratio(double num, double den) { return std::log2(num) - std::log2(den); }

/// log2 of an exact positive ratio, accurate for numerators/denominators
/// beyond double range.
inline double log2_exact(const rational& x) {
    const auto& n = boost::multiprecision::numerator(x);
    const auto& d = boost::multiprecision::denominator(x);
    auto shift = static_cast<long>(boost::multiprecision::msb(n)) - static_cast<long>(boost::multiprecision::msb(d));
    // Rescale so both sides fit in a double with full precision.
    if (shift > 900 || shift < -900) {
        rational scaled = shift > 0 ? x / rational(boost::multiprecision::cpp_int(1) << shift)
                                    : x * rational(boost::multiprecision::cpp_int(1) << -shift);
        return std::log2(scaled.convert_to<double>()) + static_cast<double>(shift);
    }
    return std::log2(x.convert_to<double>());
}

} // namespace pidsx
