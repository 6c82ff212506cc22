#pragma once

// Pointwise shared-exclusion information, in bits.

#include "pidsx/conditioning.hpp"
#include "pidsx/error.hpp"
#include "pidsx/scalar.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace pidsx {

inline constexpr double inf = std::numeric_limits<double>::infinity();

struct pointwise_result {
    double value = 0.0;
    // informative / misinformative parts; NaN when undefined (value infinite)
    double plus = std::numeric_limits<double>::quiet_NaN();
    double minus = std::numeric_limits<double>::quiet_NaN();
    regime kind = regime::positive_mass;
    // plus/minus come from the slice-weight surrogate and are differential
    bool differential = false;

    bool split_defined() const noexcept { return !std::isnan(plus); }
};

namespace detail {

template <typename S>
double log2_of(const S& v) {
    if constexpr (is_exact_v<S>)
        return log2_exact(v);
    else
        return std::log2(v);
}

template <typename S>
S target_marginal(const basic_law<S>& law, const point& x, var_mask targets) {
    S pt = law.marginal_density(targets, x);
    if (!(pt > S(0)))
        throw undefined_point("target realization has zero density");
    return pt;
}

} // namespace detail

/// p(t | s_a) / p(t) for a single collection, in bits.
template <typename S>
double local_mi(const basic_law<S>& law, collection a, const point& x) {
    const auto& vars = law.vars();
    var_mask m = vars.mask_of(a), tm = vars.target_mask();
    S pt = detail::target_marginal(law, x, tm);
    S pa = law.marginal_density(m, x);
    if (!(pa > S(0)))
        throw undefined_point("source realization has zero density");
    S pat = law.marginal_density(m | tm, x);
    if (pat == S(0))
        return -inf;
    if constexpr (is_exact_v<S>)
        return log2_exact(S(pat / (pa * pt)));
    else
        return std::log2(pat) - std::log2(pa) - std::log2(pt);
}

/// Radon-Nikodym ratio p(t | R) / p(t); nullopt when every slice weight
/// vanishes (the measure is +infinity there).
template <typename S>
std::optional<S> i_sx_ratio(const basic_law<S>& law, std::span<const collection> family, const point& x) {
    S pt = detail::target_marginal(law, x, law.vars().target_mask());
    try {
        auto cond = condition(law, family, x);
        return S(cond.numerator(x) / (cond.mass() * pt));
    } catch (const all_slice_weights_zero&) {
        return std::nullopt;
    }
}

template <typename S>
pointwise_result i_sx(const basic_conditional_law<S>& cond, const point& x) {
    const auto& law = cond.law();
    S pt = detail::target_marginal(law, x, law.vars().target_mask());
    S n = cond.numerator(x);
    pointwise_result r;
    r.kind = cond.kind();
    r.differential = cond.kind() == regime::dominated_slice;
    if (!(n > S(0))) {
        r.value = -inf;
        return r;
    }
    if constexpr (is_exact_v<S>) {
        r.value = log2_exact(S(n / (cond.mass() * pt)));
        r.plus = -log2_exact(cond.mass());
        r.minus = log2_exact(S(pt / n));
    } else {
        r.value = std::log2(n) - std::log2(cond.mass()) - std::log2(pt);
        r.plus = -std::log2(cond.kind() == regime::positive_mass ? cond.mass() : cond.raw_mass());
        r.minus = cond.kind() == regime::positive_mass ? std::log2(pt) - std::log2(n) : r.plus - r.value;
    }
    return r;
}

template <typename S>
pointwise_result i_sx(const basic_law<S>& law, std::span<const collection> family, const point& x) {
    detail::target_marginal(law, x, law.vars().target_mask());
    std::optional<basic_conditional_law<S>> cond;
    try {
        cond.emplace(condition(law, family, x));
    } catch (const all_slice_weights_zero&) {
        pointwise_result r;
        r.value = inf;
        return r;
    }
    return i_sx(*cond, x);
}

template <typename S>
pointwise_result i_sx(const basic_law<S>& law, const antichain& alpha, const point& x) {
    return i_sx(law, alpha.collections(), x);
}

inline pointwise_result i_sx(const distribution_spec& spec, const antichain& alpha, const point& x) {
    spec.vars.check_point(x);
    if (alpha.max_index() > spec.vars.source_count())
        throw validation_error(validation_error::kind::schema, "antichain refers to a missing source");
    return i_sx(law::from_spec(spec), alpha, x);
}

/// Conditional measure i(t2 : alpha | t1) where `given` selects the target
/// variables forming t1; the rest of the target is t2.
template <typename S>
double i_sx_conditional(const basic_conditional_law<S>& cond, const point& x, var_mask given) {
    const auto& law = cond.law();
    var_mask tm = law.vars().target_mask();
    if ((given & ~tm) != 0 || given == 0 || given == tm)
        throw validation_error(validation_error::kind::schema, "conditioning set must be a proper non-empty part of the target");
    S pt = detail::target_marginal(law, x, tm);
    S p1 = detail::target_marginal(law, x, given);
    S n1 = cond.numerator(x, given);
    if (!(n1 > S(0)))
        throw undefined_point("conditioning target value has zero probability given the union event");
    S n = cond.numerator(x, tm);
    if (!(n > S(0)))
        return -inf;
    if constexpr (is_exact_v<S>)
        return log2_exact(S((n * p1) / (pt * n1)));
    else
        return (std::log2(n) - std::log2(pt)) - (std::log2(n1) - std::log2(p1));
}

template <typename S>
double i_sx_conditional(const basic_law<S>& law, std::span<const collection> family, const point& x, var_mask given) {
    std::optional<basic_conditional_law<S>> cond;
    try {
        cond.emplace(condition(law, family, x));
    } catch (const all_slice_weights_zero&) {
        throw undefined_point("union event has no slice weight; conditional measure undefined");
    }
    return i_sx_conditional(*cond, x, given);
}

} // namespace pidsx
