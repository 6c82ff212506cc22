#pragma once

// Law of the target given the union event
//   R = union_k intersect_{j in a_k} {S_j = s_j}.
//
// When R has positive probability this is ordinary conditioning, computed by
// inclusion-exclusion over sub-families (the intersection of collections is
// the collection of their index union). When R is null the law is the limit
// of conditioning on a thickened event in which every continuous source is
// restricted to a small box around s_j whose marginal probability is
// (2 eps)^{d_j}. In that limit only collections of minimal continuous
// codimension survive, and each union U of dominant collections enters with
// weight p_U(s_U) / prod_{continuous j in U} (p_j(s_j) / M), M the total
// mass of the law. Normalizing by the per-variable marginal densities makes
// the limit independent of the coordinates used for each source; dividing
// them by M keeps it invariant under rescaling of unnormalized laws.

#include "pidsx/error.hpp"
#include "pidsx/lattice.hpp"
#include "pidsx/model.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <span>
#include <vector>

namespace pidsx {

enum class regime { positive_mass, dominated_slice };

inline const char* to_string(regime r) { return r == regime::positive_mass ? "positive-mass" : "dominated-slice"; }

/// The antichain plus a realization of the sources (target coordinates of
/// the point are ignored).
struct union_event {
    antichain alpha;
    point realization;
};

template <typename S>
class basic_conditional_law {
public:
    /// One inclusion-exclusion term: the union of a sub-family of dominant
    /// collections, its aggregated signed multiplicity and 1/prod_j (p_j(s_j)/M).
    struct term {
        var_mask vars;
        int coefficient;
        S inv_normalizer;
    };

    regime kind() const noexcept { return kind_; }
    int codimension() const noexcept { return codim_; }
    std::span<const collection> dominant() const noexcept { return dominant_; }
    std::span<const term> terms() const noexcept { return terms_; }

    /// P(R) in the positive-mass regime, the normalized slice weight otherwise.
    const S& mass() const noexcept { return mass_; }

    /// Same sum without the per-variable normalizers: the leading
    /// coefficient of P(R_eps) / (2 eps)^c under plain box thickening.
    const S& raw_mass() const noexcept { return raw_mass_; }

    /// Per-dominant-collection weights w_k (normalized), aligned with dominant().
    std::span<const S> slice_weights() const noexcept { return weights_; }

    const basic_law<S>& law() const noexcept { return law_; }

    /// Density of the target variables `targets` jointly with R, against
    /// their reference measure, before division by mass().
    S numerator(const point& x, var_mask targets) const {
        S acc(0);
        for (const auto& t : terms_) {
            S v = law_.marginal_density(t.vars | targets, x);
            if (v != S(0))
                acc += S(t.coefficient) * v * t.inv_normalizer;
        }
        return acc;
    }

    S numerator(const point& x) const { return numerator(x, law_.vars().target_mask()); }

    /// d nu^T / d lambda_T at the target coordinates of x.
    S target_density(const point& x, var_mask targets) const { return numerator(x, targets) / mass_; }
    S target_density(const point& x) const { return target_density(x, law_.vars().target_mask()); }

    basic_conditional_law(basic_law<S> l) : law_(std::move(l)) {}

    regime kind_ = regime::positive_mass;
    int codim_ = 0;
    std::vector<collection> dominant_;
    std::vector<S> weights_;
    std::vector<term> terms_;
    S mass_{0};
    S raw_mass_{0};

private:
    basic_law<S> law_;
};

using conditional_law = basic_conditional_law<double>;

namespace detail {

/// Aggregated inclusion-exclusion multiplicities over non-empty sub-families
/// of `members` whose union keeps codimension `codim`. Keyed by union mask
/// so the result does not depend on the order of `members`.
inline std::map<var_mask, int> union_terms(const schema& vars, std::span<const var_mask> members, int codim) {
    std::map<var_mask, int> coef;
    const std::size_t k = members.size();
    if (k > 24)
        throw cap_exceeded("too many collections in union event");
    for (std::uint32_t sub = 1; sub < (1u << k); ++sub) {
        var_mask u = 0;
        for (std::uint32_t b = sub; b != 0; b &= b - 1)
            u |= members[static_cast<std::size_t>(std::countr_zero(b))];
        if (vars.codimension(u) != codim)
            continue;
        coef[u] += (std::popcount(sub) % 2 == 1) ? 1 : -1;
    }
    std::erase_if(coef, [](const auto& kv) { return kv.second == 0; });
    return coef;
}

} // namespace detail

/// Conditional law of the target given the union event of an arbitrary
/// family of collections (supersets and duplicates allowed; they cancel).
template <typename S>
basic_conditional_law<S> condition(const basic_law<S>& law, std::span<const collection> family, const point& x) {
    const auto& vars = law.vars();
    if (family.empty())
        throw error("union event needs at least one collection");
    struct cand {
        collection c;
        var_mask m;
        int codim;
        S w;
    };
    std::vector<cand> live;
    for (auto c : family) {
        if (c.empty())
            throw error("collections must be non-empty");
        var_mask m = vars.mask_of(c);
        S w = law.marginal_density(m, x);
        if (w != S(0))
            live.push_back({c, m, vars.codimension(m), w});
    }
    if (live.empty())
        throw all_slice_weights_zero("realization lies outside the support of every collection");

    basic_conditional_law<S> out(law);
    int c = live.front().codim;
    for (const auto& l : live)
        c = std::min(c, l.codim);
    out.codim_ = c;
    out.kind_ = c == 0 ? regime::positive_mass : regime::dominated_slice;

    std::vector<var_mask> members;
    const S total = c == 0 ? S(1) : law.total_mass();
    auto normalizer = [&](var_mask m) {
        S g(1);
        for (var_mask y = m; y != 0; y &= y - 1) {
            int v = std::countr_zero(y);
            if (vars.continuous(v))
                g *= law.marginal_density(var_mask{1} << v, x) / total;
        }
        return g;
    };
    for (const auto& l : live)
        if (l.codim == c) {
            out.dominant_.push_back(l.c);
            out.weights_.push_back(c == 0 ? l.w : l.w / normalizer(l.m));
            members.push_back(l.m);
        }

    for (const auto& [u, k] : detail::union_terms(vars, members, c)) {
        S g = c == 0 ? S(1) : normalizer(u);
        S pu = law.marginal_density(u, x);
        typename basic_conditional_law<S>::term t{u, k, S(1) / g};
        out.mass_ += S(k) * pu * t.inv_normalizer;
        out.raw_mass_ += S(k) * pu;
        out.terms_.push_back(t);
    }
    if (!(out.mass_ > S(0)))
        throw all_slice_weights_zero("union event has no mass at the realization");
    return out;
}

template <typename S>
basic_conditional_law<S> condition(const basic_law<S>& law, const antichain& alpha, const point& x) {
    return condition(law, alpha.collections(), x);
}

/// P(R) by inclusion-exclusion. Collections that pin a continuous coordinate
/// describe null events and contribute nothing.
template <typename S>
S union_probability(const basic_law<S>& law, std::span<const collection> family, const point& x) {
    const auto& vars = law.vars();
    std::vector<var_mask> members;
    for (auto c : family) {
        var_mask m = vars.mask_of(c);
        if (!vars.has_continuous(m))
            members.push_back(m);
    }
    if (members.empty())
        return S(0);
    S p(0);
    for (const auto& [u, k] : detail::union_terms(vars, members, 0))
        p += S(k) * law.marginal_density(u, x);
    return p;
}

inline double union_probability(const distribution_spec& spec, const union_event& ev) {
    spec.vars.check_point(ev.realization);
    return union_probability(law::from_spec(spec), ev.alpha.collections(), ev.realization);
}

inline conditional_law conditional(const distribution_spec& spec, const union_event& ev) {
    spec.vars.check_point(ev.realization);
    return condition(law::from_spec(spec), ev.alpha, ev.realization);
}

/// Push-forward of the indicator of R. In the dominated regime `one` is the
/// slice-weight surrogate (raw leading coefficient) and `surrogate` is set.
template <typename S>
struct classifier_masses {
    S one;
    S zero;
    bool surrogate = false;
};

template <typename S>
classifier_masses<S> classifier_pushforward(const basic_conditional_law<S>& cond) {
    if (cond.kind() == regime::positive_mass)
        return {cond.mass(), cond.law().total_mass() - cond.mass(), false};
    return {cond.raw_mass(), cond.law().total_mass(), true};
}

inline classifier_masses<double> classifier_pushforward(const distribution_spec& spec, const union_event& ev) {
    spec.vars.check_point(ev.realization);
    auto l = law::from_spec(spec);
    try {
        return classifier_pushforward(condition(l, ev.alpha, ev.realization));
    } catch (const all_slice_weights_zero&) {
        return {0.0, l.total_mass(), false};
    }
}

} // namespace pidsx
