#pragma once

// Directional derivatives of i_sx with respect to the law along p + eps q
// (no renormalization). Everything here is in nats.
//
// With N = density of (t, R), D = mass of R (both as weighted sums over the
// inclusion-exclusion terms of the conditional law) and p_T the target
// marginal, i = log N - log D - log p_T, so
//   d_q i = d_q N / N - d_q D / D - q_T / p_T.
// For positive-mass events d_q N / N = q(t, R)/p(t, R) and d_q D / D =
// Q(R)/P(R). For dominated slices each term A / prod_v m_v also moves through
// its normalizers m_v = p_v(s_v) / M.

#include "pidsx/conditioning.hpp"
#include "pidsx/global.hpp"
#include "pidsx/pointwise.hpp"

#include <bit>
#include <numbers>

namespace pidsx {

/// i_sx in nats.
template <typename S>
double i_sx_nats(const basic_law<S>& law, std::span<const collection> family, const point& x) {
    return i_sx(law, family, x).value * std::numbers::ln2;
}

namespace detail {

template <typename S>
struct term_derivs {
    S n_q{0}, d_q{0};
    S n_qr{0}, d_qr{0};
    S n_r{0}, d_r{0};
    S n{0}, d{0};
};

/// First and (optionally) mixed second derivatives of N and D along q and r.
template <typename S>
term_derivs<S> slice_derivatives(const basic_conditional_law<S>& cond, const basic_law<S>& q, const basic_law<S>* r,
                                 const point& x) {
    const auto& p = cond.law();
    const auto& vars = p.vars();
    const var_mask tm = vars.target_mask();
    term_derivs<S> out;
    const bool dominated = cond.kind() == regime::dominated_slice;
    S mass_p(1), mass_q(0), mass_r(0);
    if (dominated) {
        mass_p = p.total_mass();
        mass_q = q.total_mass();
        if (r)
            mass_r = r->total_mass();
    }
    for (const auto& t : cond.terms()) {
        const S k(t.coefficient);
        // G_q = sum_v d_q log m_v ; H = sum_v d_r d_q log m_v
        S gq(0), gr(0), h(0);
        if (dominated)
            for (var_mask y = t.vars; y != 0; y &= y - 1) {
                int v = std::countr_zero(y);
                if (!vars.continuous(v))
                    continue;
                var_mask b = var_mask{1} << v;
                S pv = p.marginal_density(b, x);
                S qv = q.marginal_density(b, x) / pv;
                gq += qv - mass_q / mass_p;
                if (r) {
                    S rv = r->marginal_density(b, x) / pv;
                    gr += rv - mass_r / mass_p;
                    h += -qv * rv + (mass_q * mass_r) / (mass_p * mass_p);
                }
            }
        auto accumulate = [&](var_mask m, S& val, S& dq, S& dr, S& dqr) {
            S a = p.marginal_density(m, x);
            S aq = q.marginal_density(m, x);
            val += k * a * t.inv_normalizer;
            dq += k * (aq - a * gq) * t.inv_normalizer;
            if (r) {
                S ar = r->marginal_density(m, x);
                dr += k * (ar - a * gr) * t.inv_normalizer;
                dqr += k * (-aq * gr - ar * gq + a * (gq * gr - h)) * t.inv_normalizer;
            }
        };
        accumulate(t.vars | tm, out.n, out.n_q, out.n_r, out.n_qr);
        accumulate(t.vars, out.d, out.d_q, out.d_r, out.d_qr);
    }
    return out;
}

template <typename S>
basic_conditional_law<S> condition_for_derivative(const basic_law<S>& p, std::span<const collection> family,
                                                  const point& x) {
    try {
        return condition(p, family, x);
    } catch (const all_slice_weights_zero&) {
        throw undefined_point("realization outside the support of the union event");
    }
}

template <typename S>
S positive_target(const basic_law<S>& p, const point& x) {
    S pt = p.marginal_density(p.vars().target_mask(), x);
    if (!(pt > S(0)))
        throw undefined_point("target realization has zero density");
    return pt;
}

} // namespace detail

/// d/d eps of i_sx[p + eps q] at eps = 0, in nats.
template <typename S>
S directional_derivative_local(const basic_law<S>& p, const basic_law<S>& q, std::span<const collection> family,
                               const point& x) {
    auto cond = detail::condition_for_derivative(p, family, x);
    S pt = detail::positive_target(p, x);
    auto d = detail::slice_derivatives<S>(cond, q, nullptr, x);
    if (!(d.n > S(0)))
        throw undefined_point("i_sx is -infinity at this realization");
    S qt = q.marginal_density(p.vars().target_mask(), x);
    return S(d.n_q / d.n - d.d_q / d.d - qt / pt);
}

template <typename S>
S directional_derivative_local(const basic_law<S>& p, const basic_law<S>& q, const antichain& alpha, const point& x) {
    return directional_derivative_local(p, q, alpha.collections(), x);
}

/// Mixed second derivative d^2/(d eps1 d eps2) of i_sx[p + eps1 q + eps2 r].
template <typename S>
S second_directional_derivative_local(const basic_law<S>& p, const basic_law<S>& q, const basic_law<S>& r,
                                      std::span<const collection> family, const point& x) {
    auto cond = detail::condition_for_derivative(p, family, x);
    S pt = detail::positive_target(p, x);
    auto d = detail::slice_derivatives<S>(cond, q, &r, x);
    if (!(d.n > S(0)))
        throw undefined_point("i_sx is -infinity at this realization");
    const auto tm = p.vars().target_mask();
    S qt = q.marginal_density(tm, x), rt = r.marginal_density(tm, x);
    S first = d.n_qr / d.n - (d.n_q * d.n_r) / (d.n * d.n);
    S second = d.d_qr / d.d - (d.d_q * d.d_r) / (d.d * d.d);
    return S(first - second + (qt * rt) / (pt * pt));
}

template <typename S>
S second_directional_derivative_local(const basic_law<S>& p, const basic_law<S>& q, const basic_law<S>& r,
                                      const antichain& alpha, const point& x) {
    return second_directional_derivative_local(p, q, r, alpha.collections(), x);
}

/// d/d eps of I^sx[p + eps q] (in nats): the integral of q i + p d_q i.
inline global_result functional_derivative_global(const law& p, const law& q, const antichain& alpha,
                                                  const integration_config& cfg) {
    auto fam = alpha.collections();
    auto res = integrate(p, cfg, 1, [&] {
        return [&p, &q, fam](const point& x, std::span<double> out) {
            double px = p.density(x);
            double qx = q.density(x);
            double i = i_sx_nats(p, fam, x);
            out[0] = (qx / px) * i + directional_derivative_local(p, q, fam, x);
        };
    });
    global_result g;
    g.value = res.value[0];
    g.stderr_ = res.stderr_[0];
    return g;
}

/// Global I^sx in nats (the functional whose derivative is taken above).
inline global_result global_i_sx_nats(const law& p, const antichain& alpha, const integration_config& cfg) {
    auto g = global_i_sx(p, alpha, cfg);
    g.value *= std::numbers::ln2;
    g.stderr_ *= std::numbers::ln2;
    g.plus *= std::numbers::ln2;
    g.minus *= std::numbers::ln2;
    return g;
}

/// Checks that q is absolutely continuous w.r.t. p: exact on the discrete
/// part, identical schema for the continuous part.
inline void check_direction(const distribution_spec& p, const distribution_spec& q) {
    if (!(p.vars == q.vars))
        throw validation_error(validation_error::kind::schema, "direction has a different schema");
    if (p.vars.continuous_dim() == 0) {
        auto lp = law::from_spec(p);
        auto lq = law::from_spec(q);
        for (const auto& c : lq.components()) {
            point x(static_cast<std::size_t>(p.vars.point_size()));
            for (int v = 0; v < p.vars.variable_count(); ++v)
                x[static_cast<std::size_t>(p.vars.offset(v))] = c.symbols[static_cast<std::size_t>(v)];
            if (c.weight > 0 && !(lp.density(x) > 0))
                throw validation_error(validation_error::kind::schema, "direction puts mass outside the base support");
        }
    }
}

} // namespace pidsx
