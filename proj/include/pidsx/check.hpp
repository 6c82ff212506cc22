#pragma once

// Property suites run by `pidsx check`: axioms of the measure, closed-form
// derivatives against finite differences, and engine against oracles.

#include "pidsx/calculus.hpp"
#include "pidsx/global.hpp"
#include "pidsx/oracles.hpp"
#include "pidsx/pointwise.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace pidsx {

struct property_check {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    std::size_t cases = 0;
    bool pass = true;

    void record(double residual) {
        ++cases;
        if (std::isnan(residual) || residual > max_residual)
            max_residual = std::isnan(residual) ? INFINITY : residual;
        pass = max_residual <= tolerance;
    }
};

inline double relative_error(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-6); }

namespace detail {

/// Support points for discrete laws, a fixed random sample otherwise.
inline std::vector<point> probe_points(const law& l, std::size_t count, std::uint64_t seed) {
    std::vector<point> pts;
    if (l.vars().continuous_dim() == 0) {
        for (const auto& [sym, w] : discrete_support(l)) {
            if (w <= 0)
                continue;
            point x(static_cast<std::size_t>(l.vars().point_size()));
            for (int v = 0; v < l.vars().variable_count(); ++v)
                x[static_cast<std::size_t>(l.vars().offset(v))] = sym[static_cast<std::size_t>(v)];
            pts.push_back(std::move(x));
        }
        return pts;
    }
    sampler s(l);
    counter_rng g(seed, 0xC0FFEE);
    for (std::size_t i = 0; i < count; ++i)
        pts.push_back(s.draw(g));
    return pts;
}

/// Every antichain for small n; an evenly spaced subset when n = 5.
inline std::vector<antichain> probe_antichains(int n) {
    const auto& all = redundancy_lattice::get(n).antichains();
    std::vector<antichain> out;
    const std::size_t step = all.size() > 200 ? all.size() / 200 : 1;
    for (std::size_t i = 0; i < all.size(); i += step)
        out.push_back(all[i]);
    return out;
}

inline double residual(double a, double b) {
    if (a == b)
        return 0.0;
    return std::abs(a - b);
}

} // namespace detail

inline std::vector<property_check> check_axioms(const distribution_spec& spec, std::uint64_t seed = 0) {
    const auto& vars = spec.vars;
    const bool discrete = fully_discrete(spec);
    const double tol = discrete ? 1e-12 : 1e-9;
    auto l = law::from_spec(spec);
    const int n = vars.source_count();
    property_check self{"self-redundancy", 0, tol}, sym{"symmetry", 0, tol}, sup{"superset-invariance", 0, tol},
        split{"decomposition-identity", 0, tol}, mono{"monotonicity", 0, tol}, chain{"target-chain-rule", 0, 1e-9};
    auto pts = detail::probe_points(l, 16, seed);
    auto acs = detail::probe_antichains(n);
    auto colls = enumerate_collections(n);

    // target chain rule needs the marginal law over sources + first target
    std::optional<law> first_target;
    if (vars.target_count() > 1) {
        std::vector<std::string> names;
        for (int v = 0; v <= vars.source_count(); ++v)
            names.push_back(vars.variable(v).name);
        first_target = law::from_spec(marginal(spec, names));
    }

    for (const auto& x : pts) {
        for (auto a : colls) {
            auto r = i_sx(l, antichain({a}), x);
            self.record(detail::residual(r.value, local_mi(l, a, x)));
        }
        for (const auto& alpha : acs) {
            auto base = i_sx(l, alpha, x);
            std::vector<collection> rev(alpha.begin(), alpha.end());
            std::reverse(rev.begin(), rev.end());
            sym.record(detail::residual(i_sx(l, rev, x).value, base.value));
            for (auto b : colls) {
                bool superset = std::any_of(alpha.begin(), alpha.end(), [&](collection c) { return c.subset_of(b); });
                std::vector<collection> fam(alpha.begin(), alpha.end());
                fam.push_back(b);
                auto ext = i_sx(l, fam, x);
                if (superset) {
                    sup.record(detail::residual(ext.value, base.value));
                } else if (discrete && base.split_defined() && ext.split_defined()) {
                    mono.record(std::max({0.0, ext.plus - base.plus, ext.minus - base.minus}));
                }
            }
            if (base.split_defined() && std::isfinite(base.value))
                split.record(std::abs(base.value - (base.plus - base.minus)));
            if (first_target) {
                auto cond = condition(l, alpha.collections(), x);
                double whole = base.value;
                double part = i_sx(*first_target, alpha,
                                   point(x.begin(), x.begin() + vars.offset(n) + vars.variable(n).width()))
                                  .value;
                double rest = i_sx_conditional(cond, x, vars.target_bit(0));
                chain.record(std::abs(whole - (part + rest)));
            }
        }
    }
    std::vector<property_check> out{self, sym, sup, split};
    if (discrete)
        out.push_back(mono);
    if (first_target)
        out.push_back(chain);
    return out;
}

namespace detail {

/// A direction with the base support: uniform over the support for discrete
/// laws; shifted means (and inflated covariances for `alt`) otherwise.
inline law direction(const law& p, bool alt) {
    std::vector<law::component> comps;
    if (p.vars().continuous_dim() == 0) {
        auto sup = discrete_support(p);
        for (std::size_t i = 0; i < sup.size(); ++i) {
            double w = alt ? static_cast<double>(i + 1) : 1.0;
            comps.push_back({w, sup[i].first, p.components()[0].gauss});
        }
    } else {
        for (const auto& c : p.components()) {
            Eigen::VectorXd m = c.gauss->mean();
            Eigen::MatrixXd cv = c.gauss->cov();
            for (Eigen::Index i = 0; i < m.size(); ++i)
                m[i] += alt ? -0.2 * static_cast<double>(i + 1) : 0.3;
            if (alt)
                cv *= 1.3;
            comps.push_back({c.weight, c.symbols, std::make_shared<const gaussian>(m, cv)});
        }
    }
    double total = 0;
    for (const auto& c : comps)
        total += c.weight;
    for (auto& c : comps)
        c.weight /= total;
    return law(p.vars(), std::move(comps));
}

/// Largest step keeping p + h q and p - h q positive where it matters.
inline double safe_step(const law& p, const law& q, const std::vector<point>& pts) {
    double h = 1e-2;
    for (const auto& x : pts) {
        double px = p.density(x), qx = q.density(x);
        if (qx > 0)
            h = std::min(h, 0.05 * px / qx);
    }
    return h;
}

} // namespace detail

inline std::vector<property_check> check_derivatives(const distribution_spec& spec, const integration_config& cfg,
                                                     std::uint64_t seed = 0) {
    const bool discrete = fully_discrete(spec);
    const double tol = discrete ? 1e-4 : 1e-3;
    auto p = law::from_spec(spec);
    auto q = detail::direction(p, false), r = detail::direction(p, true);
    auto pts = detail::probe_points(p, 6, seed);
    auto acs = detail::probe_antichains(spec.vars.source_count());
    if (acs.size() > 24) {
        std::vector<antichain> few;
        for (std::size_t i = 0; i < acs.size(); i += acs.size() / 24)
            few.push_back(acs[i]);
        acs = std::move(few);
    }
    property_check self{"q=p gives -1", 0, 1e-12}, first{"first-derivative-vs-fd", 0, tol},
        second{"second-derivative-vs-fd", 0, 1e-3}, symm{"second-derivative-symmetry", 0, 1e-12},
        glob{"functional-derivative-vs-fd", 0, tol};
    const double h = detail::safe_step(p, q, pts), h2 = std::min(h, detail::safe_step(p, r, pts));
    for (const auto& x : pts)
        for (const auto& alpha : acs) {
            auto fam = alpha.collections();
            double ip = i_sx(p, fam, x).value;
            if (!std::isfinite(ip))
                continue;
            self.record(std::abs(directional_derivative_local(p, p, fam, x) + 1.0));
            double closed = directional_derivative_local(p, q, fam, x);
            auto fd = finite_difference([&](double e) { return i_sx_nats(p.perturbed(q, e), fam, x); }, h);
            first.record(relative_error(closed, fd.value));
            double s_qr = second_directional_derivative_local(p, q, r, fam, x);
            double s_rq = second_directional_derivative_local(p, r, q, fam, x);
            symm.record(std::abs(s_qr - s_rq) / std::max(std::abs(s_qr), 1.0));
            auto fd2 = mixed_second_difference(
                [&](double e1, double e2) {
                    std::array<law, 3> ls{p, q, r};
                    std::array<double, 3> w{1.0, e1, e2};
                    return i_sx_nats(law::combine(ls, w), fam, x);
                },
                h2);
            second.record(relative_error(s_qr, fd2.value));
        }
    // global functional derivative on a few antichains; for continuous laws
    // q/p is unbounded in the tails, so p - h q stays positive on the grid
    // only for small h
    const double hg = discrete ? detail::safe_step(p, q, pts) : 1e-4;
    for (std::size_t k = 0; k < acs.size(); k += std::max<std::size_t>(1, acs.size() / 3)) {
        const auto& alpha = acs[k];
        double closed = functional_derivative_global(p, q, alpha, cfg).value;
        auto fd = finite_difference(
            [&](double e) { return global_i_sx_nats(p.perturbed(q, e), alpha, cfg).value; }, hg, discrete ? 3 : 2);
        glob.record(relative_error(closed, fd.value));
    }
    return {self, first, second, symm, glob};
}

inline std::vector<property_check> check_oracles(const distribution_spec& spec, std::uint64_t seed = 0) {
    auto l = law::from_spec(spec);
    auto acs = detail::probe_antichains(spec.vars.source_count());
    if (fully_discrete(spec)) {
        property_check exact{"engine-vs-brute-force (exact)", 0, 0.0}, flt{"engine-vs-brute-force (float)", 0, 1e-12};
        auto el = exact_law::from_spec(spec);
        // every realization in the product space with a positive target marginal
        const auto& vars = spec.vars;
        std::vector<int> sym(static_cast<std::size_t>(vars.variable_count()), 0);
        for (;;) {
            point x(sym.begin(), sym.end());
            if (el.marginal_density(vars.target_mask(), x) > 0)
                for (const auto& alpha : acs) {
                    auto oracle = brute_force_discrete_i_sx(spec, alpha, x);
                    auto ratio = i_sx_ratio(el, alpha.collections(), x);
                    bool agree = oracle.ratio ? (ratio && *ratio == *oracle.ratio)
                                              : (!ratio ? oracle.bits > 0 : *ratio == 0 && oracle.bits < 0);
                    exact.record(agree ? 0.0 : 1.0);
                    double v = i_sx(l, alpha, x).value;
                    flt.record(std::isinf(oracle.bits) ? (v == oracle.bits ? 0.0 : INFINITY)
                                                       : std::abs(v - oracle.bits));
                }
            int v = 0;
            while (v < vars.variable_count() &&
                   ++sym[static_cast<std::size_t>(v)] == static_cast<int>(vars.variable(v).alphabet.size()))
                sym[static_cast<std::size_t>(v++)] = 0;
            if (v == vars.variable_count())
                break;
        }
        return {exact, flt};
    }
    // thickening MC against the conditional target density at a few points
    property_check mc{"conditioning-vs-thickening", 0, 2e-2};
    auto pts = detail::probe_points(l, 3, seed);
    for (const auto& x : pts)
        for (const auto& alpha : acs) {
            if (alpha.size() > 2)
                continue;
            auto cond = condition(l, alpha, x);
            try {
                auto est = thickening_mc_conditional(l, alpha, x, 1e-3, 2000000, seed, {x});
                mc.record(relative_error(est.value[0], cond.target_density(x)));
            } catch (const insufficient_acceptance&) {
                // codimension too high for this sample size
            }
        }
    return {mc};
}

} // namespace pidsx
