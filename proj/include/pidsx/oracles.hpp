#pragma once

// Slow reference implementations used by the tests and the self-check
// command. None of them goes through the conditioning engine.

#include "pidsx/error.hpp"
#include "pidsx/integration.hpp"
#include "pidsx/lattice.hpp"
#include "pidsx/model.hpp"
#include "pidsx/scalar.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace pidsx {

// ------------------------------------------------------ brute force

struct brute_force_result {
    double bits = 0.0;
    std::optional<rational> ratio; // p(t | R) / p(t); empty when bits is infinite
};

/// Walks every table row: R holds when some collection matches s on all
/// of its sources.
inline brute_force_result brute_force_discrete_i_sx(const distribution_spec& spec, const antichain& alpha,
                                                    const point& x) {
    const auto* tab = std::get_if<discrete_table>(&spec.law);
    if (!tab)
        throw error("brute force needs a discrete table");
    const auto& vars = spec.vars;
    double outcomes = 1.0;
    for (int v = 0; v < vars.variable_count(); ++v)
        outcomes *= static_cast<double>(vars.variable(v).alphabet.size());
    if (outcomes > 1e6)
        throw cap_exceeded("alphabet product exceeds 10^6");
    vars.check_point(x);
    auto sym = [&](int v) { return vars.symbol(x, v); };
    rational pr(0), ptr(0), pt(0);
    for (const auto& e : tab->entries) {
        rational m = e.mass.exact ? *e.mass.exact : rational(e.mass.value);
        bool in_r = false;
        for (auto a : alpha) {
            bool all = true;
            for (int i : a.indices())
                all = all && e.symbols[static_cast<std::size_t>(i - 1)] == sym(i - 1);
            in_r = in_r || all;
        }
        bool t_match = true;
        for (int v = vars.source_count(); v < vars.variable_count(); ++v)
            t_match = t_match && e.symbols[static_cast<std::size_t>(v)] == sym(v);
        if (in_r)
            pr += m;
        if (t_match)
            pt += m;
        if (in_r && t_match)
            ptr += m;
    }
    if (pt == 0)
        throw undefined_point("target realization has zero probability");
    brute_force_result out;
    if (pr == 0) {
        out.bits = std::numeric_limits<double>::infinity();
        return out;
    }
    if (ptr == 0) {
        out.bits = -std::numeric_limits<double>::infinity();
        return out;
    }
    out.ratio = rational(ptr / (pr * pt));
    out.bits = log2_exact(*out.ratio);
    return out;
}

// ------------------------------------------------------ thickening MC

struct density_estimate {
    std::vector<double> value;
    std::vector<double> stderr_;
    std::size_t accepted = 0;
    std::size_t samples = 0;
};

/// Samples the joint law and keeps draws inside the thickened union event:
/// each continuous source j of a collection must fall in a box of half-width
/// eps / (p_j(s_j)/M)^{1/d_j} around s_j (so the box has marginal probability
/// about (2 eps)^{d_j}), each discrete source must match exactly. The target
/// density at each query is estimated by averaging p(t | sources of the draw).
inline density_estimate thickening_mc_conditional(const law& l, const antichain& alpha, const point& s, double eps,
                                                  std::size_t samples, std::uint64_t seed,
                                                  const std::vector<point>& queries) {
    if (!(eps >= 1e-4 && eps <= 1e-1))
        throw config_error("thickening width must lie in [1e-4, 1e-1]");
    if (samples < 100000)
        throw config_error("thickening oracle needs at least 10^5 samples");
    const auto& vars = l.vars();
    const int ns = vars.source_count();
    const double mass = l.total_mass();
    std::vector<double> half(static_cast<std::size_t>(ns), 0.0);
    for (int j = 0; j < ns; ++j)
        if (vars.continuous(j)) {
            double pj = l.marginal_density(var_mask{1} << j, s) / mass;
            half[static_cast<std::size_t>(j)] =
                pj > 0 ? eps / std::pow(pj, 1.0 / vars.variable(j).dimension) : 0.0;
        }
    auto inside = [&](const point& y, int j) {
        if (!vars.continuous(j))
            return vars.symbol(y, j) == vars.symbol(s, j);
        const auto& vj = vars.variable(j);
        for (int c = 0; c < vj.dimension; ++c) {
            auto pos = static_cast<std::size_t>(vars.offset(j) + c);
            if (std::abs(y[pos] - s[pos]) > half[static_cast<std::size_t>(j)])
                return false;
        }
        return true;
    };
    sampler smp(l);
    const std::size_t q = queries.size();
    const std::size_t chunk = 1 << 14, chunks = (samples + chunk - 1) / chunk;
    std::vector<accumulator> parts(chunks, accumulator(q));
    const var_mask src = vars.source_mask();
    parallel_chunks(chunks, [&](std::size_t c) {
        counter_rng g(seed, c);
        point z(static_cast<std::size_t>(vars.point_size()));
        for (std::size_t i = c * chunk; i < std::min(samples, (c + 1) * chunk); ++i) {
            point y = smp.draw(g);
            bool in = false;
            for (auto a : alpha) {
                bool all = true;
                for (int idx : a.indices())
                    all = all && inside(y, idx - 1);
                if (all) {
                    in = true;
                    break;
                }
            }
            if (!in)
                continue;
            ++parts[c].count;
            double ps = l.marginal_density(src, y);
            for (std::size_t k = 0; k < q; ++k) {
                z = queries[k];
                std::copy(y.begin(), y.begin() + vars.offset(ns - 1) + vars.variable(ns - 1).width(), z.begin());
                double f = l.density(z) / ps;
                parts[c].sum[k] += f;
                parts[c].sumsq[k] += f * f;
            }
        }
    });
    auto a = tree_reduce(std::move(parts));
    if (a.count < 100)
        throw insufficient_acceptance("only " + std::to_string(a.count) + " draws fell inside the thickened event");
    density_estimate out;
    out.accepted = a.count;
    out.samples = samples;
    const double n = static_cast<double>(a.count);
    for (std::size_t k = 0; k < q; ++k) {
        double mean = a.sum[k] / n;
        double var = std::max(0.0, a.sumsq[k] / n - mean * mean) * n / (n - 1.0);
        out.value.push_back(mean);
        out.stderr_.push_back(std::sqrt(var / n));
    }
    return out;
}

// ------------------------------------------------------ finite differences

struct fd_estimate {
    double value = 0.0;
    double residual = 0.0;
};

namespace detail {

inline fd_estimate richardson(std::vector<double> d) {
    // d[k] has error c2 h_k^2 + c4 h_k^4 + ... with h_k = h0 / 2^k
    std::vector<std::vector<double>> t{std::move(d)};
    while (t.back().size() > 1) {
        const auto& prev = t.back();
        const double f = std::pow(4.0, static_cast<double>(t.size()));
        std::vector<double> next;
        for (std::size_t k = 1; k < prev.size(); ++k)
            next.push_back(prev[k] + (prev[k] - prev[k - 1]) / (f - 1.0));
        t.push_back(std::move(next));
    }
    fd_estimate e;
    e.value = t.back().front();
    const auto& last2 = t[t.size() - 2];
    e.residual = std::abs(e.value - last2.back());
    return e;
}

} // namespace detail

/// Central differences at h0, h0/2, ... with Richardson extrapolation.
inline fd_estimate finite_difference(const std::function<double(double)>& f, double h0 = 1e-2, int levels = 4) {
    std::vector<double> d;
    for (int k = 0; k < levels; ++k) {
        double h = h0 / std::pow(2.0, k);
        d.push_back((f(h) - f(-h)) / (2.0 * h));
    }
    return detail::richardson(std::move(d));
}

/// Mixed second derivative d^2 f / (dx dy) at the origin.
inline fd_estimate mixed_second_difference(const std::function<double(double, double)>& f, double h0 = 1e-2,
                                           int levels = 4) {
    std::vector<double> d;
    for (int k = 0; k < levels; ++k) {
        double h = h0 / std::pow(2.0, k);
        d.push_back((f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h));
    }
    return detail::richardson(std::move(d));
}

// ------------------------------------------------------ transforms

/// y_v = A_v x_v + b_v for each continuous variable; identity where absent.
struct affine_map {
    std::vector<Eigen::MatrixXd> scale; // per variable (empty for discrete or identity)
    std::vector<Eigen::VectorXd> shift;
};

inline Eigen::MatrixXd affine_block(const schema& vars, const affine_map& f) {
    const int d = vars.continuous_dim();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d);
    int base = 0;
    for (int v = 0; v < vars.variable_count(); ++v) {
        if (!vars.continuous(v))
            continue;
        const int w = vars.variable(v).dimension;
        if (static_cast<std::size_t>(v) < f.scale.size() && f.scale[static_cast<std::size_t>(v)].size() > 0)
            a.block(base, base, w, w) = f.scale[static_cast<std::size_t>(v)];
        base += w;
    }
    return a;
}

inline Eigen::VectorXd affine_shift(const schema& vars, const affine_map& f) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(vars.continuous_dim());
    int base = 0;
    for (int v = 0; v < vars.variable_count(); ++v) {
        if (!vars.continuous(v))
            continue;
        const int w = vars.variable(v).dimension;
        if (static_cast<std::size_t>(v) < f.shift.size() && f.shift[static_cast<std::size_t>(v)].size() > 0)
            b.segment(base, w) = f.shift[static_cast<std::size_t>(v)];
        base += w;
    }
    return b;
}

inline distribution_spec transform(const distribution_spec& spec, const affine_map& f) {
    auto a = affine_block(spec.vars, f);
    auto b = affine_shift(spec.vars, f);
    distribution_spec out = spec;
    auto map_g = [&](gaussian_law& g) {
        g.mean = a * g.mean + b;
        g.cov = a * g.cov * a.transpose();
        g.cov = 0.5 * (g.cov + g.cov.transpose());
    };
    std::visit(
        [&](auto& law) {
            using L = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<L, gaussian_law>)
                map_g(law);
            else if constexpr (std::is_same_v<L, mixture_law>)
                for (auto& c : law.components)
                    map_g(c.gauss);
        },
        out.law);
    return out;
}

inline point transform(const schema& vars, const affine_map& f, const point& x) {
    auto a = affine_block(vars, f);
    auto b = affine_shift(vars, f);
    const int d = vars.continuous_dim();
    Eigen::VectorXd c(d);
    for (int i = 0; i < d; ++i)
        c[i] = x[static_cast<std::size_t>(vars.slot_of_continuous(i))];
    Eigen::VectorXd y = a * c + b;
    point out = x;
    for (int i = 0; i < d; ++i)
        out[static_cast<std::size_t>(vars.slot_of_continuous(i))] = y[i];
    return out;
}

/// Symbol permutation per discrete variable: new symbol = perm[v][old].
using relabeling = std::vector<std::vector<int>>;

inline distribution_spec transform(const distribution_spec& spec, const relabeling& perm) {
    distribution_spec out = spec;
    auto apply = [&](std::vector<int>& symbols, bool only_discrete) {
        std::size_t k = 0;
        for (int v = 0; v < spec.vars.variable_count(); ++v) {
            if (spec.vars.continuous(v))
                continue;
            auto& s = only_discrete ? symbols[k++] : symbols[static_cast<std::size_t>(v)];
            if (static_cast<std::size_t>(v) < perm.size() && !perm[static_cast<std::size_t>(v)].empty())
                s = perm[static_cast<std::size_t>(v)][static_cast<std::size_t>(s)];
        }
    };
    std::visit(
        [&](auto& law) {
            using L = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<L, discrete_table>) {
                for (auto& e : law.entries)
                    apply(e.symbols, false);
            } else if constexpr (std::is_same_v<L, mixture_law>) {
                for (auto& c : law.components)
                    apply(c.discrete, true);
            }
        },
        out.law);
    return out;
}

inline point transform(const schema& vars, const relabeling& perm, const point& x) {
    point out = x;
    for (int v = 0; v < vars.variable_count(); ++v)
        if (!vars.continuous(v) && static_cast<std::size_t>(v) < perm.size() &&
            !perm[static_cast<std::size_t>(v)].empty()) {
            auto pos = static_cast<std::size_t>(vars.offset(v));
            out[pos] = perm[static_cast<std::size_t>(v)][static_cast<std::size_t>(out[pos])];
        }
    return out;
}

} // namespace pidsx
