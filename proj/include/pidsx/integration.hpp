#pragma once

// Expectations against a law: exact sums over discrete support, tensor
// grids over continuous coordinates, or Monte Carlo with a counter-based
// generator. Results are independent of the thread count.

#include "pidsx/error.hpp"
#include "pidsx/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

namespace pidsx {

enum class method { exact_sum, tensor_grid, monte_carlo };

inline const char* to_string(method m) {
    switch (m) {
    case method::exact_sum: return "exact";
    case method::tensor_grid: return "grid";
    default: return "mc";
    }
}

struct integration_config {
    method how = method::exact_sum;
    int grid_points = 64;
    double truncation = 8.0; // in standard deviations
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;

    void validate() const {
        if (how == method::tensor_grid) {
            if (grid_points < 16)
                throw config_error("grid needs at least 16 points per coordinate");
            if (!(truncation >= 4.0 && truncation <= 12.0))
                throw config_error("grid truncation must lie in [4, 12] standard deviations");
        }
        if (how == method::monte_carlo && samples < 10000)
            throw config_error("Monte Carlo needs at least 10000 samples");
        if (!(tolerance > 0.0))
            throw config_error("tolerance must be positive");
    }
};

/// Exact sums for fully discrete laws, the grid otherwise.
inline integration_config default_config(const schema& vars) {
    integration_config c;
    if (vars.continuous_dim() > 0) {
        c.how = method::tensor_grid;
        c.tolerance = 1e-6;
    }
    return c;
}

// ---------------------------------------------------------------- RNG

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Stream `stream` of seed `seed`; the k-th draw is a pure function of
/// (seed, stream, k).
class counter_rng {
public:
    counter_rng(std::uint64_t seed, std::uint64_t stream) noexcept : key_(splitmix64(seed ^ splitmix64(stream))) {}

    std::uint64_t next() noexcept { return splitmix64(key_ + 0x9E3779B97F4A7C15ull * ++counter_); }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double r = std::sqrt(-2.0 * std::log(uniform()));
        double th = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Draws points from a (possibly unnormalized, non-negative) law.
class sampler {
public:
    explicit sampler(const law& l) : law_(l) {
        double acc = 0.0;
        for (const auto& c : l.components()) {
            if (c.weight < 0)
                throw error("cannot sample from a signed law");
            acc += c.weight;
            cum_.push_back(acc);
            factors_.push_back(c.gauss->sampling_factor());
        }
        if (!(acc > 0))
            throw error("cannot sample from a law with zero mass");
    }

    point draw(counter_rng& g) const {
        const auto& vars = law_.vars();
        double u = g.uniform() * cum_.back();
        auto k = static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
        k = std::min(k, cum_.size() - 1);
        const auto& c = law_.components()[k];
        point x(static_cast<std::size_t>(vars.point_size()));
        for (int v = 0; v < vars.variable_count(); ++v)
            if (!vars.continuous(v))
                x[static_cast<std::size_t>(vars.offset(v))] = c.symbols[static_cast<std::size_t>(v)];
        const int d = vars.continuous_dim();
        if (d > 0) {
            Eigen::VectorXd z(d);
            for (int i = 0; i < d; ++i)
                z[i] = g.normal();
            Eigen::VectorXd y = c.gauss->mean() + factors_[k] * z;
            for (int i = 0; i < d; ++i)
                x[static_cast<std::size_t>(vars.slot_of_continuous(i))] = y[i];
        }
        return x;
    }

private:
    law law_;
    std::vector<double> cum_;
    std::vector<Eigen::MatrixXd> factors_;
};

// ---------------------------------------------------------------- parallel

inline unsigned thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PIDSX_THREADS")) {
        int k = std::atoi(env);
        if (k > 0)
            n = static_cast<unsigned>(k);
    }
    return n;
}

/// Runs body(chunk) for chunk in [0, chunks) on worker threads. Exceptions
/// are rethrown (the one from the lowest chunk index wins).
template <typename Body>
void parallel_chunks(std::size_t chunks, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            body(c);
        return;
    }
    std::vector<std::exception_ptr> errs(chunks);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t c = w; c < chunks; c += workers) {
                try {
                    body(c);
                } catch (...) {
                    errs[c] = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    for (auto& e : errs)
        if (e)
            std::rethrow_exception(e);
}

/// Weighted sums of K integrands plus squared sums (for MC error bars).
struct accumulator {
    std::vector<double> sum, sumsq;
    double weight = 0.0;
    std::size_t count = 0;

    explicit accumulator(std::size_t k = 0) : sum(k, 0.0), sumsq(k, 0.0) {}

    void merge(const accumulator& o) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += o.sum[i];
            sumsq[i] += o.sumsq[i];
        }
        weight += o.weight;
        count += o.count;
    }
};

/// Pairwise merge in index order, so the rounding pattern is fixed.
inline accumulator tree_reduce(std::vector<accumulator> parts) {
    if (parts.empty())
        return accumulator(0);
    while (parts.size() > 1) {
        std::vector<accumulator> next;
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
            parts[i].merge(parts[i + 1]);
            next.push_back(std::move(parts[i]));
        }
        if (parts.size() % 2 == 1)
            next.push_back(std::move(parts.back()));
        parts = std::move(next);
    }
    return std::move(parts.front());
}

struct integral {
    std::vector<double> value;
    std::vector<double> stderr_; // zero for deterministic rules
    std::size_t evaluations = 0;
};

/// Integrand: f(x, out) fills out[0..K). Every worker gets its own copy made
/// by make() so that integrands may memoize per thread.
using integrand_factory = std::function<std::function<void(const point&, std::span<double>)>()>;

namespace detail {

inline void check_finite(std::span<const double> v) {
    for (double d : v)
        if (!std::isfinite(d))
            throw divergent_integral("integrand is infinite or undefined on a set of positive probability");
}

struct grid_axis {
    int slot;
    double lo, step;
};

} // namespace detail

/// Distinct discrete configurations with their component weights, in key order.
inline std::vector<std::pair<std::vector<int>, double>> discrete_support(const law& l) {
    const auto& vars = l.vars();
    std::map<std::uint64_t, std::pair<std::vector<int>, double>> acc;
    for (const auto& c : l.components()) {
        auto& e = acc[vars.discrete_key_of_symbols(vars.all_mask(), c.symbols)];
        e.first = c.symbols;
        e.second += c.weight;
    }
    std::vector<std::pair<std::vector<int>, double>> out;
    for (auto& [k, v] : acc)
        if (v.second != 0.0)
            out.push_back(std::move(v));
    return out;
}

/// Integral of f against the law (for signed or unnormalized laws the sum is
/// taken against the signed measure).
inline integral integrate(const law& l, const integration_config& cfg, std::size_t k, const integrand_factory& make) {
    cfg.validate();
    const auto& vars = l.vars();
    integral res;
    res.value.assign(k, 0.0);
    res.stderr_.assign(k, 0.0);

    if (cfg.how == method::exact_sum) {
        if (vars.continuous_dim() > 0)
            throw config_error("exact summation needs a fully discrete law");
        auto support = discrete_support(l);
        const std::size_t chunk = 64, chunks = (support.size() + chunk - 1) / chunk;
        std::vector<accumulator> parts(chunks, accumulator(k));
        parallel_chunks(chunks, [&](std::size_t c) {
            auto f = make();
            std::vector<double> out(k);
            point x(static_cast<std::size_t>(vars.point_size()));
            for (std::size_t i = c * chunk; i < std::min(support.size(), (c + 1) * chunk); ++i) {
                const auto& [sym, w] = support[i];
                for (int v = 0; v < vars.variable_count(); ++v)
                    x[static_cast<std::size_t>(vars.offset(v))] = sym[static_cast<std::size_t>(v)];
                f(x, out);
                detail::check_finite(out);
                for (std::size_t j = 0; j < k; ++j)
                    parts[c].sum[j] += w * out[j];
                parts[c].weight += w;
                ++parts[c].count;
            }
        });
        auto a = tree_reduce(std::move(parts));
        res.value = a.sum;
        res.evaluations = a.count;
        return res;
    }

    if (cfg.how == method::tensor_grid) {
        const int d = vars.continuous_dim();
        // discrete configurations present in some component
        std::map<std::uint64_t, std::vector<int>> configs;
        for (const auto& c : l.components())
            configs.emplace(vars.discrete_key_of_symbols(vars.all_mask(), c.symbols), c.symbols);
        std::vector<detail::grid_axis> axes;
        for (int i = 0; i < d; ++i) {
            double lo = INFINITY, hi = -INFINITY;
            for (const auto& c : l.components()) {
                double sd = std::sqrt(std::max(0.0, c.gauss->cov()(i, i)));
                lo = std::min(lo, c.gauss->mean()[i] - cfg.truncation * sd);
                hi = std::max(hi, c.gauss->mean()[i] + cfg.truncation * sd);
            }
            if (!(hi > lo))
                throw divergent_integral("degenerate coordinate cannot be gridded");
            axes.push_back({vars.slot_of_continuous(i), lo, (hi - lo) / (cfg.grid_points - 1)});
        }
        double cells = std::pow(static_cast<double>(cfg.grid_points), d) * static_cast<double>(configs.size());
        if (cells > 2e8)
            throw config_error("grid too large (" + std::to_string(cells) + " points); use Monte Carlo");
        const std::size_t per_config = static_cast<std::size_t>(std::llround(std::pow(cfg.grid_points, d)));
        // chunks are slices along the first axis (or single configs when d == 0)
        const std::size_t lead = d > 0 ? static_cast<std::size_t>(cfg.grid_points) : 1;
        const std::size_t inner = per_config / lead;
        std::vector<std::vector<int>> cfgs;
        for (auto& [key, s] : configs)
            cfgs.push_back(s);
        const std::size_t chunks = cfgs.size() * lead;
        std::vector<accumulator> parts(chunks, accumulator(k));
        double cellw = 1.0;
        for (const auto& a : axes)
            cellw *= a.step;
        parallel_chunks(chunks, [&](std::size_t c) {
            auto f = make();
            std::vector<double> out(k);
            point x(static_cast<std::size_t>(vars.point_size()));
            const auto& sym = cfgs[c / lead];
            for (int v = 0; v < vars.variable_count(); ++v)
                if (!vars.continuous(v))
                    x[static_cast<std::size_t>(vars.offset(v))] = sym[static_cast<std::size_t>(v)];
            const std::size_t first = c % lead;
            std::vector<int> idx(static_cast<std::size_t>(d), 0);
            for (std::size_t r = 0; r < inner; ++r) {
                // index digits: axis 0 fixed by the chunk, remaining axes with the last fastest
                std::size_t rem = r;
                for (int i = d - 1; i >= 1; --i) {
                    idx[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(cfg.grid_points));
                    rem /= static_cast<std::size_t>(cfg.grid_points);
                }
                if (d > 0)
                    idx[0] = static_cast<int>(first);
                double tw = cellw;
                for (int i = 0; i < d; ++i) {
                    int j = idx[static_cast<std::size_t>(i)];
                    x[static_cast<std::size_t>(axes[static_cast<std::size_t>(i)].slot)] =
                        axes[static_cast<std::size_t>(i)].lo + j * axes[static_cast<std::size_t>(i)].step;
                    if (j == 0 || j == cfg.grid_points - 1)
                        tw *= 0.5;
                }
                double w = l.density(x) * tw;
                if (w == 0.0)
                    continue;
                f(x, out);
                detail::check_finite(out);
                for (std::size_t j = 0; j < k; ++j)
                    parts[c].sum[j] += w * out[j];
                parts[c].weight += w;
                ++parts[c].count;
            }
        });
        auto a = tree_reduce(std::move(parts));
        res.value = a.sum;
        res.evaluations = a.count;
        return res;
    }

    // Monte Carlo: fixed chunks with their own streams
    sampler smp(l);
    const double mass = l.total_mass();
    const std::size_t chunk = 1024, chunks = (cfg.samples + chunk - 1) / chunk;
    std::vector<accumulator> parts(chunks, accumulator(k));
    parallel_chunks(chunks, [&](std::size_t c) {
        auto f = make();
        std::vector<double> out(k);
        counter_rng g(cfg.seed, c);
        for (std::size_t i = c * chunk; i < std::min(cfg.samples, (c + 1) * chunk); ++i) {
            point x = smp.draw(g);
            f(x, out);
            detail::check_finite(out);
            for (std::size_t j = 0; j < k; ++j) {
                parts[c].sum[j] += out[j];
                parts[c].sumsq[j] += out[j] * out[j];
            }
            ++parts[c].count;
        }
    });
    auto a = tree_reduce(std::move(parts));
    const double n = static_cast<double>(a.count);
    for (std::size_t j = 0; j < k; ++j) {
        double mean = a.sum[j] / n;
        double var = std::max(0.0, a.sumsq[j] / n - mean * mean) * n / (n - 1.0);
        res.value[j] = mass * mean;
        res.stderr_[j] = mass * std::sqrt(var / n);
    }
    res.evaluations = a.count;
    return res;
}

} // namespace pidsx
