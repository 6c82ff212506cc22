#pragma once

// Random spec generators shared by the unit tests and the acceptance runner.

#include "pidsx/model.hpp"
#include "pidsx/spec_io.hpp"

#include <Eigen/Dense>

#include <random>
#include <string>
#include <vector>

namespace pidsx::testing {

inline variable_schema discrete_var(std::string name, int k) {
    variable_schema v;
    v.name = std::move(name);
    v.kind = variable_kind::discrete;
    for (int i = 0; i < k; ++i)
        v.alphabet.push_back(std::to_string(i));
    return v;
}

inline variable_schema continuous_var(std::string name, int d) {
    variable_schema v;
    v.name = std::move(name);
    v.kind = variable_kind::continuous;
    v.dimension = d;
    return v;
}

struct discrete_options {
    int min_sources = 2, max_sources = 3;
    int max_alphabet = 4;
    int targets = 1;
    bool rational = true;
    double keep = 0.6; // probability that an outcome is in the support
};

/// Random fully discrete spec with integer weights, normalized exactly
/// (rational masses) or in floating point.
inline distribution_spec random_discrete(std::mt19937_64& rng, const discrete_options& o = {}) {
    std::uniform_int_distribution<int> nsrc(o.min_sources, o.max_sources), alpha(2, o.max_alphabet), w(1, 9);
    std::bernoulli_distribution keep(o.keep);
    std::vector<variable_schema> src, tgt;
    const int n = nsrc(rng);
    for (int i = 0; i < n; ++i)
        src.push_back(discrete_var("S" + std::to_string(i + 1), alpha(rng)));
    for (int i = 0; i < o.targets; ++i)
        tgt.push_back(discrete_var(o.targets == 1 ? "T" : "T" + std::to_string(i + 1), alpha(rng)));
    schema vars(src, tgt);
    std::vector<std::vector<int>> outcomes{{}};
    for (int v = 0; v < vars.variable_count(); ++v) {
        std::vector<std::vector<int>> next;
        for (const auto& p : outcomes)
            for (int s = 0; s < static_cast<int>(vars.variable(v).alphabet.size()); ++s) {
                auto q = p;
                q.push_back(s);
                next.push_back(std::move(q));
            }
        outcomes = std::move(next);
    }
    std::vector<std::pair<std::vector<int>, int>> rows;
    for (const auto& oc : outcomes)
        if (keep(rng))
            rows.emplace_back(oc, w(rng));
    if (rows.empty())
        rows.emplace_back(outcomes[std::uniform_int_distribution<std::size_t>(0, outcomes.size() - 1)(rng)], 1);
    long total = 0;
    for (const auto& r : rows)
        total += r.second;
    discrete_table t;
    for (const auto& [oc, k] : rows) {
        probability m = o.rational ? probability(rational(k, total)) : probability(static_cast<double>(k) / total);
        t.entries.push_back({oc, m});
    }
    distribution_spec spec{vars, t};
    validate(spec);
    return spec;
}

inline Eigen::MatrixXd random_covariance(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            a(i, j) = z(rng);
    Eigen::MatrixXd c = a * a.transpose() / d + 0.5 * Eigen::MatrixXd::Identity(d, d);
    return 0.5 * (c + c.transpose());
}

struct gaussian_options {
    int min_sources = 1, max_sources = 2;
    int max_dimension = 1;
    int targets = 1;
};

inline distribution_spec random_gaussian(std::mt19937_64& rng, const gaussian_options& o = {}) {
    std::uniform_int_distribution<int> nsrc(o.min_sources, o.max_sources), dim(1, o.max_dimension);
    std::normal_distribution<double> z;
    std::vector<variable_schema> src, tgt;
    const int n = nsrc(rng);
    for (int i = 0; i < n; ++i)
        src.push_back(continuous_var("S" + std::to_string(i + 1), dim(rng)));
    for (int i = 0; i < o.targets; ++i)
        tgt.push_back(continuous_var(o.targets == 1 ? "T" : "T" + std::to_string(i + 1), 1));
    schema vars(src, tgt);
    const int d = vars.continuous_dim();
    gaussian_law g;
    g.mean = Eigen::VectorXd(d);
    for (int i = 0; i < d; ++i)
        g.mean[i] = 0.5 * z(rng);
    g.cov = random_covariance(rng, d);
    distribution_spec spec{vars, g};
    validate(spec);
    return spec;
}

/// Two-component mixture with one discrete source and continuous rest.
inline distribution_spec random_mixture(std::mt19937_64& rng) {
    std::normal_distribution<double> z;
    schema vars({discrete_var("S1", 2), continuous_var("S2", 1)}, {continuous_var("T", 1)});
    mixture_law mx;
    for (int k = 0; k < 2; ++k) {
        mixture_component c;
        c.weight = probability(rational(1, 2));
        c.discrete = {k};
        c.gauss.mean = Eigen::VectorXd(2);
        c.gauss.mean << z(rng), z(rng);
        c.gauss.cov = random_covariance(rng, 2);
        mx.components.push_back(c);
    }
    distribution_spec spec{vars, mx};
    validate(spec);
    return spec;
}

/// Every point of the discrete product space.
inline std::vector<point> all_points(const schema& vars) {
    std::vector<point> out{{}};
    for (int v = 0; v < vars.variable_count(); ++v) {
        std::vector<point> next;
        for (const auto& p : out)
            for (int s = 0; s < static_cast<int>(vars.variable(v).alphabet.size()); ++s) {
                auto q = p;
                q.push_back(s);
                next.push_back(std::move(q));
            }
        out = std::move(next);
    }
    return out;
}

inline distribution_spec spec_file(const std::string& name) { return load_spec(std::string(PIDSX_SPEC_DIR) + "/" + name); }

} // namespace pidsx::testing
