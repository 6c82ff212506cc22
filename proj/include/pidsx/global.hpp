#pragma once

// Averaged redundancies, the full lattice decomposition and an independent
// mutual-information reference for the consistency check.

#include "pidsx/integration.hpp"
#include "pidsx/lattice.hpp"
#include "pidsx/pointwise.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <atomic>
#include <numbers>
#include <optional>
#include <vector>

namespace pidsx {

struct global_result {
    double value = 0.0;
    double stderr_ = 0.0;
    double plus = 0.0, minus = 0.0;
    double plus_stderr = 0.0, minus_stderr = 0.0;
    bool differential = false; // some realization used the slice-weight surrogate
};

/// Evaluates i_sx for several families at a point, reusing the conditional
/// laws while consecutive points share their source coordinates.
class isx_evaluator {
public:
    isx_evaluator(law l, std::vector<std::vector<collection>> families)
        : law_(std::move(l)), families_(std::move(families)), conds_(families_.size()) {
        const auto& vars = law_.vars();
        src_len_ = vars.target_count() > 0 ? static_cast<std::size_t>(vars.offset(vars.source_count()))
                                           : static_cast<std::size_t>(vars.point_size());
    }

    std::size_t size() const noexcept { return families_.size(); }
    const law& get_law() const noexcept { return law_; }

    const std::optional<conditional_law>& conditional(std::size_t k, const point& x) {
        refresh(x);
        return conds_[k];
    }

    pointwise_result operator()(std::size_t k, const point& x) {
        refresh(x);
        if (!conds_[k]) {
            detail::target_marginal(law_, x, law_.vars().target_mask());
            pointwise_result r;
            r.value = inf;
            return r;
        }
        return i_sx(*conds_[k], x);
    }

private:
    void refresh(const point& x) {
        if (valid_ && std::equal(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(src_len_), last_.begin()))
            return;
        last_.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(src_len_));
        for (std::size_t k = 0; k < families_.size(); ++k) {
            try {
                conds_[k].emplace(condition(law_, families_[k], x));
            } catch (const all_slice_weights_zero&) {
                conds_[k].reset();
            }
        }
        valid_ = true;
    }

    law law_;
    std::vector<std::vector<collection>> families_;
    std::vector<std::optional<conditional_law>> conds_;
    std::size_t src_len_ = 0;
    point last_;
    bool valid_ = false;
};

/// I^sx for every family in one pass over the integration points.
inline std::vector<global_result> global_i_sx(const law& l, const std::vector<std::vector<collection>>& families,
                                              const integration_config& cfg) {
    const std::size_t m = families.size();
    auto diff = std::make_unique<std::atomic<bool>[]>(m);
    auto res = integrate(l, cfg, 3 * m, [&] {
        auto ev = std::make_shared<isx_evaluator>(l, families);
        return [ev, m, flags = diff.get()](const point& x, std::span<double> out) {
            for (std::size_t k = 0; k < m; ++k) {
                auto r = (*ev)(k, x);
                out[3 * k] = r.value;
                out[3 * k + 1] = r.plus;
                out[3 * k + 2] = r.minus;
                if (r.differential)
                    flags[k].store(true, std::memory_order_relaxed);
            }
        };
    });
    std::vector<global_result> out(m);
    for (std::size_t k = 0; k < m; ++k) {
        out[k].value = res.value[3 * k];
        out[k].plus = res.value[3 * k + 1];
        out[k].minus = res.value[3 * k + 2];
        out[k].stderr_ = res.stderr_[3 * k];
        out[k].plus_stderr = res.stderr_[3 * k + 1];
        out[k].minus_stderr = res.stderr_[3 * k + 2];
        out[k].differential = diff[k].load();
    }
    return out;
}

inline global_result global_i_sx(const law& l, const antichain& alpha, const integration_config& cfg) {
    std::vector<std::vector<collection>> fam{std::vector<collection>(alpha.begin(), alpha.end())};
    return global_i_sx(l, fam, cfg).front();
}

inline void check_method(const distribution_spec& spec, const integration_config& cfg) {
    if (cfg.how == method::exact_sum && !fully_discrete(spec))
        throw config_error("exact summation needs a fully discrete spec");
}

inline global_result global_i_sx(const distribution_spec& spec, const antichain& alpha, const integration_config& cfg) {
    check_method(spec, cfg);
    if (alpha.max_index() > spec.vars.source_count())
        throw validation_error(validation_error::kind::schema, "antichain refers to a missing source");
    return global_i_sx(law::from_spec(spec), alpha, cfg);
}

/// I^sx(T2 : alpha | T1), `given` selecting T1 among the target variables.
inline global_result global_conditional(const law& l, const antichain& alpha, var_mask given,
                                        const integration_config& cfg) {
    auto res = integrate(l, cfg, 1, [&] {
        std::vector<std::vector<collection>> fam{std::vector<collection>(alpha.begin(), alpha.end())};
        auto ev = std::make_shared<isx_evaluator>(l, std::move(fam));
        return [ev, given](const point& x, std::span<double> out) {
            const auto& c = ev->conditional(0, x);
            if (!c)
                throw divergent_integral("union event has no slice weight on a set of positive probability");
            out[0] = i_sx_conditional(*c, x, given);
        };
    });
    global_result g;
    g.value = res.value[0];
    g.stderr_ = res.stderr_[0];
    return g;
}

inline global_result global_conditional(const distribution_spec& spec, const antichain& alpha,
                                        std::span<const std::string> given, const integration_config& cfg) {
    check_method(spec, cfg);
    var_mask g = 0;
    for (const auto& name : given)
        g |= var_mask{1} << spec.vars.index_of(name);
    return global_conditional(law::from_spec(spec), alpha, g, cfg);
}

// ------------------------------------------------------ mutual information

namespace detail {

inline double entropy_bits(const std::map<std::vector<int>, double>& pm) {
    double h = 0.0;
    for (const auto& [k, p] : pm)
        if (p > 0)
            h -= p * std::log2(p);
    return h;
}

inline double logdet(const Eigen::MatrixXd& m) {
    if (m.rows() == 0)
        return 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw singularity_error("covariance block is not positive definite");
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        s += 2.0 * std::log(llt.matrixL()(i, i));
    return s;
}

inline Eigen::MatrixXd sub_cov(const Eigen::MatrixXd& c, const std::vector<int>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c(idx[i], idx[j]);
    return out;
}

} // namespace detail

/// I(T : S_a) in bits. Discrete tables use entropies of the projected
/// tables, Gaussians the log-determinant formula, mixtures numerical
/// integration of the local mutual information.
inline global_result mutual_information(const distribution_spec& spec, collection a, const integration_config& cfg) {
    const auto& vars = spec.vars;
    var_mask am = vars.mask_of(a), tm = vars.target_mask();
    global_result g;
    if (const auto* tab = std::get_if<discrete_table>(&spec.law)) {
        std::map<std::vector<int>, double> pa, pt, pat;
        for (const auto& e : tab->entries) {
            std::vector<int> ka, kt;
            for (int v = 0; v < vars.variable_count(); ++v) {
                if (am >> v & 1u)
                    ka.push_back(e.symbols[static_cast<std::size_t>(v)]);
                if (tm >> v & 1u)
                    kt.push_back(e.symbols[static_cast<std::size_t>(v)]);
            }
            std::vector<int> kat = ka;
            kat.insert(kat.end(), kt.begin(), kt.end());
            pa[ka] += e.mass.value;
            pt[kt] += e.mass.value;
            pat[kat] += e.mass.value;
        }
        g.value = detail::entropy_bits(pa) + detail::entropy_bits(pt) - detail::entropy_bits(pat);
        return g;
    }
    if (const auto* gl = std::get_if<gaussian_law>(&spec.law)) {
        auto ia = vars.continuous_coords(am), it = vars.continuous_coords(tm), iat = vars.continuous_coords(am | tm);
        g.value = 0.5 *
                  (detail::logdet(detail::sub_cov(gl->cov, ia)) + detail::logdet(detail::sub_cov(gl->cov, it)) -
                   detail::logdet(detail::sub_cov(gl->cov, iat))) /
                  std::numbers::ln2;
        return g;
    }
    check_method(spec, cfg);
    auto l = law::from_spec(spec);
    auto res = integrate(l, cfg, 1, [&] {
        return [&l, a](const point& x, std::span<double> out) { out[0] = local_mi(l, a, x); };
    });
    g.value = res.value[0];
    g.stderr_ = res.stderr_[0];
    return g;
}

// ------------------------------------------------------ decomposition

struct consistency_row {
    collection a;
    double mutual_information = 0.0;
    double atom_sum = 0.0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool ok = true;
};

struct lattice_result {
    int sources = 0;
    method how = method::exact_sum;
    std::vector<antichain> antichains;
    std::vector<global_result> redundancy;
    std::vector<parthood_distribution> parthoods; // aligned with antichains
    std::vector<double> atoms;
    std::vector<consistency_row> consistency;
    bool consistent = true;
};

inline lattice_result decompose(const distribution_spec& spec, const integration_config& cfg) {
    check_method(spec, cfg);
    const int n = spec.vars.source_count();
    detail::check_source_cap(n);
    const auto& lat = redundancy_lattice::get(n);
    lattice_result out;
    out.sources = n;
    out.how = cfg.how;
    out.antichains.assign(lat.antichains().begin(), lat.antichains().end());
    std::vector<std::vector<collection>> fam;
    for (const auto& a : out.antichains) {
        fam.emplace_back(a.begin(), a.end());
        out.parthoods.push_back(parthood_distribution::from_antichain(n, a));
    }
    out.redundancy = global_i_sx(law::from_spec(spec), fam, cfg);
    std::vector<double> red;
    for (const auto& r : out.redundancy)
        red.push_back(r.value);
    out.atoms = lat.invert<double>(red);

    for (auto a : enumerate_collections(n)) {
        consistency_row row;
        row.a = a;
        auto mi = mutual_information(spec, a, cfg);
        row.mutual_information = mi.value;
        for (std::size_t k = 0; k < out.atoms.size(); ++k)
            if (out.parthoods[k](a))
                row.atom_sum += out.atoms[k];
        row.residual = std::abs(row.atom_sum - row.mutual_information);
        if (cfg.how == method::monte_carlo) {
            const auto& single = out.redundancy[lat.index_of(antichain({a}))];
            row.tolerance = 3.0 * std::hypot(single.stderr_, mi.stderr_) + 1e-12;
        } else {
            row.tolerance = cfg.tolerance;
        }
        row.ok = row.residual <= row.tolerance;
        out.consistent = out.consistent && row.ok;
        out.consistency.push_back(row);
    }
    return out;
}

} // namespace pidsx
