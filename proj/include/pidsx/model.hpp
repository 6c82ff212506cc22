#pragma once

// Joint laws of (S_1..S_n, T) as weighted mixtures of discrete atoms and
// Gaussian components. Densities are taken against counting measure on
// discrete coordinates times Lebesgue measure on continuous ones.

#include "pidsx/error.hpp"
#include "pidsx/gaussian.hpp"
#include "pidsx/lattice.hpp"
#include "pidsx/scalar.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace pidsx {

/// Bitmask over variables: bits [0, n) are sources, bits [n, n + n_T) targets.
using var_mask = std::uint32_t;

inline constexpr int max_variables = 12;

enum class variable_kind { discrete, continuous };

struct variable_schema {
    std::string name;
    variable_kind kind = variable_kind::discrete;
    std::vector<std::string> alphabet;
    int dimension = 1;

    bool discrete() const noexcept { return kind == variable_kind::discrete; }
    int width() const noexcept { return discrete() ? 1 : dimension; }

    int symbol_index(const std::string& label) const {
        for (std::size_t i = 0; i < alphabet.size(); ++i)
            if (alphabet[i] == label)
                return static_cast<int>(i);
        throw validation_error(validation_error::kind::schema,
                               "label '" + label + "' not in alphabet of variable '" + name + "'");
    }

    friend bool operator==(const variable_schema&, const variable_schema&) = default;
};

/// A realization of every variable packed into one coordinate vector: a
/// discrete variable takes one slot holding its symbol index, a continuous
/// variable of dimension d takes d slots.
using point = std::vector<double>;

class schema {
public:
    schema() = default;
    schema(std::vector<variable_schema> sources, std::vector<variable_schema> targets)
        : n_sources_(static_cast<int>(sources.size())) {
        vars_ = std::move(sources);
        vars_.insert(vars_.end(), targets.begin(), targets.end());
        if (vars_.empty())
            throw validation_error(validation_error::kind::schema, "schema has no variables");
        if (static_cast<int>(vars_.size()) > max_variables)
            throw validation_error(validation_error::kind::schema, "too many variables");
        int off = 0, coff = 0;
        double radix = 1.0;
        for (std::size_t v = 0; v < vars_.size(); ++v) {
            const auto& x = vars_[v];
            if (x.name.empty())
                throw validation_error(validation_error::kind::schema, "variable without a name");
            for (std::size_t u = 0; u < v; ++u)
                if (vars_[u].name == x.name)
                    throw validation_error(validation_error::kind::schema, "duplicate variable name '" + x.name + "'");
            if (x.discrete()) {
                if (x.alphabet.empty())
                    throw validation_error(validation_error::kind::schema, "empty alphabet for '" + x.name + "'");
                for (std::size_t i = 0; i < x.alphabet.size(); ++i)
                    for (std::size_t j = 0; j < i; ++j)
                        if (x.alphabet[i] == x.alphabet[j])
                            throw validation_error(validation_error::kind::schema,
                                                   "duplicate label '" + x.alphabet[i] + "' in '" + x.name + "'");
                strides_.push_back(static_cast<std::uint64_t>(radix));
                radix *= static_cast<double>(x.alphabet.size());
                if (radix > 9.0e15)
                    throw validation_error(validation_error::kind::schema, "joint alphabet too large");
            } else {
                if (x.dimension < 1)
                    throw validation_error(validation_error::kind::schema, "dimension of '" + x.name + "' must be >= 1");
                strides_.push_back(0);
            }
            offsets_.push_back(off);
            coffsets_.push_back(x.discrete() ? -1 : coff);
            off += x.width();
            if (!x.discrete())
                coff += x.dimension;
        }
        point_size_ = off;
        continuous_dim_ = coff;
    }

    int source_count() const noexcept { return n_sources_; }
    int target_count() const noexcept { return variable_count() - n_sources_; }
    int variable_count() const noexcept { return static_cast<int>(vars_.size()); }
    const variable_schema& variable(int v) const { return vars_.at(static_cast<std::size_t>(v)); }
    std::span<const variable_schema> variables() const noexcept { return vars_; }
    std::span<const variable_schema> sources() const noexcept { return {vars_.data(), static_cast<std::size_t>(n_sources_)}; }
    std::span<const variable_schema> targets() const noexcept {
        return {vars_.data() + n_sources_, vars_.size() - static_cast<std::size_t>(n_sources_)};
    }

    int offset(int v) const { return offsets_.at(static_cast<std::size_t>(v)); }
    int point_size() const noexcept { return point_size_; }
    int continuous_dim() const noexcept { return continuous_dim_; }
    bool continuous(int v) const { return !variable(v).discrete(); }
    std::uint64_t stride(int v) const { return strides_[static_cast<std::size_t>(v)]; }

    var_mask all_mask() const noexcept { return (var_mask{1} << variable_count()) - 1; }
    var_mask source_mask() const noexcept { return (var_mask{1} << n_sources_) - 1; }
    var_mask target_mask() const noexcept { return all_mask() & ~source_mask(); }
    var_mask target_bit(int k) const noexcept { return var_mask{1} << (n_sources_ + k); }

    /// Variables of a source collection (1-based source indices).
    var_mask mask_of(collection c) const {
        if (c.max_index() > n_sources_)
            throw error("collection " + c.to_string() + " refers to a source beyond n=" + std::to_string(n_sources_));
        return c.mask();
    }

    /// Number of continuous coordinates pinned by the variables in `m`.
    int codimension(var_mask m) const noexcept {
        int c = 0;
        for (var_mask x = m; x != 0; x &= x - 1) {
            const auto& v = vars_[static_cast<std::size_t>(std::countr_zero(x))];
            if (!v.discrete())
                c += v.dimension;
        }
        return c;
    }

    bool has_continuous(var_mask m) const noexcept { return codimension(m) > 0; }

    /// Indices into the Gaussian coordinate vector for the continuous variables in `m`.
    std::vector<int> continuous_coords(var_mask m) const {
        std::vector<int> out;
        for (int v = 0; v < variable_count(); ++v)
            if (((m >> v) & 1u) && continuous(v))
                for (int d = 0; d < vars_[static_cast<std::size_t>(v)].dimension; ++d)
                    out.push_back(coffsets_[static_cast<std::size_t>(v)] + d);
        return out;
    }

    /// Positions in a `point` of the continuous coordinates of `m`, in the
    /// same order as continuous_coords(m).
    std::vector<int> continuous_slots(var_mask m) const {
        std::vector<int> out;
        for (int v = 0; v < variable_count(); ++v)
            if (((m >> v) & 1u) && continuous(v))
                for (int d = 0; d < vars_[static_cast<std::size_t>(v)].dimension; ++d)
                    out.push_back(offsets_[static_cast<std::size_t>(v)] + d);
        return out;
    }

    /// Position of the k-th continuous coordinate within a point.
    int slot_of_continuous(int k) const {
        for (int v = 0; v < variable_count(); ++v)
            if (continuous(v) && k >= coffsets_[static_cast<std::size_t>(v)] &&
                k < coffsets_[static_cast<std::size_t>(v)] + vars_[static_cast<std::size_t>(v)].dimension)
                return offsets_[static_cast<std::size_t>(v)] + (k - coffsets_[static_cast<std::size_t>(v)]);
        throw error("continuous coordinate out of range");
    }

    int symbol(const point& x, int v) const { return static_cast<int>(x[static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v)])]); }

    /// Mixed-radix key of the discrete variables of `m` at point x.
    std::uint64_t discrete_key(var_mask m, const point& x) const {
        std::uint64_t k = 0;
        for (var_mask y = m; y != 0; y &= y - 1) {
            int v = std::countr_zero(y);
            if (vars_[static_cast<std::size_t>(v)].discrete())
                k += strides_[static_cast<std::size_t>(v)] * static_cast<std::uint64_t>(symbol(x, v));
        }
        return k;
    }

    template <typename Symbols>
    std::uint64_t discrete_key_of_symbols(var_mask m, const Symbols& symbols) const {
        std::uint64_t k = 0;
        for (var_mask y = m; y != 0; y &= y - 1) {
            int v = std::countr_zero(y);
            if (vars_[static_cast<std::size_t>(v)].discrete())
                k += strides_[static_cast<std::size_t>(v)] * static_cast<std::uint64_t>(symbols[static_cast<std::size_t>(v)]);
        }
        return k;
    }

    /// Checks that a point has the right size and valid symbols.
    void check_point(const point& x) const {
        if (static_cast<int>(x.size()) != point_size_)
            throw validation_error(validation_error::kind::dimension_mismatch,
                                   "realization has " + std::to_string(x.size()) + " coordinates, expected " +
                                       std::to_string(point_size_));
        for (int v = 0; v < variable_count(); ++v) {
            if (!vars_[static_cast<std::size_t>(v)].discrete())
                continue;
            double s = x[static_cast<std::size_t>(offsets_[static_cast<std::size_t>(v)])];
            if (s != std::floor(s) || s < 0 || s >= static_cast<double>(vars_[static_cast<std::size_t>(v)].alphabet.size()))
                throw validation_error(validation_error::kind::schema,
                                       "invalid symbol for variable '" + vars_[static_cast<std::size_t>(v)].name + "'");
        }
    }

    int index_of(const std::string& name) const {
        for (int v = 0; v < variable_count(); ++v)
            if (vars_[static_cast<std::size_t>(v)].name == name)
                return v;
        throw validation_error(validation_error::kind::unknown_coordinate, "unknown variable '" + name + "'");
    }

    friend bool operator==(const schema& a, const schema& b) {
        return a.n_sources_ == b.n_sources_ && a.vars_ == b.vars_;
    }

private:
    int n_sources_ = 0;
    std::vector<variable_schema> vars_;
    std::vector<int> offsets_;
    std::vector<int> coffsets_;
    std::vector<std::uint64_t> strides_;
    int point_size_ = 0;
    int continuous_dim_ = 0;
};

/// A probability mass or mixture weight; `exact` is kept when the document
/// gave a rational.
struct probability {
    double value = 0.0;
    std::optional<rational> exact;

    probability() = default;
    probability(double v) : value(v) {}
    probability(const rational& r) : value(r.convert_to<double>()), exact(r) {}

    template <typename S>
    S as() const {
        if constexpr (is_exact_v<S>)
            return exact ? *exact : rational(value);
        else
            return static_cast<S>(value);
    }
};

struct discrete_table {
    struct entry {
        std::vector<int> symbols; // one per variable
        probability mass;
    };
    std::vector<entry> entries;
};

struct gaussian_law {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

struct mixture_component {
    probability weight;
    std::vector<int> discrete; // symbols of the discrete variables, in variable order
    gaussian_law gauss;        // over all continuous coordinates
};

struct mixture_law {
    std::vector<mixture_component> components;
};

using law_spec = std::variant<discrete_table, gaussian_law, mixture_law>;

struct distribution_spec {
    schema vars;
    law_spec law;
};

inline constexpr double normalization_tolerance = 1e-12;

namespace detail {

inline void check_normalized(double total, bool exact_ok, const char* what) {
    if (!exact_ok && std::abs(total - 1.0) > normalization_tolerance)
        throw validation_error(validation_error::kind::normalization,
                               std::string(what) + " sum to " + std::to_string(total) + ", expected 1");
}

inline void check_gaussian(const schema& vars, const gaussian_law& g) {
    const int d = vars.continuous_dim();
    if (g.mean.size() != d || g.cov.rows() != d || g.cov.cols() != d)
        throw validation_error(validation_error::kind::dimension_mismatch,
                               "gaussian has dimension " + std::to_string(g.mean.size()) + ", schema needs " +
                                   std::to_string(d));
    gaussian tmp(g.mean, g.cov);
    if (!tmp.positive_semidefinite())
        throw validation_error(validation_error::kind::non_psd_covariance,
                               "covariance is not symmetric positive semidefinite (min eigenvalue " +
                                   std::to_string(tmp.min_eigenvalue()) + ")");
}

} // namespace detail

/// Full structural validation; throws validation_error.
inline void validate(const distribution_spec& spec) {
    const auto& vars = spec.vars;
    std::visit(
        [&](const auto& law) {
            using L = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<L, discrete_table>) {
                if (vars.continuous_dim() != 0)
                    throw validation_error(validation_error::kind::dimension_mismatch,
                                           "discrete table used with continuous variables");
                double total = 0.0;
                rational exact_total = 0;
                bool all_exact = true;
                for (const auto& e : law.entries) {
                    if (static_cast<int>(e.symbols.size()) != vars.variable_count())
                        throw validation_error(validation_error::kind::dimension_mismatch,
                                               "outcome tuple length does not match schema");
                    for (int v = 0; v < vars.variable_count(); ++v)
                        if (e.symbols[static_cast<std::size_t>(v)] < 0 ||
                            e.symbols[static_cast<std::size_t>(v)] >= static_cast<int>(vars.variable(v).alphabet.size()))
                            throw validation_error(validation_error::kind::schema, "symbol out of alphabet");
                    if (e.mass.value < 0 || (e.mass.exact && *e.mass.exact < 0))
                        throw validation_error(validation_error::kind::normalization, "negative probability mass");
                    total += e.mass.value;
                    if (e.mass.exact)
                        exact_total += *e.mass.exact;
                    else
                        all_exact = false;
                }
                if (all_exact && exact_total != 1)
                    throw validation_error(validation_error::kind::normalization,
                                           "masses sum to " + exact_total.str() + ", expected 1");
                detail::check_normalized(total, all_exact, "masses");
            } else if constexpr (std::is_same_v<L, gaussian_law>) {
                for (int v = 0; v < vars.variable_count(); ++v)
                    if (!vars.continuous(v))
                        throw validation_error(validation_error::kind::dimension_mismatch,
                                               "gaussian law requires all variables continuous");
                detail::check_gaussian(vars, law);
            } else {
                if (law.components.empty())
                    throw validation_error(validation_error::kind::normalization, "mixture without components");
                int ndisc = 0;
                for (int v = 0; v < vars.variable_count(); ++v)
                    ndisc += vars.continuous(v) ? 0 : 1;
                double total = 0.0;
                rational exact_total = 0;
                bool all_exact = true;
                for (const auto& c : law.components) {
                    if (static_cast<int>(c.discrete.size()) != ndisc)
                        throw validation_error(validation_error::kind::dimension_mismatch,
                                               "mixture discrete part has wrong length");
                    int k = 0;
                    for (int v = 0; v < vars.variable_count(); ++v)
                        if (!vars.continuous(v)) {
                            int s = c.discrete[static_cast<std::size_t>(k++)];
                            if (s < 0 || s >= static_cast<int>(vars.variable(v).alphabet.size()))
                                throw validation_error(validation_error::kind::schema, "symbol out of alphabet");
                        }
                    detail::check_gaussian(vars, c.gauss);
                    if (c.weight.value < 0)
                        throw validation_error(validation_error::kind::normalization, "negative mixture weight");
                    total += c.weight.value;
                    if (c.weight.exact)
                        exact_total += *c.weight.exact;
                    else
                        all_exact = false;
                }
                if (all_exact && exact_total != 1)
                    throw validation_error(validation_error::kind::normalization,
                                           "weights sum to " + exact_total.str() + ", expected 1");
                detail::check_normalized(total, all_exact, "weights");
            }
        },
        spec.law);
}

inline bool fully_discrete(const distribution_spec& spec) { return spec.vars.continuous_dim() == 0; }

/// Weighted mixture representation shared by all three law kinds. Weights
/// need not sum to one: perturbed laws p + eps*q live here too. Marginal
/// tables are built lazily per variable mask and cached; copies share the
/// cache, which is safe because the law itself never changes.
template <typename S>
class basic_law {
public:
    struct component {
        S weight;
        std::vector<int> symbols; // per variable, -1 for continuous variables
        std::shared_ptr<const gaussian> gauss;
    };

    basic_law() = default;

    basic_law(schema vars, std::vector<component> comps)
        : impl_(std::make_shared<impl>(std::move(vars), std::move(comps))) {}

    static basic_law from_spec(const distribution_spec& spec) {
        const auto& vars = spec.vars;
        std::vector<component> comps;
        std::visit(
            [&](const auto& law) {
                using L = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<L, discrete_table>) {
                    auto empty = std::make_shared<const gaussian>();
                    for (const auto& e : law.entries)
                        comps.push_back({e.mass.template as<S>(), e.symbols, empty});
                } else if constexpr (std::is_same_v<L, gaussian_law>) {
                    if constexpr (is_exact_v<S>)
                        throw error("exact arithmetic is only available for fully discrete laws");
                    else
                        comps.push_back({S(1), std::vector<int>(static_cast<std::size_t>(vars.variable_count()), -1),
                                         std::make_shared<const gaussian>(law.mean, law.cov)});
                } else {
                    if constexpr (is_exact_v<S>) {
                        if (vars.continuous_dim() != 0)
                            throw error("exact arithmetic is only available for fully discrete laws");
                    }
                    for (const auto& c : law.components) {
                        std::vector<int> sym(static_cast<std::size_t>(vars.variable_count()), -1);
                        std::size_t k = 0;
                        for (int v = 0; v < vars.variable_count(); ++v)
                            if (!vars.continuous(v))
                                sym[static_cast<std::size_t>(v)] = c.discrete[k++];
                        comps.push_back({c.weight.template as<S>(), std::move(sym),
                                         std::make_shared<const gaussian>(c.gauss.mean, c.gauss.cov)});
                    }
                }
            },
            spec.law);
        return basic_law(vars, std::move(comps));
    }

    const schema& vars() const { return impl_->vars; }
    std::span<const component> components() const { return impl_->comps; }

    S total_mass() const {
        S t(0);
        for (const auto& c : impl_->comps)
            t += c.weight;
        return t;
    }

    /// Density of the variables in `m` at the matching coordinates of x.
    /// m == 0 gives the total mass.
    S marginal_density(var_mask m, const point& x) const {
        const auto& tab = impl_->table(m);
        auto it = tab.entries.find(impl_->vars.discrete_key(m, x));
        if (it == tab.entries.end())
            return S(0);
        S acc(0);
        if (tab.gaussians.empty()) {
            for (const auto& e : it->second)
                acc += e.weight;
            return acc;
        }
        if constexpr (is_exact_v<S>) {
            throw error("exact arithmetic is only available for fully discrete laws");
        } else {
            double buf[64];
            const std::size_t d = tab.slots.size();
            std::vector<double> heap;
            double* xs = buf;
            if (d > 64) {
                heap.resize(d);
                xs = heap.data();
            }
            for (std::size_t i = 0; i < d; ++i)
                xs[i] = x[static_cast<std::size_t>(tab.slots[i])];
            std::span<const double> sub(xs, d);
            for (const auto& e : it->second)
                acc += e.weight * tab.gaussians[static_cast<std::size_t>(e.gid)]->density(sub);
            return acc;
        }
    }

    S density(const point& x) const { return marginal_density(impl_->vars.all_mask(), x); }

    /// p + eps * q on the same schema.
    basic_law perturbed(const basic_law& q, const S& eps) const {
        if (!(q.vars() == vars()))
            throw error("perturbation direction has a different schema");
        std::vector<component> comps(impl_->comps.begin(), impl_->comps.end());
        for (const auto& c : q.components())
            comps.push_back({eps * c.weight, c.symbols, c.gauss});
        return basic_law(vars(), std::move(comps));
    }

    /// Weighted combination sum_i coef_i * law_i.
    static basic_law combine(std::span<const basic_law> laws, std::span<const S> coefs) {
        std::vector<component> comps;
        for (std::size_t i = 0; i < laws.size(); ++i)
            for (const auto& c : laws[i].components())
                comps.push_back({coefs[i] * c.weight, c.symbols, c.gauss});
        return basic_law(laws[0].vars(), std::move(comps));
    }

private:
    struct marginal_table {
        struct entry {
            S weight;
            int gid;
        };
        std::vector<int> slots;
        std::vector<std::shared_ptr<const gaussian>> gaussians; // empty when m has no continuous coordinate
        std::unordered_map<std::uint64_t, std::vector<entry>> entries;
    };

    struct impl {
        impl(schema v, std::vector<component> c)
            : vars(std::move(v)), comps(std::move(c)),
              flags(std::make_unique<std::once_flag[]>(std::size_t{1} << vars.variable_count())),
              tables(std::size_t{1} << vars.variable_count()) {
            for (const auto& k : comps)
                if (static_cast<int>(k.symbols.size()) != vars.variable_count() || !k.gauss ||
                    k.gauss->dim() != vars.continuous_dim())
                    throw validation_error(validation_error::kind::dimension_mismatch,
                                           "mixture component does not match schema");
        }

        const marginal_table& table(var_mask m) const {
            std::call_once(flags[m], [&] { tables[m] = build(m); });
            return *tables[m];
        }

        std::unique_ptr<marginal_table> build(var_mask m) const {
            auto t = std::make_unique<marginal_table>();
            auto coords = vars.continuous_coords(m);
            t->slots = vars.continuous_slots(m);
            std::vector<const gaussian*> seen;
            for (const auto& c : comps) {
                int gid = 0;
                if (!coords.empty()) {
                    auto pos = std::find(seen.begin(), seen.end(), c.gauss.get());
                    if (pos == seen.end()) {
                        seen.push_back(c.gauss.get());
                        t->gaussians.push_back(std::make_shared<const gaussian>(c.gauss->marginal(coords)));
                        gid = static_cast<int>(seen.size() - 1);
                    } else {
                        gid = static_cast<int>(pos - seen.begin());
                    }
                }
                auto& bucket = t->entries[vars.discrete_key_of_symbols(m, c.symbols)];
                auto e = std::find_if(bucket.begin(), bucket.end(), [&](const auto& x) { return x.gid == gid; });
                if (e == bucket.end())
                    bucket.push_back({c.weight, gid});
                else
                    e->weight += c.weight;
            }
            return t;
        }

        schema vars;
        std::vector<component> comps;
        std::unique_ptr<std::once_flag[]> flags;
        mutable std::vector<std::unique_ptr<marginal_table>> tables;
    };

    std::shared_ptr<const impl> impl_;
};

using law = basic_law<double>;
using exact_law = basic_law<rational>;

/// Density of the full joint law at x (Radon-Nikodym derivative against
/// the product reference measure).
inline double density(const distribution_spec& spec, const point& x) {
    spec.vars.check_point(x);
    return law::from_spec(spec).density(x);
}

/// Exact marginalization onto the named variables. Sources and targets keep
/// their roles.
inline distribution_spec marginal(const distribution_spec& spec, std::span<const std::string> names) {
    if (names.empty())
        throw validation_error(validation_error::kind::unknown_coordinate, "marginal needs at least one variable");
    const auto& vars = spec.vars;
    var_mask keep = 0;
    for (const auto& n : names)
        keep |= var_mask{1} << vars.index_of(n);
    std::vector<variable_schema> src, tgt;
    std::vector<int> kept;
    for (int v = 0; v < vars.variable_count(); ++v)
        if ((keep >> v) & 1u) {
            kept.push_back(v);
            (v < vars.source_count() ? src : tgt).push_back(vars.variable(v));
        }
    schema out_vars(src, tgt);
    auto coords = vars.continuous_coords(keep);
    auto cut = [&](const gaussian_law& g) {
        gaussian full(g.mean, g.cov);
        auto m = full.marginal(coords);
        return gaussian_law{m.mean(), m.cov()};
    };
    distribution_spec out{out_vars, {}};
    std::visit(
        [&](const auto& law) {
            using L = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<L, discrete_table>) {
                discrete_table t;
                std::map<std::vector<int>, std::size_t> where;
                for (const auto& e : law.entries) {
                    std::vector<int> sym;
                    for (int v : kept)
                        sym.push_back(e.symbols[static_cast<std::size_t>(v)]);
                    auto [it, fresh] = where.emplace(sym, t.entries.size());
                    if (fresh) {
                        t.entries.push_back({sym, e.mass});
                    } else {
                        auto& m = t.entries[it->second].mass;
                        m.value += e.mass.value;
                        if (m.exact && e.mass.exact)
                            *m.exact += *e.mass.exact;
                        else
                            m.exact.reset();
                    }
                }
                out.law = std::move(t);
            } else if constexpr (std::is_same_v<L, gaussian_law>) {
                out.law = cut(law);
            } else {
                mixture_law mx;
                for (const auto& c : law.components) {
                    mixture_component k;
                    k.weight = c.weight;
                    std::size_t d = 0;
                    for (int v = 0; v < vars.variable_count(); ++v)
                        if (!vars.continuous(v)) {
                            if ((keep >> v) & 1u)
                                k.discrete.push_back(c.discrete[d]);
                            ++d;
                        }
                    k.gauss = cut(c.gauss);
                    mx.components.push_back(std::move(k));
                }
                out.law = std::move(mx);
            }
        },
        spec.law);
    return out;
}

} // namespace pidsx
