#pragma once

// Source-index collections, antichains of collections, parthood distributions
// and the linear system tying redundancies to lattice atoms.

#include "pidsx/error.hpp"

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pidsx {

inline constexpr int max_sources = 5;

/// A non-empty set of 1-based source indices, stored as a bitmask
/// (bit i-1 set <=> source i present).
class collection {
public:
    constexpr collection() = default;
    constexpr explicit collection(std::uint32_t mask) : mask_(mask) {}

    static collection of(std::initializer_list<int> indices) {
        std::uint32_t m = 0;
        for (int i : indices) {
            if (i < 1 || i > 32)
                throw error("source index out of range: " + std::to_string(i));
            m |= 1u << (i - 1);
        }
        return collection(m);
    }

    constexpr std::uint32_t mask() const noexcept { return mask_; }
    constexpr int size() const noexcept { return std::popcount(mask_); }
    constexpr bool empty() const noexcept { return mask_ == 0; }
    constexpr bool contains(int index) const noexcept { return (mask_ >> (index - 1)) & 1u; }
    constexpr bool subset_of(collection o) const noexcept { return (mask_ & ~o.mask_) == 0; }
    constexpr int max_index() const noexcept { return 32 - std::countl_zero(mask_); }

    std::vector<int> indices() const {
        std::vector<int> out;
        for (std::uint32_t m = mask_; m != 0; m &= m - 1)
            out.push_back(std::countr_zero(m) + 1);
        return out;
    }

    friend constexpr bool operator==(collection a, collection b) noexcept { return a.mask_ == b.mask_; }

    /// Canonical order: by size, then lexicographic on the sorted index lists.
    friend std::strong_ordering operator<=>(collection a, collection b) noexcept {
        if (auto c = a.size() <=> b.size(); c != 0)
            return c;
        for (std::uint32_t x = a.mask_, y = b.mask_; x != 0 && y != 0; x &= x - 1, y &= y - 1) {
            int i = std::countr_zero(x), j = std::countr_zero(y);
            if (i != j)
                return i <=> j;
        }
        return std::strong_ordering::equal;
    }

    std::string to_string() const {
        std::string s = "{";
        bool first = true;
        for (int i : indices()) {
            if (!first)
                s += ',';
            s += std::to_string(i);
            first = false;
        }
        return s + "}";
    }

private:
    std::uint32_t mask_ = 0;
};

/// A non-empty set of pairwise incomparable collections in canonical order.
class antichain {
public:
    antichain() = default;

    /// Validating constructor: rejects empty input, empty collections,
    /// duplicates and comparable pairs.
    explicit antichain(std::vector<collection> cs) : cs_(std::move(cs)) {
        if (cs_.empty())
            throw error("antichain must contain at least one collection");
        std::sort(cs_.begin(), cs_.end());
        for (std::size_t i = 0; i < cs_.size(); ++i) {
            if (cs_[i].empty())
                throw error("antichain collections must be non-empty");
            for (std::size_t j = 0; j < i; ++j)
                if (cs_[j].subset_of(cs_[i]) || cs_[i].subset_of(cs_[j]))
                    throw error("collections " + cs_[j].to_string() + " and " + cs_[i].to_string() +
                                " are comparable");
        }
    }

    antichain(std::initializer_list<collection> cs) : antichain(std::vector<collection>(cs)) {}

    /// Reduces an arbitrary family to its antichain of minimal collections
    /// (superset removal). `removed` is set when anything was dropped.
    static antichain reduce(std::span<const collection> family, bool* removed = nullptr) {
        std::vector<collection> keep;
        bool dropped = false;
        for (std::size_t i = 0; i < family.size(); ++i) {
            if (family[i].empty())
                throw error("antichain collections must be non-empty");
            bool minimal = true;
            for (std::size_t j = 0; j < family.size() && minimal; ++j) {
                if (i == j)
                    continue;
                // strict subset, or an equal duplicate appearing earlier
                if (family[j].subset_of(family[i]) && (family[j] != family[i] || j < i))
                    minimal = false;
            }
            if (minimal)
                keep.push_back(family[i]);
            else
                dropped = true;
        }
        if (removed)
            *removed = dropped;
        return antichain(std::move(keep));
    }

    std::span<const collection> collections() const noexcept { return cs_; }
    std::size_t size() const noexcept { return cs_.size(); }
    const collection& operator[](std::size_t i) const { return cs_[i]; }
    auto begin() const noexcept { return cs_.begin(); }
    auto end() const noexcept { return cs_.end(); }

    int max_index() const noexcept {
        int m = 0;
        for (auto c : cs_)
            m = std::max(m, c.max_index());
        return m;
    }

    /// Union of all collections as a source bitmask.
    std::uint32_t support_mask() const noexcept {
        std::uint32_t m = 0;
        for (auto c : cs_)
            m |= c.mask();
        return m;
    }

    friend bool operator==(const antichain&, const antichain&) = default;

    friend std::strong_ordering operator<=>(const antichain& a, const antichain& b) {
        if (auto c = a.cs_.size() <=> b.cs_.size(); c != 0)
            return c;
        for (std::size_t i = 0; i < a.cs_.size(); ++i)
            if (auto c = a.cs_[i] <=> b.cs_[i]; c != 0)
                return c;
        return std::strong_ordering::equal;
    }

    std::string to_string() const {
        std::string s;
        for (auto c : cs_)
            s += c.to_string();
        return s;
    }

private:
    std::vector<collection> cs_;
};

/// Parses `group+` with `group := '{' int (',' int)* '}'`, whitespace ignored.
/// Returns the raw family in input order.
inline std::vector<collection> parse_collection_family(std::string_view text) {
    std::vector<collection> out;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' || text[i] == '\r'))
            ++i;
    };
    auto fail = [&](const std::string& what) -> void {
        throw syntax_error("column " + std::to_string(i + 1), what);
    };
    skip_ws();
    if (i == text.size())
        fail("empty antichain expression");
    while (i < text.size()) {
        if (text[i] != '{')
            fail("expected '{'");
        ++i;
        std::uint32_t mask = 0;
        for (;;) {
            skip_ws();
            std::size_t start = i;
            int value = 0;
            while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
                value = value * 10 + (text[i] - '0');
                if (value > 32)
                    fail("source index too large");
                ++i;
            }
            if (i == start)
                fail("expected source index");
            if (value < 1)
                fail("source indices start at 1");
            mask |= 1u << (value - 1);
            skip_ws();
            if (i < text.size() && text[i] == ',') {
                ++i;
                continue;
            }
            if (i < text.size() && text[i] == '}') {
                ++i;
                break;
            }
            fail("expected ',' or '}'");
        }
        out.emplace_back(mask);
        skip_ws();
    }
    return out;
}

inline antichain parse_antichain(std::string_view text, bool* reduced = nullptr) {
    auto family = parse_collection_family(text);
    return antichain::reduce(family, reduced);
}

/// Monotone 0/1 labelling of the subsets of {1..n}; bit `a` of `bits` is f(a)
/// for the subset with bitmask a.
class parthood_distribution {
public:
    parthood_distribution() = default;
    parthood_distribution(int n, std::uint64_t bits) : n_(n), bits_(bits) {}

    /// The up-set generated by an antichain: f(a) = 1 iff a contains some member.
    static parthood_distribution from_antichain(int n, const antichain& alpha) {
        std::uint64_t bits = 0;
        for (std::uint32_t a = 0; a < (1u << n); ++a)
            for (auto b : alpha)
                if ((b.mask() & ~a) == 0) {
                    bits |= std::uint64_t{1} << a;
                    break;
                }
        return {n, bits};
    }

    int sources() const noexcept { return n_; }
    std::uint64_t bits() const noexcept { return bits_; }
    bool operator()(std::uint32_t subset) const noexcept { return (bits_ >> subset) & 1u; }
    bool operator()(collection c) const noexcept { return (*this)(c.mask()); }

    /// Checks the three defining conditions (empty set excluded, full set
    /// included, monotone).
    bool valid() const noexcept {
        const std::uint32_t full = (1u << n_) - 1;
        if ((*this)(0u) || !(*this)(full))
            return false;
        for (std::uint32_t a = 0; a <= full; ++a) {
            if (!(*this)(a))
                continue;
            for (int i = 0; i < n_; ++i)
                if (!(*this)(a | (1u << i)))
                    return false;
        }
        return true;
    }

    antichain minimal_sets() const {
        std::vector<collection> mins;
        const std::uint32_t full = (1u << n_) - 1;
        for (std::uint32_t a = 1; a <= full; ++a) {
            if (!(*this)(a))
                continue;
            bool minimal = true;
            for (std::uint32_t m = a; m != 0 && minimal; m &= m - 1)
                if ((*this)(a & ~(m & -m)))
                    minimal = false;
            if (minimal)
                mins.emplace_back(a);
        }
        return antichain(std::move(mins));
    }

    friend bool operator==(const parthood_distribution&, const parthood_distribution&) = default;
    friend auto operator<=>(const parthood_distribution&, const parthood_distribution&) = default;

private:
    int n_ = 0;
    std::uint64_t bits_ = 0;
};

namespace detail {

inline void check_source_cap(int n) {
    if (n < 1 || n > max_sources)
        throw cap_exceeded("source count " + std::to_string(n) + " outside [1," + std::to_string(max_sources) + "]");
}

inline void enumerate_rec(const std::vector<collection>& all, std::size_t from, std::vector<collection>& cur,
                          std::vector<antichain>& out) {
    for (std::size_t i = from; i < all.size(); ++i) {
        bool ok = true;
        for (auto c : cur)
            if (c.subset_of(all[i]) || all[i].subset_of(c)) {
                ok = false;
                break;
            }
        if (!ok)
            continue;
        cur.push_back(all[i]);
        out.emplace_back(cur);
        enumerate_rec(all, i + 1, cur, out);
        cur.pop_back();
    }
}

} // namespace detail

/// All collections of {1..n} in canonical order.
inline std::vector<collection> enumerate_collections(int n) {
    detail::check_source_cap(n);
    std::vector<collection> all;
    for (std::uint32_t m = 1; m < (1u << n); ++m)
        all.emplace_back(m);
    std::sort(all.begin(), all.end());
    return all;
}

inline std::vector<antichain> enumerate_antichains(int n) {
    auto all = enumerate_collections(n);
    std::vector<antichain> out;
    std::vector<collection> cur;
    detail::enumerate_rec(all, 0, cur, out);
    std::sort(out.begin(), out.end());
    return out;
}

/// Parthood distributions of n sources, index-aligned with
/// enumerate_antichains(n) through the minimal-sets map.
inline std::vector<parthood_distribution> parthood_distributions(int n) {
    std::vector<parthood_distribution> out;
    for (const auto& a : enumerate_antichains(n))
        out.push_back(parthood_distribution::from_antichain(n, a));
    return out;
}

/// Order of the redundancy lattice: `lower` lies below `upper` when every
/// collection of `upper` contains some collection of `lower`. Equivalently
/// f_lower(a) = 1 for all a in upper, i.e. the atom of `lower` contributes
/// to the redundancy of `upper`.
inline bool precedes_or_equal(const antichain& lower, const antichain& upper) {
    for (auto a : upper) {
        bool covered = false;
        for (auto b : lower)
            if (b.subset_of(a)) {
                covered = true;
                break;
            }
        if (!covered)
            return false;
    }
    return true;
}

/// Cached lattice structure for one source count. Immutable once built.
class redundancy_lattice {
public:
    explicit redundancy_lattice(int n) : n_(n), antichains_(enumerate_antichains(n)) {
        const std::size_t N = antichains_.size();
        words_ = (N + 63) / 64;
        below_.assign(N * words_, 0);
        std::vector<std::size_t> down_size(N, 0);
        for (std::size_t u = 0; u < N; ++u)
            for (std::size_t l = 0; l < N; ++l)
                if (l != u && precedes_or_equal(antichains_[l], antichains_[u])) {
                    below_[u * words_ + l / 64] |= std::uint64_t{1} << (l % 64);
                    ++down_size[u];
                }
        order_.resize(N);
        for (std::size_t i = 0; i < N; ++i)
            order_[i] = i;
        // Strictly smaller elements have strictly smaller down-sets.
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t a, std::size_t b) { return down_size[a] < down_size[b]; });
        for (std::size_t i = 0; i < N; ++i) {
            index_.emplace(antichains_[i], i);
            parthoods_.push_back(parthood_distribution::from_antichain(n, antichains_[i]));
        }
    }

    /// Shared instance per n; construction for n = 5 takes a moment.
    static const redundancy_lattice& get(int n) {
        detail::check_source_cap(n);
        static std::mutex mu;
        static std::map<int, std::unique_ptr<redundancy_lattice>> cache;
        std::lock_guard lock(mu);
        auto& slot = cache[n];
        if (!slot)
            slot = std::make_unique<redundancy_lattice>(n);
        return *slot;
    }

    int sources() const noexcept { return n_; }
    std::size_t size() const noexcept { return antichains_.size(); }
    const std::vector<antichain>& antichains() const noexcept { return antichains_; }
    const std::vector<parthood_distribution>& parthoods() const noexcept { return parthoods_; }

    std::size_t index_of(const antichain& a) const {
        auto it = index_.find(a);
        if (it == index_.end())
            throw incomplete_input("antichain " + a.to_string() + " is not part of the lattice for n=" +
                                   std::to_string(n_));
        return it->second;
    }

    bool strictly_below(std::size_t lower, std::size_t upper) const noexcept {
        return (below_[upper * words_ + lower / 64] >> (lower % 64)) & 1u;
    }

    /// Solves I(alpha) = sum_{beta <= alpha} Pi(beta) for Pi. The system is
    /// unitriangular with 0/1 entries in a linear extension of the order, so
    /// forward substitution is exact for exact scalars.
    template <typename S>
    std::vector<S> invert(std::span<const S> redundancies) const {
        check_size(redundancies.size());
        std::vector<S> atoms(size());
        for (std::size_t u : order_) {
            S acc = redundancies[u];
            for_each_below(u, [&](std::size_t l) { acc -= atoms[l]; });
            atoms[u] = acc;
        }
        return atoms;
    }

    template <typename S>
    std::vector<S> recompose(std::span<const S> atoms) const {
        check_size(atoms.size());
        std::vector<S> red(size());
        for (std::size_t u = 0; u < size(); ++u) {
            S acc = atoms[u];
            for_each_below(u, [&](std::size_t l) { acc += atoms[l]; });
            red[u] = acc;
        }
        return red;
    }

private:
    void check_size(std::size_t got) const {
        if (got != size())
            throw incomplete_input("expected " + std::to_string(size()) + " values, got " + std::to_string(got));
    }

    template <typename F>
    void for_each_below(std::size_t u, F&& f) const {
        const std::uint64_t* row = &below_[u * words_];
        for (std::size_t w = 0; w < words_; ++w)
            for (std::uint64_t bits = row[w]; bits != 0; bits &= bits - 1)
                f(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
    }

    int n_;
    std::vector<antichain> antichains_;
    std::vector<parthood_distribution> parthoods_;
    std::map<antichain, std::size_t> index_;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> below_;
    std::vector<std::size_t> order_;
};

/// Atoms Pi(f) from redundancies over every antichain of n sources.
template <typename S>
std::map<parthood_distribution, S> invert_redundancy(const std::map<antichain, S>& redundancies, int n) {
    const auto& lat = redundancy_lattice::get(n);
    std::vector<S> red(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
        auto it = redundancies.find(lat.antichains()[i]);
        if (it == redundancies.end())
            throw incomplete_input("missing redundancy for antichain " + lat.antichains()[i].to_string());
        red[i] = it->second;
    }
    auto atoms = lat.template invert<S>(red);
    std::map<parthood_distribution, S> out;
    for (std::size_t i = 0; i < lat.size(); ++i)
        out.emplace(lat.parthoods()[i], atoms[i]);
    return out;
}

template <typename S>
std::map<antichain, S> recompose_redundancy(const std::map<parthood_distribution, S>& atoms, int n) {
    const auto& lat = redundancy_lattice::get(n);
    std::vector<S> a(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
        auto it = atoms.find(lat.parthoods()[i]);
        if (it == atoms.end())
            throw incomplete_input("missing atom for " + lat.antichains()[i].to_string());
        a[i] = it->second;
    }
    auto red = lat.template recompose<S>(a);
    std::map<antichain, S> out;
    for (std::size_t i = 0; i < lat.size(); ++i)
        out.emplace(lat.antichains()[i], red[i]);
    return out;
}

} // namespace pidsx
