#include "catch_amalgamated.hpp"

#include "support.hpp"

#include "pidsx/conditioning.hpp"
#include "pidsx/pointwise.hpp"

#include <algorithm>

using namespace pidsx;
using namespace pidsx::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<collection> family(std::initializer_list<std::initializer_list<int>> sets) {
    std::vector<collection> out;
    for (auto s : sets)
        out.push_back(collection::of(s));
    return out;
}

} // namespace

TEST_CASE("union probability on the XOR gate") {
    auto xr = spec_file("xor.json");
    union_event ev{parse_antichain("{1}{2}"), {0, 0, 0}};
    CHECK_THAT(union_probability(xr, ev), WithinAbs(0.75, 1e-15));
    auto cond = conditional(xr, ev);
    CHECK(cond.kind() == regime::positive_mass);
    CHECK(cond.codimension() == 0);
    CHECK_THAT(cond.target_density({0, 0, 0}), WithinAbs(1.0 / 3.0, 1e-15));
    CHECK_THAT(cond.target_density({0, 0, 1}), WithinAbs(2.0 / 3.0, 1e-15));
    auto cls = classifier_pushforward(xr, ev);
    CHECK_FALSE(cls.surrogate);
    CHECK_THAT(cls.one, WithinAbs(0.75, 1e-15));
    CHECK_THAT(cls.zero, WithinAbs(0.25, 1e-15));
}

TEST_CASE("exact conditioning matches direct enumeration") {
    std::mt19937_64 rng(21);
    for (int s = 0; s < 40; ++s) {
        auto spec = random_discrete(rng);
        auto el = exact_law::from_spec(spec);
        const int n = spec.vars.source_count();
        for (const auto& alpha : enumerate_antichains(n))
            for (const auto& x : all_points(spec.vars)) {
                rational in_r = 0;
                std::map<int, rational> by_t;
                for (const auto& y : all_points(spec.vars)) {
                    bool hit = false;
                    for (auto c : alpha) {
                        bool all = true;
                        for (int i : c.indices())
                            all = all && y[static_cast<std::size_t>(i - 1)] == x[static_cast<std::size_t>(i - 1)];
                        hit = hit || all;
                    }
                    if (hit) {
                        in_r += el.density(y);
                        by_t[static_cast<int>(y[static_cast<std::size_t>(n)])] += el.density(y);
                    }
                }
                CHECK(union_probability(el, alpha.collections(), x) == in_r);
                if (in_r == 0) {
                    CHECK_THROWS_AS(condition(el, alpha, x), all_slice_weights_zero);
                    continue;
                }
                auto cond = condition(el, alpha, x);
                point q = x;
                q[static_cast<std::size_t>(n)] = x[static_cast<std::size_t>(n)];
                CHECK(cond.target_density(q) == by_t[static_cast<int>(x[static_cast<std::size_t>(n)])] / in_r);
            }
    }
}

TEST_CASE("conditioning is invariant to order and to redundant supersets") {
    std::mt19937_64 rng(22);
    for (int s = 0; s < 20; ++s) {
        gaussian_options o;
        o.min_sources = o.max_sources = 3;
        discrete_options d;
        d.min_sources = 3;
        auto spec = s % 2 ? random_gaussian(rng, o) : random_discrete(rng, d);
        auto l = law::from_spec(spec);
        std::vector<point> pts;
        if (fully_discrete(spec))
            pts = all_points(spec.vars);
        else
            pts = {{0.1, -0.3, 0.2, 0.4}, {1.0, 0.5, -0.5, -1.0}};
        for (const auto& x : pts) {
            auto base = family({{1}, {2, 3}});
            auto perm = family({{2, 3}, {1}});
            auto sup = family({{2, 3}, {1, 2}, {1}, {1, 2, 3}});
            double a, b, c;
            try {
                a = condition(l, std::span<const collection>(base), x).target_density(x);
            } catch (const all_slice_weights_zero&) {
                continue;
            }
            b = condition(l, std::span<const collection>(perm), x).target_density(x);
            c = condition(l, std::span<const collection>(sup), x).target_density(x);
            CHECK(a == b);
            CHECK(a == c);
        }
    }
}

TEST_CASE("union mass grows with the family") {
    std::mt19937_64 rng(23);
    for (int s = 0; s < 50; ++s) {
        auto spec = random_discrete(rng);
        auto el = exact_law::from_spec(spec);
        auto colls = enumerate_collections(spec.vars.source_count());
        for (const auto& x : all_points(spec.vars))
            for (const auto& alpha : enumerate_antichains(spec.vars.source_count())) {
                auto base = union_probability(el, alpha.collections(), x);
                for (auto b : colls) {
                    std::vector<collection> ext(alpha.begin(), alpha.end());
                    ext.push_back(b);
                    CHECK(union_probability(el, ext, x) >= base);
                }
            }
    }
}

TEST_CASE("dominated slice on a Gaussian") {
    auto g3 = spec_file("gauss3.json");
    auto l = law::from_spec(g3);
    auto single = condition(l, parse_antichain("{1}"), {0, 0, 0});
    CHECK(single.kind() == regime::dominated_slice);
    CHECK(single.codimension() == 1);
    CHECK_THAT(single.raw_mass(), WithinAbs(0.398942280401, 1e-10));
    auto cls = classifier_pushforward(g3, union_event{parse_antichain("{1}"), {0, 0, 0}});
    CHECK(cls.surrogate);

    auto both = condition(l, parse_antichain("{1}{2}"), {0, 0, 0});
    CHECK(both.kind() == regime::dominated_slice);
    CHECK(both.dominant().size() == 2);
    CHECK_THAT(both.target_density({0, 0, 0}), WithinAbs(0.460659, 1e-6));
}

TEST_CASE("conditional target density is normalized") {
    std::mt19937_64 rng(24);
    for (int s = 0; s < 6; ++s) {
        gaussian_options o;
        o.min_sources = o.max_sources = 2;
        auto spec = s == 5 ? random_mixture(rng) : random_gaussian(rng, o);
        auto l = law::from_spec(spec);
        point x{0.2, -0.1, 0.0};
        if (s == 5)
            x[0] = 1;
        for (const auto& alpha : enumerate_antichains(2)) {
            auto cond = condition(l, alpha, x);
            const double h = 0.01;
            double total = 0;
            for (double t = -15; t <= 15; t += h) {
                x[2] = t;
                total += cond.target_density(x) * h;
            }
            CHECK_THAT(total, WithinAbs(1.0, 1e-9));
        }
    }
}

TEST_CASE("zero slice weights are reported") {
    auto spec = parse_spec(R"({"sources":[{"name":"A","kind":"discrete","alphabet":["0","1","2"]}],
        "target":{"name":"T","kind":"discrete","alphabet":["0","1"]},
        "law":{"type":"discrete","table":[["0","0","1/2"],["1","1","1/2"]]}})");
    auto l = law::from_spec(spec);
    CHECK_THROWS_AS(condition(l, parse_antichain("{1}"), {2, 0}), all_slice_weights_zero);
    CHECK(i_sx(l, parse_antichain("{1}"), {2, 0}).value == inf);
    CHECK(i_sx(l, parse_antichain("{1}"), {0, 1}).value == -inf);
}
