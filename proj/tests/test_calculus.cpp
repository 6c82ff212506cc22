#include "catch_amalgamated.hpp"

#include "support.hpp"

#include "pidsx/calculus.hpp"
#include "pidsx/check.hpp"
#include "pidsx/oracles.hpp"

using namespace pidsx;
using namespace pidsx::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

law reweighted(const law& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<law::component> comps;
    for (const auto& c : p.components())
        comps.push_back({u(rng), c.symbols, c.gauss});
    return law(p.vars(), std::move(comps));
}

law shifted(const law& p, double dm, double sc) {
    std::vector<law::component> comps;
    for (const auto& c : p.components()) {
        Eigen::VectorXd m = c.gauss->mean().array() + dm;
        comps.push_back({c.weight, c.symbols, std::make_shared<const gaussian>(m, c.gauss->cov() * sc)});
    }
    return law(p.vars(), std::move(comps));
}

std::vector<point> support(const distribution_spec& spec) {
    std::vector<point> out;
    for (const auto& e : std::get<discrete_table>(spec.law).entries)
        out.emplace_back(e.symbols.begin(), e.symbols.end());
    return out;
}

} // namespace

TEST_CASE("scaling direction gives minus one and plus one") {
    std::mt19937_64 rng(51);
    for (int s = 0; s < 20; ++s) {
        auto spec = s % 2 ? random_discrete(rng) : random_gaussian(rng);
        auto p = law::from_spec(spec);
        std::vector<point> pts = fully_discrete(spec) ? support(spec) : std::vector<point>{{0.1, 0.2, -0.3}};
        if (!fully_discrete(spec))
            pts[0].resize(static_cast<std::size_t>(spec.vars.point_size()), 0.25);
        for (const auto& alpha : enumerate_antichains(spec.vars.source_count()))
            for (const auto& x : pts) {
                CHECK(directional_derivative_local(p, p, alpha, x) == -1.0);
                CHECK(second_directional_derivative_local(p, p, p, alpha, x) == 1.0);
            }
    }
}

TEST_CASE("first derivative matches finite differences") {
    std::mt19937_64 rng(52);
    for (int s = 0; s < 10; ++s) {
        discrete_options o;
        o.rational = false;
        auto spec = random_discrete(rng, o);
        auto p = law::from_spec(spec);
        auto q = reweighted(p, rng);
        for (const auto& alpha : enumerate_antichains(spec.vars.source_count()))
            for (const auto& x : support(spec)) {
                auto fam = alpha.collections();
                auto fd = finite_difference([&](double e) { return i_sx_nats(p.perturbed(q, e), fam, x); }, 1e-3);
                CHECK(relative_error(directional_derivative_local(p, q, alpha, x), fd.value) < 1e-6);
            }
    }
    auto g3 = law::from_spec(spec_file("gauss3.json"));
    auto q = shifted(g3, 0.3, 1.2);
    for (const auto& alpha : enumerate_antichains(2)) {
        point x{0.3, -0.4, 0.2};
        auto fam = alpha.collections();
        auto fd = finite_difference([&](double e) { return i_sx_nats(g3.perturbed(q, e), fam, x); }, 1e-3);
        CHECK(relative_error(directional_derivative_local(g3, q, alpha, x), fd.value) < 1e-6);
    }
}

TEST_CASE("derivative is linear in the direction") {
    std::mt19937_64 rng(53);
    discrete_options o;
    o.rational = false;
    auto spec = random_discrete(rng, o);
    auto p = law::from_spec(spec);
    auto q = reweighted(p, rng), r = reweighted(p, rng);
    std::array<law, 2> ls{q, r};
    std::array<double, 2> w{2.0, -0.5};
    auto qr = law::combine(ls, w);
    for (const auto& alpha : enumerate_antichains(spec.vars.source_count()))
        for (const auto& x : support(spec)) {
            double lhs = directional_derivative_local(p, qr, alpha, x);
            double rhs = 2.0 * directional_derivative_local(p, q, alpha, x) -
                         0.5 * directional_derivative_local(p, r, alpha, x);
            CHECK_THAT(lhs, WithinAbs(rhs, 1e-12));
        }
}

TEST_CASE("second derivative matches mixed differences and is symmetric") {
    std::mt19937_64 rng(54);
    for (int s = 0; s < 6; ++s) {
        auto spec = s < 4 ? random_discrete(rng) : random_gaussian(rng);
        auto p = law::from_spec(spec);
        auto q = fully_discrete(spec) ? reweighted(p, rng) : shifted(p, 0.2, 1.1);
        auto r = fully_discrete(spec) ? reweighted(p, rng) : shifted(p, -0.3, 0.9);
        std::vector<point> pts = fully_discrete(spec) ? support(spec) : std::vector<point>{};
        if (!fully_discrete(spec))
            pts.push_back(point(static_cast<std::size_t>(spec.vars.point_size()), 0.2));
        for (const auto& alpha : enumerate_antichains(spec.vars.source_count()))
            for (const auto& x : pts) {
                auto fam = alpha.collections();
                double a = second_directional_derivative_local(p, q, r, alpha, x);
                CHECK(a == second_directional_derivative_local(p, r, q, alpha, x));
                auto fd = mixed_second_difference(
                    [&](double e1, double e2) {
                        std::array<law, 3> ls{p, q, r};
                        std::array<double, 3> w{1.0, e1, e2};
                        return i_sx_nats(law::combine(ls, w), fam, x);
                    },
                    1e-3);
                CHECK(relative_error(a, fd.value) < 1e-4);
            }
    }
}

TEST_CASE("functional derivative of the global value") {
    std::mt19937_64 rng(55);
    discrete_options o;
    o.rational = false;
    auto spec = random_discrete(rng, o);
    auto p = law::from_spec(spec);
    auto q = reweighted(p, rng);
    integration_config cfg;
    for (const auto& alpha : enumerate_antichains(spec.vars.source_count())) {
        double closed = functional_derivative_global(p, q, alpha, cfg).value;
        auto fd = finite_difference([&](double e) { return global_i_sx_nats(p.perturbed(q, e), alpha, cfg).value; },
                                    1e-3);
        CHECK(relative_error(closed, fd.value) < 1e-6);
    }
}

TEST_CASE("directions must share the schema and support") {
    auto copy = spec_file("copy.json");
    CHECK_THROWS_AS(check_direction(copy, spec_file("xor.json")), validation_error);
    CHECK_THROWS_AS(check_direction(copy, spec_file("gauss3.json")), validation_error);
    CHECK_NOTHROW(check_direction(copy, copy));
}

TEST_CASE("source swap exchanges derivatives") {
    auto g3 = spec_file("gauss3.json");
    // Swap the two sources by reordering the covariance.
    auto g = std::get<gaussian_law>(g3.law);
    Eigen::PermutationMatrix<3> perm;
    perm.indices() << 1, 0, 2;
    gaussian_law swapped{perm * g.mean, perm * g.cov * perm.transpose()};
    distribution_spec s2{g3.vars, swapped};
    auto p = law::from_spec(g3), p2 = law::from_spec(s2);
    auto q = shifted(p, 0.2, 1.1), q2 = shifted(p2, 0.2, 1.1);
    point x{0.3, -0.1, 0.4}, x2{-0.1, 0.3, 0.4};
    CHECK_THAT(directional_derivative_local(p, q, parse_antichain("{1}"), x),
               WithinAbs(directional_derivative_local(p2, q2, parse_antichain("{2}"), x2), 1e-12));
    CHECK_THAT(directional_derivative_local(p, q, parse_antichain("{1}{2}"), x),
               WithinAbs(directional_derivative_local(p2, q2, parse_antichain("{1}{2}"), x2), 1e-12));
}
