#include "catch_amalgamated.hpp"

#include "support.hpp"

#include "pidsx/global.hpp"

using namespace pidsx;
using namespace pidsx::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

integration_config with(method m) {
    integration_config c;
    c.how = m;
    if (m != method::exact_sum)
        c.tolerance = 1e-6;
    return c;
}

double atom(const lattice_result& r, const char* minimal) {
    for (std::size_t k = 0; k < r.atoms.size(); ++k)
        if (r.parthoods[k].minimal_sets() == parse_antichain(minimal))
            return r.atoms[k];
    FAIL("atom not found");
    return 0;
}

} // namespace

TEST_CASE("copy gate decomposition") {
    auto r = decompose(spec_file("copy.json"), with(method::exact_sum));
    CHECK(r.consistent);
    CHECK_THAT(atom(r, "{1}{2}"), WithinAbs(std::log2(4.0 / 3.0), 1e-12));
    CHECK_THAT(atom(r, "{1}"), WithinAbs(1 - std::log2(4.0 / 3.0), 1e-12));
    CHECK_THAT(atom(r, "{2}"), WithinAbs(-std::log2(4.0 / 3.0), 1e-12));
    CHECK_THAT(atom(r, "{1,2}"), WithinAbs(std::log2(4.0 / 3.0), 1e-12));
}

TEST_CASE("XOR gate redundancy and parts") {
    auto g = global_i_sx(spec_file("xor.json"), parse_antichain("{1}{2}"), with(method::exact_sum));
    CHECK_THAT(g.value, WithinAbs(1 - std::log2(3.0), 1e-12));
    CHECK_THAT(g.plus - g.minus, WithinAbs(g.value, 1e-12));
    CHECK_FALSE(g.differential);
}

TEST_CASE("independent target carries no information") {
    auto spec = parse_spec(R"({"sources":[{"name":"A","kind":"discrete","alphabet":["0","1"]},
                                           {"name":"B","kind":"discrete","alphabet":["0","1"]}],
        "target":{"name":"T","kind":"discrete","alphabet":["0","1"]},
        "law":{"type":"discrete","table":[["0","0","0","1/8"],["0","0","1","1/8"],["0","1","0","1/16"],
            ["0","1","1","1/16"],["1","0","0","3/16"],["1","0","1","3/16"],["1","1","0","1/8"],["1","1","1","1/8"]]}})");
    auto r = decompose(spec, with(method::exact_sum));
    for (const auto& g : r.redundancy)
        CHECK(std::abs(g.value) < 1e-15);
}

TEST_CASE("mutual information matches independent formulas") {
    auto g3 = spec_file("gauss3.json");
    auto r = decompose(g3, default_config(g3.vars));
    CHECK(r.consistent);
    const auto& g = std::get<gaussian_law>(g3.law);
    double rho = g.cov(0, 2) / std::sqrt(g.cov(0, 0) * g.cov(2, 2));
    for (const auto& row : r.consistency)
        if (row.a == collection::of({1}))
            CHECK_THAT(row.mutual_information, WithinAbs(-0.5 * std::log2(1 - rho * rho), 1e-12));
    for (std::size_t k = 0; k < r.antichains.size(); ++k)
        if (r.antichains[k].size() == 1) {
            auto mi = mutual_information(g3, *r.antichains[k].begin(), default_config(g3.vars));
            CHECK_THAT(r.redundancy[k].value, WithinAbs(mi.value, 1e-8));
        }
}

TEST_CASE("random discrete decompositions are consistent") {
    std::mt19937_64 rng(41);
    for (int s = 0; s < 20; ++s) {
        auto r = decompose(random_discrete(rng), with(method::exact_sum));
        CHECK(r.consistent);
        for (const auto& row : r.consistency)
            CHECK(row.residual < 1e-12);
    }
}

TEST_CASE("mixture decomposition by grid and Monte Carlo") {
    auto mixed = spec_file("mixed.json");
    auto grid = decompose(mixed, with(method::tensor_grid));
    CHECK(grid.consistent);
    auto mc_cfg = with(method::monte_carlo);
    mc_cfg.seed = 5;
    auto mc = decompose(mixed, mc_cfg);
    CHECK(mc.consistent);
    for (std::size_t k = 0; k < grid.redundancy.size(); ++k)
        CHECK(std::abs(grid.redundancy[k].value - mc.redundancy[k].value) < 4 * mc.redundancy[k].stderr_);
}

TEST_CASE("conditional chain rule for composite targets") {
    auto spec = spec_file("copy_pair.json");
    auto cfg = with(method::exact_sum);
    std::vector<std::string> first{"S1", "S2", spec.vars.variable(2).name};
    auto m = marginal(spec, first);
    std::vector<std::string> given{spec.vars.variable(2).name};
    for (const auto& alpha : enumerate_antichains(2)) {
        double whole = global_i_sx(spec, alpha, cfg).value;
        double part = global_i_sx(m, alpha, cfg).value;
        double rest = global_conditional(spec, alpha, given, cfg).value;
        CHECK_THAT(whole, WithinAbs(part + rest, 1e-12));
    }
}

TEST_CASE("Monte Carlo standard error shrinks as one over root N") {
    auto g3 = spec_file("gauss3.json");
    auto alpha = parse_antichain("{1}{2}");
    auto cfg = with(method::monte_carlo);
    cfg.samples = 40000;
    double small = global_i_sx(g3, alpha, cfg).stderr_;
    cfg.samples = 160000;
    double large = global_i_sx(g3, alpha, cfg).stderr_;
    CHECK_THAT(small / large, WithinRel(2.0, 0.15));
}

TEST_CASE("results are deterministic across runs and thread counts") {
    auto g3 = spec_file("gauss3.json");
    auto cfg = with(method::monte_carlo);
    cfg.samples = 20000;
    cfg.seed = 9;
    auto alpha = parse_antichain("{1}");
    setenv("PIDSX_THREADS", "1", 1);
    auto a = global_i_sx(g3, alpha, cfg);
    setenv("PIDSX_THREADS", "3", 1);
    auto b = global_i_sx(g3, alpha, cfg);
    unsetenv("PIDSX_THREADS");
    CHECK(a.value == b.value);
    CHECK(a.stderr_ == b.stderr_);
    cfg.seed = 10;
    CHECK(global_i_sx(g3, alpha, cfg).value != a.value);
}

TEST_CASE("invalid configurations are rejected") {
    auto g3 = spec_file("gauss3.json");
    auto alpha = parse_antichain("{1}");
    CHECK_THROWS_AS(global_i_sx(g3, alpha, with(method::exact_sum)), config_error);
    auto grid = with(method::tensor_grid);
    grid.grid_points = 8;
    CHECK_THROWS_AS(global_i_sx(g3, alpha, grid), config_error);
    grid.grid_points = 32;
    grid.truncation = 2;
    CHECK_THROWS_AS(global_i_sx(g3, alpha, grid), config_error);
    auto mc = with(method::monte_carlo);
    mc.samples = 100;
    CHECK_THROWS_AS(global_i_sx(g3, alpha, mc), config_error);
    CHECK_THROWS_AS(global_i_sx(spec_file("copy.json"), parse_antichain("{3}"), with(method::exact_sum)), error);
}
