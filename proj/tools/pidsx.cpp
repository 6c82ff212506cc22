#include "report.hpp"

#include "pidsx/check.hpp"
#include "pidsx/global.hpp"
#include "pidsx/pointwise.hpp"
#include "pidsx/spec_io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

namespace {

using namespace pidsx;

enum exit_code { ok = 0, validation = 1, numeric = 2, violation = 3, usage = 64 };

struct options {
    std::string spec;
    std::string format = "table";
    std::string method;
    int grid_points = 64;
    std::size_t mc_samples = 100000;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    std::string antichain;
    std::string at;
    std::string suite;
};

integration_config make_config(const distribution_spec& spec, const options& o) {
    auto cfg = default_config(spec.vars);
    if (!o.method.empty()) {
        static const std::map<std::string, method> names{
            {"exact", method::exact_sum}, {"grid", method::tensor_grid}, {"mc", method::monte_carlo}};
        cfg.how = names.at(o.method);
        if (cfg.how != method::exact_sum && cfg.tolerance < 1e-6)
            cfg.tolerance = 1e-6;
    }
    cfg.grid_points = o.grid_points;
    cfg.samples = o.mc_samples;
    cfg.seed = o.seed;
    if (o.tolerance > 0)
        cfg.tolerance = o.tolerance;
    return cfg;
}

report::format fmt_of(const options& o) {
    if (o.format == "json")
        return report::format::json;
    if (o.format == "csv")
        return report::format::csv;
    return report::format::table;
}

int run_decompose(const options& o) {
    auto spec = load_spec(o.spec);
    auto r = decompose(spec, make_config(spec, o));
    switch (fmt_of(o)) {
    case report::format::json: std::cout << report::decompose_json(r); break;
    case report::format::csv: std::cout << report::decompose_csv(r); break;
    default: std::cout << report::decompose_table(r);
    }
    if (!r.consistent) {
        std::cerr << "error: atoms do not re-sum to the mutual informations within tolerance\n";
        return numeric;
    }
    return ok;
}

int run_pointwise(const options& o) {
    auto spec = load_spec(o.spec);
    bool reduced = false;
    auto alpha = parse_antichain(o.antichain, &reduced);
    if (alpha.max_index() > spec.vars.source_count())
        throw validation_error(validation_error::kind::schema,
                               "antichain refers to source " + std::to_string(alpha.max_index()) + " but the spec has " +
                                   std::to_string(spec.vars.source_count()));
    auto x = parse_realization(spec.vars, o.at);
    report::pointwise_report p;
    p.antichain = alpha.to_string();
    p.realization = format_realization(spec.vars, x);
    if (reduced)
        p.note = "antichain normalized to " + alpha.to_string() + " (superset removal)";
    p.result = i_sx(spec, alpha, x);
    switch (fmt_of(o)) {
    case report::format::json: std::cout << report::pointwise_json(p); break;
    case report::format::csv: std::cout << report::pointwise_csv(p); break;
    default: std::cout << report::pointwise_table(p);
    }
    return ok;
}

int run_check(const options& o) {
    auto spec = load_spec(o.spec);
    std::vector<property_check> res;
    if (o.suite == "axioms")
        res = check_axioms(spec, o.seed);
    else if (o.suite == "derivatives")
        res = check_derivatives(spec, make_config(spec, o), o.seed);
    else
        res = check_oracles(spec, o.seed);
    switch (fmt_of(o)) {
    case report::format::json: std::cout << report::check_json(o.suite, res); break;
    case report::format::csv: std::cout << report::check_csv(res); break;
    default: std::cout << report::check_table(o.suite, res);
    }
    return report::all_pass(res) ? ok : violation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shared-exclusion partial information decomposition"};
    app.require_subcommand(1);
    options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("spec", o.spec, "distribution spec (JSON)")->required();
        sub->add_option("--format", o.format, "output format")
            ->check(CLI::IsMember({"table", "json", "csv"}));
    };
    auto integration = [&](CLI::App* sub) {
        sub->add_option("--method", o.method, "integration method")->check(CLI::IsMember({"exact", "grid", "mc"}));
        sub->add_option("--grid-points", o.grid_points, "grid points per continuous coordinate");
        sub->add_option("--mc-samples", o.mc_samples, "Monte Carlo sample count");
        sub->add_option("--seed", o.seed, "random seed");
        sub->add_option("--tolerance", o.tolerance, "consistency tolerance");
    };

    auto* dec = app.add_subcommand("decompose", "redundancies for all antichains and the atom decomposition");
    common(dec);
    integration(dec);

    auto* pw = app.add_subcommand("pointwise", "local shared information at one realization");
    common(pw);
    pw->add_option("--at", o.at, "realization, comma separated (sources then target)")->required();
    pw->add_option("--antichain", o.antichain, "antichain such as \"{1}{2}\"")->required();

    auto* chk = app.add_subcommand("check", "run a property suite");
    common(chk);
    integration(chk);
    chk->add_option("--suite", o.suite, "suite to run")
        ->required()
        ->check(CLI::IsMember({"axioms", "derivatives", "oracle"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (dec->parsed())
            return run_decompose(o);
        if (pw->parsed())
            return run_pointwise(o);
        return run_check(o);
    } catch (const syntax_error& e) {
        std::cerr << "SyntaxError: " << e.what() << "\n";
        return validation;
    } catch (const validation_error& e) {
        std::cerr << "ValidationError: " << e.what() << "\n";
        return validation;
    } catch (const config_error& e) {
        std::cerr << "ConfigError: " << e.what() << "\n";
        return usage;
    } catch (const divergent_integral& e) {
        std::cerr << "DivergentIntegral: " << e.what() << "\n";
        return numeric;
    } catch (const singularity_error& e) {
        std::cerr << "SingularityError: " << e.what() << "\n";
        return numeric;
    } catch (const undefined_point& e) {
        std::cerr << "UndefinedPoint: " << e.what() << "\n";
        return numeric;
    } catch (const cap_exceeded& e) {
        std::cerr << "CapExceeded: " << e.what() << "\n";
        return validation;
    } catch (const pidsx::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return numeric;
    }
}
