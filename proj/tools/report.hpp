#pragma once

// Output formats of the command-line tool. JSON and CSV carry %.17g numbers
// (they re-parse to the same doubles); tables use 12 significant digits.

#include "pidsx/check.hpp"
#include "pidsx/global.hpp"
#include "pidsx/pointwise.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace pidsx::report {

enum class format { table, json, csv };

inline std::string exact(double v) {
    if (std::isnan(v))
        return "nan";
    return fmt::format("{:.17g}", v);
}

inline std::string short_(double v) {
    if (std::isnan(v))
        return "undefined";
    return fmt::format("{:.12g}", v);
}

inline nlohmann::json maybe(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(exact(v)); }

inline std::string atom_label(const parthood_distribution& f) { return f.minimal_sets().to_string(); }

// ------------------------------------------------------------ decompose

inline std::string decompose_json(const lattice_result& r) {
    nlohmann::ordered_json doc;
    doc["schema"] = "pidsx.decompose/1";
    doc["method"] = to_string(r.how);
    doc["sources"] = r.sources;
    auto& red = doc["redundancies"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < r.antichains.size(); ++k) {
        const auto& g = r.redundancy[k];
        red.push_back({{"antichain", r.antichains[k].to_string()},
                       {"value", exact(g.value)},
                       {"stderr", exact(g.stderr_)},
                       {"plus", exact(g.plus)},
                       {"minus", exact(g.minus)},
                       {"differential", g.differential}});
    }
    auto& atoms = doc["atoms"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < r.atoms.size(); ++k)
        atoms.push_back({{"parthood", atom_label(r.parthoods[k])}, {"value", exact(r.atoms[k])}});
    auto& cons = doc["consistency"] = nlohmann::ordered_json::array();
    for (const auto& c : r.consistency)
        cons.push_back({{"collection", c.a.to_string()},
                        {"mutual_information", exact(c.mutual_information)},
                        {"atom_sum", exact(c.atom_sum)},
                        {"residual", exact(c.residual)},
                        {"tolerance", exact(c.tolerance)},
                        {"ok", c.ok}});
    doc["consistent"] = r.consistent;
    return doc.dump(2) + "\n";
}

inline std::string quoted(const std::string& s) { return "\"" + s + "\""; }

inline std::string decompose_csv(const lattice_result& r) {
    std::string out = "section,key,value,stderr,plus,minus\n";
    for (std::size_t k = 0; k < r.antichains.size(); ++k) {
        const auto& g = r.redundancy[k];
        out += fmt::format("redundancy,{},{},{},{},{}\n", quoted(r.antichains[k].to_string()), exact(g.value),
                           exact(g.stderr_), exact(g.plus), exact(g.minus));
    }
    for (std::size_t k = 0; k < r.atoms.size(); ++k)
        out += fmt::format("atom,{},{},,,\n", quoted(atom_label(r.parthoods[k])), exact(r.atoms[k]));
    for (const auto& c : r.consistency)
        out += fmt::format("mutual_information,{},{},,,\n", quoted(c.a.to_string()), exact(c.mutual_information));
    return out;
}

inline std::string decompose_table(const lattice_result& r) {
    std::string out = fmt::format("method: {}    sources: {}\n\n", to_string(r.how), r.sources);
    const bool mc = r.how == method::monte_carlo;
    out += fmt::format("{:<28} {:>20}{}\n", "antichain", "I_sx [bits]", mc ? fmt::format(" {:>20}", "stderr") : "");
    for (std::size_t k = 0; k < r.antichains.size(); ++k)
        out += fmt::format("{:<28} {:>20}{}\n", r.antichains[k].to_string(), short_(r.redundancy[k].value),
                           mc ? fmt::format(" {:>20}", short_(r.redundancy[k].stderr_)) : "");
    out += fmt::format("\n{:<28} {:>20}\n", "atom (minimal sets)", "Pi [bits]");
    for (std::size_t k = 0; k < r.atoms.size(); ++k)
        out += fmt::format("{:<28} {:>20}\n", atom_label(r.parthoods[k]), short_(r.atoms[k]));
    out += fmt::format("\n{:<14} {:>20} {:>20} {:>12} {}\n", "collection", "I(T:S_a)", "atom sum", "residual", "ok");
    for (const auto& c : r.consistency)
        out += fmt::format("{:<14} {:>20} {:>20} {:>12.3g} {}\n", c.a.to_string(), short_(c.mutual_information),
                           short_(c.atom_sum), c.residual, c.ok ? "yes" : "NO");
    return out;
}

// ------------------------------------------------------------ pointwise

struct pointwise_report {
    std::string antichain;
    std::string realization;
    pointwise_result result;
    std::string note;
};

inline std::string pointwise_json(const pointwise_report& p) {
    nlohmann::ordered_json doc;
    doc["schema"] = "pidsx.pointwise/1";
    doc["antichain"] = p.antichain;
    doc["realization"] = p.realization;
    doc["i_sx"] = exact(p.result.value);
    doc["i_plus"] = maybe(p.result.plus);
    doc["i_minus"] = maybe(p.result.minus);
    doc["regime"] = to_string(p.result.kind);
    doc["differential"] = p.result.differential;
    if (!p.note.empty())
        doc["note"] = p.note;
    return doc.dump(2) + "\n";
}

inline std::string pointwise_csv(const pointwise_report& p) {
    return fmt::format("antichain,realization,i_sx,i_plus,i_minus,regime,differential\n{},{},{},{},{},{},{}\n",
                       quoted(p.antichain), quoted(p.realization), exact(p.result.value), exact(p.result.plus),
                       exact(p.result.minus), to_string(p.result.kind), p.result.differential ? "true" : "false");
}

inline std::string pointwise_table(const pointwise_report& p) {
    std::string out;
    if (!p.note.empty())
        out += "note: " + p.note + "\n";
    out += fmt::format("antichain    {}\nrealization  {}\n", p.antichain, p.realization);
    out += fmt::format("i_sx         {}\ni_plus       {}\ni_minus      {}\nregime       {}{}\n", short_(p.result.value),
                       short_(p.result.plus), short_(p.result.minus), to_string(p.result.kind),
                       p.result.differential ? " (differential split)" : "");
    return out;
}

// ------------------------------------------------------------ check

inline bool all_pass(const std::vector<property_check>& v) {
    for (const auto& c : v)
        if (!c.pass)
            return false;
    return true;
}

inline std::string check_json(const std::string& suite, const std::vector<property_check>& v) {
    nlohmann::ordered_json doc;
    doc["schema"] = "pidsx.check/1";
    doc["suite"] = suite;
    doc["pass"] = all_pass(v);
    auto& props = doc["properties"] = nlohmann::ordered_json::array();
    for (const auto& c : v)
        props.push_back({{"name", c.name},
                         {"max_residual", exact(c.max_residual)},
                         {"tolerance", exact(c.tolerance)},
                         {"cases", c.cases},
                         {"pass", c.pass}});
    return doc.dump(2) + "\n";
}

inline std::string check_csv(const std::vector<property_check>& v) {
    std::string out = "property,max_residual,tolerance,cases,pass\n";
    for (const auto& c : v)
        out += fmt::format("{},{},{},{},{}\n", c.name, exact(c.max_residual), exact(c.tolerance), c.cases,
                           c.pass ? "true" : "false");
    return out;
}

inline std::string check_table(const std::string& suite, const std::vector<property_check>& v) {
    std::string out = fmt::format("suite: {}\n{:<34} {:>14} {:>10} {:>7}  {}\n", suite, "property", "max residual",
                                  "tolerance", "cases", "result");
    for (const auto& c : v)
        out += fmt::format("{:<34} {:>14.6g} {:>10.3g} {:>7}  {}\n", c.name, c.max_residual, c.tolerance, c.cases,
                           c.pass ? "pass" : "FAIL");
    out += all_pass(v) ? "all properties pass\n" : "property violation\n";
    return out;
}

} // namespace pidsx::report
