#pragma once

// JSON spec documents:
//
//   { "sources": [ {"name": "S1", "kind": "discrete", "alphabet": [0, 1]}, ... ],
//     "target":  {"name": "T", "kind": "continuous", "dimension": 1}   (or an array for composite targets),
//     "law": {"type": "discrete", "table": [[s1, s2, t, "1/4"], ...]}
//          | {"type": "gaussian", "mean": [...], "cov": [[...], ...]}
//          | {"type": "mixture", "components": [{"weight": w, "discrete": [...], "mean": [...], "cov": [[...]]}]} }
//
// Masses and weights are numbers or strings; strings ("1/4", "0.25") are read
// as exact rationals.

#include "pidsx/error.hpp"
#include "pidsx/model.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace pidsx {

namespace detail {

using json = nlohmann::json;

[[noreturn]] inline void bad(const std::string& path, const std::string& what) { throw syntax_error(path, what); }

inline const json& need(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object())
        bad(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        bad(path, std::string("missing key '") + key + "'");
    return *it;
}

inline std::string label_of(const json& j, const std::string& path) {
    if (j.is_string())
        return j.get<std::string>();
    if (j.is_number_integer() || j.is_number_unsigned() || j.is_boolean())
        return j.dump();
    if (j.is_number_float())
        return j.dump();
    bad(path, "expected a label (string or number)");
}

inline rational parse_rational(const std::string& text, const std::string& path) {
    auto trim = [](std::string s) {
        auto a = s.find_first_not_of(" \t");
        auto b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    auto decimal = [&](const std::string& s) -> rational {
        std::string t = trim(s);
        if (t.empty())
            bad(path, "empty number");
        bool neg = false;
        std::size_t i = 0;
        if (t[0] == '-' || t[0] == '+') {
            neg = t[0] == '-';
            ++i;
        }
        boost::multiprecision::cpp_int num = 0, den = 1;
        bool dot = false, digits = false;
        for (; i < t.size(); ++i) {
            char c = t[i];
            if (c == '.' && !dot) {
                dot = true;
            } else if (c >= '0' && c <= '9') {
                num = num * 10 + (c - '0');
                if (dot)
                    den *= 10;
                digits = true;
            } else {
                bad(path, "malformed number '" + t + "'");
            }
        }
        if (!digits)
            bad(path, "malformed number '" + t + "'");
        rational r(num, den);
        return neg ? rational(-r) : r;
    };
    auto slash = text.find('/');
    if (slash == std::string::npos)
        return decimal(text);
    rational n = decimal(text.substr(0, slash));
    rational d = decimal(text.substr(slash + 1));
    if (d == 0)
        bad(path, "zero denominator");
    return n / d;
}

inline probability parse_probability(const json& j, const std::string& path) {
    if (j.is_number())
        return probability(j.get<double>());
    if (j.is_string())
        return probability(parse_rational(j.get<std::string>(), path));
    bad(path, "expected a probability (number or rational string)");
}

inline variable_schema parse_variable(const json& j, const std::string& path) {
    variable_schema v;
    const auto& name = need(j, "name", path);
    if (!name.is_string())
        bad(path + ".name", "expected a string");
    v.name = name.get<std::string>();
    const auto& kind = need(j, "kind", path);
    std::string k = kind.is_string() ? kind.get<std::string>() : "";
    if (k == "discrete") {
        v.kind = variable_kind::discrete;
        const auto& a = need(j, "alphabet", path);
        if (!a.is_array())
            bad(path + ".alphabet", "expected an array");
        for (std::size_t i = 0; i < a.size(); ++i)
            v.alphabet.push_back(label_of(a[i], path + ".alphabet[" + std::to_string(i) + "]"));
    } else if (k == "continuous") {
        v.kind = variable_kind::continuous;
        auto it = j.find("dimension");
        if (it != j.end()) {
            if (!it->is_number_integer())
                bad(path + ".dimension", "expected an integer");
            v.dimension = it->get<int>();
        }
    } else {
        bad(path + ".kind", "expected \"discrete\" or \"continuous\"");
    }
    return v;
}

inline Eigen::VectorXd parse_vector(const json& j, const std::string& path) {
    if (!j.is_array())
        bad(path, "expected an array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            bad(path + "[" + std::to_string(i) + "]", "expected a number");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

inline Eigen::MatrixXd parse_matrix(const json& j, const std::string& path) {
    if (!j.is_array())
        bad(path, "expected an array of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < j.size(); ++i) {
        auto row = parse_vector(j[i], path + "[" + std::to_string(i) + "]");
        if (row.size() != n)
            throw validation_error(validation_error::kind::dimension_mismatch, "covariance is not square at " + path);
        m.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return m;
}

inline json probability_json(const probability& p) {
    if (p.exact) {
        return p.exact->str();
    }
    return p.value;
}

} // namespace detail

inline distribution_spec parse_spec(const std::string& text) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw syntax_error("byte " + std::to_string(e.byte), e.what());
    }
    const auto& src = detail::need(doc, "sources", "$");
    if (!src.is_array())
        detail::bad("$.sources", "expected an array");
    std::vector<variable_schema> sources, targets;
    for (std::size_t i = 0; i < src.size(); ++i)
        sources.push_back(detail::parse_variable(src[i], "$.sources[" + std::to_string(i) + "]"));
    const auto& tgt = detail::need(doc, "target", "$");
    if (tgt.is_array()) {
        for (std::size_t i = 0; i < tgt.size(); ++i)
            targets.push_back(detail::parse_variable(tgt[i], "$.target[" + std::to_string(i) + "]"));
    } else {
        targets.push_back(detail::parse_variable(tgt, "$.target"));
    }
    distribution_spec spec{schema(sources, targets), {}};
    const auto& vars = spec.vars;

    const auto& law = detail::need(doc, "law", "$");
    const auto& type = detail::need(law, "type", "$.law");
    std::string t = type.is_string() ? type.get<std::string>() : "";
    if (t == "discrete") {
        const auto& table = detail::need(law, "table", "$.law");
        if (!table.is_array())
            detail::bad("$.law.table", "expected an array");
        discrete_table tab;
        for (std::size_t r = 0; r < table.size(); ++r) {
            std::string path = "$.law.table[" + std::to_string(r) + "]";
            const auto& row = table[r];
            if (!row.is_array())
                detail::bad(path, "expected [outcome..., mass]");
            if (static_cast<int>(row.size()) != vars.variable_count() + 1)
                throw validation_error(validation_error::kind::dimension_mismatch,
                                       "row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                                           " entries, expected " + std::to_string(vars.variable_count() + 1));
            discrete_table::entry e;
            for (int v = 0; v < vars.variable_count(); ++v) {
                if (vars.continuous(v))
                    throw validation_error(validation_error::kind::dimension_mismatch,
                                           "discrete table used with continuous variable '" + vars.variable(v).name + "'");
                e.symbols.push_back(vars.variable(v).symbol_index(
                    detail::label_of(row[static_cast<std::size_t>(v)], path + "[" + std::to_string(v) + "]")));
            }
            e.mass = detail::parse_probability(row.back(), path + "[" + std::to_string(row.size() - 1) + "]");
            tab.entries.push_back(std::move(e));
        }
        spec.law = std::move(tab);
    } else if (t == "gaussian") {
        spec.law = gaussian_law{detail::parse_vector(detail::need(law, "mean", "$.law"), "$.law.mean"),
                                detail::parse_matrix(detail::need(law, "cov", "$.law"), "$.law.cov")};
    } else if (t == "mixture") {
        const auto& comps = detail::need(law, "components", "$.law");
        if (!comps.is_array())
            detail::bad("$.law.components", "expected an array");
        mixture_law mx;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            std::string path = "$.law.components[" + std::to_string(i) + "]";
            const auto& c = comps[i];
            mixture_component k;
            k.weight = detail::parse_probability(detail::need(c, "weight", path), path + ".weight");
            auto d = c.find("discrete");
            std::size_t pos = 0;
            for (int v = 0; v < vars.variable_count(); ++v) {
                if (vars.continuous(v))
                    continue;
                if (d == c.end() || !d->is_array() || pos >= d->size())
                    throw validation_error(validation_error::kind::dimension_mismatch,
                                           path + ".discrete must list one label per discrete variable");
                k.discrete.push_back(vars.variable(v).symbol_index(
                    detail::label_of((*d)[pos], path + ".discrete[" + std::to_string(pos) + "]")));
                ++pos;
            }
            if (d != c.end() && d->is_array() && pos != d->size())
                throw validation_error(validation_error::kind::dimension_mismatch,
                                       path + ".discrete has too many labels");
            auto m = c.find("mean");
            auto cv = c.find("cov");
            k.gauss.mean = m == c.end() ? Eigen::VectorXd() : detail::parse_vector(*m, path + ".mean");
            k.gauss.cov = cv == c.end() ? Eigen::MatrixXd() : detail::parse_matrix(*cv, path + ".cov");
            mx.components.push_back(std::move(k));
        }
        spec.law = std::move(mx);
    } else {
        detail::bad("$.law.type", "expected \"discrete\", \"gaussian\" or \"mixture\"");
    }
    validate(spec);
    return spec;
}

inline distribution_spec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw error("cannot open spec file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str());
}

inline nlohmann::json spec_to_json(const distribution_spec& spec) {
    using detail::json;
    auto var = [](const variable_schema& v) {
        json j{{"name", v.name}};
        if (v.discrete()) {
            j["kind"] = "discrete";
            j["alphabet"] = v.alphabet;
        } else {
            j["kind"] = "continuous";
            j["dimension"] = v.dimension;
        }
        return j;
    };
    auto vec = [](const Eigen::VectorXd& x) {
        json a = json::array();
        for (Eigen::Index i = 0; i < x.size(); ++i)
            a.push_back(x[i]);
        return a;
    };
    auto mat = [&](const Eigen::MatrixXd& m) {
        json a = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            a.push_back(vec(m.row(i).transpose()));
        return a;
    };
    const auto& vars = spec.vars;
    json doc;
    doc["sources"] = json::array();
    for (const auto& v : vars.sources())
        doc["sources"].push_back(var(v));
    if (vars.target_count() == 1) {
        doc["target"] = var(vars.targets()[0]);
    } else {
        doc["target"] = json::array();
        for (const auto& v : vars.targets())
            doc["target"].push_back(var(v));
    }
    std::visit(
        [&](const auto& law) {
            using L = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<L, discrete_table>) {
                json rows = json::array();
                for (const auto& e : law.entries) {
                    json row = json::array();
                    for (int v = 0; v < vars.variable_count(); ++v)
                        row.push_back(vars.variable(v).alphabet[static_cast<std::size_t>(e.symbols[static_cast<std::size_t>(v)])]);
                    row.push_back(detail::probability_json(e.mass));
                    rows.push_back(std::move(row));
                }
                doc["law"] = {{"type", "discrete"}, {"table", std::move(rows)}};
            } else if constexpr (std::is_same_v<L, gaussian_law>) {
                doc["law"] = {{"type", "gaussian"}, {"mean", vec(law.mean)}, {"cov", mat(law.cov)}};
            } else {
                json comps = json::array();
                for (const auto& c : law.components) {
                    json d = json::array();
                    std::size_t k = 0;
                    for (int v = 0; v < vars.variable_count(); ++v)
                        if (!vars.continuous(v))
                            d.push_back(vars.variable(v).alphabet[static_cast<std::size_t>(c.discrete[k++])]);
                    comps.push_back({{"weight", detail::probability_json(c.weight)},
                                     {"discrete", std::move(d)},
                                     {"mean", vec(c.gauss.mean)},
                                     {"cov", mat(c.gauss.cov)}});
                }
                doc["law"] = {{"type", "mixture"}, {"components", std::move(comps)}};
            }
        },
        spec.law);
    return doc;
}

inline std::string serialize_spec(const distribution_spec& spec) { return spec_to_json(spec).dump(2); }

/// Parses a comma-separated realization: discrete variables take a label,
/// continuous variables take `dimension` numbers.
inline point parse_realization(const schema& vars, const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else if (c != ' ' && c != '\t') {
            cur += c;
        }
    }
    parts.push_back(cur);
    point x;
    std::size_t i = 0;
    for (int v = 0; v < vars.variable_count(); ++v) {
        const auto& var = vars.variable(v);
        for (int d = 0; d < var.width(); ++d) {
            if (i >= parts.size())
                throw validation_error(validation_error::kind::dimension_mismatch,
                                       "realization has too few values");
            const auto& p = parts[i++];
            if (var.discrete()) {
                x.push_back(var.symbol_index(p));
            } else {
                try {
                    std::size_t used = 0;
                    x.push_back(std::stod(p, &used));
                    if (used != p.size())
                        throw std::invalid_argument(p);
                } catch (const std::exception&) {
                    throw validation_error(validation_error::kind::schema,
                                           "'" + p + "' is not a number for variable '" + var.name + "'");
                }
            }
        }
    }
    if (i != parts.size())
        throw validation_error(validation_error::kind::dimension_mismatch, "realization has too many values");
    return x;
}

inline std::string format_realization(const schema& vars, const point& x) {
    std::string out;
    for (int v = 0; v < vars.variable_count(); ++v) {
        const auto& var = vars.variable(v);
        for (int d = 0; d < var.width(); ++d) {
            if (!out.empty())
                out += ',';
            double val = x[static_cast<std::size_t>(vars.offset(v) + d)];
            if (var.discrete()) {
                out += var.alphabet[static_cast<std::size_t>(val)];
            } else {
                std::ostringstream ss;
                ss.precision(17);
                ss << val;
                out += ss.str();
            }
        }
    }
    return out;
}

} // namespace pidsx
