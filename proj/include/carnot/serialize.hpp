#ifndef CARNOT_SERIALIZE_HPP
#define CARNOT_SERIALIZE_HPP

#include <fstream>
#include <json.hpp>
#include <stdexcept>
#include <string>

#include "carnot/group.hpp"
#include "carnot/polynomial.hpp"

namespace carnot {

using json = nlohmann::json;

/// {step, layer_dims, brackets:[{a,b,c,coef}]}; brackets stored once per
/// unordered pair (a < b), antisymmetry restored on load. Indices are
/// 0-based flattened basis indices.
inline json to_json(const GroupSpec& g) {
    json j;
    j["step"] = g.step();
    j["layer_dims"] = g.layer_dims();
    json br = json::array();
    for (int a = 0; a < g.dim(); ++a)
        for (int b = a + 1; b < g.dim(); ++b)
            for (const auto& t : g.bracket_terms(a, b))
                br.push_back({{"a", a}, {"b", b}, {"c", t.target}, {"coef", t.coef}});
    j["brackets"] = br;
    return j;
}

inline GroupSpec group_from_json(const json& j) {
    GroupSpec g(j.at("step").get<int>(), j.at("layer_dims").get<std::vector<int>>());
    for (const auto& b : j.at("brackets")) {
        int a = b.at("a").get<int>();
        int bb = b.at("b").get<int>();
        if (a >= bb) throw std::invalid_argument("group json: brackets must have a < b");
        g.add_bracket(a, bb, b.at("c").get<int>(), b.at("coef").get<double>());
    }
    g.validate();
    return g;
}

/// {terms:[{exponents:[...], coef}]}
inline json to_json(const GradedPolynomial& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) terms.push_back({{"exponents", e}, {"coef", c}});
    return json{{"nvars", p.nvars()}, {"terms", terms}};
}

inline GradedPolynomial poly_from_json(const json& j) {
    GradedPolynomial p(j.at("nvars").get<int>());
    for (const auto& t : j.at("terms"))
        p.add_term(t.at("exponents").get<std::vector<int>>(), t.at("coef").get<double>());
    return p;
}

/// Resolve "h1" / "engel" / "@file.json".
inline GroupSpec resolve_group(const std::string& name) {
    if (!name.empty() && name[0] == '@') {
        std::ifstream in(name.substr(1));
        if (!in) throw std::invalid_argument("cannot open group spec file " + name.substr(1));
        json j;
        in >> j;
        return group_from_json(j);
    }
    return GroupSpec::named(name);
}

} // namespace carnot

#endif
