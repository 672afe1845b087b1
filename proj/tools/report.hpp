#ifndef SDIST_TOOLS_REPORT_HPP
#define SDIST_TOOLS_REPORT_HPP

#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdist/analysis.hpp"
#include "sdist/parse.hpp"

namespace sdist::cli {

using json = nlohmann::ordered_json;

inline json j(const Rational& r) { return to_string(r); }
inline json j(const FinSet& s)
{
    json a = json::array();
    for (Index i : s)
        a.push_back(i);
    return a;
}
inline json j(const Vector& x) { return to_string(x); }
inline json j(const Ordinal& a) { return to_string(a); }
inline json j(const FamilyExpr& f) { return to_string(f); }

inline json j(const MembershipWitness& w)
{
    json o{{"rule", w.rule}, {"set", j(w.set)}};
    if (!w.blocks.empty()) {
        o["blocks"] = json::array();
        for (const auto& b : w.blocks)
            o["blocks"].push_back(j(b));
    }
    if (!w.parts.empty()) {
        o["parts"] = json::array();
        for (const auto& p : w.parts)
            o["parts"].push_back(j(p));
    }
    return o;
}

inline json j(const CoefficientWitness& w)
{
    json c = json::array();
    for (const auto& a : w.coeffs)
        c.push_back(j(a));
    return json{{"set", j(w.set)}, {"coefficients", c}, {"value", j(w.value)}};
}

inline json j(const BlockSequence& bs)
{
    json a = json::array();
    for (std::size_t i = 1; i <= bs.size(); ++i)
        a.push_back(json{{"block", j(bs.at(Index(i)))}, {"origin", j(bs.origin(Index(i)))}});
    return a;
}

struct Report {
    json body;
    bool budget_exhausted = false;
    bool violation = false;

    Report(const std::string& command, json params)
    {
        body["command"] = command;
        body["params"] = std::move(params);
    }
    json& operator[](const std::string& key) { return body[key]; }

    int finish(const std::string& out_path)
    {
        body["budget_exhausted"] = budget_exhausted;
        std::string text = body.dump(2);
        if (out_path.empty()) {
            std::cout << text << '\n';
        } else {
            std::ofstream f(out_path);
            if (!f)
                throw std::runtime_error("cannot write " + out_path);
            f << text << '\n';
        }
        if (violation)
            return 1;
        return budget_exhausted ? 2 : 0;
    }
};

/// A JSON array of vector strings, or an object with a "blocks" array.
inline BlockSequence load_corpus(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot read corpus " + path);
    json doc = json::parse(f);
    const json& arr = doc.is_object() ? doc.at("blocks") : doc;
    std::vector<Vector> blocks;
    for (const auto& b : arr)
        blocks.push_back(parse_vector(b.get<std::string>()));
    return BlockSequence(blocks);
}

} // namespace sdist::cli

#endif // SDIST_TOOLS_REPORT_HPP
