#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "dbar/curve.hpp"
#include "dbar/operators.hpp"
#include "dbar/polyalg.hpp"

namespace dbar {

using ordered_json = nlohmann::ordered_json;

// UniPoly JSON: {"coeffs": [[re, im], ...]} ascending degree.
inline ordered_json to_json(const UniPoly& p) {
    ordered_json j;
    j["coeffs"] = ordered_json::array();
    for (cx c : p.coeffs) j["coeffs"].push_back({c.real(), c.imag()});
    return j;
}

inline UniPoly unipoly_from_json(const ordered_json& j) {
    if (!j.contains("coeffs") || !j["coeffs"].is_array())
        throw validation_error("unipoly json: expected {\"coeffs\": [[re, im], ...]}");
    std::vector<cx> coeffs;
    for (const auto& c : j["coeffs"]) {
        if (!c.is_array() || c.size() != 2) throw validation_error("unipoly json: bad coefficient");
        coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
    }
    return UniPoly(std::move(coeffs));
}

// BiPoly JSON: {"terms": [[i, j, re, im], ...]}.
inline ordered_json to_json(const BiPoly& p) {
    ordered_json j;
    j["terms"] = ordered_json::array();
    for (const auto& t : p.terms) j["terms"].push_back({t.i, t.j, t.c.real(), t.c.imag()});
    return j;
}

inline BiPoly bipoly_from_json(const ordered_json& j) {
    if (!j.contains("terms") || !j["terms"].is_array())
        throw validation_error("bipoly json: expected {\"terms\": [[i, j, re, im], ...]}");
    std::vector<BiTerm> terms;
    for (const auto& t : j["terms"]) {
        if (!t.is_array() || t.size() != 4) throw validation_error("bipoly json: bad term");
        terms.push_back({t[0].get<int>(), t[1].get<int>(),
                         cx{t[2].get<double>(), t[3].get<double>()}});
    }
    return BiPoly(std::move(terms));
}

// Curve JSON: {"type":"cusp","r":2,"s":3}
//           | {"type":"param","pi1":{...},"pi2":{...},"f":{...}}.
inline Curve curve_from_json(const ordered_json& j) {
    const std::string type = j.value("type", "");
    if (type == "cusp") {
        if (!j.contains("r") || !j.contains("s"))
            throw validation_error("curve json: cusp needs r and s");
        return Curve::cusp(j["r"].get<int>(), j["s"].get<int>());
    }
    if (type == "param") {
        if (!j.contains("pi1") || !j.contains("pi2") || !j.contains("f"))
            throw validation_error("curve json: param needs pi1, pi2, f");
        return Curve::param(unipoly_from_json(j["pi1"]), unipoly_from_json(j["pi2"]),
                            bipoly_from_json(j["f"]));
    }
    throw validation_error("curve json: type must be 'cusp' or 'param'");
}

inline Curve curve_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open curve file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw validation_error(std::string("curve file parse error: ") + e.what());
    }
    return curve_from_json(j);
}

inline ordered_json to_json(const SemigroupInfo& sg) {
    ordered_json j;
    j["frobenius"] = sg.frobenius;
    j["gaps"] = sg.gaps;
    return j;
}

inline ordered_json to_json(const MomentReport& report) {
    ordered_json j;
    j["entries"] = ordered_json::array();
    for (const auto& e : report.entries) {
        ordered_json entry;
        entry["j"] = e.j;
        entry["re"] = e.value.real();
        entry["im"] = e.value.imag();
        entry["zero"] = e.zero;
        j["entries"].push_back(entry);
    }
    j["verdict"] = report.verdict;
    j["eps_used"] = report.eps_used;
    j["eps_check"] = report.eps_check;
    return j;
}

} // namespace dbar
