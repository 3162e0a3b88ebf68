#include "cylcas/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cylcas {

namespace {

using nlohmann::json;

CMat4 matrix_from_json(const json& jm) {
    if (!jm.is_array() || jm.size() != 4)
        throw std::invalid_argument("matrix must be an array of 4 rows");
    CMat4 u;
    for (int r = 0; r < 4; ++r) {
        const json& row = jm[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != 4)
            throw std::invalid_argument("matrix rows must hold 4 entries");
        for (int c = 0; c < 4; ++c) {
            const json& e = row[static_cast<std::size_t>(c)];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw std::invalid_argument("matrix entries must be [re, im] pairs");
            u(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    return u;
}

BoundaryCondition bc_from_json(const json& j, bool reunitarize) {
    if (!j.is_object()) throw std::invalid_argument("boundary condition must be a JSON object");
    bool has_preset = j.contains("preset");
    bool has_matrix = j.contains("matrix");
    if (has_preset == has_matrix)
        throw std::invalid_argument(
            "boundary condition needs exactly one source: \"preset\" or \"matrix\"");

    if (has_preset) {
        if (!j["preset"].is_string()) throw std::invalid_argument("\"preset\" must be a string");
        std::map<std::string, double> params;
        if (j.contains("params")) {
            if (!j["params"].is_object()) throw std::invalid_argument("\"params\" must be an object");
            for (const auto& [key, val] : j["params"].items()) {
                if (!val.is_number()) throw std::invalid_argument("parameter values must be numbers");
                params[key] = val.get<double>();
            }
        }
        return preset(j["preset"].get<std::string>(), params);
    }

    CMat4 u = matrix_from_json(j["matrix"]);
    if (reunitarize) {
        u = unitarize(u);
        return BoundaryCondition(u, "custom");
    }
    return BoundaryCondition(u, "custom", {}, 1e-8);
}

}  // namespace

BoundaryCondition bc_from_json_text(const std::string& text, bool reunitarize) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("boundary condition JSON: ") + e.what());
    }
    return bc_from_json(j, reunitarize);
}

BoundaryCondition bc_from_json_file(const std::string& path, bool reunitarize) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open boundary condition file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return bc_from_json_text(ss.str(), reunitarize);
}

std::string bc_to_json_text(const BoundaryCondition& bc) {
    json j;
    j["label"] = bc.label();
    if (!bc.params().empty()) {
        json p = json::object();
        for (const auto& [key, val] : bc.params()) p[key] = val;
        j["params"] = p;
    }
    json m = json::array();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) {
            const Complex& z = bc.matrix()(r, c);
            row.push_back(json::array({z.real(), z.imag()}));
        }
        m.push_back(row);
    }
    j["matrix"] = m;
    return j.dump(2);
}

}  // namespace cylcas
