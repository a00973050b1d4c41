#include "oqmetro/json_io.hpp"

#include <string>

#include "oqmetro/error.hpp"

namespace oqmetro {

using nlohmann::json;

namespace {

std::size_t read_size(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() <= 0)
        throw Error(ErrorCode::InvalidMeasurement, std::string("missing or invalid '") + key + "'");
    return j.at(key).get<std::size_t>();
}

std::vector<ComplexMatrix> read_effects(const json& j, std::size_t count, std::size_t dim) {
    if (!j.contains("effects") || !j.at("effects").is_array())
        throw Error(ErrorCode::InvalidMeasurement, "missing 'effects' array");
    const json& effects = j.at("effects");
    if (effects.size() != count)
        throw Error(ErrorCode::OutcomeCountMismatch,
                    "expected " + std::to_string(count) + " effects, got " + std::to_string(effects.size()));
    std::vector<ComplexMatrix> out;
    out.reserve(count);
    for (const auto& e : effects) out.push_back(matrix_from_json(e, dim));
    return out;
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
    json entries = json::array();
    for (const auto& z : m.data()) entries.push_back({z.real(), z.imag()});
    return entries;
}

ComplexMatrix matrix_from_json(const json& j, std::size_t dim) {
    if (!j.is_array() || j.size() != dim * dim)
        throw Error(ErrorCode::DimensionMismatch, "matrix needs " + std::to_string(dim * dim) + " entries");
    ComplexMatrix m(dim);
    for (std::size_t k = 0; k < dim * dim; ++k) {
        const json& z = j[k];
        if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
            throw Error(ErrorCode::InvalidMeasurement, "matrix entry must be [re, im]");
        m(k / dim, k % dim) = cplx(z[0].get<double>(), z[1].get<double>());
    }
    return m;
}

json povm_to_json(const Povm& p) {
    json effects = json::array();
    for (const auto& e : p.effects()) effects.push_back(matrix_to_json(e));
    return {{"d", p.outcomes()}, {"dim", p.dim()}, {"effects", effects}};
}

Povm povm_from_json(const json& j) {
    const std::size_t d = read_size(j, "d");
    const std::size_t dim = read_size(j, "dim");
    return Povm(read_effects(j, d, dim));
}

json hovm_to_json(const Hovm& w) {
    json effects = json::array();
    for (const auto& e : w.elements()) effects.push_back(matrix_to_json(e));
    return {{"d", w.d()}, {"dim", w.dim()}, {"effects", effects}};
}

Hovm hovm_from_json(const json& j) {
    const std::size_t d = read_size(j, "d");
    const std::size_t dim = read_size(j, "dim");
    return Hovm(d, read_effects(j, d * d, dim));
}

json oq_to_json(const OqDistribution& oq) {
    json rows = json::array();
    for (std::size_t a = 0; a < oq.d; ++a) {
        json row = json::array();
        for (std::size_t b = 0; b < oq.d; ++b) row.push_back(oq(a, b));
        rows.push_back(row);
    }
    return {{"d", oq.d}, {"values", rows}, {"negativity", oq.negativity}};
}

}  // namespace oqmetro
