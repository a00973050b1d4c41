#pragma once

#include "json.hpp"

#include "oqmetro/measurement.hpp"
#include "oqmetro/oq.hpp"

namespace oqmetro {

// Measurement files: {"d": int, "dim": int, "effects": [[[re,im],...],...]},
// each effect a row-major dim×dim matrix. For a POVM, d is the outcome count
// and there are d effects; for an HOVM there are d*d effects ordered (a,b)
// row-major.

nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j, std::size_t dim);

nlohmann::json povm_to_json(const Povm& p);
Povm povm_from_json(const nlohmann::json& j);

nlohmann::json hovm_to_json(const Hovm& w);
Hovm hovm_from_json(const nlohmann::json& j);

/// {"d":2,"values":[[...],[...]],"negativity":x}
nlohmann::json oq_to_json(const OqDistribution& oq);

}  // namespace oqmetro
