#include "oqmetro/oq.hpp"

#include <algorithm>
#include <cmath>

#include "oqmetro/error.hpp"

namespace oqmetro {

namespace {
constexpr double kImagResidueTol = 1e-10;
}

double OqDistribution::min_value() const { return *std::min_element(values.begin(), values.end()); }

OqDistribution evaluate_oq(const ProbeState& state, const Hovm& w) {
    if (w.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "probe is a qubit");
    const auto ket = state.ket();
    OqDistribution oq;
    oq.d = w.d();
    oq.values.reserve(w.elements().size());
    double abs_sum = 0.0;
    for (const auto& e : w.elements()) {
        const cplx v = expectation(e, ket);
        if (std::abs(v.imag()) > kImagResidueTol) throw Error(ErrorCode::NonRealValue, "OQ cell has imaginary part");
        oq.values.push_back(v.real());
        abs_sum += std::abs(v.real());
    }
    oq.negativity = abs_sum - 1.0;
    return oq;
}

std::vector<double> oq_derivatives(const ProbeState& state, const Hovm& w) {
    if (w.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "probe is a qubit");
    const auto ket = state.ket();
    const auto dket = state.derivative_ket();
    std::vector<double> out;
    out.reserve(w.elements().size());
    for (const auto& e : w.elements()) out.push_back(2.0 * sandwich(dket, e, ket).real());
    return out;
}

bool is_positive(const OqDistribution& oq, double tol) { return oq.negativity <= tol; }

}  // namespace oqmetro
