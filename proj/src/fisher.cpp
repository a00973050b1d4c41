#include "oqmetro/fisher.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "oqmetro/error.hpp"
#include "oqmetro/oq.hpp"

namespace oqmetro {

FisherResult FisherResult::divergent() { return {std::numeric_limits<double>::infinity(), true}; }

FisherResult fisher_discrete(std::span<const double> probs, std::span<const double> derivs) {
    if (probs.size() != derivs.size()) throw Error(ErrorCode::DimensionMismatch, "probs and derivs lengths differ");
    const double psum = std::accumulate(probs.begin(), probs.end(), 0.0);
    const double dsum = std::accumulate(derivs.begin(), derivs.end(), 0.0);
    if (std::abs(psum - 1.0) > 1e-9) throw Error(ErrorCode::NotNormalized, "sum of probabilities " + std::to_string(psum));
    if (std::abs(dsum) > 1e-9) throw Error(ErrorCode::DerivativeNotTraceless, "sum of derivatives " + std::to_string(dsum));

    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] < -kPsdTol) throw Error(ErrorCode::NotNormalized, "negative probability");
        if (probs[i] <= kZeroProbability) {
            if (std::abs(derivs[i]) > kZeroSlope) return FisherResult::divergent();
            continue;
        }
        total += derivs[i] * derivs[i] / probs[i];
    }
    return FisherResult::finite(total);
}

FisherResult oqfi(const ProbeParams& params, const Hovm& w) {
    const ProbeState state = make_state(params);
    const OqDistribution oq = evaluate_oq(state, w);
    if (!is_positive(oq)) {
        throw Error(ErrorCode::NegativeOq, "OQ negativity " + std::to_string(oq.negativity));
    }
    const auto derivs = oq_derivatives(state, w);
    return fisher_discrete(oq.values, derivs);
}

double qfi_pure(const ProbeParams& params) {
    const ProbeState s = make_state(params);
    double dd = 0.0;
    cplx overlap = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        dd += std::norm(s.derivative[i]);
        overlap += std::conj(s.amplitudes[i]) * s.derivative[i];
    }
    return 4.0 * (dd - std::norm(overlap));
}

double advantage(const ProbeParams& params, const Hovm& w) {
    const double qfi = qfi_pure(params);
    if (qfi <= 1e-14) throw Error(ErrorCode::ZeroQfi, "advantage undefined where the QFI vanishes");
    const FisherResult fi = oqfi(params, w);
    if (fi.diverged) return std::numeric_limits<double>::infinity();
    return std::log10(fi.value / (2.0 * qfi));
}

double cri_bound(const FisherResult& fi, std::uint64_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidConfig, "sample count must be positive");
    if (fi.diverged) return 0.0;
    if (!(fi.value > 0.0)) throw Error(ErrorCode::ZeroInformation, "Cramer-Rao bound needs positive information");
    return 1.0 / (static_cast<double>(n) * fi.value);
}

}  // namespace oqmetro
