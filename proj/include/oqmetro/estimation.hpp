#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "oqmetro/measurement.hpp"
#include "oqmetro/probe.hpp"

namespace oqmetro {

// ---------------------------------------------------------------------------
// Random streams
//
// Every trial and every measurement setting owns an independent
// std::mt19937_64 whose seed is SplitMix64(master ⊕ f(trial, setting)).
// Results therefore do not depend on how trials are scheduled on threads.
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for substream (trial, setting) of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t setting);

/// Multinomial draw by sequential conditional binomials.
std::vector<std::uint64_t> sample_multinomial(std::uint64_t n, std::span<const double> probs, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Counts
// ---------------------------------------------------------------------------

/// Counts from the two sampled settings (B alone and sequential A→B) and the
/// assembled OQ counts c(a,b|W) = c(a,b|S) + (c(b|B) - Σ_a c(a,b|S))/2.
/// Stored as doubles so that expected (noise-free) tables share the type;
/// sampled tables hold exact integers.
struct CountTable {
    std::uint64_t n = 0;
    std::array<double, 2> counts_b{};
    std::array<double, 4> counts_seq{};  // index a*2 + b
    std::array<double, 4> counts_w{};    // index a*2 + b

    static CountTable assemble(std::uint64_t n, const std::array<double, 2>& counts_b,
                               const std::array<double, 4>& counts_seq);
    bool has_negative() const;
};

/// Draws n samples of B and, independently, n samples of the sequential
/// measurement A→B from the exact quantum probabilities. Deterministic in seed.
CountTable sample_counts(const ProbeParams& truth, const Povm& a, const Povm& b, std::uint64_t n,
                         std::uint64_t seed);

/// Noise-free table: each count equals n times its exact probability.
CountTable expected_counts(const ProbeParams& truth, const Povm& a, const Povm& b, std::uint64_t n);

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct SearchOptions {
    double grid_step = 1e-3;
    double tolerance = 1e-8;
    double curvature_step = 1e-4;  // h of the central second difference
};

struct TrialResult {
    double estimate = 0.0;
    double observed_fi = 0.0;        // MLE: -ℒ''; LEP: slope²/variance of the observable
    double variance_estimate = 0.0;  // (n·observed_fi)^-1 or the propagated variance
    bool omitted = false;
};

inline constexpr double kModelFloor = 1e-12;

/// ℒ(g) = (1/n) Σ c(a,b|W) log max(𝒲(a,b|ψ_g), 1e-12). Throws NegativeCounts.
double log_likelihood(const CountTable& counts, double g, double fixed_other, Target target, const Hovm& w);

/// Coarse grid then golden-section search for argmax ℒ on domain; curvature by
/// central second difference. Throws NegativeCounts or FlatLikelihood.
TrialResult mle_estimate(const CountTable& counts, Target target, double fixed_other, const Hovm& w,
                         Interval domain, const SearchOptions& opts = {});

/// Mean of the ±1 observable O = Σ (-1)^{ab} W_ab at parameter g.
double observable_mean(double g, double fixed_other, Target target, const Hovm& w);

/// Inverts the observed mean of O and propagates its variance 1 - ⟨O⟩².
/// Throws NegativeCounts or ZeroSlope.
TrialResult lep_estimate(const CountTable& counts, Target target, double fixed_other, const Hovm& w,
                         Interval domain, const SearchOptions& opts = {});

// ---------------------------------------------------------------------------
// Trial harness
// ---------------------------------------------------------------------------

enum class SamplingMode { Sampled, ExpectedCounts };

struct TrialConfig {
    ProbeParams truth;
    double lambda = 1.0;  // sharpness of the mutually unbiased pair
    std::uint64_t n = 100000;
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    Interval domain{0.0, 3.14159265358979323846};
    SamplingMode mode = SamplingMode::Sampled;
    SearchOptions search{};
    unsigned threads = 0;  // 0: OQMETRO_THREADS or hardware concurrency
};

enum class Estimator { Mle, Lep };
std::string_view to_string(Estimator e);

struct EstimatorSummary {
    Estimator estimator = Estimator::Mle;
    std::size_t used = 0;
    double mean_estimate = 0.0;
    double emp_var = 0.0;
    double pred_var = 0.0;       // mean of per-trial variance estimates
    double omission_rate = 0.0;  // dropped trials / trials
    double ratio = 0.0;          // log10(Δ²g_Q / 2Δ²g)
};

struct TrialSummary {
    TrialConfig config;
    double qfi = 0.0;
    double qfi_variance = 0.0;  // Δ²g_Q = 1/(n·QFI)
    EstimatorSummary mle;
    EstimatorSummary lep;
    std::vector<TrialResult> mle_trials;
    std::vector<TrialResult> lep_trials;
};

/// Runs `trials` independent seeded experiments and both estimators on each.
/// Trials with a negative c(a,b|W), or on which an estimator fails, are
/// counted in that estimator's omission rate. In ExpectedCounts mode every
/// trial is noise-free and `ratio` uses pred_var in place of the (zero)
/// empirical variance. An estimator with fewer than two surviving trials
/// reports NaN statistics; AllTrialsOmitted is thrown when that happens to
/// both. Also throws InvalidConfig and ZeroQfi.
TrialSummary run_trials(const TrialConfig& config);

/// Worker count: explicit value, else OQMETRO_THREADS, else hardware.
unsigned resolve_threads(unsigned requested);

}  // namespace oqmetro
