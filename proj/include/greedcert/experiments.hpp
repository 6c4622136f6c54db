#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "greedcert/certificates.hpp"
#include "greedcert/solvers.hpp"

namespace greedcert {

enum class Family { Bernoulli, Uniform, Normal, Laplacian, LogLogistic };

const char* to_string(Family f) noexcept;
Family parse_family(const std::string& name);
inline constexpr Family kAllFamilies[] = {Family::Bernoulli, Family::Uniform, Family::Normal, Family::Laplacian,
                                          Family::LogLogistic};

/// Coefficient distribution. Defaults: Bernoulli +-1, Uniform on [-1, 1],
/// Normal(0, 1), Laplace(0, 1), log-logistic(scale 1, shape 1) magnitude with a
/// random sign.
struct DistributionSpec {
    Family family = Family::Normal;
    double scale = 1.0;  // half-width (Uniform), std (Normal), scale (Laplacian, LogLogistic)
    double shape = 1.0;  // LogLogistic only

    void validate() const;
};

/// Random stream for one trial: keyed by (seed, family, grid index, trial
/// index) so results do not depend on evaluation order.
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t family, std::uint64_t grid_index,
                             std::uint64_t trial);

/// k independent nonzero draws (zeros are redrawn).
std::vector<double> sample_coefficients(const DistributionSpec& spec, Index k, std::mt19937_64& stream);

struct ExperimentRow {
    double k_mu = 0.0;
    Family family = Family::Normal;
    double probability = 0.0;
    Index successes = 0;
    Index trials = 0;
    std::uint64_t seed = 0;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
};

/// q/points for q = 1..points.
std::vector<double> default_k_mu_grid(Index points = 50);

/// Fraction of sorted coefficient draws satisfying the decay inequalities
/// strictly at mu = k_mu / k, per grid point. `threads` = 0 picks the
/// hardware concurrency.
ExperimentResult prob_satisfy_decay(const DistributionSpec& spec, Index k, const std::vector<double>& k_mu_grid,
                                    Index trials, std::uint64_t seed, unsigned threads = 1);

/// All five families, rows in (family, grid) order.
ExperimentResult prob_satisfy_decay_all(Index k, const std::vector<double>& k_mu_grid, Index trials,
                                        std::uint64_t seed, unsigned threads = 1);

struct CurvePoint {
    double mu = 0.0;
    Index i = 0;
    double factor = 0.0;
};

/// decay_factor(i, k, 0, mu) for i = 1..k-1 and each mu in (0, 1/k].
std::vector<CurvePoint> decay_constraint_curve(Index k, const std::vector<double>& mus);

enum class DictionaryKind { Adversarial, Random };

struct ValidationSpec {
    std::string theorem = "thm2";  // thm2, thm3, thm4 or thm5
    Index k = 3;
    double mu = 0.25;               // coherence of the adversarial dictionary / cap for random ones
    Index trials = 500;             // certified instances wanted
    std::uint64_t seed = 1;
    Variant variant = Variant::OMP;
    DictionaryKind dictionary = DictionaryKind::Adversarial;
    Index rows = 32;                // random dictionaries: m
    Index atoms = 0;                // random dictionaries: n (0 -> k + 4)
    Index trials_per_dictionary = 10;
    double noise = 0.0;             // epsilon for thm4/thm5
    double tail_l1 = 0.0;           // off-support l1 mass for thm4/thm5
    double ratio_min = 1.0;         // consecutive magnitude ratios drawn from [ratio_min, ratio_max]
    double ratio_max = 4.0;
    Index attempts_per_trial = 2000;
    // thm3: atoms of the support placed in the initial active set, and the
    // checker's p, r (both default to k - g).
    Index selected_prefix = 0;
    std::optional<Index> p;
    std::optional<Index> r;

    void validate() const;
};

struct ValidationReport {
    ValidationSpec spec;
    Index certified = 0;
    Index failures = 0;
    Index rejected = 0;     // candidate instances whose certificate failed
    bool infeasible = false;
    std::vector<std::string> failure_details;
};

/// Draws instances whose certificate passes, runs the algorithm and counts
/// instances on which the guaranteed selections do not happen.
ValidationReport validate_guarantee(const ValidationSpec& spec);

/// Thread count for the experiments: `requested` (0 = hardware concurrency),
/// capped by the GREEDCERT_THREADS environment variable when set.
unsigned effective_threads(unsigned requested);

/// Writes `k_mu,distribution,probability,trials,seed` rows sorted by
/// (distribution, k_mu). Throws IoError.
void emit_csv(const ExperimentResult& result, const std::filesystem::path& path);
std::string format_csv(const ExperimentResult& result);

/// `mu,i,factor` rows.
std::string format_curve_csv(const std::vector<CurvePoint>& curve);

} // namespace greedcert
