#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "greedcert/solvers.hpp"

namespace greedcert {

/// Magnitudes of the signal restricted to its support, sorted non-increasing,
/// plus the off-support l1 mass and the noise bound.
///
/// For the successful-termination checker (theorem 3) `head` holds only the
/// k - g magnitudes not yet selected; otherwise it holds all k of them.
struct SignalProfile {
    std::vector<double> head;
    Index k = 0;
    double tail_l1 = 0.0;
    double noise = 0.0;
    Index selected_prefix = 0;

    /// Profile of a k-sparse noiseless signal with the given magnitudes.
    static SignalProfile sparse(std::vector<double> head);

    /// Throws InvalidParameters when the ordering/positivity invariants fail.
    void validate() const;
    bool noiseless_sparse() const { return tail_l1 == 0.0 && noise == 0.0; }
};

/// Sorts absolute values in non-increasing order. Returns true when the input
/// was already in that order.
bool sort_magnitudes(std::vector<double>& values);

struct Verdict {
    bool applicable = true;
    bool pass = false;
    /// Failing: first index (1-based, as in the analysis) whose inequality
    /// does not hold strictly. Passing: index with the smallest margin.
    /// Empty when the coherence bound alone decides.
    std::optional<Index> binding_index;
    std::optional<double> mu_star;
    /// Set when the binding inequality fails only by equality.
    bool boundary = false;
    /// Theorem 3 only: 1 or 2 for the branch that certified, 0 otherwise.
    int branch = 0;
    /// lhs - rhs of each per-index inequality, margins[i-1] for index i.
    std::vector<double> margins;
    std::string reason;
};

// Coherence-dependent constants of the projected-atom bounds. All require
// mu < 1/g (no constraint for g = 0) and throw CoherenceTooLarge otherwise.
double alpha_g(Index g, double mu, Variant variant);
double mu_g(Index g, double mu, Variant variant);
double gamma_k(Index k, double mu, Variant variant);

/// 2 mu (k - g - i) / (1 - (g + i) mu) for 1 <= i <= k - g; exactly 0 at
/// i = k - g. Throws InvalidIndex outside that range and CoherenceTooLarge if
/// mu (g + i) >= 1 for i < k - g.
double decay_factor(Index i, Index k, Index g, double mu);

Verdict certify_uniform(Index k, double mu);
Verdict certify_uniform_termination(Index k, Index g, double mu);
Verdict certify_theorem1(const SignalProfile& profile, double mu);

/// The per-index decay inequalities |x_i| > factor(i) |x_{i+1}|, i = 1..k-1,
/// without any constraint on mu beyond what the factors need.
Verdict check_decay_condition(std::span<const double> head, double mu);

struct Theorem2Result {
    Verdict verdict;
    std::vector<double> mu_i_star;  // entry i-1 for i = 1..k-1
};
Theorem2Result certify_theorem2(const SignalProfile& profile, double mu);

Verdict certify_theorem3(const SignalProfile& profile, Index p, Index r, double mu);
Verdict certify_theorem4(const SignalProfile& profile, double mu);
Verdict certify_donoho_baseline(const SignalProfile& profile, double mu);
Verdict certify_theorem5(const SignalProfile& profile, double mu, Variant variant);

/// One-step sufficient condition. `remaining` are the magnitudes of the
/// not-yet-selected support atoms (any order).
Verdict check_lemma4_step(std::span<const double> remaining, Index g, double mu, Variant variant,
                          double noise = 0.0, double tail_l1 = 0.0);

/// Theorem identifiers used in reports and on the command line.
inline constexpr const char* kTheoremIds[] = {"uniform", "uniform_termination", "thm1", "thm2", "thm3",
                                              "thm4",    "donoho",              "thm5", "lemma4_step"};

struct CertificateQuantities {
    std::vector<double> alpha;      // alpha_g for g = 0..k-1 (while defined)
    std::vector<double> mu_g;       // mu_g for g = 0..k-1 (while defined)
    std::optional<double> gamma_k;
    std::vector<double> mu_i_star;
    std::optional<double> rho;
};

struct CertificateReport {
    Index k = 0;
    double mu = 0.0;
    Variant variant = Variant::OMP;
    std::map<std::string, Verdict> verdicts;
    CertificateQuantities quantities;
};

struct CertifyOptions {
    Variant variant = Variant::OMP;
    // Theorem 3 parameters; p = r = k - g when unset.
    std::optional<Index> p;
    std::optional<Index> r;
};

/// Evaluates one theorem by id (see kTheoremIds) and fills the quantities.
/// Theorems that do not apply to the profile get applicable = false.
CertificateReport certify(const std::string& theorem_id, const SignalProfile& profile, double mu,
                          const CertifyOptions& options = {});

/// All theorems at once.
CertificateReport certify_all(const SignalProfile& profile, double mu, const CertifyOptions& options = {});

} // namespace greedcert
