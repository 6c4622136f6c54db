#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "greedcert/certificates.hpp"
#include "greedcert/solvers.hpp"

namespace greedcert {

/// Equiangular dictionary of k+1 atoms in R^{k+1} whose pairwise inner
/// products all equal -mu. At mu = 1/k it has rank k.
struct AdversarialInstance {
    Index k = 0;
    double mu = 0.0;
    Dictionary dictionary;
    Matrix gram_target;
    std::optional<Vector> worst_vector;
    std::optional<Index> j;
};

/// (k+1)x(k+1) matrix with unit diagonal and -mu elsewhere. Throws
/// InvalidCoherence unless 0 <= mu <= 1/k.
Matrix build_gram(Index k, double mu);

/// A = Lambda^{1/2} U^T from the analytic eigendecomposition of build_gram():
/// the normalized all-ones vector carries eigenvalue 1 - k mu, a Gram-Schmidt
/// completion of e_1..e_k carries 1 + mu.
AdversarialInstance build_dictionary(Index k, double mu);

/// Tightness vector x^(j) in R^{k+1}: x_{k+1} = 0, x_i = 1 for j < i <= k,
/// x_j = factor(j) x_{j+1} exactly, x_i = slack * factor(i) x_{i+1} for i < j.
/// Entries are stored 0-based (entry i-1 holds x_i).
Vector worst_case_vector(Index k, Index j, double mu, double slack = 1.5);

struct Lemma5Report {
    Index g = 0;
    Variant variant = Variant::OMP;
    double alpha = 0.0;
    double mu_g = 0.0;
    double max_diagonal_deviation = 0.0;    // max |<c_i, a_i> - alpha_g|
    double max_offdiagonal_deviation = 0.0; // max |<c_i, a_j> + mu_g|

    double max_deviation() const { return std::max(max_diagonal_deviation, max_offdiagonal_deviation); }
};

/// Measures the projected correlations on the instance for active set Q by
/// explicit projection and compares them to alpha_g and -mu_g.
Lemma5Report verify_lemma5(const AdversarialInstance& instance, std::span<const Index> active, Variant variant);

/// Max deviation of verify_lemma5 over Q = {1..g}, g = 0..k-1.
double max_lemma5_deviation(const AdversarialInstance& instance, Variant variant);

struct ConverseStep {
    Index g = 0;
    IndexSet active_set;
    IndexSet tie_set;
    std::map<Index, double> correlations;  // signed <c~_i, r^Q>
};

struct ConverseReport {
    std::string mode;  // "k" or "j"
    Index k = 0;
    double mu = 0.0;
    std::optional<Index> j;
    std::optional<double> slack;
    Variant variant = Variant::OMP;
    Vector coefficients;
    std::vector<ConverseStep> steps;
    double max_lemma5_deviation = 0.0;
    /// Largest | |score of the correct atom| - |score of atom k+1| | at the tie.
    double max_tie_gap = 0.0;
    std::optional<Verdict> certificate;  // mode j: theorem 2 on x^(j)
    bool verdict = false;
    std::vector<std::string> failures;
};

/// At mu = 1/k, every selection of k-1 correct atoms leaves the last correct
/// atom and atom k+1 tied. Checks all k such selections plus a replay of the
/// algorithm. Default coefficients: x_i = k + 1 - i.
/// Throws ConstructionFailed when `strict` and the tie does not show up.
ConverseReport demonstrate_converse_k(Index k, Variant variant = Variant::OMP,
                                      std::optional<std::vector<double>> coefficients = std::nullopt,
                                      bool strict = true);

/// At mu = 1/(2k-j) with x^(j): unique correct picks before step j, then a tie
/// between atom j and atom k+1, with theorem 2 failing by equality at index j.
ConverseReport demonstrate_converse_j(Index k, Index j, double slack = 1.5, Variant variant = Variant::OMP,
                                      bool strict = true);

} // namespace greedcert
