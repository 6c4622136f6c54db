#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "greedcert/linalg.hpp"

namespace greedcert {

/// OMP correlates the residual with the projected atoms a~_i, OLS with their
/// normalized versions b~_i. Both are the same greedy loop otherwise.
enum class Variant { OMP, OLS };

enum class TiePolicy {
    LowestIndex,     // pick the smallest tied index and keep going
    ReportAmbiguous, // record the tied step, then stop with StopReason::AmbiguousTie
};

enum class StopReason { Completed, ZeroResidual, AllAtomsDegenerate, AmbiguousTie };

const char* to_string(Variant v) noexcept;
const char* to_string(StopReason r) noexcept;
Variant parse_variant(const std::string& name);

struct SolverConfig {
    Variant variant = Variant::OMP;
    Index max_iterations = 1;
    double tie_tolerance = tolerance::tie;
    TiePolicy tie_policy = TiePolicy::LowestIndex;
    /// Atoms assumed already selected before the first iteration. Empty for
    /// the plain k-step algorithm; used to study successful termination.
    IndexSet initial_active_set;

    /// Throws InvalidParameters unless 1 <= max_iterations <= min(m, n) and
    /// tie_tolerance >= 0.
    void validate(Index m, Index n) const;
};

struct Selection {
    Index selected = 0;
    IndexSet tie_set;                      // ascending
    std::map<Index, double> correlations;  // signed <c~_i, r^Q>, i not in Q
    double max_score = 0.0;
};

struct StepRecord {
    Index iteration = 0;  // g = Card(Q) before the selection
    Index selected = 0;
    IndexSet tie_set;
    std::map<Index, double> correlations;
    double residual_norm = 0.0;  // ||r^{Q u {selected}}||

    double score(Index i) const { return std::abs(correlations.at(i)); }
};

struct RunTrace {
    Variant variant = Variant::OMP;
    IndexSet initial_active_set;
    double initial_residual_norm = 0.0;
    std::vector<StepRecord> steps;
    IndexSet final_active_set;
    StopReason stop_reason = StopReason::Completed;

    IndexSet selected() const;
};

/// One application of the projected-atom selection rule on an already
/// projected state. Atoms whose projected norm is numerically zero can never
/// be selected; throws AllAtomsDegenerate when no other candidate remains.
Selection select_next(const ProjectedState& state, Variant variant, double tie_tolerance);

/// Runs OMP/OLS for up to config.max_iterations selections, recomputing the
/// projection from scratch at each step.
RunTrace run_oxx(const Dictionary& d, const Vector& y, const SolverConfig& config);

/// ||P_{Q u {candidate}} y|| computed with a least-squares solve on the
/// submatrix, independently of the incremental projector. Throws
/// RankDeficientActiveSet when A_Q itself is rank deficient.
double ols_residual_bruteforce(const Dictionary& d, std::span<const Index> active, Index candidate, const Vector& y);

/// True iff every selection lies in true_support and all of it was selected
/// (counting the initial active set).
bool k_step_success(const RunTrace& trace, std::span<const Index> true_support);

} // namespace greedcert
