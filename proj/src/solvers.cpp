#include "greedcert/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace greedcert {

const char* to_string(Variant v) noexcept { return v == Variant::OMP ? "omp" : "ols"; }

const char* to_string(StopReason r) noexcept {
    switch (r) {
    case StopReason::Completed: return "completed";
    case StopReason::ZeroResidual: return "zero_residual";
    case StopReason::AllAtomsDegenerate: return "all_atoms_degenerate";
    case StopReason::AmbiguousTie: return "ambiguous_tie";
    }
    return "unknown";
}

Variant parse_variant(const std::string& name) {
    if (name == "omp" || name == "OMP") return Variant::OMP;
    if (name == "ols" || name == "OLS") return Variant::OLS;
    throw Error(ErrorCode::InvalidParameters, "unknown variant '" + name + "' (expected omp or ols)");
}

void SolverConfig::validate(Index m, Index n) const {
    const Index budget = std::min(m, n);
    if (max_iterations < 1 || initial_active_set.size() + max_iterations > budget)
        throw Error(ErrorCode::InvalidParameters,
                    "iteration budget must satisfy 1 <= initial + max_iterations <= min(m, n) = " +
                        std::to_string(budget));
    if (!(tie_tolerance >= 0.0)) throw Error(ErrorCode::InvalidParameters, "tie tolerance must be non-negative");
}

IndexSet RunTrace::selected() const {
    IndexSet out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.selected);
    return out;
}

Selection select_next(const ProjectedState& state, Variant variant, double tie_tolerance) {
    const Matrix& atoms = variant == Variant::OMP ? state.projected : state.normalized;
    const Vector corr = atoms.transpose() * state.residual;

    Selection sel;
    bool any = false;
    for (Index i = 0; i < state.active_mask.size(); ++i) {
        if (state.is_active(i)) continue;
        const double c = corr[static_cast<Eigen::Index>(i)];
        sel.correlations.emplace(i, c);
        if (state.is_degenerate(i)) continue;
        sel.max_score = any ? std::max(sel.max_score, std::abs(c)) : std::abs(c);
        any = true;
    }
    if (!any) throw Error(ErrorCode::AllAtomsDegenerate, "every remaining atom lies in span(A_Q)");

    for (const auto& [i, c] : sel.correlations)
        if (!state.is_degenerate(i) && std::abs(c) >= sel.max_score - tie_tolerance) sel.tie_set.push_back(i);
    sel.selected = sel.tie_set.front();
    return sel;
}

RunTrace run_oxx(const Dictionary& d, const Vector& y, const SolverConfig& config) {
    if (static_cast<Index>(y.size()) != d.rows())
        throw Error(ErrorCode::DimensionMismatch, "data vector length does not match dictionary rows");
    if (!y.allFinite()) throw Error(ErrorCode::InvalidParameters, "data vector contains non-finite entries");
    config.validate(d.rows(), d.cols());

    RunTrace trace;
    trace.variant = config.variant;
    trace.initial_active_set = config.initial_active_set;
    IndexSet active = config.initial_active_set;
    validate_active_set(d, active);
    trace.initial_residual_norm = ComplementProjector(d, active).apply(y).norm();

    for (Index step = 0; step < config.max_iterations; ++step) {
        const ProjectedState state = projected_state(d, active, y);
        if (state.residual.norm() <= tolerance::zero_residual) {
            trace.stop_reason = StopReason::ZeroResidual;
            break;
        }
        Selection sel;
        try {
            sel = select_next(state, config.variant, config.tie_tolerance);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::AllAtomsDegenerate) throw;
            trace.stop_reason = StopReason::AllAtomsDegenerate;
            break;
        }
        active.push_back(sel.selected);

        StepRecord rec;
        rec.iteration = active.size() - 1;
        rec.selected = sel.selected;
        rec.tie_set = std::move(sel.tie_set);
        rec.correlations = std::move(sel.correlations);
        rec.residual_norm = ComplementProjector(d, active).apply(y).norm();
        const bool ambiguous = rec.tie_set.size() > 1;
        trace.steps.push_back(std::move(rec));

        if (ambiguous && config.tie_policy == TiePolicy::ReportAmbiguous) {
            trace.stop_reason = StopReason::AmbiguousTie;
            break;
        }
    }
    trace.final_active_set = std::move(active);
    return trace;
}

double ols_residual_bruteforce(const Dictionary& d, std::span<const Index> active, Index candidate, const Vector& y) {
    if (static_cast<Index>(y.size()) != d.rows())
        throw Error(ErrorCode::DimensionMismatch, "data vector length does not match dictionary rows");
    validate_active_set(d, active);
    if (candidate >= d.cols()) throw Error(ErrorCode::InvalidIndex, "candidate out of range", candidate);
    if (std::find(active.begin(), active.end(), candidate) != active.end())
        throw Error(ErrorCode::InvalidIndex, "candidate already active", candidate);

    const auto g = static_cast<Eigen::Index>(active.size());
    Matrix sub(d.atoms().rows(), g + 1);
    for (Eigen::Index c = 0; c < g; ++c) sub.col(c) = d.atom(active[static_cast<std::size_t>(c)]);
    sub.col(g) = d.atom(candidate);

    if (g > 0) {
        Eigen::JacobiSVD<Matrix> svd(sub.leftCols(g));
        const Vector& s = svd.singularValues();
        if (s[g - 1] < tolerance::dependent_atom * s[0])
            throw Error(ErrorCode::RankDeficientActiveSet, "active submatrix is rank deficient");
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sub);
    cod.setThreshold(tolerance::dependent_atom);
    const Vector coef = cod.solve(y);
    return (y - sub * coef).norm();
}

bool k_step_success(const RunTrace& trace, std::span<const Index> true_support) {
    const auto in_support = [&](Index i) {
        return std::find(true_support.begin(), true_support.end(), i) != true_support.end();
    };
    for (const auto& s : trace.steps)
        if (!in_support(s.selected)) return false;
    for (Index i : true_support)
        if (std::find(trace.final_active_set.begin(), trace.final_active_set.end(), i) == trace.final_active_set.end())
            return false;
    return true;
}

} // namespace greedcert
