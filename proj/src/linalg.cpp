#include "greedcert/linalg.hpp"

#include <cmath>
#include <string>

namespace greedcert {

Dictionary::Dictionary(Matrix atoms) : atoms_(std::move(atoms)) {
    gram_ = atoms_.transpose() * atoms_;
    // Symmetrize and pin the diagonal so the invariants hold to the last ulp.
    gram_ = 0.5 * (gram_ + gram_.transpose()).eval();
    gram_.diagonal().setOnes();
    coherence_ = 0.0;
    for (Eigen::Index j = 0; j < gram_.cols(); ++j)
        for (Eigen::Index i = 0; i < j; ++i)
            coherence_ = std::max(coherence_, std::abs(gram_(i, j)));
}

Dictionary normalize_columns(const Matrix& raw) {
    if (raw.rows() == 0 || raw.cols() == 0)
        throw Error(ErrorCode::InvalidDimensions, "dictionary must have at least one row and one column");
    if (!raw.allFinite())
        throw Error(ErrorCode::InvalidParameters, "dictionary contains non-finite entries");
    Matrix atoms = raw;
    for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
        const double norm = atoms.col(j).norm();
        if (norm < tolerance::zero_column)
            throw Error(ErrorCode::ZeroColumn, "column " + std::to_string(j) + " has zero norm",
                        static_cast<Index>(j));
        atoms.col(j) /= norm;
    }
    return Dictionary(std::move(atoms));
}

double mutual_coherence(const Dictionary& d) { return d.coherence(); }

ComplementProjector::ComplementProjector(Index dim) : basis_(static_cast<Eigen::Index>(dim), 0) {}

ComplementProjector::ComplementProjector(const Dictionary& d, std::span<const Index> active)
    : ComplementProjector(d.rows()) {
    for (Index i : active) add(d.atom(i));
}

void ComplementProjector::add(const Vector& v) {
    if (v.size() != basis_.rows())
        throw Error(ErrorCode::DimensionMismatch, "vector length does not match projector dimension");
    const double scale = v.norm();
    Vector w = apply(v);
    w = apply(w);
    const double norm = w.norm();
    if (scale == 0.0 || norm < tolerance::dependent_atom * scale)
        throw Error(ErrorCode::RankDeficientActiveSet,
                    "atom is numerically dependent on the active set (projected norm " + std::to_string(norm) + ")");
    basis_.conservativeResize(Eigen::NoChange, basis_.cols() + 1);
    basis_.col(basis_.cols() - 1) = w / norm;
    ++rank_;
}

Vector ComplementProjector::apply(const Vector& v) const {
    if (rank_ == 0) return v;
    return v - basis_ * (basis_.transpose() * v);
}

Matrix ComplementProjector::apply(const Matrix& vs) const {
    if (rank_ == 0) return vs;
    return vs - basis_ * (basis_.transpose() * vs);
}

void validate_active_set(const Dictionary& d, std::span<const Index> active) {
    std::vector<bool> seen(d.cols(), false);
    for (Index i : active) {
        if (i >= d.cols()) throw Error(ErrorCode::InvalidIndex, "active index out of range", i);
        if (seen[i]) throw Error(ErrorCode::InvalidIndex, "active index repeated", i);
        seen[i] = true;
    }
    if (active.size() >= d.cols())
        throw Error(ErrorCode::InvalidIndex, "active set must be a proper subset of the atoms");
}

Vector project_complement(const Dictionary& d, std::span<const Index> active, const Vector& v) {
    if (static_cast<Index>(v.size()) != d.rows())
        throw Error(ErrorCode::DimensionMismatch, "vector length does not match dictionary rows");
    validate_active_set(d, active);
    return ComplementProjector(d, active).apply(v);
}

namespace {

ProjectedState build_state(const Dictionary& d, std::span<const Index> active, const ComplementProjector& projector) {
    ProjectedState state;
    state.active_set.assign(active.begin(), active.end());
    state.active_mask.assign(d.cols(), false);
    for (Index i : active) state.active_mask[i] = true;

    state.projected = projector.apply(d.atoms());
    state.normalized = Matrix::Zero(state.projected.rows(), state.projected.cols());
    state.projected_norms = state.projected.colwise().norm().transpose();
    for (Eigen::Index i = 0; i < state.projected.cols(); ++i) {
        if (state.active_mask[static_cast<Index>(i)]) {
            // a~_i vanishes for active atoms; keep it exactly zero.
            state.projected.col(i).setZero();
            state.projected_norms[i] = 0.0;
            continue;
        }
        if (state.projected_norms[i] >= tolerance::dependent_atom)
            state.normalized.col(i) = state.projected.col(i) / state.projected_norms[i];
    }
    return state;
}

} // namespace

ProjectedState projected_atoms(const Dictionary& d, std::span<const Index> active) {
    validate_active_set(d, active);
    return build_state(d, active, ComplementProjector(d, active));
}

ProjectedState projected_state(const Dictionary& d, std::span<const Index> active, const Vector& y) {
    if (static_cast<Index>(y.size()) != d.rows())
        throw Error(ErrorCode::DimensionMismatch, "data vector length does not match dictionary rows");
    validate_active_set(d, active);
    const ComplementProjector projector(d, active);
    ProjectedState state = build_state(d, active, projector);
    state.residual = projector.apply(y);
    return state;
}

double welch_bound(Index m, Index n) {
    if (m == 0 || n < m)
        throw Error(ErrorCode::InvalidDimensions, "Welch bound needs n >= m >= 1");
    if (n == m) return 0.0;
    return std::sqrt(static_cast<double>(n - m) / (static_cast<double>(m) * static_cast<double>(n - 1)));
}

} // namespace greedcert
