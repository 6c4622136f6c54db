#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "greedcert/error.hpp"

namespace greedcert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = std::size_t;
/// Ordered sequence of 0-based atom indices (selection order matters).
using IndexSet = std::vector<Index>;

/// Numerical slack used throughout the library. Exact equalities of the
/// analysis (equiangular instances, boundary cases) are checked against these.
namespace tolerance {
inline constexpr double unit_norm = 1e-12;
inline constexpr double zero_column = 1e-14;
// Projected norm below which an atom counts as lying in span(A_Q).
inline constexpr double dependent_atom = 1e-10;
inline constexpr double orthogonality = 1e-10;
inline constexpr double zero_residual = 1e-12;
inline constexpr double tie = 1e-9;
// Relative gap under which a failed strict inequality is flagged as equality.
inline constexpr double boundary = 1e-12;
} // namespace tolerance

/// Dictionary with unit-norm columns, its Gram matrix and mutual coherence.
/// Immutable once built; obtain one through normalize_columns().
class Dictionary {
public:
    const Matrix& atoms() const noexcept { return atoms_; }
    const Matrix& gram() const noexcept { return gram_; }
    double coherence() const noexcept { return coherence_; }
    Index rows() const noexcept { return static_cast<Index>(atoms_.rows()); }
    Index cols() const noexcept { return static_cast<Index>(atoms_.cols()); }
    auto atom(Index i) const { return atoms_.col(static_cast<Eigen::Index>(i)); }

    friend Dictionary normalize_columns(const Matrix& raw);

private:
    explicit Dictionary(Matrix atoms);

    Matrix atoms_;
    Matrix gram_;
    double coherence_ = 0.0;
};

/// Scales every column to unit Euclidean norm. Throws ZeroColumn(index) when a
/// column norm is below tolerance::zero_column.
Dictionary normalize_columns(const Matrix& raw);

/// max_{i != j} |<a_i, a_j>|, 0 for a single atom.
double mutual_coherence(const Dictionary& d);

/// Orthogonal-complement projector P = I - A_Q A_Q^+ held as an orthonormal
/// basis of span(A_Q), grown one atom at a time (classical Gram-Schmidt with
/// one re-orthogonalization pass).
class ComplementProjector {
public:
    explicit ComplementProjector(Index dim);
    ComplementProjector(const Dictionary& d, std::span<const Index> active);

    /// Adds v to the spanned subspace. Throws RankDeficientActiveSet when the
    /// component of v orthogonal to the current span is below
    /// tolerance::dependent_atom relative to ||v||.
    void add(const Vector& v);

    Vector apply(const Vector& v) const;
    Matrix apply(const Matrix& vs) const;

    Index rank() const noexcept { return rank_; }
    Index dim() const noexcept { return static_cast<Index>(basis_.rows()); }

private:
    Matrix basis_;
    Index rank_ = 0;
};

/// Projected atoms for an active set Q, optionally with the residual r^Q.
struct ProjectedState {
    IndexSet active_set;
    std::vector<bool> active_mask;
    Vector residual;   // r^Q = P y; empty unless built with a data vector
    Matrix projected;  // column i: a~_i = P a_i
    Matrix normalized; // column i: b~_i = a~_i / ||a~_i||, or 0 when a~_i is numerically 0
    Vector projected_norms;

    bool is_active(Index i) const { return active_mask[i]; }
    bool is_degenerate(Index i) const { return projected_norms[static_cast<Eigen::Index>(i)] < tolerance::dependent_atom; }
};

/// Checks Q for out-of-range or repeated indices and that it is a proper subset.
void validate_active_set(const Dictionary& d, std::span<const Index> active);

Vector project_complement(const Dictionary& d, std::span<const Index> active, const Vector& v);

ProjectedState projected_atoms(const Dictionary& d, std::span<const Index> active);

/// projected_atoms() plus the residual r^Q = P y.
ProjectedState projected_state(const Dictionary& d, std::span<const Index> active, const Vector& y);

/// sqrt((n - m) / (m (n - 1))); throws InvalidDimensions when n < m or m == 0.
double welch_bound(Index m, Index n);

} // namespace greedcert
