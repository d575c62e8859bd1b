#pragma once

// Exact integer linear algebra for sublattice bookkeeping: Hermite forms,
// saturation and basis completion.  All entries are 64-bit; any overflow
// raises Error{integer_overflow} instead of wrapping.

#include <Eigen/Core>

namespace arcoh {

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
using IntRowVector = Eigen::Matrix<long long, 1, Eigen::Dynamic>;

struct ColumnReduction {
  IntMatrix reduced;             // g * unimodular = [H | 0], H lower triangular
  IntMatrix unimodular;          // U
  IntMatrix unimodular_inverse;  // U^-1
  int rank = 0;
};

ColumnReduction column_reduce(const IntMatrix& g);

/// Canonical row Hermite normal form; zero rows are dropped.
IntMatrix row_hermite_form(const IntMatrix& g);

int integer_rank(const IntMatrix& g);

/// Basis (in row Hermite form) of (Q-span of rows) intersected with Z^N.
IntMatrix saturate(const IntMatrix& g);

/// Unimodular N x N matrix whose first k rows span the saturated row lattice
/// of g (k = rank of g).
IntMatrix complete_to_basis(const IntMatrix& g);

/// Lexicographic comparison of same-shape matrices, row-major.
bool lexicographically_less(const IntMatrix& a, const IntMatrix& b);

}  // namespace arcoh
