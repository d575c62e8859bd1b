#include "arcoh/integer_matrix.hpp"

#include "arcoh/error.hpp"

#include <cstdlib>
#include <utility>

namespace arcoh {

namespace {

long long checked_mul(long long a, long long b) {
  long long out;
  if (__builtin_mul_overflow(a, b, &out))
    throw Error(ErrorCode::integer_overflow, "integer overflow in lattice bookkeeping");
  return out;
}

long long checked_add(long long a, long long b) {
  long long out;
  if (__builtin_add_overflow(a, b, &out))
    throw Error(ErrorCode::integer_overflow, "integer overflow in lattice bookkeeping");
  return out;
}

// x*a + y*b = g >= 0
struct Bezout {
  long long g, x, y;
};

Bezout extended_gcd(long long a, long long b) {
  long long old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const long long q = old_r / r;
    std::tie(old_r, r) = std::pair{r, old_r - q * r};
    std::tie(old_s, s) = std::pair{s, old_s - q * s};
    std::tie(old_t, t) = std::pair{t, old_t - q * t};
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// row_i <- x row_i + y row_j ; row_j <- p row_i + q row_j  (old rows on the right)
void combine_rows(IntMatrix& m, Eigen::Index i, Eigen::Index j, long long x, long long y, long long p,
                  long long q) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const long long a = m(i, c), b = m(j, c);
    m(i, c) = checked_add(checked_mul(x, a), checked_mul(y, b));
    m(j, c) = checked_add(checked_mul(p, a), checked_mul(q, b));
  }
}

void combine_cols(IntMatrix& m, Eigen::Index i, Eigen::Index j, long long x, long long y, long long p,
                  long long q) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const long long a = m(r, i), b = m(r, j);
    m(r, i) = checked_add(checked_mul(x, a), checked_mul(y, b));
    m(r, j) = checked_add(checked_mul(p, a), checked_mul(q, b));
  }
}

}  // namespace

ColumnReduction column_reduce(const IntMatrix& g) {
  const Eigen::Index n = g.cols();
  ColumnReduction out;
  out.reduced = g;
  out.unimodular = IntMatrix::Identity(n, n);
  out.unimodular_inverse = IntMatrix::Identity(n, n);
  Eigen::Index pivot = 0;
  for (Eigen::Index row = 0; row < g.rows() && pivot < n; ++row) {
    for (Eigen::Index l = pivot + 1; l < n; ++l) {
      const long long v = out.reduced(row, l);
      if (v == 0) continue;
      const long long u = out.reduced(row, pivot);
      const Bezout b = extended_gcd(u, v);
      const long long ug = u / b.g, vg = v / b.g;
      // new col_p = x col_p + y col_l ; new col_l = -v/g col_p + u/g col_l
      combine_cols(out.reduced, pivot, l, b.x, b.y, -vg, ug);
      combine_cols(out.unimodular, pivot, l, b.x, b.y, -vg, ug);
      // inverse update: rows p, l of U^-1 get E^-1 = [[u/g, v/g], [-y, x]]
      combine_rows(out.unimodular_inverse, pivot, l, ug, vg, -b.y, b.x);
    }
    if (out.reduced(row, pivot) != 0) ++pivot;
  }
  out.rank = static_cast<int>(pivot);
  return out;
}

IntMatrix row_hermite_form(const IntMatrix& g) {
  IntMatrix m = g;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < m.cols() && r < m.rows(); ++c) {
    for (Eigen::Index i = r + 1; i < m.rows(); ++i) {
      const long long v = m(i, c);
      if (v == 0) continue;
      const long long u = m(r, c);
      const Bezout b = extended_gcd(u, v);
      combine_rows(m, r, i, b.x, b.y, -v / b.g, u / b.g);
    }
    if (m(r, c) == 0) continue;
    if (m(r, c) < 0) m.row(r) = -m.row(r);
    const long long p = m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      const long long q = floor_div(m(i, c), p);
      if (q == 0) continue;
      for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = checked_add(m(i, k), -checked_mul(q, m(r, k)));
    }
    ++r;
  }
  return m.topRows(r);
}

int integer_rank(const IntMatrix& g) { return column_reduce(g).rank; }

IntMatrix saturate(const IntMatrix& g) {
  const ColumnReduction cr = column_reduce(g);
  if (cr.rank == 0) return IntMatrix(0, g.cols());
  return row_hermite_form(cr.unimodular_inverse.topRows(cr.rank));
}

IntMatrix complete_to_basis(const IntMatrix& g) { return column_reduce(g).unimodular_inverse; }

bool lexicographically_less(const IntMatrix& a, const IntMatrix& b) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return a(i, j) < b(i, j);
  return false;
}

}  // namespace arcoh
