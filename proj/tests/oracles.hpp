#pragma once

// Reference computations used to derive expected values.  None of these call
// into the library's enumeration, reduction or Hermite-form code.

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace oracle {

/// sum_{m in Z} exp(-pi c^2 m^2) by direct summation.
double theta_scaled_integers(double c);

/// Lattice points (one per +-pair) with x^T G x <= bound, by scanning the box
/// |x_i| <= sqrt(bound (G^-1)_ii).
std::vector<std::pair<std::vector<long long>, double>> grid_scan(const Eigen::MatrixXd& gram, double bound);

/// |disc| of Q(sqrt D) from the conjugates of the integral basis.
long long quadratic_discriminant(long long D);

/// Harder-Narasimhan polygon of the Z-lattice with basis rows `basis`, as the
/// upper concave hull of (rank, degree) over all saturated sublattices spanned
/// by vectors with Q <= 4 x (Minkowski bound on lambda_N)^2.
std::vector<std::pair<int, double>> hn_polygon(const Eigen::MatrixXd& basis);

/// Exact rank of a small integer matrix (fraction-free elimination).
int integer_rank(std::vector<std::vector<long long>> rows);

/// Completed Riemann zeta for real s > 1 from Boost special functions.
double completed_zeta_real(double s);

}  // namespace oracle
