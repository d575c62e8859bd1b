#include "oracles.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>

namespace oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;

long long bareiss_determinant(std::vector<std::vector<long long>> a) {
  const std::size_t n = a.size();
  long long sign = 1, prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k] == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      std::swap(a[p], a[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

// All k x k minors of a k x n integer matrix, columns in lexicographic order.
std::vector<long long> pluecker(const std::vector<std::vector<long long>>& rows) {
  const std::size_t k = rows.size(), n = rows[0].size();
  std::vector<long long> out;
  std::vector<int> mask(n, 0);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(k), 1);
  do {
    std::vector<std::vector<long long>> sub(k);
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = 0; c < n; ++c)
        if (mask[c]) sub[r].push_back(rows[r][c]);
    out.push_back(bareiss_determinant(sub));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

double hermite_gamma(int n) {
  switch (n) {
    case 1: return 1.0;
    case 2: return std::sqrt(4.0 / 3.0);
    case 3: return std::cbrt(2.0);
    case 4: return std::sqrt(2.0);
    default: return 1.0 + n / 4.0;
  }
}

}  // namespace

double theta_scaled_integers(double c) {
  double sum = 1.0;
  for (int m = 1; m < 100000; ++m) {
    const double term = 2.0 * std::exp(-kPi * c * c * m * m);
    sum += term;
    if (term < 1e-300 || term < 1e-20 * sum) break;
  }
  return sum;
}

std::vector<std::pair<std::vector<long long>, double>> grid_scan(const Eigen::MatrixXd& gram, double bound) {
  const Eigen::Index n = gram.rows();
  const Eigen::MatrixXd inv = gram.inverse();
  std::vector<long long> limit(n);
  for (Eigen::Index i = 0; i < n; ++i)
    limit[i] = static_cast<long long>(std::floor(std::sqrt(bound * inv(i, i)) + 1e-9));
  std::vector<std::pair<std::vector<long long>, double>> out;
  std::vector<long long> x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = -limit[i];
  while (true) {
    bool positive_first = false, zero = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (x[i] == 0) continue;
      zero = false;
      positive_first = x[i] > 0;
      break;
    }
    if (!zero && positive_first) {
      Eigen::VectorXd v(n);
      for (Eigen::Index i = 0; i < n; ++i) v[i] = static_cast<double>(x[i]);
      const double q = v.dot(gram * v);
      if (q <= bound * (1 + 1e-12)) out.emplace_back(x, q);
    }
    Eigen::Index i = 0;
    while (i < n && x[i] == limit[i]) {
      x[i] = -limit[i];
      ++i;
    }
    if (i == n) break;
    ++x[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

long long quadratic_discriminant(long long D) {
  // disc(1, w) = (w - w')^2
  const std::complex<double> root = std::sqrt(std::complex<double>(static_cast<double>(D), 0.0));
  const bool one_mod_four = ((D % 4) + 4) % 4 == 1;
  const std::complex<double> w = one_mod_four ? (1.0 + root) / 2.0 : root;
  const std::complex<double> w_conj = one_mod_four ? (1.0 - root) / 2.0 : -root;
  const std::complex<double> disc = (w - w_conj) * (w - w_conj);
  return std::llround(std::abs(disc.real()));
}

int integer_rank(std::vector<std::vector<long long>> rows) {
  if (rows.empty()) return 0;
  const std::size_t n = rows[0].size();
  int rank = 0;
  for (std::size_t c = 0; c < n && rank < static_cast<int>(rows.size()); ++c) {
    std::size_t p = static_cast<std::size_t>(rank);
    while (p < rows.size() && rows[p][c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[static_cast<std::size_t>(rank)]);
    const auto& piv = rows[static_cast<std::size_t>(rank)];
    for (std::size_t r = static_cast<std::size_t>(rank) + 1; r < rows.size(); ++r) {
      const long long f = rows[r][c], g = piv[c];
      long long common = 0;
      for (std::size_t j = 0; j < n; ++j) {
        rows[r][j] = rows[r][j] * g - f * piv[j];
        common = std::gcd(common, rows[r][j]);
      }
      if (common > 1)
        for (auto& v : rows[r]) v /= common;
    }
    ++rank;
  }
  return rank;
}

std::vector<std::pair<int, double>> hn_polygon(const Eigen::MatrixXd& basis) {
  const int n = static_cast<int>(basis.rows());
  const Eigen::MatrixXd gram = basis * basis.transpose();
  const double covol = std::abs(basis.determinant());
  const double total_degree = -std::log(covol);
  if (n == 1) return {{0, 0.0}, {1, total_degree}};

  double lambda1_sq = gram.diagonal().minCoeff();
  for (const auto& [x, q] : grid_scan(gram, lambda1_sq)) lambda1_sq = std::min(lambda1_sq, q);
  const double lambda1 = std::sqrt(lambda1_sq);
  const double lambda_n = std::pow(hermite_gamma(n), n / 2.0) * covol / std::pow(lambda1, n - 1);
  const auto vectors = grid_scan(gram, 4.0 * lambda_n * lambda_n);

  std::vector<double> best(static_cast<std::size_t>(n + 1), -INFINITY);
  best[0] = 0.0;
  best[static_cast<std::size_t>(n)] = total_degree;
  for (int k = 1; k < n; ++k) {
    std::map<std::vector<long long>, double> seen;
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    const int m = static_cast<int>(vectors.size());
    if (m < k) continue;
    while (true) {
      std::vector<std::vector<long long>> rows;
      for (int i : idx) rows.push_back(vectors[static_cast<std::size_t>(i)].first);
      std::vector<long long> p = pluecker(rows);
      long long g = 0;
      for (long long v : p) g = std::gcd(g, v);
      if (g != 0) {
        for (auto& v : p) v /= g;
        const auto first = std::find_if(p.begin(), p.end(), [](long long v) { return v != 0; });
        if (*first < 0)
          for (auto& v : p) v = -v;
        if (!seen.count(p)) {
          Eigen::MatrixXd c(k, n);
          for (int r = 0; r < k; ++r)
            for (int j = 0; j < n; ++j) c(r, j) = static_cast<double>(rows[static_cast<std::size_t>(r)][j]);
          const double gen_covol = std::sqrt((c * gram * c.transpose()).determinant());
          const double degree = -std::log(gen_covol / static_cast<double>(g));
          seen.emplace(p, degree);
          best[static_cast<std::size_t>(k)] = std::max(best[static_cast<std::size_t>(k)], degree);
        }
      }
      int pos = k - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (int j = pos + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  // upper concave hull, collinear points dropped
  std::vector<std::pair<int, double>> hull;
  for (int k = 0; k <= n; ++k) {
    if (!std::isfinite(best[static_cast<std::size_t>(k)])) continue;
    const std::pair<int, double> pt{k, best[static_cast<std::size_t>(k)]};
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.first - a.first) * (pt.second - a.second) - (b.second - a.second) * (pt.first - a.first);
      if (cross >= -1e-10) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(pt);
  }
  return hull;
}

double completed_zeta_real(double s) {
  return std::pow(kPi, -s / 2) * boost::math::tgamma(s / 2) * boost::math::zeta(s);
}

}  // namespace oracle
