#include "ocpstab/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ocpstab/errors.hpp"

namespace ocpstab {

BandedMatrix::BandedMatrix(int n, int lower_bandwidth, int upper_bandwidth)
    : n_(n), kl_(lower_bandwidth), ku_(upper_bandwidth), ld_(2 * lower_bandwidth + upper_bandwidth + 1) {
  if (n < 1 || kl_ < 0 || ku_ < 0 || kl_ >= n || ku_ >= n) {
    throw ContractViolation("BandedMatrix: invalid dimensions");
  }
  data_.assign(static_cast<size_t>(ld_) * n_, 0.0);
}

double& BandedMatrix::at(int i, int j) {
  if (!in_band(i, j)) throw ContractViolation("BandedMatrix: entry outside band");
  return storage(i, j);
}

double BandedMatrix::at(int i, int j) const {
  if (!in_band(i, j)) throw ContractViolation("BandedMatrix: entry outside band");
  return data_[static_cast<size_t>(j) * ld_ + (kl_ + ku_ + i - j)];
}

BandedLU::BandedLU(BandedMatrix matrix) : a_(std::move(matrix)), pivot_(a_.n_) {
  const int n = a_.n_, kl = a_.kl_, ku = a_.ku_;
  const int kv = kl + ku;  // usable superdiagonals after pivoting fill-in
  for (int k = 0; k < n; ++k) pivot_[k] = k;

  for (int k = 0; k < n; ++k) {
    const int lend = std::min(kl, n - 1 - k);
    int p = 0;
    double pmax = std::abs(a_.storage(k, k));
    for (int i = 1; i <= lend; ++i) {
      const double m = std::abs(a_.storage(k + i, k));
      if (m > pmax) { pmax = m; p = i; }
    }
    if (pmax == 0.0) {
      throw SolverError("banded LU: zero pivot at column " + std::to_string(k));
    }
    pivot_[k] = k + p;
    const int jend = std::min(n - 1, k + kv);
    if (p != 0) {
      for (int j = k; j <= jend; ++j) {
        std::swap(a_.storage(k, j), a_.storage(k + p, j));
      }
    }
    const double inv_piv = 1.0 / a_.storage(k, k);
    for (int i = 1; i <= lend; ++i) a_.storage(k + i, k) *= inv_piv;
    for (int j = k + 1; j <= jend; ++j) {
      const double f = a_.storage(k, j);
      if (f != 0.0) {
        for (int i = 1; i <= lend; ++i) {
          a_.storage(k + i, j) -= a_.storage(k + i, k) * f;
        }
      }
    }
  }
}

void BandedLU::solve_in_place(std::span<double> rhs) const {
  const int n = a_.n_, kl = a_.kl_, ku = a_.ku_;
  const int kv = kl + ku;
  if (static_cast<int>(rhs.size()) != n) {
    throw ContractViolation("BandedLU::solve: rhs size mismatch");
  }
  auto entry = [this](int i, int j) {
    return a_.data_[static_cast<size_t>(j) * a_.ld_ + (a_.kl_ + a_.ku_ + i - j)];
  };
  for (int k = 0; k < n; ++k) {
    if (pivot_[k] != k) std::swap(rhs[k], rhs[pivot_[k]]);
    const int lend = std::min(kl, n - 1 - k);
    for (int i = 1; i <= lend; ++i) rhs[k + i] -= entry(k + i, k) * rhs[k];
  }
  for (int j = n - 1; j >= 0; --j) {
    rhs[j] /= entry(j, j);
    const int istart = std::max(0, j - kv);
    for (int i = istart; i < j; ++i) rhs[i] -= entry(i, j) * rhs[j];
  }
}

std::vector<double> BandedLU::solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

}  // namespace ocpstab
