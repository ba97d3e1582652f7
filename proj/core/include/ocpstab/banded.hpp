#pragma once

#include <span>
#include <vector>

namespace ocpstab {

/// General banded matrix in LAPACK-style band storage. The layout reserves
/// kl extra superdiagonals so an in-place LU with partial pivoting can hold
/// its fill-in.
class BandedMatrix {
 public:
  BandedMatrix(int n, int lower_bandwidth, int upper_bandwidth);

  int size() const { return n_; }
  int lower_bandwidth() const { return kl_; }
  int upper_bandwidth() const { return ku_; }

  /// Entry (i, j); (i, j) must satisfy -ku <= i - j <= kl.
  double& at(int i, int j);
  double at(int i, int j) const;
  void add(int i, int j, double value) { at(i, j) += value; }

  bool in_band(int i, int j) const {
    return i >= 0 && j >= 0 && i < n_ && j < n_ && i - j <= kl_ && j - i <= ku_;
  }

 private:
  friend class BandedLU;
  int n_, kl_, ku_, ld_;
  std::vector<double> data_;

  double& storage(int i, int j) { return data_[static_cast<size_t>(j) * ld_ + (kl_ + ku_ + i - j)]; }
};

/// LU factorization with row partial pivoting of a banded matrix.
/// Throws SolverError if an exactly zero pivot is met.
class BandedLU {
 public:
  explicit BandedLU(BandedMatrix matrix);

  void solve_in_place(std::span<double> rhs) const;
  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  BandedMatrix a_;
  std::vector<int> pivot_;
};

}  // namespace ocpstab
