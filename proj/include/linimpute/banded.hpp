#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace linimpute {

// Symmetric banded matrix holding the lower triangle of the band.
// Row i stores columns [i - bandwidth, i]; entries outside the band are zero.
class banded_spd_matrix {
 public:
  banded_spd_matrix() = default;
  banded_spd_matrix(std::size_t dim, std::size_t bandwidth);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t bandwidth() const noexcept { return bandwidth_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    if (i < j) std::swap(i, j);
    if (i - j > bandwidth_) return 0.0;
    return values_[slot(i, j)];
  }
  // Requires |i - j| <= bandwidth.
  void set(std::size_t i, std::size_t j, double v);
  void add_diagonal(double v);
  void scale(double factor);

  // Contiguous stored entries of row i for columns [first_column(i), i].
  std::size_t first_column(std::size_t i) const noexcept { return i > bandwidth_ ? i - bandwidth_ : 0; }
  std::span<const double> row(std::size_t i) const noexcept {
    const std::size_t first = first_column(i);
    return {values_.data() + slot(i, first), i - first + 1};
  }
  std::span<double> row(std::size_t i) noexcept {
    const std::size_t first = first_column(i);
    return {values_.data() + slot(i, first), i - first + 1};
  }

  // Raw row-major band storage, dim x (bandwidth + 1), unused corner slots zero.
  const std::vector<double>& storage() const noexcept { return values_; }
  static banded_spd_matrix from_storage(std::size_t dim, std::size_t bandwidth, std::vector<double> values);

  // Smallest bandwidth that holds every nonzero entry.
  std::size_t occupied_bandwidth() const noexcept;
  banded_spd_matrix with_bandwidth(std::size_t bandwidth) const;

  bool operator==(const banded_spd_matrix&) const = default;

 private:
  std::size_t slot(std::size_t i, std::size_t j) const noexcept { return i * (bandwidth_ + 1) + bandwidth_ - (i - j); }

  std::size_t dim_ = 0;
  std::size_t bandwidth_ = 0;
  std::vector<double> values_;
};

// Lower Cholesky factor with the same band layout as its source matrix.
class banded_factor {
 public:
  std::size_t dim() const noexcept { return lower_.dim(); }
  std::size_t bandwidth() const noexcept { return lower_.bandwidth(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return i >= j ? lower_(i, j) : 0.0; }
  const banded_spd_matrix& lower() const noexcept { return lower_; }
  double log_determinant() const noexcept;  // of the factored matrix

 private:
  friend banded_factor banded_cholesky(const banded_spd_matrix& a);
  banded_spd_matrix lower_;
};

// Throws not_positive_definite when a pivot falls to <= 1e-12 x the largest diagonal.
banded_factor banded_cholesky(const banded_spd_matrix& a);

std::vector<double> banded_solve(const banded_factor& l, std::span<const double> b);
// Forward substitution only: returns L^{-1} b, skipping the leading zeros of b.
std::vector<double> forward_substitute(const banded_factor& l, std::span<const double> b);

// Entries of the inverse of L L^T inside |i - j| <= width (width >= bandwidth of L),
// computed by the selected-inversion recurrence without forming the dense inverse.
banded_spd_matrix banded_inverse_band(const banded_factor& l, std::size_t width);

// y = A x for symmetric banded A.
std::vector<double> banded_multiply(const banded_spd_matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace linimpute
