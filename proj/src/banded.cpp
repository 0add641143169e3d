#include "linimpute/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "linimpute/error.hpp"

namespace linimpute {

banded_spd_matrix::banded_spd_matrix(std::size_t dim, std::size_t bandwidth)
    : dim_(dim), bandwidth_(dim == 0 ? 0 : std::min(bandwidth, dim - 1)), values_(dim * (bandwidth_ + 1), 0.0) {}

void banded_spd_matrix::set(std::size_t i, std::size_t j, double v) {
  if (i < j) std::swap(i, j);
  if (i >= dim_ || i - j > bandwidth_)
    fail(errc::dimension_mismatch, "entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside band");
  values_[slot(i, j)] = v;
}

void banded_spd_matrix::add_diagonal(double v) {
  for (std::size_t i = 0; i < dim_; ++i) values_[slot(i, i)] += v;
}

void banded_spd_matrix::scale(double factor) {
  for (auto& v : values_) v *= factor;
}

banded_spd_matrix banded_spd_matrix::from_storage(std::size_t dim, std::size_t bandwidth, std::vector<double> values) {
  banded_spd_matrix out(dim, bandwidth);
  if (out.bandwidth_ != bandwidth || values.size() != out.values_.size())
    fail(errc::dimension_mismatch, "band storage size does not match dimension and bandwidth");
  out.values_ = std::move(values);
  return out;
}

std::size_t banded_spd_matrix::occupied_bandwidth() const noexcept {
  std::size_t occupied = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const std::size_t first = first_column(i);
    for (std::size_t j = first; j + occupied < i; ++j) {
      if (values_[slot(i, j)] != 0.0) {
        occupied = i - j;
        break;
      }
    }
  }
  return occupied;
}

banded_spd_matrix banded_spd_matrix::with_bandwidth(std::size_t bandwidth) const {
  banded_spd_matrix out(dim_, bandwidth);
  const std::size_t keep = std::min(bandwidth_, out.bandwidth_);
  for (std::size_t i = 0; i < dim_; ++i) {
    const std::size_t first = i > keep ? i - keep : 0;
    for (std::size_t j = first; j <= i; ++j) out.values_[out.slot(i, j)] = values_[slot(i, j)];
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  const std::size_t n = a.size();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

double banded_factor::log_determinant() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < lower_.dim(); ++i) s += std::log(lower_(i, i));
  return 2.0 * s;
}

banded_factor banded_cholesky(const banded_spd_matrix& a) {
  const std::size_t n = a.dim();
  if (n == 0) fail(errc::dimension_mismatch, "cannot factor an empty matrix");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
  const double pivot_floor = 1e-12 * max_diag;

  banded_factor out;
  out.lower_ = a;
  banded_spd_matrix& l = out.lower_;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t first_i = l.first_column(i);
    std::span<double> row_i = l.row(i);
    for (std::size_t j = first_i; j <= i; ++j) {
      const std::size_t first_j = l.first_column(j);
      std::span<const double> row_j = std::as_const(l).row(j);
      const std::size_t len = j - first_i;
      double s = row_i[j - first_i] -
                 dot(std::span<const double>(row_i.data(), len), row_j.subspan(first_i - first_j, len));
      if (j == i) {
        if (!(s > pivot_floor) || max_diag <= 0.0)
          fail(errc::not_positive_definite, "pivot " + std::to_string(i) + " is not positive (" + std::to_string(s) + ")");
        row_i[i - first_i] = std::sqrt(s);
      } else {
        row_i[j - first_i] = s / row_j[j - first_j];
      }
    }
  }
  return out;
}

std::vector<double> forward_substitute(const banded_factor& f, std::span<const double> b) {
  const banded_spd_matrix& l = f.lower();
  const std::size_t n = l.dim();
  if (b.size() != n) fail(errc::dimension_mismatch, "right-hand side length does not match factor dimension");
  std::vector<double> y(n, 0.0);
  std::size_t start = 0;
  while (start < n && b[start] == 0.0) ++start;
  for (std::size_t i = start; i < n; ++i) {
    const std::size_t first = std::max(l.first_column(i), start);
    std::span<const double> row = l.row(i);
    const std::size_t offset = first - l.first_column(i);
    const double s = b[i] - dot(row.subspan(offset, i - first), std::span<const double>(y.data() + first, i - first));
    y[i] = s / row[i - l.first_column(i)];
  }
  return y;
}

std::vector<double> banded_solve(const banded_factor& f, std::span<const double> b) {
  std::vector<double> x = forward_substitute(f, b);
  const banded_spd_matrix& l = f.lower();
  for (std::size_t ii = l.dim(); ii-- > 0;) {
    std::span<const double> row = l.row(ii);
    const std::size_t first = l.first_column(ii);
    x[ii] /= row[ii - first];
    const double xi = x[ii];
    for (std::size_t k = first; k < ii; ++k) x[k] -= row[k - first] * xi;
  }
  return x;
}

banded_spd_matrix banded_inverse_band(const banded_factor& f, std::size_t width) {
  const banded_spd_matrix& l = f.lower();
  const std::size_t n = l.dim();
  const std::size_t b = l.bandwidth();
  width = std::max(width, b);
  banded_spd_matrix z(n, width);
  width = z.bandwidth();
  std::vector<double> column;  // L(k, i) for k in (i, i + b]
  std::vector<double> z_col;   // Z(k, j) for the same k
  for (std::size_t i = n; i-- > 0;) {
    const double lii = l(i, i);
    const std::size_t kmax = std::min(i + b, n - 1);
    column.clear();
    for (std::size_t k = i + 1; k <= kmax; ++k) column.push_back(l(k, i));
    const std::size_t jmax = std::min(i + width, n - 1);
    z_col.resize(column.size());
    for (std::size_t j = jmax + 1; j-- > i;) {
      for (std::size_t k = i + 1; k <= kmax; ++k) z_col[k - i - 1] = z(k, j);
      double s = (j == i ? 1.0 / lii : 0.0) - dot(column, z_col);
      z.set(j, i, s / lii);
    }
  }
  return z;
}

std::vector<double> banded_multiply(const banded_spd_matrix& a, std::span<const double> x) {
  const std::size_t n = a.dim();
  if (x.size() != n) fail(errc::dimension_mismatch, "vector length does not match matrix dimension");
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t first = a.first_column(i);
    std::span<const double> row = a.row(i);
    y[i] += dot(row, x.subspan(first, i - first + 1));
    for (std::size_t j = first; j < i; ++j) y[j] += row[j - first] * x[i];
  }
  return y;
}

}  // namespace linimpute
