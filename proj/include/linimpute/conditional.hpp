#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <utility>
#include <vector>

#include "linimpute/banded.hpp"

namespace linimpute {

// Sigma restricted to the given sorted index set, with bandwidth recomputed
// from the surviving nonzero entries.
banded_spd_matrix restrict_to(const banded_spd_matrix& sigma, std::span<const std::size_t> index);

// Gaussian conditioning of the untyped SNPs on the typed ones for a fixed
// covariance and typed pattern:
//   mean     = mu_u + S_ut (S_tt + inflation I)^{-1} (y_t - mu_t)
//   variance = diag(S_uu - S_ut (S_tt + inflation I)^{-1} S_tu)
// The factorization is done once; means for many observation vectors reuse it.
// sigma must outlive the solver.
class conditional_solver {
 public:
  enum class mode {
    variance,             // variance diagonal only
    untyped_covariance,   // also conditional covariances between untyped pairs
  };

  conditional_solver(const banded_spd_matrix& sigma, std::vector<std::size_t> typed, double inflation,
                     mode m = mode::variance);

  const std::vector<std::size_t>& typed() const noexcept { return typed_; }
  const std::vector<std::size_t>& untyped() const noexcept { return untyped_; }
  double inflation() const noexcept { return inflation_; }
  const banded_factor& factor() const noexcept { return factor_; }

  // (S_tt + inflation I)^{-1} r for a residual over the typed set.
  std::vector<double> solve(std::span<const double> typed_residual) const;
  // Conditional means over the untyped set, given the full-length prior mean.
  std::vector<double> mean(std::span<const double> mu, std::span<const double> typed_values) const;
  // Unclamped variance diagonal over the untyped set (may hold tiny negative round-off).
  const std::vector<double>& raw_variance() const noexcept { return variance_; }

  // Conditional covariance between untyped positions a and b (indices into untyped()).
  // Requires mode::untyped_covariance.
  double covariance(std::size_t a, std::size_t b) const;

  // Log density of N(0, S_tt + inflation I) at the residual.
  double log_density(std::span<const double> typed_residual) const;

 private:
  struct coupling {
    std::size_t first = 0;  // first typed position coupled to this untyped SNP
    std::vector<double> values;
  };
  void compute_whitened();
  void compute_variance_whitened();
  void compute_variance_selected_inverse();

  const banded_spd_matrix* sigma_;
  std::vector<std::size_t> typed_;
  std::vector<std::size_t> untyped_;
  double inflation_;
  banded_factor factor_;
  std::vector<coupling> couplings_;
  std::vector<double> variance_;
  std::vector<std::vector<double>> whitened_;  // tail of L^{-1} S_tu from couplings_[u].first
};

struct conditional_result {
  std::vector<double> mean;
  std::vector<double> variance;
};

// One-shot conditioning. typed must be a nonempty strict subset of [0, p).
// Variance entries in [-1e-12, 0) are clamped to 0.
conditional_result conditional_gaussian(std::span<const double> mu, const banded_spd_matrix& sigma,
                                        std::span<const std::size_t> typed, std::span<const double> typed_values,
                                        double inflation);

// Shares solvers between requests with the same typed pattern and inflation.
// Readers run concurrently; insertion takes the writer lock.
class factor_cache {
 public:
  explicit factor_cache(const banded_spd_matrix& sigma,
                        conditional_solver::mode m = conditional_solver::mode::variance)
      : sigma_(&sigma), mode_(m) {}

  std::shared_ptr<const conditional_solver> get(const std::vector<std::size_t>& typed, double inflation);
  std::size_t size() const;

 private:
  const banded_spd_matrix* sigma_;
  conditional_solver::mode mode_;
  mutable std::shared_mutex mutex_;
  std::map<std::pair<std::vector<std::size_t>, double>, std::shared_ptr<const conditional_solver>> entries_;
};

}  // namespace linimpute
