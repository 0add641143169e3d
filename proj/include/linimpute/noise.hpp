#pragma once

#include <cstddef>

#include "linimpute/imputation.hpp"
#include "linimpute/shrinkage.hpp"
#include "linimpute/types.hpp"

namespace linimpute {

struct noise_model {
  double sigma2 = 1.0;
  double eps2 = 0.0;
  double loglik = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

inline constexpr double sigma2_lower = 1e-6;
inline constexpr double sigma2_upper = 1e2;
inline constexpr double eps2_upper = 0.25;
inline constexpr std::size_t min_typed_for_fit = 10;

// Log density of N(mu_t, sigma2 * S_tt + eps2 * I) at the typed observations.
double log_likelihood(const moment_model& model, const frequency_vector& observed, double sigma2, double eps2);

struct noise_fit_options {
  bool estimate_eps = true;
  double tolerance = 1e-6;
  std::size_t max_evaluations = 200;
};

// Maximum-likelihood (sigma2, eps2) within the bounds above. The search runs
// over lambda = eps2 / sigma2 with sigma2 profiled out in closed form and
// clamped to its feasible interval, so every evaluation costs one factorization.
noise_model fit_noise(const moment_model& model, const frequency_vector& observed,
                      const noise_fit_options& options = {});

// Posterior means and variances of the true typed frequencies given the noisy
// observations. Entries follow the typed SNPs in order.
imputation_result denoise_typed(const moment_model& model, const frequency_vector& observed, const noise_model& noise);

}  // namespace linimpute
