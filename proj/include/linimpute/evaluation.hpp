#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "linimpute/shrinkage.hpp"
#include "linimpute/types.hpp"

namespace linimpute {

struct mask_plan {
  std::size_t stride = 0;
  std::size_t offset = 0;

  // {offset, offset + stride, ...} below p
  std::vector<std::size_t> masked(std::size_t p) const;
};

// One plan per offset 0..k-1. Needs k >= 2 and p > k.
std::vector<mask_plan> mask_plans(std::size_t p, std::size_t k);

double rmse(std::span<const double> truth, std::span<const double> estimate);
double genotype_error_rate(std::span<const int> truth, std::span<const int> calls);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

struct z_report {
  std::vector<double> z;
  std::vector<std::size_t> bins;  // equal-probability bins under N(0,1)
  double chi_square = 0.0;
  double p_value = 1.0;

  // Observed over expected count in the two outer bins, minus one.
  double tail_excess() const;
};

// Interior edges Phi^{-1}(i / bins), i = 1..bins-1.
std::vector<double> normal_bin_edges(std::size_t bins = 20);

z_report z_calibration(std::span<const double> truth, std::span<const double> mean, std::span<const double> variance,
                       std::size_t bins = 20);

struct call_rate_point {
  double threshold = 0.0;
  double call_rate = 0.0;
  std::optional<double> error_rate;  // absent when nothing is called
};

// errors[i] != 0 marks a wrong hard call. A SNP is called when its variance is below the threshold.
std::vector<call_rate_point> call_rate_curve(std::span<const double> variance, std::span<const std::uint8_t> errors,
                                             std::span<const double> thresholds);

struct frequency_cv_options {
  std::size_t stride = 25;
  bool fit_sigma2 = false;  // profile sigma2 on each fold's typed SNPs (eps2 = 0)
  double sigma2 = 1.0;
  double eps2 = 0.0;
};

struct frequency_fold {
  mask_plan plan;
  std::vector<std::size_t> index;
  std::vector<double> truth;
  std::vector<double> estimate;
  std::vector<double> variance;
  std::vector<double> naive;  // panel frequency
  double sigma2 = 1.0;
  double rmse = 0.0;
  double naive_rmse = 0.0;
};

struct frequency_cv_report {
  std::vector<frequency_fold> folds;
  double rmse = 0.0;  // pooled over all masked SNPs
  double naive_rmse = 0.0;
};

// truth: full-length observed frequencies; every SNP is masked in exactly one fold.
frequency_cv_report mask_cv_frequencies(const moment_model& model, std::span<const double> truth,
                                        const frequency_cv_options& options = {});

struct genotype_fold {
  mask_plan plan;
  std::vector<int> truth;
  std::vector<int> calls;
  std::vector<double> variance;
  double error_rate = 0.0;
};

struct genotype_cv_report {
  std::vector<genotype_fold> folds;
  double error_rate = 0.0;  // pooled over all masked cells
};

// genotypes: unphased matrix, rows are individuals. Cells already missing are not scored.
genotype_cv_report mask_cv_genotypes(const moment_model& model, const panel& genotypes, std::size_t stride,
                                     double sigma2 = 1.0);

enum class predictor_scheme { flanking, top_correlated };

struct baseline_estimate {
  double value = 0.0;
  bool jittered = false;  // predictor covariance was singular and got 1e-10 added to its diagonal
};

// Conditional-mean prediction from raw panel moments using 2k predictors among
// the typed SNPs: k nearest on each side, or the 2k most correlated with the
// target (ties: smaller distance, then lower index). k = 0 returns the panel frequency.
baseline_estimate baseline_unregularized(const empirical_moments& moments, std::span<const snp_meta> snps,
                                         const frequency_vector& observed, std::size_t target, std::size_t k,
                                         predictor_scheme scheme);
baseline_estimate baseline_unregularized(const panel& reference, const frequency_vector& observed, std::size_t target,
                                         std::size_t k, predictor_scheme scheme);

struct baseline_row {
  predictor_scheme scheme = predictor_scheme::flanking;
  std::size_t k = 0;
  double rmse = 0.0;
  std::size_t jittered = 0;
};

// Masking cross-validation of the baseline for each k.
std::vector<baseline_row> baseline_cv(const panel& reference, std::span<const double> truth, std::size_t stride,
                                      std::span<const std::size_t> ks, predictor_scheme scheme);

struct noise_study_row {
  double true_eps = 0.0;
  double estimated_eps = 0.0;
  double sigma2 = 0.0;
  double raw_rmse = 0.0;
  double denoised_rmse = 0.0;
  bool diverged = false;
};

// For each eps: add N(0, eps^2) noise to the truth (clamped to [0,1]), fit the
// noise model over all SNPs as typed, denoise, and score both against the truth.
std::vector<noise_study_row> simulate_noise_study(const moment_model& model, std::span<const double> truth,
                                                  std::span<const double> eps_grid, std::uint64_t seed);

}  // namespace linimpute
