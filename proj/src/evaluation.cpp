#include "linimpute/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "linimpute/error.hpp"
#include "linimpute/imputation.hpp"
#include "linimpute/noise.hpp"
#include "linimpute/parallel.hpp"

namespace linimpute {

std::vector<std::size_t> mask_plan::masked(std::size_t p) const {
  std::vector<std::size_t> out;
  for (std::size_t i = offset; i < p; i += stride) out.push_back(i);
  return out;
}

std::vector<mask_plan> mask_plans(std::size_t p, std::size_t k) {
  if (k < 2 || p <= k) fail(errc::stride_too_large, "mask stride must satisfy 2 <= k < p");
  std::vector<mask_plan> out(k);
  for (std::size_t o = 0; o < k; ++o) out[o] = {k, o};
  return out;
}

double rmse(std::span<const double> truth, std::span<const double> estimate) {
  if (truth.size() != estimate.size() || truth.empty())
    fail(errc::length_mismatch, "rmse needs equal nonempty vectors");
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) s += (truth[i] - estimate[i]) * (truth[i] - estimate[i]);
  return std::sqrt(s / static_cast<double>(truth.size()));
}

double genotype_error_rate(std::span<const int> truth, std::span<const int> calls) {
  if (truth.size() != calls.size() || truth.empty())
    fail(errc::length_mismatch, "error rate needs equal nonempty vectors");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) wrong += truth[i] != calls[i];
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(errc::length_mismatch, "spearman needs equal vectors of length >= 2");
  const std::vector<double> rx = average_ranks(x), ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double z_report::tail_excess() const {
  if (bins.size() < 2 || z.empty()) return 0.0;
  const double expected = 2.0 * static_cast<double>(z.size()) / static_cast<double>(bins.size());
  return static_cast<double>(bins.front() + bins.back()) / expected - 1.0;
}

std::vector<double> normal_bin_edges(std::size_t bins) {
  if (bins < 2) fail(errc::invalid_argument, "need at least two bins");
  const boost::math::normal standard;
  std::vector<double> edges(bins - 1);
  for (std::size_t i = 1; i < bins; ++i)
    edges[i - 1] = boost::math::quantile(standard, static_cast<double>(i) / static_cast<double>(bins));
  return edges;
}

z_report z_calibration(std::span<const double> truth, std::span<const double> mean, std::span<const double> variance,
                       std::size_t bins) {
  if (truth.size() != mean.size() || truth.size() != variance.size())
    fail(errc::length_mismatch, "calibration inputs differ in length");
  z_report r;
  r.z.resize(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!(variance[i] > 0.0)) fail(errc::zero_variance, "calibration needs positive variances");
    r.z[i] = (truth[i] - mean[i]) / std::sqrt(variance[i]);
  }
  const std::vector<double> edges = normal_bin_edges(bins);
  r.bins.assign(bins, 0);
  for (double z : r.z) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), z);
    ++r.bins[static_cast<std::size_t>(it - edges.begin())];
  }
  if (!r.z.empty()) {
    const double expected = static_cast<double>(r.z.size()) / static_cast<double>(bins);
    for (std::size_t b : r.bins) r.chi_square += (static_cast<double>(b) - expected) * (static_cast<double>(b) - expected) / expected;
    const boost::math::chi_squared dist(static_cast<double>(bins - 1));
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.chi_square));
  }
  return r;
}

std::vector<call_rate_point> call_rate_curve(std::span<const double> variance, std::span<const std::uint8_t> errors,
                                             std::span<const double> thresholds) {
  if (variance.size() != errors.size()) fail(errc::length_mismatch, "call-rate inputs differ in length");
  std::vector<call_rate_point> out;
  out.reserve(thresholds.size());
  const double n = static_cast<double>(variance.size());
  for (double t : thresholds) {
    std::size_t called = 0, wrong = 0;
    for (std::size_t i = 0; i < variance.size(); ++i)
      if (variance[i] < t) {
        ++called;
        wrong += errors[i] != 0;
      }
    call_rate_point pt;
    pt.threshold = t;
    pt.call_rate = n > 0 ? static_cast<double>(called) / n : 0.0;
    if (called > 0) pt.error_rate = static_cast<double>(wrong) / static_cast<double>(called);
    out.push_back(pt);
  }
  return out;
}

frequency_cv_report mask_cv_frequencies(const moment_model& model, std::span<const double> truth,
                                        const frequency_cv_options& options) {
  const std::size_t p = model.dim();
  if (truth.size() != p) fail(errc::length_mismatch, "truth length does not match the model");
  const std::vector<mask_plan> plans = mask_plans(p, options.stride);
  frequency_cv_report report;
  report.folds.resize(plans.size());
  parallel_for(plans.size(), [&](std::size_t f) {
    frequency_fold& fold = report.folds[f];
    fold.plan = plans[f];
    fold.index = plans[f].masked(p);
    frequency_vector observed(p);
    std::vector<std::uint8_t> is_masked(p, 0);
    for (std::size_t i : fold.index) is_masked[i] = 1;
    for (std::size_t i = 0; i < p; ++i)
      if (!is_masked[i]) observed.set(i, truth[i]);
    // the engine must never see a held-out value
    for (std::size_t i : fold.index)
      if (observed.typed(i)) fail(errc::invalid_argument, "masked SNP leaked into the imputation input");

    fold.sigma2 = options.sigma2;
    if (options.fit_sigma2) {
      noise_fit_options nf;
      nf.estimate_eps = false;
      fold.sigma2 = fit_noise(model, observed, nf).sigma2;
    }
    const imputation_result r = impute_frequencies(model, observed, fold.sigma2, options.eps2);
    for (std::size_t i : fold.index) {
      fold.truth.push_back(truth[i]);
      fold.estimate.push_back(r.point[i]);
      fold.variance.push_back(r.variance[i]);
      fold.naive.push_back(model.panel_freq[i]);
    }
    fold.rmse = rmse(fold.truth, fold.estimate);
    fold.naive_rmse = rmse(fold.truth, fold.naive);
  });
  double se = 0.0, sn = 0.0;
  std::size_t count = 0;
  for (const auto& fold : report.folds) {
    for (std::size_t k = 0; k < fold.truth.size(); ++k) {
      se += (fold.truth[k] - fold.estimate[k]) * (fold.truth[k] - fold.estimate[k]);
      sn += (fold.truth[k] - fold.naive[k]) * (fold.truth[k] - fold.naive[k]);
    }
    count += fold.truth.size();
  }
  report.rmse = std::sqrt(se / static_cast<double>(count));
  report.naive_rmse = std::sqrt(sn / static_cast<double>(count));
  return report;
}

genotype_cv_report mask_cv_genotypes(const moment_model& model, const panel& genotypes, std::size_t stride,
                                     double sigma2) {
  const std::size_t p = model.dim();
  if (genotypes.phased()) fail(errc::invalid_argument, "genotype CV needs unphased genotypes");
  if (genotypes.snp_count() != p) fail(errc::length_mismatch, "genotype matrix does not match the model");
  const std::size_t n = genotypes.row_count();
  const std::vector<mask_plan> plans = mask_plans(p, stride);
  genotype_cv_report report;
  report.folds.resize(plans.size());
  for (std::size_t f = 0; f < plans.size(); ++f) {
    genotype_fold& fold = report.folds[f];
    fold.plan = plans[f];
    const std::vector<std::size_t> masked = plans[f].masked(p);
    std::vector<std::int8_t> codes = genotypes.codes();
    for (std::size_t j : masked)
      std::fill(codes.begin() + static_cast<std::ptrdiff_t>(j * n), codes.begin() + static_cast<std::ptrdiff_t>((j + 1) * n),
                missing_code);
    const panel input(genotypes.snps(), n, false, std::move(codes));
    for (std::size_t j : masked)
      for (std::size_t i = 0; i < n; ++i)
        if (!input.missing(i, j)) fail(errc::invalid_argument, "masked genotype leaked into the imputation input");
    const std::vector<imputation_result> results = impute_individual_genotypes(model, input, sigma2);
    for (std::size_t j : masked)
      for (std::size_t i = 0; i < n; ++i) {
        if (genotypes.missing(i, j)) continue;
        fold.truth.push_back(genotypes.at(i, j));
        fold.calls.push_back(hard_call(results[i].point[j]));
        fold.variance.push_back(results[i].variance[j]);
      }
    fold.error_rate = fold.truth.empty() ? 0.0 : genotype_error_rate(fold.truth, fold.calls);
  }
  std::size_t wrong = 0, total = 0;
  for (const auto& fold : report.folds) {
    for (std::size_t k = 0; k < fold.truth.size(); ++k) wrong += fold.truth[k] != fold.calls[k];
    total += fold.truth.size();
  }
  report.error_rate = total ? static_cast<double>(wrong) / static_cast<double>(total) : 0.0;
  return report;
}

namespace {

std::vector<std::size_t> select_predictors(const empirical_moments& moments, std::span<const snp_meta> snps,
                                           const std::vector<std::size_t>& typed, std::size_t target, std::size_t k,
                                           predictor_scheme scheme) {
  std::vector<std::size_t> chosen;
  if (scheme == predictor_scheme::flanking) {
    auto split = std::lower_bound(typed.begin(), typed.end(), target);
    auto right = split;
    if (right != typed.end() && *right == target) ++right;
    for (std::size_t c = 0; c < k && split != typed.begin(); ++c) chosen.push_back(*--split);
    for (std::size_t c = 0; c < k && right != typed.end(); ++c) chosen.push_back(*right++);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }
  const double vt = moments.covariance(target, target);
  struct candidate {
    double corr;
    std::int64_t distance;
    std::size_t index;
  };
  std::vector<candidate> all;
  all.reserve(typed.size());
  for (std::size_t t : typed) {
    if (t == target) continue;
    const double vx = moments.covariance(t, t);
    const double c = (vt > 0.0 && vx > 0.0) ? std::abs(moments.covariance(target, t)) / std::sqrt(vt * vx) : 0.0;
    const std::int64_t d = std::abs(snps[t].position - snps[target].position);
    all.push_back({c, d, t});
  }
  const std::size_t take = std::min(2 * k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(),
                    [](const candidate& a, const candidate& b) {
                      if (a.corr != b.corr) return a.corr > b.corr;
                      if (a.distance != b.distance) return a.distance < b.distance;
                      return a.index < b.index;
                    });
  for (std::size_t c = 0; c < take; ++c) chosen.push_back(all[c].index);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

baseline_estimate baseline_unregularized(const empirical_moments& moments, std::span<const snp_meta> snps,
                                         const frequency_vector& observed, std::size_t target, std::size_t k,
                                         predictor_scheme scheme) {
  const std::size_t p = moments.snp_count();
  if (observed.size() != p || snps.size() != p) fail(errc::length_mismatch, "baseline inputs differ in length");
  if (target >= p) fail(errc::dimension_mismatch, "target SNP out of range");
  const std::vector<std::size_t> typed = observed.typed_indices();
  if (2 * k > typed.size()) fail(errc::invalid_argument, "baseline needs 2k <= typed SNP count");
  const auto& f = moments.freq();
  baseline_estimate out{f[target], false};
  if (k == 0) return out;
  const std::vector<std::size_t> x = select_predictors(moments, snps, typed, target, k, scheme);
  if (x.empty()) return out;
  const auto m = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd sxx(m, m);
  Eigen::VectorXd sxt(m), r(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const std::size_t ia = x[static_cast<std::size_t>(a)];
    sxt(a) = moments.covariance(ia, target);
    r(a) = observed.value(ia) - f[ia];
    for (Eigen::Index b = 0; b <= a; ++b) sxx(a, b) = sxx(b, a) = moments.covariance(ia, x[static_cast<std::size_t>(b)]);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(sxx);
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.size() ? d.maxCoeff() : 0.0;
  if (ldlt.info() != Eigen::Success || !(dmax > 0.0) || d.minCoeff() <= 1e-12 * dmax) {
    sxx.diagonal().array() += 1e-10;
    ldlt.compute(sxx);
    out.jittered = true;
  }
  out.value = f[target] + sxt.dot(ldlt.solve(r));
  return out;
}

baseline_estimate baseline_unregularized(const panel& reference, const frequency_vector& observed, std::size_t target,
                                         std::size_t k, predictor_scheme scheme) {
  const empirical_moments moments(reference);
  return baseline_unregularized(moments, reference.snps(), observed, target, k, scheme);
}

std::vector<baseline_row> baseline_cv(const panel& reference, std::span<const double> truth, std::size_t stride,
                                      std::span<const std::size_t> ks, predictor_scheme scheme) {
  const std::size_t p = reference.snp_count();
  if (truth.size() != p) fail(errc::length_mismatch, "truth length does not match the panel");
  const empirical_moments moments(reference);
  const std::vector<mask_plan> plans = mask_plans(p, stride);
  std::vector<baseline_row> rows(ks.size());
  parallel_for(ks.size(), [&](std::size_t q) {
    baseline_row& row = rows[q];
    row.scheme = scheme;
    row.k = ks[q];
    double se = 0.0;
    std::size_t count = 0;
    for (const auto& plan : plans) {
      const std::vector<std::size_t> masked = plan.masked(p);
      frequency_vector observed = frequency_vector::from_values(std::vector<double>(truth.begin(), truth.end()));
      for (std::size_t i : masked) observed.unset(i);
      for (std::size_t i : masked) {
        const baseline_estimate e = baseline_unregularized(moments, reference.snps(), observed, i, row.k, scheme);
        const double v = std::clamp(e.value, 0.0, 1.0);
        se += (v - truth[i]) * (v - truth[i]);
        ++count;
        row.jittered += e.jittered;
      }
    }
    row.rmse = std::sqrt(se / static_cast<double>(count));
  });
  return rows;
}

std::vector<noise_study_row> simulate_noise_study(const moment_model& model, std::span<const double> truth,
                                                  std::span<const double> eps_grid, std::uint64_t seed) {
  const std::size_t p = model.dim();
  if (truth.size() != p) fail(errc::length_mismatch, "truth length does not match the model");
  for (double e : eps_grid)
    if (!(e > 0.0 && e <= 0.25)) fail(errc::invalid_argument, "noise levels must lie in (0, 0.25]");
  std::vector<noise_study_row> rows(eps_grid.size());
  parallel_for(eps_grid.size(), [&](std::size_t g) {
    noise_study_row& row = rows[g];
    row.true_eps = eps_grid[g];
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + g);
    std::normal_distribution<double> noise(0.0, row.true_eps);
    frequency_vector observed(p);
    std::vector<double> raw(p);
    for (std::size_t i = 0; i < p; ++i) {
      raw[i] = std::clamp(truth[i] + noise(rng), 0.0, 1.0);
      observed.set(i, raw[i]);
    }
    row.raw_rmse = rmse(truth, raw);
    try {
      const noise_model fitted = fit_noise(model, observed);
      row.estimated_eps = std::sqrt(fitted.eps2);
      row.sigma2 = fitted.sigma2;
      const imputation_result d = denoise_typed(model, observed, fitted);
      row.denoised_rmse = rmse(truth, d.point);
    } catch (const error& e) {
      if (e.code() != errc::fit_diverged) throw;
      row.diverged = true;
      row.estimated_eps = std::numeric_limits<double>::quiet_NaN();
      row.denoised_rmse = row.raw_rmse;
    }
  });
  return rows;
}

}  // namespace linimpute
