#include "linimpute/shrinkage.hpp"

#include <bit>
#include <cmath>

#include "linimpute/error.hpp"

namespace linimpute {

double estimate_theta(std::size_t haplotype_count) {
  if (haplotype_count < 2) fail(errc::invalid_panel_size, "theta needs at least two haplotypes");
  double harmonic = 0.0;
  for (std::size_t i = haplotype_count - 1; i >= 1; --i) harmonic += 1.0 / static_cast<double>(i);
  const double inv = 1.0 / harmonic;
  return inv / (static_cast<double>(haplotype_count) + inv);
}

double shrink_weight(double rho, std::size_t haplotype_count) noexcept {
  return std::exp(-rho / static_cast<double>(haplotype_count));
}

empirical_moments::empirical_moments(const panel& data)
    : rows_(data.row_count()), haplotypes_(data.haplotype_count()), freq_(data.snp_count(), 0.0) {
  const std::size_t p = data.snp_count();
  if (p == 0 || rows_ == 0) fail(errc::empty_panel, "panel is empty");
  if (data.phased() && !data.has_missing()) {
    words_ = (rows_ + 63) / 64;
    bits_.assign(p * words_, 0);
    for (std::size_t j = 0; j < p; ++j) {
      auto col = data.column(j);
      std::size_t ones = 0;
      for (std::size_t r = 0; r < rows_; ++r)
        if (col[r] == 1) {
          bits_[j * words_ + r / 64] |= std::uint64_t{1} << (r % 64);
          ++ones;
        }
      freq_[j] = static_cast<double>(ones) / static_cast<double>(rows_);
    }
    return;
  }
  // Allele-code scale: phased codes are haplotypes, unphased codes are genotypes
  // whose mean and covariance are halved.
  scale_ = data.phased() ? 1.0 : 0.5;
  centered_.assign(p * rows_, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    auto col = data.column(j);
    double sum = 0.0;
    std::size_t observed = 0;
    for (auto c : col)
      if (c != missing_code) {
        sum += c;
        ++observed;
      }
    const double mean = observed > 0 ? sum / static_cast<double>(observed) : 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
      centered_[j * rows_ + r] = col[r] == missing_code ? 0.0 : static_cast<double>(col[r]) - mean;
    freq_[j] = scale_ * mean;
  }
}

double empirical_moments::covariance(std::size_t i, std::size_t j) const noexcept {
  const double n = static_cast<double>(rows_);
  if (!bits_.empty()) {
    std::size_t both = 0;
    const std::uint64_t* a = bits_.data() + i * words_;
    const std::uint64_t* b = bits_.data() + j * words_;
    for (std::size_t w = 0; w < words_; ++w) both += static_cast<std::size_t>(std::popcount(a[w] & b[w]));
    return static_cast<double>(both) / n - freq_[i] * freq_[j];
  }
  const double* a = centered_.data() + i * rows_;
  const double* b = centered_.data() + j * rows_;
  double s = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) s += a[r] * b[r];
  return scale_ * s / n;
}

shrink_band compute_shrink_band(const rho_map& rho, std::size_t haplotype_count, double threshold) {
  const std::size_t p = rho.size();
  shrink_band out;
  out.last.resize(p);
  std::size_t j = 0;
  for (std::size_t i = 0; i < p; ++i) {
    if (j < i) j = i;
    while (j + 1 < p && shrink_weight(rho.distance(i, j + 1), haplotype_count) >= threshold) ++j;
    out.last[i] = j;
    out.bandwidth = std::max(out.bandwidth, j - i);
  }
  return out;
}

moment_model shrink_moments(std::span<const double> freq, const banded_spd_matrix& empirical_cov,
                            const shrink_band& band, const rho_map& rho, std::size_t haplotype_count, double theta,
                            bool apply_weights, double threshold) {
  const std::size_t p = freq.size();
  if (empirical_cov.dim() != p || rho.size() != p || band.last.size() != p)
    fail(errc::length_mismatch, "moment inputs have inconsistent lengths");
  moment_model m;
  m.theta = theta;
  m.panel_size = haplotype_count;
  m.sparsity_threshold = threshold;
  m.panel_freq.assign(freq.begin(), freq.end());
  m.mu.resize(p);
  const double keep = 1.0 - theta;
  const double mutation_var = 0.5 * theta * (1.0 - 0.5 * theta);
  for (std::size_t i = 0; i < p; ++i) m.mu[i] = keep * freq[i] + 0.5 * theta;
  m.sigma = banded_spd_matrix(p, band.bandwidth);
  for (std::size_t i = 0; i < p; ++i) {
    m.sigma.set(i, i, keep * keep * empirical_cov(i, i) + mutation_var);
    for (std::size_t j = i + 1; j <= band.last[i]; ++j) {
      const double w = apply_weights ? shrink_weight(rho.distance(i, j), haplotype_count) : 1.0;
      m.sigma.set(j, i, keep * keep * w * empirical_cov(i, j));
    }
  }
  return m;
}

moment_model fit_moment_model(const panel& data, const rho_map& rho, const fit_options& options) {
  const std::size_t p = data.snp_count();
  if (p == 0 || data.row_count() == 0) fail(errc::empty_panel, "panel is empty");
  if (rho.size() != p) fail(errc::length_mismatch, "rho map length does not match panel SNP count");
  if (!(options.sparsity_threshold > 0.0 && options.sparsity_threshold < 1.0))
    fail(errc::invalid_argument, "sparsity threshold must lie in (0,1)");
  const std::size_t k = data.haplotype_count();
  const double theta = options.theta ? *options.theta : estimate_theta(k);
  if (!(theta >= 0.0 && theta < 1.0)) fail(errc::invalid_argument, "theta must lie in [0,1)");

  const empirical_moments moments(data);
  const shrink_band band = compute_shrink_band(rho, k, options.sparsity_threshold);
  banded_spd_matrix cov(p, band.bandwidth);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j <= band.last[i]; ++j) cov.set(j, i, moments.covariance(i, j));

  moment_model m = shrink_moments(moments.freq(), cov, band, rho, k, theta, true, options.sparsity_threshold);
  m.snps = data.snps();
  return m;
}

moment_model with_pool_size(const moment_model& model, std::size_t haplotype_count) {
  if (haplotype_count == 0) fail(errc::invalid_argument, "pool size must be positive");
  moment_model out = model;
  out.sigma.scale(1.0 / static_cast<double>(haplotype_count));
  return out;
}

}  // namespace linimpute
