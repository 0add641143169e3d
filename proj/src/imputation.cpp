#include "linimpute/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "linimpute/error.hpp"
#include "linimpute/parallel.hpp"

namespace linimpute {

namespace {

// Fills a full-length result: typed SNPs echo their values, untyped SNPs take the
// solver's conditional mean and variance_scale x its variance diagonal.
imputation_result assemble(std::span<const double> mu, const conditional_solver& solver,
                           std::span<const double> typed_values, double variance_scale, double upper) {
  const std::size_t p = mu.size();
  imputation_result r;
  r.index.resize(p);
  r.point.assign(p, 0.0);
  r.variance.assign(p, 0.0);
  r.status.assign(p, snp_status::typed);
  r.clamped.assign(p, 0);
  for (std::size_t i = 0; i < p; ++i) r.index[i] = i;
  const auto& typed = solver.typed();
  for (std::size_t k = 0; k < typed.size(); ++k) r.point[typed[k]] = typed_values[k];

  const std::vector<double> mean = solver.mean(mu, typed_values);
  const auto& var = solver.raw_variance();
  const auto& untyped = solver.untyped();
  for (std::size_t k = 0; k < untyped.size(); ++k) {
    const std::size_t u = untyped[k];
    r.status[u] = snp_status::untyped;
    double m = mean[k];
    if (m < 0.0 || m > upper) {
      m = std::clamp(m, 0.0, upper);
      r.clamped[u] = 1;
    }
    r.point[u] = m;
    r.variance[u] = std::max(0.0, variance_scale * var[k]);
  }
  return r;
}

imputation_result pass_through(std::span<const double> values) {
  imputation_result r;
  const std::size_t p = values.size();
  r.index.resize(p);
  for (std::size_t i = 0; i < p; ++i) r.index[i] = i;
  r.point.assign(values.begin(), values.end());
  r.variance.assign(p, 0.0);
  r.status.assign(p, snp_status::typed);
  r.clamped.assign(p, 0);
  return r;
}

}  // namespace

imputation_result impute_frequencies(const moment_model& model, const frequency_vector& observed, double sigma2,
                                     double eps2) {
  if (observed.size() != model.dim()) fail(errc::dimension_mismatch, "observed frequencies do not match the model");
  if (!(sigma2 > 0.0)) fail(errc::invalid_argument, "sigma2 must be positive");
  if (!(eps2 >= 0.0)) fail(errc::invalid_argument, "eps2 must be nonnegative");
  std::vector<std::size_t> typed = observed.typed_indices();
  if (typed.empty()) fail(errc::no_typed_snps, "no typed SNPs in the observed frequencies");
  if (typed.size() == model.dim()) return pass_through(observed.values());
  const std::vector<double> values = observed.typed_values();
  const conditional_solver solver(model.sigma, std::move(typed), eps2 / sigma2);
  return assemble(model.mu, solver, values, sigma2, 1.0);
}

genotype_freq clamp_to_simplex(double p0, double p2) noexcept {
  p0 = std::clamp(p0, 0.0, 1.0);
  p2 = std::clamp(p2, 0.0, 1.0);
  const double s = p0 + p2;
  if (s > 1.0) {
    p0 /= s;
    p2 /= s;
  }
  return {p0, std::max(0.0, 1.0 - (p0 + p2)), p2};
}

genotype_freq genotype_freq_hwe(double freq_mean, double freq_variance) noexcept {
  const double p0 = (1.0 - freq_mean) * (1.0 - freq_mean) + freq_variance;
  const double p2 = freq_mean * freq_mean + freq_variance;
  return clamp_to_simplex(p0, p2);
}

genotype_moment_model fit_genotype_moment_model(const moment_model& model) {
  const std::size_t p = model.dim();
  const std::size_t band = model.sigma.bandwidth();
  genotype_moment_model g;
  g.mu.resize(2 * p);
  g.sigma = banded_spd_matrix(2 * p, 2 * band + 1);
  for (std::size_t t = 0; t < p; ++t) {
    const double m = model.mu[t];
    const double a = (1.0 - m) * (1.0 - m);
    const double b = m * m;
    g.mu[2 * t] = a;
    g.mu[2 * t + 1] = b;
    g.sigma.set(2 * t, 2 * t, a * (1.0 - a));
    g.sigma.set(2 * t + 1, 2 * t + 1, b * (1.0 - b));
    g.sigma.set(2 * t + 1, 2 * t, -a * b);
  }
  for (std::size_t t = 0; t < p; ++t) {
    const double mt = model.mu[t];
    const std::size_t first = t > band ? t - band : 0;
    for (std::size_t s = first; s < t; ++s) {
      const double c = model.sigma(s, t);
      if (c == 0.0) continue;
      const double ms = model.mu[s];
      const double c2 = c * c;
      g.sigma.set(2 * t, 2 * s, c2 + 2.0 * (1.0 - ms) * (1.0 - mt) * c);
      g.sigma.set(2 * t + 1, 2 * s + 1, c2 + 2.0 * ms * mt * c);
      g.sigma.set(2 * t + 1, 2 * s, c2 - 2.0 * (1.0 - ms) * mt * c);
      g.sigma.set(2 * t, 2 * s + 1, c2 - 2.0 * ms * (1.0 - mt) * c);
    }
  }
  return g;
}

genotype_freq_result impute_genotype_frequencies(const genotype_moment_model& model,
                                                 std::span<const std::optional<genotype_freq>> observed) {
  const std::size_t p = model.snp_count();
  if (observed.size() != p) fail(errc::dimension_mismatch, "observed genotype frequencies do not match the model");
  genotype_freq_result out;
  out.route = genotype_route::joint_indicator;
  out.freq.resize(p);
  out.status.assign(p, snp_status::untyped);
  std::vector<std::size_t> typed;
  std::vector<double> values;
  for (std::size_t t = 0; t < p; ++t) {
    if (!observed[t]) continue;
    const genotype_freq& o = *observed[t];
    if (!(o.p0 >= 0.0 && o.p0 <= 1.0 && o.p2 >= 0.0 && o.p2 <= 1.0 && o.p0 + o.p2 <= 1.0 + 1e-12))
      fail(errc::invalid_genotype_frequencies,
           "genotype frequencies at SNP " + std::to_string(t) + " are outside the simplex");
    typed.push_back(2 * t);
    typed.push_back(2 * t + 1);
    values.push_back(o.p0);
    values.push_back(o.p2);
    out.status[t] = snp_status::typed;
    out.freq[t] = clamp_to_simplex(o.p0, o.p2);
  }
  if (typed.empty()) fail(errc::no_typed_snps, "no typed SNPs in the observed genotype frequencies");
  if (typed.size() == 2 * p) return out;
  const conditional_solver solver(model.sigma, std::move(typed), 0.0);
  const std::vector<double> mean = solver.mean(model.mu, values);
  const auto& untyped = solver.untyped();
  for (std::size_t k = 0; k + 1 < untyped.size(); k += 2) {
    const std::size_t t = untyped[k] / 2;
    out.freq[t] = clamp_to_simplex(mean[k], mean[k + 1]);
  }
  return out;
}

genotype_freq_result genotype_frequencies_hwe(const moment_model& model, const frequency_vector& observed,
                                              double sigma2, double eps2) {
  const imputation_result r = impute_frequencies(model, observed, sigma2, eps2);
  genotype_freq_result out;
  out.route = genotype_route::hwe;
  out.freq.resize(r.size());
  out.status = r.status;
  for (std::size_t i = 0; i < r.size(); ++i) out.freq[i] = genotype_freq_hwe(r.point[i], r.variance[i]);
  return out;
}

namespace {

void split_genotypes(std::span<const std::int8_t> genotypes, std::vector<std::size_t>& typed,
                     std::vector<double>& halves) {
  typed.clear();
  halves.clear();
  for (std::size_t j = 0; j < genotypes.size(); ++j) {
    const std::int8_t g = genotypes[j];
    if (g == missing_code) continue;
    if (g < 0 || g > 2) fail(errc::invalid_argument, "genotype codes must be 0, 1, 2 or missing");
    typed.push_back(j);
    halves.push_back(0.5 * g);
  }
}

// Frequency-scale result for one pool of two haplotypes mapped to genotype scale:
// mean doubled, variance 4 x sigma2 x (conditional variance / 2).
imputation_result to_genotype_scale(imputation_result r, double sigma2) {
  for (std::size_t i = 0; i < r.size(); ++i) {
    r.point[i] *= 2.0;
    r.variance[i] *= 2.0 * sigma2;
  }
  return r;
}

}  // namespace

imputation_result impute_individual_genotypes(const moment_model& model, std::span<const std::int8_t> genotypes,
                                              double sigma2) {
  if (genotypes.size() != model.dim()) fail(errc::dimension_mismatch, "genotype vector does not match the model");
  if (!(sigma2 > 0.0)) fail(errc::invalid_argument, "sigma2 must be positive");
  std::vector<std::size_t> typed;
  std::vector<double> halves;
  split_genotypes(genotypes, typed, halves);
  if (typed.empty()) fail(errc::no_typed_snps, "individual has no typed genotypes");
  if (typed.size() == model.dim()) return to_genotype_scale(pass_through(halves), sigma2);
  const conditional_solver solver(model.sigma, std::move(typed), 0.0);
  return to_genotype_scale(assemble(model.mu, solver, halves, 1.0, 1.0), sigma2);
}

std::vector<imputation_result> impute_individual_genotypes(const moment_model& model, const panel& genotypes,
                                                           double sigma2) {
  if (genotypes.phased()) fail(errc::invalid_argument, "individual imputation needs unphased genotypes");
  if (genotypes.snp_count() != model.dim()) fail(errc::dimension_mismatch, "genotype matrix does not match the model");
  if (!(sigma2 > 0.0)) fail(errc::invalid_argument, "sigma2 must be positive");
  const std::size_t n = genotypes.row_count();
  const std::size_t p = model.dim();
  std::vector<std::vector<std::int8_t>> rows(n, std::vector<std::int8_t>(p));
  for (std::size_t j = 0; j < p; ++j) {
    auto col = genotypes.column(j);
    for (std::size_t i = 0; i < n; ++i) rows[i][j] = col[i];
  }
  factor_cache cache(model.sigma);
  std::vector<imputation_result> out(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::size_t> typed;
    std::vector<double> halves;
    split_genotypes(rows[i], typed, halves);
    if (typed.empty()) fail(errc::no_typed_snps, "individual " + std::to_string(i) + " has no typed genotypes");
    if (typed.size() == p) {
      out[i] = to_genotype_scale(pass_through(halves), sigma2);
      return;
    }
    auto solver = cache.get(typed, 0.0);
    out[i] = to_genotype_scale(assemble(model.mu, *solver, halves, 1.0, 1.0), sigma2);
  });
  return out;
}

int hard_call(double posterior_mean) noexcept {
  const double r = std::round(posterior_mean);
  if (!(r > 0.0)) return 0;
  if (r >= 2.0) return 2;
  return static_cast<int>(r);
}

}  // namespace linimpute
