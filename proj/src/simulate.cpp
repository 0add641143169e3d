#include "linimpute/simulate.hpp"

#include <cmath>
#include <string>

#include "linimpute/banded.hpp"
#include "linimpute/error.hpp"

namespace linimpute {

namespace {

// Haplotypes that copy rows of source with per-interval switch probabilities
// and miscopy rate theta (the copied allele is replaced by a fair coin).
std::vector<std::int8_t> copy_mosaic(const std::vector<std::int8_t>& source, std::size_t source_rows, std::size_t p,
                                     std::size_t rows, const std::vector<double>& switch_prob, double theta,
                                     std::mt19937_64& rng) {
  std::vector<std::int8_t> out(p * rows);
  std::uniform_int_distribution<std::size_t> pick(0, source_rows - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t state = pick(rng);
    for (std::size_t j = 0; j < p; ++j) {
      if (j > 0 && unit(rng) < switch_prob[j]) state = pick(rng);
      std::int8_t allele = source[j * source_rows + state];
      if (unit(rng) < theta) allele = unit(rng) < 0.5 ? 0 : 1;
      out[j * rows + r] = allele;
    }
  }
  return out;
}

}  // namespace

synthetic_data simulate(const simulation_config& config) {
  const std::size_t p = config.snps;
  if (p == 0 || config.founders == 0 || config.panel_haplotypes < 2 || config.sample_haplotypes == 0)
    fail(errc::invalid_argument, "simulation sizes must be positive (panel needs two haplotypes)");
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> interval(1.0 / config.mean_switch);

  synthetic_data data;
  data.snps.resize(p);
  for (std::size_t j = 0; j < p; ++j) data.snps[j] = {"snp" + std::to_string(j + 1), static_cast<std::int64_t>(1000 * (j + 1)), 'A', 'G'};

  const std::size_t k = config.panel_haplotypes;
  const double rho_scale = static_cast<double>(config.rho_haplotypes ? config.rho_haplotypes : k);
  std::vector<double> cumulative(p, 0.0), sample_switch(p, 0.0), founder_switch(p, 0.0);
  for (std::size_t j = 1; j < p; ++j) {
    const double h = interval(rng);
    cumulative[j] = cumulative[j - 1] + rho_scale * h;
    sample_switch[j] = 1.0 - std::exp(-(cumulative[j] - cumulative[j - 1]) / static_cast<double>(k));
    founder_switch[j] = 1.0 - std::exp(-config.founder_switch * h / config.mean_switch);
  }
  data.rho = rho_map(std::move(cumulative));

  const std::size_t f = config.founders;
  std::vector<std::int8_t> founders(p * f);
  const double lo = config.min_founder_freq;
  for (std::size_t j = 0; j < p; ++j) {
    const double q = lo + (1.0 - 2.0 * lo) * unit(rng);
    for (std::size_t r = 0; r < f; ++r) founders[j * f + r] = unit(rng) < q ? 1 : 0;
  }
  std::vector<std::int8_t> reference =
      copy_mosaic(founders, f, p, k, founder_switch, config.founder_miscopy, rng);
  const double theta = estimate_theta(k);
  std::vector<std::int8_t> sample =
      copy_mosaic(reference, k, p, config.sample_haplotypes, sample_switch, theta, rng);
  data.reference = panel(data.snps, k, true, std::move(reference));
  data.sample = panel(data.snps, config.sample_haplotypes, true, std::move(sample));
  return data;
}

std::vector<double> haplotype_frequencies(const panel& haplotypes) {
  if (!haplotypes.phased()) fail(errc::invalid_argument, "haplotype frequencies need a phased panel");
  std::vector<double> out(haplotypes.snp_count());
  for (std::size_t j = 0; j < out.size(); ++j) {
    std::size_t ones = 0, observed = 0;
    for (auto c : haplotypes.column(j))
      if (c != missing_code) {
        ones += static_cast<std::size_t>(c);
        ++observed;
      }
    if (observed == 0) fail(errc::snp_never_observed, "SNP " + haplotypes.snps()[j].id + " is never observed");
    out[j] = static_cast<double>(ones) / static_cast<double>(observed);
  }
  return out;
}

panel pair_haplotypes(const panel& haplotypes) {
  if (!haplotypes.phased() || haplotypes.row_count() % 2 != 0)
    fail(errc::invalid_argument, "pairing needs a phased panel with an even number of haplotypes");
  const std::size_t n = haplotypes.row_count() / 2;
  const std::size_t p = haplotypes.snp_count();
  std::vector<std::int8_t> codes(p * n);
  for (std::size_t j = 0; j < p; ++j) {
    auto col = haplotypes.column(j);
    for (std::size_t i = 0; i < n; ++i) {
      const std::int8_t a = col[2 * i], b = col[2 * i + 1];
      codes[j * n + i] = (a == missing_code || b == missing_code) ? missing_code : static_cast<std::int8_t>(a + b);
    }
  }
  return panel(haplotypes.snps(), n, false, std::move(codes));
}

std::vector<double> draw_gaussian(const moment_model& model, double sigma2, std::mt19937_64& rng) {
  const banded_factor l = banded_cholesky(model.sigma);
  const std::size_t p = model.dim();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(p);
  for (auto& v : z) v = normal(rng);
  const double scale = std::sqrt(sigma2);
  std::vector<double> out(p);
  const banded_spd_matrix& lower = l.lower();
  for (std::size_t i = 0; i < p; ++i) {
    auto row = lower.row(i);
    const std::size_t first = lower.first_column(i);
    double s = 0.0;
    for (std::size_t c = first; c <= i; ++c) s += row[c - first] * z[c];
    out[i] = model.mu[i] + scale * s;
  }
  return out;
}

}  // namespace linimpute
