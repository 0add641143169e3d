#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "linimpute/shrinkage.hpp"
#include "linimpute/types.hpp"

namespace linimpute {

// Synthetic copying-model data. Founder haplotypes are drawn independently per
// SNP; panel haplotypes are mosaics of the founders; sample haplotypes copy the
// panel with the same switch and miscopy process the prior assumes, so the
// fitted moments are the true moments of a sample haplotype.
struct simulation_config {
  std::size_t snps = 1000;
  std::size_t founders = 8;
  std::size_t panel_haplotypes = 120;
  std::size_t sample_haplotypes = 1000;
  // Interval rho is drawn as K * h with h ~ Exp(mean_switch) and K the haplotype
  // count given by rho_haplotypes (0 = panel_haplotypes), so the switch
  // probability between neighbours is 1 - exp(-h) in the copying step.
  double mean_switch = 0.05;
  std::size_t rho_haplotypes = 0;
  double founder_switch = 0.02;  // per-interval switch rate when building the panel
  double founder_miscopy = 0.005;
  double min_founder_freq = 0.05;
  std::uint64_t seed = 1;
};

struct synthetic_data {
  std::vector<snp_meta> snps;
  rho_map rho;
  panel reference;  // phased panel haplotypes
  panel sample;     // phased sample haplotypes
};

synthetic_data simulate(const simulation_config& config);

// Allele frequency per SNP over all rows of a phased panel.
std::vector<double> haplotype_frequencies(const panel& haplotypes);

// Unphased genotypes formed by summing consecutive haplotype pairs.
panel pair_haplotypes(const panel& haplotypes);

// One draw from N(mu, sigma2 * sigma) using the banded factor of sigma.
std::vector<double> draw_gaussian(const moment_model& model, double sigma2, std::mt19937_64& rng);

}  // namespace linimpute
