#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "linimpute/banded.hpp"
#include "linimpute/shrinkage.hpp"
#include "linimpute/types.hpp"

namespace linimpute {

// Panel-free estimation from a genotype matrix with missing cells. Moments are
// kept on the haplotype scale: a genotype vector is the sum of two haplotypes,
// so g ~ N(2 mu_ls, 2 sigma_ls) with (mu_ls, sigma_ls) = model.mu, model.sigma.
struct ecm_state {
  std::size_t iteration = 0;
  std::vector<double> f_panel;
  banded_spd_matrix sigma_panel;
  moment_model model;
  std::vector<double> loglik_trace;
  std::vector<double> delta_trace;  // max |change in mu_ls| per iteration
  bool shrinkage_enabled = true;
  shrink_band band;  // pairs accumulated and kept, fixed by the map
};

// Expected sufficient statistics on the genotype scale: sums of g_j and of
// g_j g_k for pairs inside the band.
struct ecm_statistics {
  std::size_t individuals = 0;
  std::vector<double> sum;
  banded_spd_matrix cross;
  double loglik = 0.0;  // observed-data log likelihood under the state used
};

// genotypes: unphased matrix, rows are individuals.
ecm_statistics ecm_estep(const ecm_state& state, const panel& genotypes);

struct ecm_options {
  std::size_t iterations = 20;
  bool shrinkage = true;  // false: theta = 0 and unit weights, a plain EM
  double tolerance = 1e-6;
  double sparsity_threshold = 1e-8;
  std::size_t starts = 1;
  std::uint64_t seed = 0;
  double jitter = 0.05;  // start perturbation of f_panel for starts after the first
};

// Updates f_panel, sigma_panel and the shrunk model from the statistics.
void ecm_cmstep(ecm_state& state, const ecm_statistics& stats, const rho_map& rho, const ecm_options& options);

// Starting state: marginal means and a diagonal covariance from typed cells.
ecm_state ecm_initial_state(const panel& genotypes, const rho_map& rho, const ecm_options& options);

struct ecm_output {
  ecm_state state;
  std::vector<double> posterior_mean;  // SNP-major, genotype scale
  panel imputed;                       // hard calls, observed cells unchanged
};

ecm_output ecm_run(const panel& genotypes, const rho_map& rho, const ecm_options& options = {});

}  // namespace linimpute
