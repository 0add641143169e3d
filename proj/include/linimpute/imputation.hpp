#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "linimpute/banded.hpp"
#include "linimpute/conditional.hpp"
#include "linimpute/shrinkage.hpp"
#include "linimpute/types.hpp"

namespace linimpute {

// Posterior summaries for the SNPs listed in index (all SNPs for imputation,
// typed SNPs only for denoising).
struct imputation_result {
  std::vector<std::size_t> index;
  std::vector<double> point;
  std::vector<double> variance;
  std::vector<snp_status> status;
  std::vector<std::uint8_t> clamped;

  std::size_t size() const noexcept { return index.size(); }
};

// Untyped frequencies from the observed typed ones under covariance sigma2 * sigma
// plus eps2 measurement noise on the typed SNPs. Typed SNPs pass through with
// zero variance. With every SNP typed the result is a pure pass-through.
imputation_result impute_frequencies(const moment_model& model, const frequency_vector& observed, double sigma2 = 1.0,
                                     double eps2 = 0.0);

struct genotype_freq {
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

// Clamps p0 and p2 to [0,1], rescales them if their sum exceeds 1, and sets p1
// to the complement.
genotype_freq clamp_to_simplex(double p0, double p2) noexcept;

genotype_freq genotype_freq_hwe(double freq_mean, double freq_variance) noexcept;

// Indicator moments for (1{g=0}, 1{g=2}) at every SNP, interleaved: entry 2t is
// genotype 0 at SNP t and entry 2t+1 is genotype 2.
struct genotype_moment_model {
  std::vector<double> mu;
  banded_spd_matrix sigma;

  std::size_t snp_count() const noexcept { return mu.size() / 2; }
};

genotype_moment_model fit_genotype_moment_model(const moment_model& model);

enum class genotype_route { hwe, joint_indicator };

struct genotype_freq_result {
  std::vector<genotype_freq> freq;
  std::vector<snp_status> status;
  genotype_route route = genotype_route::hwe;
};

// Observed (p0, p2) per SNP; nullopt marks an untyped SNP. p1 of the input is ignored.
genotype_freq_result impute_genotype_frequencies(const genotype_moment_model& model,
                                                 std::span<const std::optional<genotype_freq>> observed);

// HWE route: impute allele frequencies, then map mean and variance through
// genotype_freq_hwe. Typed SNPs use their observed frequency with zero variance.
genotype_freq_result genotype_frequencies_hwe(const moment_model& model, const frequency_vector& observed,
                                              double sigma2 = 1.0, double eps2 = 0.0);

// One individual treated as a pool of two haplotypes. genotypes hold 0/1/2 or
// missing_code. point is the posterior mean genotype in [0,2].
imputation_result impute_individual_genotypes(const moment_model& model, std::span<const std::int8_t> genotypes,
                                              double sigma2 = 1.0);

// All rows of an unphased genotype matrix; solves are shared between rows with
// the same typed pattern. Result i belongs to row i.
std::vector<imputation_result> impute_individual_genotypes(const moment_model& model, const panel& genotypes,
                                                           double sigma2 = 1.0);

// Nearest integer with halves rounded away from zero, limited to [0,2].
int hard_call(double posterior_mean) noexcept;

}  // namespace linimpute
