#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "linimpute/banded.hpp"
#include "linimpute/types.hpp"

namespace linimpute {

// Regularized prior for one haplotype drawn by the copying model given the panel:
// mean mu and banded covariance sigma, plus the quantities they were built from.
struct moment_model {
  std::vector<snp_meta> snps;
  std::vector<double> mu;
  banded_spd_matrix sigma;
  double theta = 0.0;
  std::vector<double> panel_freq;
  std::size_t panel_size = 0;  // haplotype count K
  double sparsity_threshold = 1e-8;

  std::size_t dim() const noexcept { return mu.size(); }
  bool operator==(const moment_model&) const = default;
};

// Mutation parameter from the haplotype count K = 2m:
// theta = 1/H / (K + 1/H), H = sum_{i<K} 1/i.
double estimate_theta(std::size_t haplotype_count);

// Off-diagonal shrink weight exp(-rho / K).
double shrink_weight(double rho, std::size_t haplotype_count) noexcept;

// Empirical panel moments on the haplotype scale. Unphased panels use half the
// genotype mean and half the genotype covariance. Missing cells are filled with
// their column mean. Covariances are produced on demand for any pair.
class empirical_moments {
 public:
  explicit empirical_moments(const panel& data);

  std::size_t snp_count() const noexcept { return freq_.size(); }
  std::size_t haplotype_count() const noexcept { return haplotypes_; }
  const std::vector<double>& freq() const noexcept { return freq_; }
  double covariance(std::size_t i, std::size_t j) const noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t haplotypes_ = 0;
  std::vector<double> freq_;
  // phased and complete: packed bit columns; otherwise centered value columns
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<double> centered_;
  double scale_ = 1.0;
};

// Largest j - i over pairs whose shrink weight survives the threshold, and
// for each i the last surviving column.
struct shrink_band {
  std::size_t bandwidth = 0;
  std::vector<std::size_t> last;
};
shrink_band compute_shrink_band(const rho_map& rho, std::size_t haplotype_count, double threshold);

struct fit_options {
  double sparsity_threshold = 1e-8;
  std::optional<double> theta;  // overrides the value derived from the panel size
};

moment_model fit_moment_model(const panel& data, const rho_map& rho, const fit_options& options = {});

// Shrinkage step shared with the panel-free estimator: given haplotype-scale
// frequencies and an empirical covariance already restricted to the band,
// applies the weights (when apply_weights) and the theta terms.
moment_model shrink_moments(std::span<const double> freq, const banded_spd_matrix& empirical_cov,
                            const shrink_band& band, const rho_map& rho, std::size_t haplotype_count, double theta,
                            bool apply_weights, double threshold);

// Copy of the model with sigma divided by the pooled haplotype count (2n),
// giving the covariance of a sample allele frequency over 2n haplotypes.
moment_model with_pool_size(const moment_model& model, std::size_t haplotype_count);

}  // namespace linimpute
