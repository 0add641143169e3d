#include "linimpute/types.hpp"

#include <cmath>

#include "linimpute/error.hpp"

namespace linimpute {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::not_positive_definite: return "NotPositiveDefinite";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::all_typed_or_all_untyped: return "AllTypedOrAllUntyped";
    case errc::invalid_panel_size: return "InvalidPanelSize";
    case errc::empty_panel: return "EmptyPanel";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::no_typed_snps: return "NoTypedSnps";
    case errc::invalid_genotype_frequencies: return "InvalidGenotypeFrequencies";
    case errc::too_few_typed: return "TooFewTyped";
    case errc::fit_diverged: return "FitDiverged";
    case errc::individual_fully_missing: return "IndividualFullyMissing";
    case errc::snp_never_observed: return "SnpNeverObserved";
    case errc::stride_too_large: return "StrideTooLarge";
    case errc::zero_variance: return "ZeroVariance";
    case errc::too_many_templates: return "TooManyTemplates";
    case errc::parse_error: return "ParseError";
    case errc::row_count_mismatch: return "RowCountMismatch";
    case errc::nonmonotone_positions: return "NonmonotonePositions";
    case errc::nonmonotone_rho: return "NonmonotoneRho";
    case errc::id_mismatch: return "IdMismatch";
    case errc::io_error: return "IoError";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

void validate_snps(std::span<const snp_meta> snps) {
  for (std::size_t i = 0; i < snps.size(); ++i) {
    if (snps[i].allele0 == snps[i].allele1)
      fail(errc::invalid_argument, "SNP " + snps[i].id + " has identical alleles");
    if (i > 0 && snps[i].position <= snps[i - 1].position)
      fail(errc::nonmonotone_positions, "positions not strictly increasing at SNP " + snps[i].id);
  }
}

panel::panel(std::vector<snp_meta> snps, std::size_t rows, bool phased, std::vector<std::int8_t> codes)
    : snps_(std::move(snps)), rows_(rows), phased_(phased), codes_(std::move(codes)) {
  if (snps_.empty() || rows_ == 0) fail(errc::empty_panel, "panel has no SNPs or no rows");
  if (codes_.size() != snps_.size() * rows_)
    fail(errc::row_count_mismatch, "panel code matrix does not match SNP and row counts");
  const std::int8_t max_code = phased_ ? 1 : 2;
  for (auto c : codes_)
    if (c != missing_code && (c < 0 || c > max_code))
      fail(errc::invalid_argument, "allele code out of range for " + std::string(phased_ ? "phased" : "unphased") + " panel");
  validate_snps(snps_);
}

bool panel::has_missing() const noexcept {
  for (auto c : codes_)
    if (c == missing_code) return true;
  return false;
}

rho_map::rho_map(std::vector<double> cumulative) : cumulative_(std::move(cumulative)) {
  for (std::size_t i = 0; i < cumulative_.size(); ++i) {
    if (!std::isfinite(cumulative_[i]) || cumulative_[i] < 0.0)
      fail(errc::nonmonotone_rho, "cumulative rho must be finite and nonnegative");
    if (i > 0 && cumulative_[i] < cumulative_[i - 1])
      fail(errc::nonmonotone_rho, "cumulative rho decreases at index " + std::to_string(i));
  }
}

frequency_vector::frequency_vector(std::size_t p) : values_(p, unset_value), status_(p, snp_status::untyped) {}

frequency_vector frequency_vector::from_values(std::vector<double> values) {
  frequency_vector out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isnan(values[i])) out.set(i, values[i]);
  return out;
}

void frequency_vector::set(std::size_t i, double value) {
  if (!std::isfinite(value) || value < 0.0 || value > 1.0)
    fail(errc::invalid_argument, "typed frequency must be finite and in [0,1]");
  values_[i] = value;
  status_[i] = snp_status::typed;
}

void frequency_vector::unset(std::size_t i) {
  values_[i] = unset_value;
  status_[i] = snp_status::untyped;
}

std::vector<std::size_t> frequency_vector::typed_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (typed(i)) out.push_back(i);
  return out;
}

std::vector<std::size_t> frequency_vector::untyped_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (!typed(i)) out.push_back(i);
  return out;
}

std::vector<double> frequency_vector::typed_values() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (typed(i)) out.push_back(values_[i]);
  return out;
}

bool frequency_vector::operator==(const frequency_vector& other) const {
  if (status_ != other.status_) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (typed(i) && values_[i] != other.values_[i]) return false;
  return true;
}

}  // namespace linimpute
