#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace linimpute {

struct snp_meta {
  std::string id;
  std::int64_t position = 0;
  char allele0 = 'A';
  char allele1 = 'G';

  bool operator==(const snp_meta&) const = default;
};

// Checks strictly increasing positions and distinct alleles.
void validate_snps(std::span<const snp_meta> snps);

inline constexpr std::int8_t missing_code = -1;

// Allele codes for a set of SNPs. Rows are haplotypes (phased, codes 0/1) or
// individuals (unphased, codes 0/1/2). Storage is SNP-major so that one SNP's
// column is contiguous; missing cells hold missing_code.
class panel {
 public:
  panel() = default;
  panel(std::vector<snp_meta> snps, std::size_t rows, bool phased, std::vector<std::int8_t> codes);

  std::size_t snp_count() const noexcept { return snps_.size(); }
  std::size_t row_count() const noexcept { return rows_; }
  bool phased() const noexcept { return phased_; }
  const std::vector<snp_meta>& snps() const noexcept { return snps_; }

  std::int8_t at(std::size_t row, std::size_t snp) const noexcept { return codes_[snp * rows_ + row]; }
  bool missing(std::size_t row, std::size_t snp) const noexcept { return at(row, snp) == missing_code; }
  std::span<const std::int8_t> column(std::size_t snp) const noexcept {
    return {codes_.data() + snp * rows_, rows_};
  }
  const std::vector<std::int8_t>& codes() const noexcept { return codes_; }
  bool has_missing() const noexcept;

  // Haplotype count used by the copying model: rows when phased, 2 x rows otherwise.
  std::size_t haplotype_count() const noexcept { return phased_ ? rows_ : 2 * rows_; }

  bool operator==(const panel&) const = default;

 private:
  std::vector<snp_meta> snps_;
  std::size_t rows_ = 0;
  bool phased_ = true;
  std::vector<std::int8_t> codes_;
};

// Cumulative population-scaled recombination coordinate, one per SNP.
class rho_map {
 public:
  rho_map() = default;
  explicit rho_map(std::vector<double> cumulative);

  std::size_t size() const noexcept { return cumulative_.size(); }
  double at(std::size_t i) const noexcept { return cumulative_[i]; }
  // rho between SNPs i and j, additive along the map.
  double distance(std::size_t i, std::size_t j) const noexcept {
    return i < j ? cumulative_[j] - cumulative_[i] : cumulative_[i] - cumulative_[j];
  }
  const std::vector<double>& cumulative() const noexcept { return cumulative_; }

  bool operator==(const rho_map&) const = default;

 private:
  std::vector<double> cumulative_;
};

enum class snp_status : std::uint8_t { typed, untyped };

// Per-SNP allele frequencies; untyped entries hold NaN.
class frequency_vector {
 public:
  frequency_vector() = default;
  // All SNPs untyped.
  explicit frequency_vector(std::size_t p);
  // NaN entries become untyped; finite entries must lie in [0,1].
  static frequency_vector from_values(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  bool typed(std::size_t i) const noexcept { return status_[i] == snp_status::typed; }
  double value(std::size_t i) const noexcept { return values_[i]; }
  void set(std::size_t i, double value);
  void unset(std::size_t i);

  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<snp_status>& status() const noexcept { return status_; }
  std::vector<std::size_t> typed_indices() const;
  std::vector<std::size_t> untyped_indices() const;
  std::vector<double> typed_values() const;

  bool operator==(const frequency_vector& other) const;

 private:
  std::vector<double> values_;
  std::vector<snp_status> status_;
};

inline constexpr double unset_value = std::numeric_limits<double>::quiet_NaN();

}  // namespace linimpute
