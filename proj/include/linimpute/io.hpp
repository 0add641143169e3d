#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linimpute/imputation.hpp"
#include "linimpute/shrinkage.hpp"
#include "linimpute/types.hpp"

namespace linimpute {

// 17 significant digits, which reparses to the same double.
std::string format_double(double v);

// Legend: header "id position allele0 allele1", one row per SNP.
std::vector<snp_meta> read_legend(std::istream& in, const std::string& source);
void write_legend(std::ostream& out, std::span<const snp_meta> snps);

// Haps: first line "phased=0" or "phased=1", then one line per SNP with one code per
// haplotype (phased) or individual (unphased); "." is missing.
panel read_panel(std::istream& haps, const std::string& haps_source, std::vector<snp_meta> snps);
void write_haps(std::ostream& out, const panel& data);

panel load_panel(const std::string& haps_path, const std::string& legend_path);
void write_panel(const panel& data, const std::string& haps_path, const std::string& legend_path);

// Map: header "id position cum_rho", rows in legend order.
rho_map read_rho_map(std::istream& in, const std::string& source, std::span<const snp_meta> snps);
void write_rho_map(std::ostream& out, std::span<const snp_meta> snps, const rho_map& rho);
rho_map load_rho_map(const std::string& path, std::span<const snp_meta> snps);
void save_rho_map(const std::string& path, std::span<const snp_meta> snps, const rho_map& rho);

// Binary model container: magic "LIMPMODL", format version, SNP metadata,
// theta, panel size, threshold, mu, panel frequencies and the band of sigma.
void write_model(std::ostream& out, const moment_model& model);
moment_model read_model(std::istream& in, const std::string& source);
void save_model(const std::string& path, const moment_model& model);
moment_model load_model(const std::string& path);
// Human-readable dump; not read back.
void write_model_text(std::ostream& out, const moment_model& model);

// Frequency table: header "id position freq"; "." or an absent row is untyped.
frequency_vector read_frequency_table(std::istream& in, const std::string& source, std::span<const snp_meta> snps);
void write_frequency_table(std::ostream& out, std::span<const snp_meta> snps, const frequency_vector& freq);
frequency_vector load_frequency_table(const std::string& path, std::span<const snp_meta> snps);

// Genotype-frequency table: header "id position p0 p1 p2"; "." fields or an absent row are untyped.
std::vector<std::optional<genotype_freq>> read_genotype_freq_table(std::istream& in, const std::string& source,
                                                                   std::span<const snp_meta> snps);
void write_genotype_freq_table(std::ostream& out, std::span<const snp_meta> snps,
                               std::span<const std::optional<genotype_freq>> freq);
std::vector<std::optional<genotype_freq>> load_genotype_freq_table(const std::string& path,
                                                                   std::span<const snp_meta> snps);

// "id position mean variance status clamped" for every entry of the result.
void write_imputation(std::ostream& out, std::span<const snp_meta> snps, const imputation_result& result);

}  // namespace linimpute
