#pragma once

#include <stdexcept>
#include <string>

namespace linimpute {

enum class errc {
  not_positive_definite,
  dimension_mismatch,
  all_typed_or_all_untyped,
  invalid_panel_size,
  empty_panel,
  length_mismatch,
  no_typed_snps,
  invalid_genotype_frequencies,
  too_few_typed,
  fit_diverged,
  individual_fully_missing,
  snp_never_observed,
  stride_too_large,
  zero_variance,
  too_many_templates,
  parse_error,
  row_count_mismatch,
  nonmonotone_positions,
  nonmonotone_rho,
  id_mismatch,
  io_error,
  invalid_argument,
};

const char* errc_name(errc code) noexcept;

// Every failure raised by the library carries one of the codes above.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace linimpute
