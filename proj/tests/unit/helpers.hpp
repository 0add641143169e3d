#pragma once

#include <string>
#include <vector>

#include "linimpute/banded.hpp"
#include "linimpute/shrinkage.hpp"
#include "linimpute/types.hpp"

namespace testing {

inline std::vector<linimpute::snp_meta> make_snps(std::size_t p) {
  std::vector<linimpute::snp_meta> snps(p);
  for (std::size_t j = 0; j < p; ++j) {
    snps[j].id = "rs" + std::to_string(j + 1);
    snps[j].position = static_cast<std::int64_t>(100 * (j + 1));
  }
  return snps;
}

// Each string is one haplotype (phased) or individual (unphased); '.' is missing.
inline linimpute::panel make_panel(const std::vector<std::string>& rows, bool phased = true) {
  const std::size_t n = rows.size();
  const std::size_t p = rows.front().size();
  std::vector<std::int8_t> codes(n * p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j)
      codes[j * n + i] = rows[i][j] == '.' ? linimpute::missing_code : static_cast<std::int8_t>(rows[i][j] - '0');
  return linimpute::panel(make_snps(p), n, phased, std::move(codes));
}

inline linimpute::banded_spd_matrix dense_band(const std::vector<std::vector<double>>& a) {
  const std::size_t p = a.size();
  linimpute::banded_spd_matrix m(p, p - 1);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) m.set(i, j, a[i][j]);
  return m;
}

// Hand-built model with the given moments; no panel behind it.
inline linimpute::moment_model make_model(std::vector<double> mu, linimpute::banded_spd_matrix sigma) {
  linimpute::moment_model m;
  m.snps = make_snps(mu.size());
  m.panel_freq = mu;
  m.mu = std::move(mu);
  m.sigma = std::move(sigma);
  m.panel_size = 100;
  return m;
}

}  // namespace testing
