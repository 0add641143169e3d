#include "linimpute/ecm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "linimpute/conditional.hpp"
#include "linimpute/error.hpp"
#include "linimpute/imputation.hpp"
#include "linimpute/parallel.hpp"

namespace linimpute {

namespace {

constexpr std::size_t chunk_size = 32;

struct genotype_rows {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<std::int8_t> codes;  // row-major

  std::span<const std::int8_t> row(std::size_t i) const { return {codes.data() + i * p, p}; }
};

genotype_rows to_rows(const panel& genotypes) {
  if (genotypes.phased()) fail(errc::invalid_argument, "panel-free estimation needs unphased genotypes");
  genotype_rows r;
  r.n = genotypes.row_count();
  r.p = genotypes.snp_count();
  r.codes.resize(r.n * r.p);
  for (std::size_t j = 0; j < r.p; ++j) {
    auto col = genotypes.column(j);
    for (std::size_t i = 0; i < r.n; ++i) r.codes[i * r.p + j] = col[i];
  }
  return r;
}

// One pass over all individuals under the current state. Accumulates the
// expected statistics and, when means is given, stores each individual's
// conditional mean vector (SNP-major, genotype scale).
ecm_statistics sweep(const ecm_state& state, const genotype_rows& rows, std::vector<double>* means) {
  const std::size_t n = rows.n, p = rows.p;
  const moment_model& model = state.model;
  if (model.dim() != p) fail(errc::dimension_mismatch, "genotype matrix does not match the state");
  const std::size_t band = state.band.bandwidth;
  std::vector<double> mu2(p);
  for (std::size_t j = 0; j < p; ++j) mu2[j] = 2.0 * model.mu[j];

  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<ecm_statistics> partial(chunks);
  const double half_log2 = 0.5 * std::log(2.0);
  parallel_for(chunks, [&](std::size_t c) {
    ecm_statistics& s = partial[c];
    s.sum.assign(p, 0.0);
    s.cross = banded_spd_matrix(p, band);
    factor_cache cache(model.sigma, conditional_solver::mode::untyped_covariance);
    std::vector<std::size_t> typed;
    std::vector<double> values, g(p), residual;
    const std::size_t end = std::min(n, (c + 1) * chunk_size);
    for (std::size_t i = c * chunk_size; i < end; ++i) {
      auto row = rows.row(i);
      typed.clear();
      values.clear();
      for (std::size_t j = 0; j < p; ++j)
        if (row[j] != missing_code) {
          typed.push_back(j);
          values.push_back(row[j]);
        }
      if (typed.empty()) fail(errc::individual_fully_missing, "individual " + std::to_string(i) + " has no typed genotypes");
      auto solver = cache.get(typed, 0.0);
      const std::vector<double> cond = solver->mean(mu2, values);
      const auto& untyped = solver->untyped();
      for (std::size_t k = 0; k < typed.size(); ++k) g[typed[k]] = values[k];
      for (std::size_t k = 0; k < untyped.size(); ++k) g[untyped[k]] = cond[k];

      residual.resize(typed.size());
      for (std::size_t k = 0; k < typed.size(); ++k) residual[k] = (values[k] - mu2[typed[k]]) / std::sqrt(2.0);
      s.loglik += solver->log_density(residual) - half_log2 * static_cast<double>(typed.size());

      for (std::size_t j = 0; j < p; ++j) {
        s.sum[j] += g[j];
        auto out = s.cross.row(j);
        const std::size_t first = s.cross.first_column(j);
        const double gj = g[j];
        for (std::size_t k = first; k <= j; ++k) out[k - first] += gj * g[k];
      }
      // conditional covariance of the genotypes is twice the haplotype-scale one
      for (std::size_t a = 0; a < untyped.size(); ++a) {
        auto out = s.cross.row(untyped[a]);
        const std::size_t first = s.cross.first_column(untyped[a]);
        for (std::size_t b = a + 1; b-- > 0;) {
          if (untyped[a] - untyped[b] > band) break;
          out[untyped[b] - first] += 2.0 * solver->covariance(a, b);
        }
      }
      if (means)
        for (std::size_t j = 0; j < p; ++j) (*means)[j * n + i] = g[j];
    }
  });

  ecm_statistics total;
  total.individuals = n;
  total.sum.assign(p, 0.0);
  total.cross = banded_spd_matrix(p, band);
  std::vector<double> cross = total.cross.storage();
  for (const auto& s : partial) {
    total.loglik += s.loglik;
    for (std::size_t j = 0; j < p; ++j) total.sum[j] += s.sum[j];
    const auto& v = s.cross.storage();
    for (std::size_t k = 0; k < cross.size(); ++k) cross[k] += v[k];
  }
  total.cross = banded_spd_matrix::from_storage(p, band, std::move(cross));
  return total;
}

double max_abs_change(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Model from f_panel and the diagonal of sigma_panel only.
void shrink_diagonal_start(ecm_state& state, const rho_map& rho, std::size_t haplotypes, const ecm_options& options) {
  const std::size_t p = state.f_panel.size();
  shrink_band diagonal;
  diagonal.last.resize(p);
  for (std::size_t j = 0; j < p; ++j) diagonal.last[j] = j;
  std::vector<snp_meta> snps = std::move(state.model.snps);
  state.model = shrink_moments(state.f_panel, state.sigma_panel, diagonal, rho, haplotypes,
                               options.shrinkage ? estimate_theta(haplotypes) : 0.0, options.shrinkage,
                               options.sparsity_threshold);
  state.model.snps = std::move(snps);
}

}  // namespace

ecm_statistics ecm_estep(const ecm_state& state, const panel& genotypes) {
  return sweep(state, to_rows(genotypes), nullptr);
}

void ecm_cmstep(ecm_state& state, const ecm_statistics& stats, const rho_map& rho, const ecm_options& options) {
  const shrink_band& band = state.band;
  const std::size_t n = stats.individuals;
  const std::size_t p = stats.sum.size();
  if (n == 0 || stats.cross.dim() != p || band.last.size() != p)
    fail(errc::dimension_mismatch, "statistics do not match the band");
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> gbar(p);
  for (std::size_t j = 0; j < p; ++j) gbar[j] = stats.sum[j] * inv_n;
  state.f_panel.resize(p);
  for (std::size_t j = 0; j < p; ++j) state.f_panel[j] = 0.5 * gbar[j];
  state.sigma_panel = banded_spd_matrix(p, band.bandwidth);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = j; k <= band.last[j]; ++k)
      state.sigma_panel.set(k, j, 0.5 * (stats.cross(k, j) * inv_n - gbar[j] * gbar[k]));

  const std::size_t haplotypes = 2 * n;
  const double theta = options.shrinkage ? estimate_theta(haplotypes) : 0.0;
  std::vector<snp_meta> snps = std::move(state.model.snps);
  state.model = shrink_moments(state.f_panel, state.sigma_panel, band, rho, haplotypes, theta, options.shrinkage,
                               options.sparsity_threshold);
  state.model.snps = std::move(snps);
  state.shrinkage_enabled = options.shrinkage;
}

ecm_state ecm_initial_state(const panel& genotypes, const rho_map& rho, const ecm_options& options) {
  const std::size_t n = genotypes.row_count();
  const std::size_t p = genotypes.snp_count();
  if (genotypes.phased()) fail(errc::invalid_argument, "panel-free estimation needs unphased genotypes");
  if (n < 2) fail(errc::invalid_argument, "panel-free estimation needs at least two individuals");
  if (rho.size() != p) fail(errc::length_mismatch, "rho map length does not match SNP count");
  ecm_state state;
  state.f_panel.resize(p);
  std::vector<double> var(p);
  for (std::size_t j = 0; j < p; ++j) {
    double sum = 0.0, sq = 0.0;
    std::size_t count = 0;
    for (auto g : genotypes.column(j))
      if (g != missing_code) {
        sum += g;
        sq += static_cast<double>(g) * g;
        ++count;
      }
    if (count == 0) fail(errc::snp_never_observed, "SNP " + genotypes.snps()[j].id + " is never observed");
    const double mean = sum / static_cast<double>(count);
    state.f_panel[j] = 0.5 * mean;
    var[j] = 0.5 * std::max(0.0, sq / static_cast<double>(count) - mean * mean);
  }
  state.sigma_panel = banded_spd_matrix(p, 0);
  for (std::size_t j = 0; j < p; ++j) state.sigma_panel.set(j, j, var[j]);
  state.band = compute_shrink_band(rho, 2 * n, options.sparsity_threshold);
  state.shrinkage_enabled = options.shrinkage;
  state.model.snps = genotypes.snps();
  shrink_diagonal_start(state, rho, 2 * n, options);
  return state;
}

namespace {

ecm_output run_single(const panel& genotypes, const genotype_rows& rows, const rho_map& rho,
                      const ecm_options& options, ecm_state state) {
  for (std::size_t it = 0; it < options.iterations; ++it) {
    const ecm_statistics stats = sweep(state, rows, nullptr);
    state.loglik_trace.push_back(stats.loglik);
    const std::vector<double> previous = state.model.mu;
    ecm_cmstep(state, stats, rho, options);
    ++state.iteration;
    const double delta = max_abs_change(previous, state.model.mu);
    state.delta_trace.push_back(delta);
    if (delta < options.tolerance) break;
  }
  ecm_output out;
  const std::size_t n = rows.n, p = rows.p;
  out.posterior_mean.assign(n * p, 0.0);
  const ecm_statistics final_pass = sweep(state, rows, &out.posterior_mean);
  state.loglik_trace.push_back(final_pass.loglik);
  std::vector<std::int8_t> codes(n * p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::int8_t g = rows.codes[i * p + j];
      codes[j * n + i] = g != missing_code ? g : static_cast<std::int8_t>(hard_call(out.posterior_mean[j * n + i]));
    }
  out.imputed = panel(genotypes.snps(), n, false, std::move(codes));
  out.state = std::move(state);
  return out;
}

}  // namespace

ecm_output ecm_run(const panel& genotypes, const rho_map& rho, const ecm_options& options) {
  if (options.starts == 0) fail(errc::invalid_argument, "at least one start is needed");
  const ecm_state initial = ecm_initial_state(genotypes, rho, options);
  const genotype_rows rows = to_rows(genotypes);

  ecm_output best = run_single(genotypes, rows, rho, options, initial);
  for (std::size_t s = 1; s < options.starts; ++s) {
    std::mt19937_64 rng(options.seed + s);
    std::uniform_real_distribution<double> jitter(-options.jitter, options.jitter);
    ecm_state start = initial;
    for (auto& f : start.f_panel) f = std::clamp(f + jitter(rng), 0.0, 1.0);
    shrink_diagonal_start(start, rho, 2 * rows.n, options);
    ecm_output candidate = run_single(genotypes, rows, rho, options, std::move(start));
    if (candidate.state.loglik_trace.back() > best.state.loglik_trace.back()) best = std::move(candidate);
  }
  return best;
}

}  // namespace linimpute
