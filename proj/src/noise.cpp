#include "linimpute/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "linimpute/conditional.hpp"
#include "linimpute/error.hpp"

namespace linimpute {

namespace {

struct typed_system {
  banded_spd_matrix a;  // S_tt
  std::vector<double> residual;
  std::vector<std::size_t> typed;
  std::vector<double> values;
};

typed_system build_typed_system(const moment_model& model, const frequency_vector& observed) {
  if (observed.size() != model.dim()) fail(errc::dimension_mismatch, "observed frequencies do not match the model");
  typed_system s;
  s.typed = observed.typed_indices();
  if (s.typed.empty()) fail(errc::no_typed_snps, "no typed SNPs in the observed frequencies");
  s.values = observed.typed_values();
  s.a = restrict_to(model.sigma, s.typed);
  s.residual.resize(s.typed.size());
  for (std::size_t k = 0; k < s.typed.size(); ++k) s.residual[k] = s.values[k] - model.mu[s.typed[k]];
  return s;
}

// Log determinant and quadratic form of S_tt + lambda I at the residual.
struct profile_terms {
  double logdet;
  double quad;
};

profile_terms evaluate(const typed_system& s, double lambda) {
  banded_spd_matrix m = s.a;
  if (lambda > 0.0) m.add_diagonal(lambda);
  const banded_factor l = banded_cholesky(m);
  const std::vector<double> w = forward_substitute(l, s.residual);
  return {l.log_determinant(), dot(w, w)};
}

double gaussian_loglik(double n, double sigma2, const profile_terms& t) {
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + n * std::log(sigma2) + t.logdet + t.quad / sigma2);
}

}  // namespace

double log_likelihood(const moment_model& model, const frequency_vector& observed, double sigma2, double eps2) {
  if (!(sigma2 > 0.0) || !(eps2 >= 0.0)) fail(errc::invalid_argument, "need sigma2 > 0 and eps2 >= 0");
  const typed_system s = build_typed_system(model, observed);
  banded_spd_matrix m = s.a;
  m.scale(sigma2);
  if (eps2 > 0.0) m.add_diagonal(eps2);
  const banded_factor l = banded_cholesky(m);
  const std::vector<double> w = forward_substitute(l, s.residual);
  const double n = static_cast<double>(s.typed.size());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + l.log_determinant() + dot(w, w));
}

noise_model fit_noise(const moment_model& model, const frequency_vector& observed, const noise_fit_options& options) {
  const typed_system s = build_typed_system(model, observed);
  const double n = static_cast<double>(s.typed.size());
  if (s.typed.size() < min_typed_for_fit)
    fail(errc::too_few_typed, "noise fit needs at least " + std::to_string(min_typed_for_fit) + " typed SNPs");

  noise_model best;
  best.loglik = -std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;

  // Profile over lambda: sigma2 maximizes -n/2 log sigma2 - quad/(2 sigma2), a
  // unimodal function, so the bounded optimum is Q/n clamped to the interval
  // allowed by sigma2's bounds and eps2 = lambda sigma2 <= eps2_upper.
  auto profile = [&](double lambda) {
    const profile_terms t = evaluate(s, lambda);
    ++evaluations;
    double upper = sigma2_upper;
    if (lambda > 0.0) upper = std::max(sigma2_lower, std::min(upper, eps2_upper / lambda));
    const double sigma2 = std::clamp(t.quad / n, sigma2_lower, upper);
    noise_model m;
    m.sigma2 = sigma2;
    m.eps2 = lambda * sigma2;
    m.loglik = gaussian_loglik(n, sigma2, t);
    if (m.loglik > best.loglik) {
      best.sigma2 = m.sigma2;
      best.eps2 = m.eps2;
      best.loglik = m.loglik;
    }
    return m.loglik;
  };

  profile(0.0);
  bool converged = true;
  if (options.estimate_eps) {
    // Coarse scan in log lambda, then golden-section refinement around the best point.
    const double lo = std::log(1e-9);
    const double hi = std::log(eps2_upper / sigma2_lower);
    const std::size_t grid = 48;
    std::vector<double> u(grid + 1), f(grid + 1);
    std::size_t arg = 0;
    for (std::size_t g = 0; g <= grid; ++g) {
      u[g] = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid);
      f[g] = profile(std::exp(u[g]));
      if (f[g] > f[arg]) arg = g;
    }
    double a = u[arg > 0 ? arg - 1 : 0];
    double b = u[std::min(arg + 1, grid)];
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = profile(std::exp(c));
    double fd = profile(std::exp(d));
    converged = false;
    while (evaluations < options.max_evaluations) {
      if (b - a < options.tolerance) {
        converged = true;
        break;
      }
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - ratio * (b - a);
        fc = profile(std::exp(c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + ratio * (b - a);
        fd = profile(std::exp(d));
      }
    }
  }
  best.iterations = evaluations;
  best.converged = converged;
  const double rel = 1e-9;
  if (best.sigma2 <= sigma2_lower * (1.0 + rel) || best.sigma2 >= sigma2_upper * (1.0 - rel) ||
      best.eps2 >= eps2_upper * (1.0 - rel))
    fail(errc::fit_diverged, "noise fit ended on a parameter bound (sigma2=" + std::to_string(best.sigma2) +
                                 ", eps2=" + std::to_string(best.eps2) + ")");
  return best;
}

imputation_result denoise_typed(const moment_model& model, const frequency_vector& observed, const noise_model& noise) {
  if (!(noise.sigma2 > 0.0) || !(noise.eps2 >= 0.0)) fail(errc::invalid_argument, "need sigma2 > 0 and eps2 >= 0");
  const typed_system s = build_typed_system(model, observed);
  const std::size_t m = s.typed.size();
  imputation_result r;
  r.index = s.typed;
  r.point = s.values;
  r.variance.assign(m, 0.0);
  r.status.assign(m, snp_status::typed);
  r.clamped.assign(m, 0);
  if (noise.eps2 == 0.0) return r;

  // (1/sigma2 S^-1 + 1/eps2 I)^-1 = eps2 I - eps2^2 (sigma2 S + eps2 I)^-1, which keeps the band.
  banded_spd_matrix b = s.a;
  b.scale(noise.sigma2);
  b.add_diagonal(noise.eps2);
  const banded_factor l = banded_cholesky(b);
  const std::vector<double> correction = banded_solve(l, s.residual);
  const banded_spd_matrix inv = banded_inverse_band(l, l.bandwidth());
  const double e2 = noise.eps2;
  for (std::size_t k = 0; k < m; ++k) {
    double v = s.values[k] - e2 * correction[k];
    if (v < 0.0 || v > 1.0) {
      v = std::clamp(v, 0.0, 1.0);
      r.clamped[k] = 1;
    }
    r.point[k] = v;
    r.variance[k] = std::max(0.0, e2 - e2 * e2 * inv(k, k));
  }
  return r;
}

}  // namespace linimpute
