#include "linimpute/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "linimpute/error.hpp"

namespace linimpute {

banded_spd_matrix restrict_to(const banded_spd_matrix& sigma, std::span<const std::size_t> index) {
  const std::size_t m = index.size();
  const std::size_t band = sigma.bandwidth();
  std::size_t width = 0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t c = a + 1; c < m && index[c] - index[a] <= band; ++c)
      if (sigma(index[c], index[a]) != 0.0) width = std::max(width, c - a);
  banded_spd_matrix out(m, width);
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t first = a > width ? a - width : 0;
    for (std::size_t c = first; c <= a; ++c) out.set(a, c, sigma(index[a], index[c]));
  }
  return out;
}

conditional_solver::conditional_solver(const banded_spd_matrix& sigma, std::vector<std::size_t> typed,
                                       double inflation, mode m)
    : sigma_(&sigma), typed_(std::move(typed)), inflation_(inflation) {
  const std::size_t p = sigma.dim();
  if (typed_.empty()) fail(errc::all_typed_or_all_untyped, "no typed SNPs to condition on");
  for (std::size_t i = 0; i < typed_.size(); ++i) {
    if (typed_[i] >= p) fail(errc::dimension_mismatch, "typed index out of range");
    if (i > 0 && typed_[i] <= typed_[i - 1]) fail(errc::invalid_argument, "typed indices must be strictly increasing");
  }
  if (!(inflation_ >= 0.0)) fail(errc::invalid_argument, "diagonal inflation must be nonnegative");
  {
    std::size_t t = 0;
    for (std::size_t i = 0; i < p; ++i) {
      if (t < typed_.size() && typed_[t] == i)
        ++t;
      else
        untyped_.push_back(i);
    }
  }

  banded_spd_matrix a = restrict_to(sigma, typed_);
  if (inflation_ > 0.0) a.add_diagonal(inflation_);
  factor_ = banded_cholesky(a);

  const std::size_t band = sigma.bandwidth();
  couplings_.resize(untyped_.size());
  for (std::size_t k = 0; k < untyped_.size(); ++k) {
    const std::size_t u = untyped_[k];
    const std::size_t lo = u > band ? u - band : 0;
    const std::size_t hi = u + band;
    auto first = std::lower_bound(typed_.begin(), typed_.end(), lo);
    auto last = std::upper_bound(first, typed_.end(), hi);
    coupling& c = couplings_[k];
    c.first = static_cast<std::size_t>(first - typed_.begin());
    for (auto it = first; it != last; ++it) c.values.push_back(sigma(u, *it));
    // trim zero tails so the support reflects actual coupling
    while (!c.values.empty() && c.values.back() == 0.0) c.values.pop_back();
    std::size_t lead = 0;
    while (lead < c.values.size() && c.values[lead] == 0.0) ++lead;
    c.values.erase(c.values.begin(), c.values.begin() + static_cast<std::ptrdiff_t>(lead));
    c.first += lead;
  }

  if (m == mode::untyped_covariance) {
    compute_whitened();
    compute_variance_whitened();
    return;
  }
  // Pick the cheaper exact route for the diagonal.
  const double nt = static_cast<double>(typed_.size());
  const double bt = static_cast<double>(factor_.bandwidth() + 1);
  double cost_whiten = 0.0, cost_select = 0.0;
  std::size_t span = 0;
  for (const auto& c : couplings_) {
    if (c.values.empty()) continue;
    cost_whiten += (nt - static_cast<double>(c.first)) * bt;
    cost_select += static_cast<double>(c.values.size()) * static_cast<double>(c.values.size());
    span = std::max(span, c.values.size() - 1);
  }
  cost_select += nt * static_cast<double>(std::max<std::size_t>(span, factor_.bandwidth()) + 1) * bt;
  if (cost_whiten <= cost_select) {
    compute_whitened();
    compute_variance_whitened();
    whitened_.clear();
    whitened_.shrink_to_fit();
  } else {
    compute_variance_selected_inverse();
  }
}

void conditional_solver::compute_whitened() {
  const std::size_t nt = typed_.size();
  whitened_.resize(couplings_.size());
  std::vector<double> rhs(nt, 0.0);
  for (std::size_t k = 0; k < couplings_.size(); ++k) {
    const coupling& c = couplings_[k];
    if (c.values.empty()) continue;
    std::fill(rhs.begin(), rhs.end(), 0.0);
    std::copy(c.values.begin(), c.values.end(), rhs.begin() + static_cast<std::ptrdiff_t>(c.first));
    std::vector<double> w = forward_substitute(factor_, rhs);
    whitened_[k].assign(w.begin() + static_cast<std::ptrdiff_t>(c.first), w.end());
  }
}

void conditional_solver::compute_variance_whitened() {
  variance_.resize(untyped_.size());
  for (std::size_t k = 0; k < untyped_.size(); ++k) {
    const double prior = (*sigma_)(untyped_[k], untyped_[k]);
    variance_[k] = prior - dot(whitened_[k], whitened_[k]);
  }
}

void conditional_solver::compute_variance_selected_inverse() {
  std::size_t span = 0;
  for (const auto& c : couplings_)
    if (!c.values.empty()) span = std::max(span, c.values.size() - 1);
  const banded_spd_matrix z = banded_inverse_band(factor_, span);
  variance_.resize(untyped_.size());
  for (std::size_t k = 0; k < untyped_.size(); ++k) {
    const coupling& c = couplings_[k];
    double reduction = 0.0;
    const std::size_t len = c.values.size();
    for (std::size_t a = 0; a < len; ++a) {
      const std::size_t ia = c.first + a;
      double inner = 0.5 * c.values[a] * z(ia, ia);
      std::span<const double> row = z.row(ia);
      const std::size_t first = z.first_column(ia);
      for (std::size_t b = 0; b < a; ++b) inner += c.values[b] * row[c.first + b - first];
      reduction += 2.0 * c.values[a] * inner;
    }
    variance_[k] = (*sigma_)(untyped_[k], untyped_[k]) - reduction;
  }
}

std::vector<double> conditional_solver::solve(std::span<const double> typed_residual) const {
  return banded_solve(factor_, typed_residual);
}

std::vector<double> conditional_solver::mean(std::span<const double> mu, std::span<const double> typed_values) const {
  if (typed_values.size() != typed_.size())
    fail(errc::dimension_mismatch, "typed value count does not match typed set");
  if (mu.size() != sigma_->dim()) fail(errc::dimension_mismatch, "prior mean length does not match covariance");
  std::vector<double> residual(typed_.size());
  for (std::size_t i = 0; i < typed_.size(); ++i) residual[i] = typed_values[i] - mu[typed_[i]];
  const std::vector<double> alpha = solve(residual);
  std::vector<double> out(untyped_.size());
  for (std::size_t k = 0; k < untyped_.size(); ++k) {
    const coupling& c = couplings_[k];
    out[k] = mu[untyped_[k]] + dot(c.values, std::span<const double>(alpha.data() + c.first, c.values.size()));
  }
  return out;
}

double conditional_solver::covariance(std::size_t a, std::size_t b) const {
  if (whitened_.size() != untyped_.size())
    fail(errc::invalid_argument, "solver was not built for untyped covariances");
  const double prior = (*sigma_)(untyped_[a], untyped_[b]);
  const auto& wa = whitened_[a];
  const auto& wb = whitened_[b];
  if (wa.empty() || wb.empty()) return prior;
  const std::size_t fa = couplings_[a].first, fb = couplings_[b].first;
  const std::size_t start = std::max(fa, fb);
  const std::size_t len = typed_.size() - start;
  return prior - dot(std::span<const double>(wa.data() + (start - fa), len),
                     std::span<const double>(wb.data() + (start - fb), len));
}

double conditional_solver::log_density(std::span<const double> typed_residual) const {
  const std::vector<double> w = forward_substitute(factor_, typed_residual);
  const double m = static_cast<double>(typed_.size());
  return -0.5 * (m * std::log(2.0 * std::numbers::pi) + factor_.log_determinant() + dot(w, w));
}

conditional_result conditional_gaussian(std::span<const double> mu, const banded_spd_matrix& sigma,
                                        std::span<const std::size_t> typed, std::span<const double> typed_values,
                                        double inflation) {
  if (mu.size() != sigma.dim()) fail(errc::dimension_mismatch, "prior mean length does not match covariance");
  if (typed.empty() || typed.size() >= sigma.dim())
    fail(errc::all_typed_or_all_untyped, "typed set must be a nonempty strict subset of the SNPs");
  conditional_solver solver(sigma, std::vector<std::size_t>(typed.begin(), typed.end()), inflation);
  conditional_result out;
  out.mean = solver.mean(mu, typed_values);
  out.variance = solver.raw_variance();
  for (auto& v : out.variance)
    if (v < 0.0) v = 0.0;
  return out;
}

std::shared_ptr<const conditional_solver> factor_cache::get(const std::vector<std::size_t>& typed, double inflation) {
  auto key = std::make_pair(typed, inflation);
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  auto solver = std::make_shared<const conditional_solver>(*sigma_, typed, inflation, mode_);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.emplace(std::move(key), std::move(solver));
  return it->second;
}

std::size_t factor_cache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

}  // namespace linimpute
