#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "linimpute/error.hpp"
#include "linimpute/imputation.hpp"
#include "linimpute/simulate.hpp"
#include "oracles.hpp"

using namespace linimpute;

namespace {

moment_model two_snp_model() {
  return testing::make_model({0.5, 0.5}, testing::dense_band({{0.1, 0.05}, {0.05, 0.1}}));
}

frequency_vector typed_at(std::size_t p, const std::vector<std::pair<std::size_t, double>>& values) {
  frequency_vector f(p);
  for (auto [i, v] : values) f.set(i, v);
  return f;
}

}  // namespace

TEST_CASE("frequency imputation two-SNP example") {
  const auto r = impute_frequencies(two_snp_model(), typed_at(2, {{1, 0.7}}));
  REQUIRE(r.size() == 2);
  CHECK(r.status[0] == snp_status::untyped);
  CHECK(r.point[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(r.variance[0] == doctest::Approx(0.075).epsilon(1e-14));
  CHECK(r.status[1] == snp_status::typed);
  CHECK(r.point[1] == 0.7);
  CHECK(r.variance[1] == 0.0);
  CHECK(r.clamped[0] == 0);
}

TEST_CASE("uncoupled target keeps the prior scaled by sigma2") {
  banded_spd_matrix s(3, 1);
  s.set(0, 0, 0.1);
  s.set(1, 1, 0.2);
  s.set(2, 2, 0.3);
  s.set(2, 1, 0.05);
  const auto m = testing::make_model({0.2, 0.4, 0.6}, s);
  const auto r = impute_frequencies(m, typed_at(3, {{2, 0.9}}), 2.5, 0.0);
  CHECK(r.point[0] == 0.2);
  CHECK(r.variance[0] == doctest::Approx(0.25));
}

TEST_CASE("frequency imputation matches the dense oracle with noise and overdispersion") {
  std::mt19937_64 rng(101);
  const std::size_t p = 100;
  auto sigma = oracle::random_banded_spd(p, 5, rng);
  sigma.scale(0.002);
  std::uniform_real_distribution<double> u(0.3, 0.7);
  std::vector<double> mu(p);
  for (auto& v : mu) v = u(rng);
  const auto m = testing::make_model(mu, sigma);
  frequency_vector obs(p);
  std::vector<std::size_t> typed, untyped;
  std::vector<double> y;
  for (std::size_t i = 0; i < p; ++i) {
    if (i % 3 != 1) {
      obs.set(i, u(rng));
      typed.push_back(i);
      y.push_back(obs.value(i));
    } else {
      untyped.push_back(i);
    }
  }
  const double sigma2 = 1.5, eps2 = 0.01;
  const auto r = impute_frequencies(m, obs, sigma2, eps2);
  const auto ref = oracle::condition(Eigen::Map<const Eigen::VectorXd>(mu.data(), p), sigma2 * oracle::to_dense(sigma),
                                     typed, untyped, Eigen::Map<const Eigen::VectorXd>(y.data(), y.size()), eps2);
  for (std::size_t a = 0; a < untyped.size(); ++a) {
    CHECK(std::abs(r.point[untyped[a]] - ref.mean(a)) < 1e-9);
    CHECK(std::abs(r.variance[untyped[a]] - ref.covariance(a, a)) < 1e-9);
  }
}

TEST_CASE("degenerate typed sets") {
  const auto m = two_snp_model();
  const auto all = impute_frequencies(m, typed_at(2, {{0, 0.1}, {1, 0.9}}));
  CHECK(all.point == std::vector<double>{0.1, 0.9});
  CHECK(all.variance == std::vector<double>{0.0, 0.0});
  try {
    impute_frequencies(m, frequency_vector(2));
    FAIL("expected failure");
  } catch (const error& e) {
    CHECK(e.code() == errc::no_typed_snps);
  }
  CHECK_THROWS_AS(impute_frequencies(m, frequency_vector(3)), error);
}

TEST_CASE("means outside [0,1] are clamped and flagged") {
  const auto m = testing::make_model({0.9, 0.5}, testing::dense_band({{0.1, 0.09}, {0.09, 0.1}}));
  const auto r = impute_frequencies(m, typed_at(2, {{1, 1.0}}));
  CHECK(r.point[0] == 1.0);
  CHECK(r.clamped[0] == 1);
}

TEST_CASE("noise limits") {
  const auto m = two_snp_model();
  const auto far = impute_frequencies(m, typed_at(2, {{1, 0.7}}), 1.0, 1e9);
  CHECK(std::abs(far.point[0] - 0.5) < 1e-6);
}

TEST_CASE("HWE genotype frequencies") {
  const auto a = genotype_freq_hwe(0.5, 0.0);
  CHECK(a.p0 == doctest::Approx(0.25));
  CHECK(a.p1 == doctest::Approx(0.5));
  CHECK(a.p2 == doctest::Approx(0.25));
  const auto b = genotype_freq_hwe(0.3, 0.01);
  CHECK(b.p0 == doctest::Approx(0.5));
  CHECK(b.p1 == doctest::Approx(0.4));
  CHECK(b.p2 == doctest::Approx(0.1));
  const auto c = genotype_freq_hwe(0.0, 0.0);
  CHECK(c.p0 == 1.0);
  CHECK(c.p1 == 0.0);
  CHECK(c.p2 == 0.0);
  const auto d = clamp_to_simplex(0.8, 0.6);
  CHECK(d.p0 + d.p2 == doctest::Approx(1.0));
  CHECK(d.p1 == doctest::Approx(0.0));
  CHECK(d.p0 / d.p2 == doctest::Approx(0.8 / 0.6));
}

TEST_CASE("HWE route with vanishing variance") {
  const auto m = two_snp_model();
  const auto r = genotype_frequencies_hwe(m, typed_at(2, {{1, 0.7}}), 1.0, 0.0);
  CHECK(r.route == genotype_route::hwe);
  CHECK(r.freq[1].p2 == doctest::Approx(0.49));
  CHECK(r.freq[0].p2 == doctest::Approx(0.36 + 0.075));
  auto tight = m;
  tight.sigma.scale(1e-12);
  const auto t = genotype_frequencies_hwe(tight, typed_at(2, {{1, 0.7}}), 1.0, 0.0);
  CHECK(t.freq[0].p0 == doctest::Approx(0.16));
  CHECK(t.freq[0].p1 == doctest::Approx(0.48));
  CHECK(t.freq[0].p2 == doctest::Approx(0.36));
}

TEST_CASE("indicator moment examples") {
  {
    const auto g = fit_genotype_moment_model(testing::make_model({0.5, 0.5}, testing::dense_band({{0.25, 0}, {0, 0.25}})));
    CHECK(g.mu[1] == doctest::Approx(0.25));
    CHECK(g.mu[0] == doctest::Approx(0.25));
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 2; b < 4; ++b) CHECK(g.sigma(a, b) == 0.0);
  }
  {
    const auto g =
        fit_genotype_moment_model(testing::make_model({0.5, 0.5}, testing::dense_band({{0.25, 0.25}, {0.25, 0.25}})));
    CHECK(g.sigma(1, 3) == doctest::Approx(0.1875));
    CHECK(g.sigma(1, 1) == doctest::Approx(0.1875));
    CHECK(g.sigma(0, 2) == doctest::Approx(0.1875));
    CHECK(g.sigma(0, 1) == doctest::Approx(-0.0625));
  }
}

TEST_CASE("indicator moments match enumeration over copying paths") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t k = 2 + rep % 3;
    std::bernoulli_distribution coin(0.5);
    std::vector<int> qs(k), qt(k);
    std::vector<std::string> rows(k, "00");
    for (std::size_t i = 0; i < k; ++i) {
      qs[i] = coin(rng);
      qt[i] = coin(rng);
      rows[i] = {static_cast<char>('0' + qs[i]), static_cast<char>('0' + qt[i])};
    }
    const double rho = std::uniform_real_distribution<double>(0.0, 2.0 * k)(rng);
    fit_options opt;
    opt.theta = std::uniform_real_distribution<double>(0.01, 0.4)(rng);
    opt.sparsity_threshold = 1e-300;
    const auto m = fit_moment_model(testing::make_panel(rows), rho_map({0.0, rho}), opt);
    const auto g = fit_genotype_moment_model(m);
    const auto o = oracle::indicator_oracle(qs, qt, 1.0 - std::exp(-rho / k), *opt.theta);
    for (std::size_t a = 0; a < 4; ++a) {
      CHECK(std::abs(g.mu[a] - o.mean(a)) < 1e-12);
      for (std::size_t b = 0; b < 4; ++b) CHECK(std::abs(g.sigma(a, b) - o.covariance(a, b)) < 1e-12);
    }
  }
}

TEST_CASE("joint-indicator route on two SNPs matches the dense oracle") {
  fit_options opt;
  opt.theta = 0.05;
  const auto m = fit_moment_model(testing::make_panel({"00", "11", "10", "11", "01"}), rho_map({0.0, 0.5}), opt);
  const auto g = fit_genotype_moment_model(m);
  std::vector<std::optional<genotype_freq>> obs(2);
  obs[0] = genotype_freq{0.3, 0.0, 0.25};
  const auto r = impute_genotype_frequencies(g, obs);
  CHECK(r.route == genotype_route::joint_indicator);
  const auto ref = oracle::condition(Eigen::Map<const Eigen::VectorXd>(g.mu.data(), 4), oracle::to_dense(g.sigma),
                                     {0, 1}, {2, 3}, Eigen::Vector2d(0.3, 0.25), 0.0);
  CHECK(std::abs(r.freq[1].p0 - ref.mean(0)) < 1e-10);
  CHECK(std::abs(r.freq[1].p2 - ref.mean(1)) < 1e-10);
  CHECK(r.freq[1].p1 == doctest::Approx(1.0 - ref.mean(0) - ref.mean(1)));
  CHECK(r.freq[0].p0 == 0.3);
  CHECK(r.status[0] == snp_status::typed);
}

TEST_CASE("duplicate column recovers its genotype frequencies") {
  fit_options opt;
  opt.theta = 0.0;
  const auto m = fit_moment_model(testing::make_panel({"00", "11", "00", "11", "11", "00"}), rho_map({0.0, 0.0}), opt);
  std::vector<std::optional<genotype_freq>> obs(2);
  obs[0] = genotype_freq{0.3, 0.0, 0.2};
  const auto r = impute_genotype_frequencies(fit_genotype_moment_model(m), obs);
  CHECK(r.freq[1].p0 == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(r.freq[1].p2 == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("joint-indicator input validation") {
  const auto g = fit_genotype_moment_model(two_snp_model());
  std::vector<std::optional<genotype_freq>> none(2);
  CHECK_THROWS_AS(impute_genotype_frequencies(g, none), error);
  std::vector<std::optional<genotype_freq>> bad(2);
  bad[0] = genotype_freq{0.7, 0.0, 0.6};
  try {
    impute_genotype_frequencies(g, bad);
    FAIL("expected failure");
  } catch (const error& e) {
    CHECK(e.code() == errc::invalid_genotype_frequencies);
  }
}

TEST_CASE("joint-indicator and HWE routes agree under HWE") {
  simulation_config cfg;
  cfg.snps = 200;
  cfg.sample_haplotypes = 4000;
  cfg.mean_switch = 0.3;
  cfg.seed = 17;
  const auto data = simulate(cfg);
  const auto m = fit_moment_model(data.reference, data.rho);
  const panel geno = pair_haplotypes(data.sample);  // random pairing: HWE by construction
  const std::size_t n = geno.row_count();
  std::vector<std::optional<genotype_freq>> gobs(cfg.snps);
  frequency_vector fobs(cfg.snps);
  std::vector<genotype_freq> truth(cfg.snps);
  for (std::size_t t = 0; t < cfg.snps; ++t) {
    double c0 = 0, c2 = 0, sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int v = geno.at(i, t);
      c0 += v == 0;
      c2 += v == 2;
      sum += v;
    }
    truth[t] = {c0 / n, 1 - (c0 + c2) / n, c2 / n};
    if (t % 5 != 0) {
      gobs[t] = truth[t];
      fobs.set(t, sum / (2.0 * n));
    }
  }
  const auto joint = impute_genotype_frequencies(fit_genotype_moment_model(m), gobs);
  const auto hwe = genotype_frequencies_hwe(with_pool_size(m, 2 * n), fobs);
  for (std::size_t t = 0; t < cfg.snps; t += 5) {
    CHECK(std::abs(joint.freq[t].p0 - hwe.freq[t].p0) < 0.01);
    CHECK(std::abs(joint.freq[t].p1 - hwe.freq[t].p1) < 0.01);
    CHECK(std::abs(joint.freq[t].p2 - hwe.freq[t].p2) < 0.01);
  }
}

TEST_CASE("individual genotypes") {
  SUBCASE("duplicate column drives the call to the typed genotype") {
    fit_options opt;
    opt.theta = 1e-6;
    const auto m = fit_moment_model(testing::make_panel({"00", "11", "00", "11", "10"}), rho_map({0.0, 0.0}), opt);
    // make the two SNPs exact duplicates
    const auto m2 = fit_moment_model(testing::make_panel({"00", "11", "00", "11", "11"}), rho_map({0.0, 0.0}), opt);
    const std::vector<std::int8_t> g{2, missing_code};
    const auto r = impute_individual_genotypes(m2, g);
    CHECK(std::abs(r.point[1] - 2.0) < 1e-3);
    CHECK(hard_call(r.point[1]) == 2);
    CHECK(r.point[0] == 2.0);
    CHECK(r.status[0] == snp_status::typed);
    const auto r1 = impute_individual_genotypes(m, g);
    CHECK(r1.point[1] < r.point[1]);
  }
  SUBCASE("observations at the prior mean leave untyped at the prior") {
    const auto m = fit_moment_model(testing::make_panel({"010", "111", "001", "110"}), rho_map({0.0, 0.3, 0.6}));
    // genotype 1 equals 2 * mu only when mu = 0.5
    auto half = testing::make_model({0.5, 0.5, 0.5}, m.sigma);
    const std::vector<std::int8_t> g{1, missing_code, 1};
    const auto r = impute_individual_genotypes(half, g);
    CHECK(r.point[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.variance[1] > 0.0);
  }
  SUBCASE("batch matches one-at-a-time") {
    simulation_config cfg;
    cfg.snps = 60;
    cfg.sample_haplotypes = 40;
    cfg.seed = 2;
    const auto data = simulate(cfg);
    const auto m = fit_moment_model(data.reference, data.rho);
    const panel geno = pair_haplotypes(data.sample);
    std::vector<std::int8_t> codes = geno.codes();
    for (std::size_t k = 0; k < codes.size(); k += 3) codes[k] = missing_code;
    const panel masked(geno.snps(), geno.row_count(), false, codes);
    const auto batch = impute_individual_genotypes(m, masked);
    for (std::size_t i = 0; i < masked.row_count(); ++i) {
      std::vector<std::int8_t> row(m.dim());
      for (std::size_t j = 0; j < m.dim(); ++j) row[j] = masked.at(i, j);
      const auto one = impute_individual_genotypes(m, row);
      CHECK(one.point == batch[i].point);
      CHECK(one.variance == batch[i].variance);
    }
  }
}

TEST_CASE("hard calls round half away from zero within [0,2]") {
  CHECK(hard_call(0.49) == 0);
  CHECK(hard_call(0.5) == 1);
  CHECK(hard_call(1.5) == 2);
  CHECK(hard_call(2.7) == 2);
  CHECK(hard_call(-0.4) == 0);
}
