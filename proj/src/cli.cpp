#include "linimpute/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "linimpute/ecm.hpp"
#include "linimpute/error.hpp"
#include "linimpute/evaluation.hpp"
#include "linimpute/imputation.hpp"
#include "linimpute/io.hpp"
#include "linimpute/noise.hpp"
#include "linimpute/shrinkage.hpp"
#include "linimpute/simulate.hpp"

namespace linimpute {

namespace {

// "-" writes to the report stream, anything else to a file.
class sink {
 public:
  sink(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::out | std::ios::trunc);
      if (!*file_) fail(errc::io_error, "cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }
  void close() {
    stream_->flush();
    if (!*stream_) fail(errc::io_error, "write failed for " + path_);
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

struct sim_flags {
  std::uint64_t seed = 1;
  std::size_t snps = 1000;
  std::size_t panel = 120;
  std::size_t sample = 1000;
  std::size_t founders = 8;
  double mean_switch = 0.05;

  void add(CLI::App* app) {
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--snps", snps, "Simulated SNP count")->check(CLI::PositiveNumber);
    app->add_option("--panel-haplotypes", panel, "Simulated panel haplotypes")->check(CLI::Range(2, 1 << 20));
    app->add_option("--sample-haplotypes", sample, "Simulated sample haplotypes")->check(CLI::PositiveNumber);
    app->add_option("--founders", founders, "Founder haplotypes behind the panel")->check(CLI::PositiveNumber);
    app->add_option("--mean-switch", mean_switch, "Mean per-interval switch intensity")->check(CLI::PositiveNumber);
  }
  simulation_config config() const {
    simulation_config c;
    c.seed = seed;
    c.snps = snps;
    c.panel_haplotypes = panel;
    c.sample_haplotypes = sample;
    c.founders = founders;
    c.mean_switch = mean_switch;
    return c;
  }
};

std::vector<double> full_values(const frequency_vector& f, const std::string& what) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!f.typed(i)) fail(errc::invalid_argument, what + " must give a frequency for every SNP");
  return f.values();
}

struct settings {
  // fit
  std::string haps, legend, map, model_out, text_out;
  double threshold = 1e-8;
  std::optional<double> theta;
  // shared
  std::string model, freq, out = "-", report;
  double sigma2 = 1.0, eps2 = 0.0;
  std::optional<std::size_t> pool_size;
  bool fit_noise_flag = false;
  // genofreq
  std::string genofreq, route = "hwe";
  // ecm
  std::size_t iterations = 20, starts = 1;
  bool no_shrinkage = false;
  std::string trace;
  // eval
  std::size_t stride = 25;
  std::string mode = "freq";
  bool fit_sigma2 = false;
  std::string z_out, calls_out, baseline_out;
  std::vector<std::size_t> baseline_k;
  std::vector<double> eps_grid;
  std::string prefix;
  sim_flags sim;
};

// Simulated benchmark when the caller gives no inputs: panel, map and the
// sample frequencies as truth.
struct benchmark {
  moment_model model;
  panel reference;
  std::vector<double> truth;
};

benchmark simulated_benchmark(const sim_flags& flags) {
  const synthetic_data data = simulate(flags.config());
  benchmark b{fit_moment_model(data.reference, data.rho), data.reference, haplotype_frequencies(data.sample)};
  return b;
}

int run_fit(const settings& s, std::ostream& out) {
  const panel data = load_panel(s.haps, s.legend);
  const rho_map rho = load_rho_map(s.map, data.snps());
  fit_options options;
  options.sparsity_threshold = s.threshold;
  options.theta = s.theta;
  const moment_model model = fit_moment_model(data, rho, options);
  save_model(s.model_out, model);
  if (!s.text_out.empty()) {
    sink text(s.text_out, out);
    write_model_text(*text, model);
    text.close();
  }
  return exit_ok;
}

moment_model load_scaled_model(const settings& s) {
  moment_model model = load_model(s.model);
  if (s.pool_size) model = with_pool_size(model, *s.pool_size);
  return model;
}

int run_impute_freq(const settings& s, std::ostream& out, std::ostream& err) {
  const moment_model model = load_scaled_model(s);
  const frequency_vector observed = load_frequency_table(s.freq, model.snps);
  double sigma2 = s.sigma2, eps2 = s.eps2;
  if (observed.typed_indices().size() == model.dim())
    err << "note: every SNP is typed; output echoes the observed frequencies\n";
  else if (s.fit_noise_flag) {
    const noise_model n = fit_noise(model, observed);
    sigma2 = n.sigma2;
    eps2 = n.eps2;
    err << "fitted sigma2=" << format_double(sigma2) << " eps2=" << format_double(eps2) << '\n';
  }
  const imputation_result r = impute_frequencies(model, observed, sigma2, eps2);
  sink o(s.out, out);
  write_imputation(*o, model.snps, r);
  o.close();
  return exit_ok;
}

int run_impute_geno(const settings& s, std::ostream& out) {
  const moment_model model = load_model(s.model);
  std::ifstream in(s.haps);
  if (!in) fail(errc::io_error, "cannot open " + s.haps);
  const panel genotypes = read_panel(in, s.haps, model.snps);
  const auto results = impute_individual_genotypes(model, genotypes, s.sigma2);
  sink o(s.out, out);
  *o << "individual id position mean variance status clamped call\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const imputation_result& r = results[i];
    for (std::size_t k = 0; k < r.size(); ++k) {
      const snp_meta& m = model.snps[r.index[k]];
      *o << i << ' ' << m.id << ' ' << m.position << ' ' << format_double(r.point[k]) << ' '
         << format_double(r.variance[k]) << ' ' << (r.status[k] == snp_status::typed ? "typed" : "untyped") << ' '
         << static_cast<int>(r.clamped[k]) << ' ' << hard_call(r.point[k]) << '\n';
    }
  }
  o.close();
  return exit_ok;
}

int run_genofreq(const settings& s, std::ostream& out) {
  const moment_model model = load_scaled_model(s);
  genotype_freq_result r;
  if (s.route == "hwe") {
    if (s.freq.empty()) fail(errc::invalid_argument, "--route hwe needs --freq");
    r = genotype_frequencies_hwe(model, load_frequency_table(s.freq, model.snps), s.sigma2, s.eps2);
  } else {
    if (s.genofreq.empty()) fail(errc::invalid_argument, "--route joint needs --genofreq");
    const auto observed = load_genotype_freq_table(s.genofreq, model.snps);
    r = impute_genotype_frequencies(fit_genotype_moment_model(model), observed);
  }
  std::vector<std::optional<genotype_freq>> rows(r.freq.begin(), r.freq.end());
  sink o(s.out, out);
  write_genotype_freq_table(*o, model.snps, rows);
  o.close();
  return exit_ok;
}

int run_denoise(const settings& s, std::ostream& out) {
  const moment_model model = load_scaled_model(s);
  const frequency_vector observed = load_frequency_table(s.freq, model.snps);
  noise_model n;
  if (s.fit_noise_flag) {
    n = fit_noise(model, observed);
  } else {
    n.sigma2 = s.sigma2;
    n.eps2 = s.eps2;
    n.loglik = log_likelihood(model, observed, n.sigma2, n.eps2);
    n.converged = true;
  }
  {
    sink rep(s.report.empty() ? "-" : s.report, out);
    *rep << "sigma2\t" << format_double(n.sigma2) << "\neps2\t" << format_double(n.eps2) << "\nloglik\t"
         << format_double(n.loglik) << "\niterations\t" << n.iterations << '\n';
    rep.close();
  }
  const imputation_result r = denoise_typed(model, observed, n);
  sink o(s.out, out);
  write_imputation(*o, model.snps, r);
  o.close();
  return exit_ok;
}

int run_ecm(const settings& s, std::ostream& out) {
  const panel genotypes = load_panel(s.haps, s.legend);
  const rho_map rho = load_rho_map(s.map, genotypes.snps());
  ecm_options options;
  options.iterations = s.iterations;
  options.shrinkage = !s.no_shrinkage;
  options.sparsity_threshold = s.threshold;
  options.starts = s.starts;
  options.seed = s.sim.seed;
  const ecm_output result = ecm_run(genotypes, rho, options);
  {
    sink tr(s.trace.empty() ? "-" : s.trace, out);
    *tr << "iteration loglik max_delta\n";
    const auto& st = result.state;
    for (std::size_t i = 0; i < st.loglik_trace.size(); ++i)
      *tr << i << ' ' << format_double(st.loglik_trace[i]) << ' '
          << (i < st.delta_trace.size() ? format_double(st.delta_trace[i]) : std::string(".")) << '\n';
    tr.close();
  }
  {
    std::ofstream o(s.out == "-" ? std::string() : s.out);
    if (s.out == "-") {
      write_haps(out, result.imputed);
    } else {
      if (!o) fail(errc::io_error, "cannot write " + s.out);
      write_haps(o, result.imputed);
      if (!o.flush()) fail(errc::io_error, "write failed for " + s.out);
    }
  }
  if (!s.model_out.empty()) save_model(s.model_out, result.state.model);
  return exit_ok;
}

int run_eval_cv(const settings& s, std::ostream& out) {
  benchmark b;
  const bool given = !s.haps.empty();
  if (given) {
    b.reference = load_panel(s.haps, s.legend);
    b.model = fit_moment_model(b.reference, load_rho_map(s.map, b.reference.snps()));
  } else {
    b = simulated_benchmark(s.sim);
  }
  if (s.mode == "geno") {
    if (given && s.freq.empty()) fail(errc::invalid_argument, "--mode geno with a panel needs --freq pointing to a genotype haps file");
    panel genotypes;
    if (given) {
      std::ifstream in(s.freq);
      if (!in) fail(errc::io_error, "cannot open " + s.freq);
      genotypes = read_panel(in, s.freq, b.model.snps);
    } else {
      genotypes = pair_haplotypes(simulate(s.sim.config()).sample);
    }
    const genotype_cv_report rep = mask_cv_genotypes(b.model, genotypes, s.stride, s.sigma2);
    sink o(s.out, out);
    *o << "fold offset cells error_rate\n";
    for (std::size_t f = 0; f < rep.folds.size(); ++f)
      *o << f << ' ' << rep.folds[f].plan.offset << ' ' << rep.folds[f].truth.size() << ' '
         << format_double(rep.folds[f].error_rate) << '\n';
    *o << "all . . " << format_double(rep.error_rate) << '\n';
    o.close();
    if (!s.calls_out.empty()) {
      std::vector<double> var;
      std::vector<std::uint8_t> wrong;
      for (const auto& f : rep.folds)
        for (std::size_t k = 0; k < f.truth.size(); ++k) {
          var.push_back(f.variance[k]);
          wrong.push_back(f.truth[k] != f.calls[k]);
        }
      std::vector<double> sorted = var;
      std::sort(sorted.begin(), sorted.end());
      std::vector<double> thresholds;
      for (std::size_t q = 1; q <= 20; ++q) {
        const std::size_t at = std::min(sorted.size() - 1, sorted.size() * q / 20);
        thresholds.push_back(q == 20 ? std::numeric_limits<double>::infinity() : sorted[at]);
      }
      sink c(s.calls_out, out);
      *c << "threshold call_rate error_rate\n";
      for (const auto& pt : call_rate_curve(var, wrong, thresholds))
        *c << format_double(pt.threshold) << ' ' << format_double(pt.call_rate) << ' '
           << (pt.error_rate ? format_double(*pt.error_rate) : std::string(".")) << '\n';
      c.close();
    }
    return exit_ok;
  }
  if (given) {
    if (s.freq.empty()) fail(errc::invalid_argument, "eval-cv with a panel needs --freq holding the true frequencies");
    b.truth = full_values(load_frequency_table(s.freq, b.model.snps), "--freq");
  }
  frequency_cv_options options;
  options.stride = s.stride;
  options.fit_sigma2 = s.fit_sigma2;
  options.sigma2 = s.sigma2;
  const frequency_cv_report rep = mask_cv_frequencies(b.model, b.truth, options);
  sink o(s.out, out);
  *o << "fold offset masked rmse naive_rmse sigma2\n";
  for (std::size_t f = 0; f < rep.folds.size(); ++f) {
    const auto& fold = rep.folds[f];
    *o << f << ' ' << fold.plan.offset << ' ' << fold.index.size() << ' ' << format_double(fold.rmse) << ' '
       << format_double(fold.naive_rmse) << ' ' << format_double(fold.sigma2) << '\n';
  }
  *o << "all . . " << format_double(rep.rmse) << ' ' << format_double(rep.naive_rmse) << " .\n";
  o.close();
  if (!s.z_out.empty()) {
    std::vector<double> t, m, v;
    for (const auto& fold : rep.folds)
      for (std::size_t k = 0; k < fold.truth.size(); ++k)
        if (fold.variance[k] > 0.0) {
          t.push_back(fold.truth[k]);
          m.push_back(fold.estimate[k]);
          v.push_back(fold.variance[k]);
        }
    const z_report z = z_calibration(t, m, v);
    const std::vector<double> edges = normal_bin_edges(z.bins.size());
    sink zo(s.z_out, out);
    *zo << "bin lower upper count\n";
    for (std::size_t i = 0; i < z.bins.size(); ++i)
      *zo << i << ' ' << (i == 0 ? std::string("-inf") : format_double(edges[i - 1])) << ' '
          << (i + 1 == z.bins.size() ? std::string("inf") : format_double(edges[i])) << ' ' << z.bins[i] << '\n';
    *zo << "chi_square " << format_double(z.chi_square) << " p_value " << format_double(z.p_value) << '\n';
    zo.close();
  }
  if (!s.baseline_out.empty()) {
    std::vector<std::size_t> ks = s.baseline_k;
    if (ks.empty())
      for (std::size_t k = 1; k <= 25; ++k) ks.push_back(k);
    sink bo(s.baseline_out, out);
    *bo << "scheme k rmse jittered\n";
    for (auto scheme : {predictor_scheme::flanking, predictor_scheme::top_correlated})
      for (const auto& row : baseline_cv(b.reference, b.truth, s.stride, ks, scheme))
        *bo << (scheme == predictor_scheme::flanking ? "flanking" : "top_correlated") << ' ' << row.k << ' '
            << format_double(row.rmse) << ' ' << row.jittered << '\n';
    bo.close();
  }
  return exit_ok;
}

int run_eval_noise(const settings& s, std::ostream& out) {
  moment_model model;
  std::vector<double> truth;
  if (!s.model.empty()) {
    model = load_scaled_model(s);
    if (s.freq.empty()) fail(errc::invalid_argument, "eval-noise with a model needs --freq holding the true frequencies");
    truth = full_values(load_frequency_table(s.freq, model.snps), "--freq");
  } else {
    const benchmark b = simulated_benchmark(s.sim);
    model = with_pool_size(b.model, s.sim.sample);
    truth = b.truth;
  }
  std::vector<double> grid = s.eps_grid;
  if (grid.empty())
    for (int i = 1; i <= 18; ++i) grid.push_back(0.01 * i);
  const auto rows = simulate_noise_study(model, truth, grid, s.sim.seed);
  sink o(s.out, out);
  *o << "true_eps estimated_eps sigma2 raw_rmse denoised_rmse diverged\n";
  for (const auto& r : rows)
    *o << format_double(r.true_eps) << ' ' << (r.diverged ? std::string(".") : format_double(r.estimated_eps)) << ' '
       << (r.diverged ? std::string(".") : format_double(r.sigma2)) << ' ' << format_double(r.raw_rmse) << ' '
       << format_double(r.denoised_rmse) << ' ' << (r.diverged ? 1 : 0) << '\n';
  o.close();
  return exit_ok;
}

int run_simulate(const settings& s) {
  const synthetic_data data = simulate(s.sim.config());
  const std::string& p = s.prefix;
  write_panel(data.reference, p + ".panel.haps", p + ".legend");
  save_rho_map(p + ".map", data.snps, data.rho);
  {
    std::ofstream o(p + ".sample.haps");
    if (!o) fail(errc::io_error, "cannot write " + p + ".sample.haps");
    write_haps(o, data.sample);
  }
  {
    std::ofstream o(p + ".genotypes.haps");
    if (!o) fail(errc::io_error, "cannot write " + p + ".genotypes.haps");
    write_haps(o, pair_haplotypes(data.sample));
  }
  {
    std::ofstream o(p + ".sample.freq");
    if (!o) fail(errc::io_error, "cannot write " + p + ".sample.freq");
    write_frequency_table(o, data.snps, frequency_vector::from_values(haplotype_frequencies(data.sample)));
  }
  return exit_ok;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Allele-frequency and genotype imputation by regularized linear prediction", "linimpute"};
  app.require_subcommand(1, 1);
  settings s;

  auto* fit = app.add_subcommand("fit", "Fit the prior from a panel and a recombination map");
  fit->add_option("--haps", s.haps, "Panel haps file")->required();
  fit->add_option("--legend", s.legend, "Legend file")->required();
  fit->add_option("--map", s.map, "Cumulative rho map")->required();
  fit->add_option("--out", s.model_out, "Model file to write")->required();
  fit->add_option("--threshold", s.threshold, "Shrink-weight sparsity threshold")->check(CLI::Range(0.0, 1.0));
  fit->add_option("--theta", s.theta, "Override the miscopy parameter")->check(CLI::Range(0.0, 1.0));
  fit->add_option("--text", s.text_out, "Also write a text dump of the model");

  auto add_model = [&](CLI::App* c) {
    c->add_option("--model", s.model, "Model file")->required();
    c->add_option("--out", s.out, "Output file ('-' for stdout)");
    c->add_option("--pool-size", s.pool_size, "Haplotypes per pool (2n); scales the prior covariance")
        ->check(CLI::PositiveNumber);
  };
  auto add_noise = [&](CLI::App* c) {
    c->add_option("--sigma2", s.sigma2, "Overdispersion")->check(CLI::PositiveNumber);
    c->add_option("--eps2", s.eps2, "Measurement-error variance")->check(CLI::NonNegativeNumber);
  };

  auto* impf = app.add_subcommand("impute-freq", "Impute untyped allele frequencies");
  add_model(impf);
  add_noise(impf);
  impf->add_option("--freq", s.freq, "Observed frequency table")->required();
  impf->add_flag("--fit-noise", s.fit_noise_flag, "Estimate sigma2 and eps2 by maximum likelihood first");

  auto* impg = app.add_subcommand("impute-geno", "Impute individual genotypes");
  impg->add_option("--model", s.model, "Model file")->required();
  impg->add_option("--haps", s.haps, "Unphased genotype file aligned to the model SNPs")->required();
  impg->add_option("--out", s.out, "Output file ('-' for stdout)");
  impg->add_option("--sigma2", s.sigma2, "Overdispersion")->check(CLI::PositiveNumber);

  auto* gf = app.add_subcommand("genofreq", "Impute genotype frequencies");
  add_model(gf);
  add_noise(gf);
  gf->add_option("--route", s.route, "hwe or joint")->check(CLI::IsMember({"hwe", "joint"}));
  gf->add_option("--freq", s.freq, "Observed allele frequency table (hwe route)");
  gf->add_option("--genofreq", s.genofreq, "Observed genotype frequency table (joint route)");

  auto* dn = app.add_subcommand("denoise", "Denoise typed frequencies");
  add_model(dn);
  add_noise(dn);
  dn->add_option("--freq", s.freq, "Observed frequency table")->required();
  dn->add_flag("--fit-noise", s.fit_noise_flag, "Estimate sigma2 and eps2 instead of using the given values");
  dn->add_option("--report", s.report, "Where to write the sigma2/eps2/loglik block ('-' for stdout)");

  auto* ecm = app.add_subcommand("ecm", "Estimate the prior and impute genotypes without a panel");
  ecm->add_option("--haps", s.haps, "Unphased genotype file with missing cells")->required();
  ecm->add_option("--legend", s.legend, "Legend file")->required();
  ecm->add_option("--map", s.map, "Cumulative rho map")->required();
  ecm->add_option("--out", s.out, "Imputed genotype file ('-' for stdout)");
  ecm->add_option("--iterations", s.iterations, "Maximum iterations")->check(CLI::NonNegativeNumber);
  ecm->add_flag("--no-shrinkage", s.no_shrinkage, "Plain EM (theta = 0, no rho weights)");
  ecm->add_option("--starts", s.starts, "Number of starting points")->check(CLI::PositiveNumber);
  ecm->add_option("--seed", s.sim.seed, "Seed for start perturbations");
  ecm->add_option("--threshold", s.threshold, "Shrink-weight sparsity threshold")->check(CLI::Range(0.0, 1.0));
  ecm->add_option("--trace", s.trace, "Iteration trace output ('-' for stdout)");
  ecm->add_option("--model-out", s.model_out, "Also write the estimated model");

  auto* cv = app.add_subcommand("eval-cv", "Masking cross-validation (simulated data when no panel is given)");
  cv->add_option("--haps", s.haps, "Panel haps file");
  cv->add_option("--legend", s.legend, "Legend file");
  cv->add_option("--map", s.map, "Cumulative rho map");
  cv->add_option("--freq", s.freq, "True frequency table (freq mode) or genotype haps file (geno mode)");
  cv->add_option("--out", s.out, "Fold report ('-' for stdout)");
  cv->add_option("--stride", s.stride, "Mask every k-th SNP")->check(CLI::PositiveNumber);
  cv->add_option("--mode", s.mode, "freq or geno")->check(CLI::IsMember({"freq", "geno"}));
  cv->add_option("--sigma2", s.sigma2, "Overdispersion")->check(CLI::PositiveNumber);
  cv->add_flag("--fit-sigma2", s.fit_sigma2, "Estimate sigma2 on each fold");
  cv->add_option("--z-out", s.z_out, "Z-score calibration bins");
  cv->add_option("--calls-out", s.calls_out, "Call-rate curve (geno mode)");
  cv->add_option("--baseline-out", s.baseline_out, "Unregularized baseline sweep");
  cv->add_option("--baseline-k", s.baseline_k, "Predictor counts per side for the baseline sweep")->delimiter(',');
  s.sim.add(cv);

  auto* en = app.add_subcommand("eval-noise", "Noise-reduction study (simulated data when no model is given)");
  en->add_option("--model", s.model, "Model file");
  en->add_option("--freq", s.freq, "True frequency table");
  en->add_option("--pool-size", s.pool_size, "Haplotypes per pool (2n)")->check(CLI::PositiveNumber);
  en->add_option("--eps", s.eps_grid, "Noise standard deviations")->delimiter(',');
  en->add_option("--out", s.out, "Report ('-' for stdout)");
  s.sim.add(en);

  auto* sim = app.add_subcommand("simulate", "Write a synthetic panel, map and sample");
  sim->add_option("--out-prefix", s.prefix, "Prefix for the output files")->required();
  s.sim.add(sim);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (app.got_subcommand(fit)) return run_fit(s, out);
    if (app.got_subcommand(impf)) return run_impute_freq(s, out, err);
    if (app.got_subcommand(impg)) return run_impute_geno(s, out);
    if (app.got_subcommand(gf)) return run_genofreq(s, out);
    if (app.got_subcommand(dn)) return run_denoise(s, out);
    if (app.got_subcommand(ecm)) return run_ecm(s, out);
    if (app.got_subcommand(cv)) {
      if (!s.haps.empty() && (s.legend.empty() || s.map.empty())) {
        err << "eval-cv: --haps needs --legend and --map\n";
        return exit_usage;
      }
      return run_eval_cv(s, out);
    }
    if (app.got_subcommand(en)) return run_eval_noise(s, out);
    if (app.got_subcommand(sim)) return run_simulate(s);
  } catch (const error& e) {
    err << "error [" << errc_name(e.code()) << "]: " << e.what() << '\n';
    return e.code() == errc::invalid_argument ? exit_usage : exit_data;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_data;
  }
  return exit_usage;
}

int cli_dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace linimpute
