// hdinfer: norm-based one/two-sample inference for jagged samples with
// missing entries, plus simulation sweeps and empirical verification
// suites. All randomness is derived from the --seed / "seed" value;
// identical configurations produce byte-identical JSON regardless of
// --threads.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hdim/io.hpp"
#include "hdim/montecarlo.hpp"
#include "hdim/rng.hpp"
#include "hdim/testing.hpp"
#include "hdim/verify.hpp"

namespace {

using nlohmann::json;

struct TestCliOptions {
  std::vector<std::string> one_sample;
  std::vector<std::string> two_sample;
  std::string null_mean_path;
  std::string norm = "sup";
  std::string normalizer = "random";
  double alpha = 0.05;
  int mc_draws = hdim::kDefaultMcDraws;
  double bandwidth = hdim::kDefaultBandwidth;
  std::string target = "identity";
  double lambda = 0.0;
  bool lambda_set = false;
  bool pooled_center = false;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string density_out;
  std::string json_out;
};

std::string density_csv(const hdim::NullDistribution& nd) {
  const hdim::DensityGrid grid = hdim::density_grid(nd);
  std::string out = "x,density\n";
  for (std::size_t i = 0; i < grid.x.size(); ++i) {
    out += hdim::format_real(grid.x[i]);
    out += ',';
    out += hdim::format_real(grid.density[i]);
    out += '\n';
  }
  return out;
}

int run_test(const TestCliOptions& opt) {
  const bool one = !opt.one_sample.empty();
  const bool two = !opt.two_sample.empty();
  if (one == two) {
    throw std::runtime_error(
        "test: exactly one of --one-sample or --two-sample is required");
  }
  if (one && opt.pooled_center) {
    throw std::runtime_error("test: --pooled-center needs --two-sample");
  }

  hdim::TestSpec spec;
  spec.norm = hdim::NormKind::from_name(opt.norm);
  spec.normalizer = hdim::normalizer_from_name(opt.normalizer);
  spec.alpha = opt.alpha;
  spec.mc_draws = opt.mc_draws;
  spec.bandwidth = opt.bandwidth;
  spec.target = hdim::target_from_name(opt.target);
  if (opt.lambda_set) spec.lambda = opt.lambda;
  spec.seed = opt.seed;
  spec.threads = opt.threads;

  std::vector<double> null_mean;
  if (!opt.null_mean_path.empty()) {
    null_mean = hdim::parse_number_list(opt.null_mean_path);
  }

  // Resolved configuration echoed into the report. Output paths and the
  // thread count are execution details and stay out of it.
  hdim::JsonWriter cfg;
  cfg.begin_object();
  cfg.key("command").value("test");
  cfg.key("mode").value(one ? "one-sample" : "two-sample");
  cfg.key("inputs").begin_array();
  for (const std::string& path : one ? opt.one_sample : opt.two_sample) {
    cfg.value(path);
  }
  cfg.end_array();
  if (opt.null_mean_path.empty()) {
    cfg.key("null_mean").null_value();
  } else {
    cfg.key("null_mean").value(opt.null_mean_path);
  }
  cfg.key("norm").value(spec.norm.name());
  cfg.key("normalizer").value(hdim::normalizer_name(spec.normalizer));
  cfg.key("alpha").value(spec.alpha);
  cfg.key("mc_draws").value(spec.mc_draws);
  cfg.key("bandwidth").value(spec.bandwidth);
  cfg.key("target").value(hdim::target_name(spec.target));
  if (spec.lambda) {
    cfg.key("lambda").value(*spec.lambda);
  } else {
    cfg.key("lambda").null_value();
  }
  if (two) cfg.key("pooled_center").value(opt.pooled_center);
  cfg.key("seed").value(static_cast<unsigned long long>(spec.seed));
  cfg.end_object();

  hdim::TestReport report;
  hdim::NullDistribution nd;
  if (one) {
    const hdim::TriangularSample sample = hdim::parse_csv(opt.one_sample[0]);
    report = hdim::one_sample_test(sample, null_mean, spec, &nd);
  } else {
    const hdim::TriangularSample s1 = hdim::parse_csv(opt.two_sample[0]);
    const hdim::TriangularSample s2 = hdim::parse_csv(opt.two_sample[1]);
    const auto centering = opt.pooled_center
                               ? hdim::TwoSampleCentering::kPooledCenter
                               : hdim::TwoSampleCentering::kSpecifiedProfile;
    report = hdim::two_sample_test(s1, s2, spec, centering, null_mean, &nd);
  }

  const std::string out = hdim::test_report_json(report, cfg.str());
  std::cout << out;
  if (!opt.json_out.empty()) hdim::write_text_file(opt.json_out, out);
  if (!opt.density_out.empty()) {
    hdim::write_text_file(opt.density_out, density_csv(nd));
  }
  return 0;
}

// ---------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------

void check_keys(const json& j, const char* where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) {
    throw std::runtime_error(std::string(where) + ": must be a JSON object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) known = true;
    }
    if (!known) {
      throw std::runtime_error(std::string(where) + ": unknown key '" +
                               item.key() + "'");
    }
  }
}

int run_simulate(const std::string& config_path, int threads_override) {
  std::ifstream in(config_path);
  if (!in) {
    throw std::runtime_error(config_path + ": cannot open file");
  }
  const json j = json::parse(in);
  check_keys(j, "simulate config",
             {"b_list", "norms", "trials", "n", "covariance", "target",
              "oracle", "alpha", "mc_draws", "bandwidth", "missing_p", "seed",
              "threads", "table_out", "json_out", "pvalue_study"});

  hdim::Type1Config cfg;
  if (!j.contains("trials")) {
    throw std::runtime_error("simulate config: 'trials' is required");
  }
  cfg.trials = j.at("trials").get<long>();
  if (cfg.trials < 1) {
    throw std::runtime_error("simulate config: trials must be >= 1");
  }
  if (!j.contains("b_list") || !j.contains("norms")) {
    throw std::runtime_error(
        "simulate config: 'b_list' and 'norms' are required");
  }
  cfg.b_list = j.at("b_list").get<std::vector<int>>();
  for (const auto& name : j.at("norms").get<std::vector<std::string>>()) {
    cfg.norms.push_back(hdim::NormKind::from_name(name));
  }
  cfg.n = j.value("n", 10);
  if (j.contains("covariance")) {
    const json& jc = j.at("covariance");
    check_keys(jc, "simulate config covariance",
               {"variance", "correlation", "variance_profile", "block_size",
                "within_correlation"});
    cfg.covariance.variance = jc.value("variance", 1.0);
    cfg.covariance.correlation = jc.value("correlation", 0.0);
    if (jc.contains("variance_profile")) {
      cfg.covariance.variance_profile =
          jc.at("variance_profile").get<std::vector<double>>();
    }
    cfg.covariance.block_size = jc.value("block_size", 0);
    cfg.covariance.within_correlation = jc.value("within_correlation", 0.0);
  }
  cfg.target = hdim::target_from_name(j.value("target", std::string("cs")));
  cfg.oracle = j.value("oracle", false);
  cfg.alpha = j.value("alpha", 0.05);
  cfg.mc_draws = j.value("mc_draws", hdim::kDefaultMcDraws);
  cfg.bandwidth = j.value("bandwidth", hdim::kDefaultBandwidth);
  cfg.missing_p = j.value("missing_p", 1.0);
  cfg.seed = j.value("seed", std::uint64_t{1});
  cfg.threads = j.value("threads", 1);
  if (threads_override > 0) cfg.threads = threads_override;
  const std::string table_out = j.value("table_out", std::string());
  const std::string json_out = j.value("json_out", std::string());

  std::optional<hdim::PvalueUniformityConfig> study;
  std::string study_out;
  int study_bins = 20;
  if (j.contains("pvalue_study")) {
    const json& js = j.at("pvalue_study");
    check_keys(js, "simulate config pvalue_study",
               {"b", "trials", "norm", "mean_shift", "bins", "out"});
    hdim::PvalueUniformityConfig pcfg;
    pcfg.b = js.value("b", 100);
    pcfg.n = cfg.n;
    pcfg.trials = js.value("trials", 2000L);
    pcfg.covariance = cfg.covariance;
    pcfg.oracle = cfg.oracle;
    pcfg.target = cfg.target;
    pcfg.norm = hdim::NormKind::from_name(js.value("norm", std::string("sup")));
    pcfg.mean_shift = js.value("mean_shift", 0.0);
    pcfg.alpha = cfg.alpha;
    pcfg.mc_draws = cfg.mc_draws;
    pcfg.bandwidth = cfg.bandwidth;
    pcfg.missing_p = cfg.missing_p;
    // own stream family, so the study never replays the sweep's samples
    pcfg.seed = hdim::derive_key(cfg.seed, hdim::StreamLabel::kMisc, 424242);
    pcfg.threads = cfg.threads;
    study_bins = js.value("bins", 20);
    if (study_bins < 1) {
      throw std::runtime_error("simulate config: bins must be >= 1");
    }
    study_out = js.value("out", std::string());
    study = pcfg;
  }

  const hdim::Type1Table table = hdim::type1_sweep(cfg);
  std::optional<hdim::PvalueUniformityReport> study_report;
  if (study) study_report = hdim::pvalue_uniformity(*study);

  // Resolved config echo (outputs and thread count excluded).
  hdim::JsonWriter cw;
  cw.begin_object();
  cw.key("command").value("simulate");
  cw.key("config_file").value(config_path);
  cw.key("b_list").begin_array();
  for (int b : cfg.b_list) cw.value(b);
  cw.end_array();
  cw.key("norms").begin_array();
  for (const hdim::NormKind& k : cfg.norms) cw.value(k.name());
  cw.end_array();
  cw.key("trials").value(cfg.trials);
  cw.key("n").value(cfg.n);
  cw.key("covariance").begin_object();
  cw.key("variance").value(cfg.covariance.variance);
  cw.key("correlation").value(cfg.covariance.correlation);
  if (!cfg.covariance.variance_profile.empty()) {
    cw.key("variance_profile").begin_array();
    for (double v : cfg.covariance.variance_profile) cw.value(v);
    cw.end_array();
  }
  if (cfg.covariance.block_size > 0) {
    cw.key("block_size").value(cfg.covariance.block_size);
    cw.key("within_correlation").value(cfg.covariance.within_correlation);
  }
  cw.end_object();
  cw.key("target").value(hdim::target_name(cfg.target));
  cw.key("oracle").value(cfg.oracle);
  cw.key("alpha").value(cfg.alpha);
  cw.key("mc_draws").value(cfg.mc_draws);
  cw.key("bandwidth").value(cfg.bandwidth);
  cw.key("missing_p").value(cfg.missing_p);
  cw.key("seed").value(static_cast<unsigned long long>(cfg.seed));
  if (study) {
    cw.key("pvalue_study").begin_object();
    cw.key("b").value(study->b);
    cw.key("trials").value(study->trials);
    cw.key("norm").value(study->norm.name());
    cw.key("mean_shift").value(study->mean_shift);
    cw.key("bins").value(study_bins);
    cw.end_object();
  } else {
    cw.key("pvalue_study").null_value();
  }
  cw.end_object();

  hdim::JsonWriter w;
  w.begin_object();
  w.key("alpha").value(table.alpha);
  w.key("trials").value(table.trials);
  w.key("cells").begin_array();
  for (const hdim::Type1Cell& cell : table.cells) {
    w.begin_object();
    w.key("b").value(cell.b);
    w.key("norm").value(cell.norm);
    w.key("rate").value(cell.rate);
    w.key("std_error").value(cell.std_error);
    w.end_object();
  }
  w.end_array();
  if (study_report) {
    const std::vector<long> hist = study_report->histogram(study_bins);
    w.key("pvalue_study").begin_object();
    w.key("ks_uniform").value(study_report->ks_uniform);
    w.key("rejection_rate").value(study_report->rejection_rate);
    w.key("low_power").value(study_report->low_power);
    w.key("histogram").begin_array();
    for (long count : hist) w.value(count);
    w.end_array();
    w.end_object();
  } else {
    w.key("pvalue_study").null_value();
  }
  w.key("config").raw_value(cw.str());
  w.end_object();
  const std::string out = w.str() + "\n";

  std::cout << out;
  if (!json_out.empty()) hdim::write_text_file(json_out, out);
  if (!table_out.empty()) {
    hdim::write_text_file(table_out, hdim::type1_table_csv(table));
  }
  if (study_report && !study_out.empty()) {
    const std::vector<long> hist = study_report->histogram(study_bins);
    std::string csv = "bin_low,bin_high,count\n";
    for (std::size_t i = 0; i < hist.size(); ++i) {
      csv += hdim::format_real(static_cast<double>(i) / hist.size());
      csv += ',';
      csv += hdim::format_real(static_cast<double>(i + 1) / hist.size());
      csv += ',';
      csv += std::to_string(hist[i]);
      csv += '\n';
    }
    hdim::write_text_file(study_out, csv);
  }
  return 0;
}

// ---------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------

int run_verify(const std::string& suite, const hdim::SuiteOptions& opt,
               const std::string& json_out) {
  const std::vector<hdim::SuiteReport> reports = hdim::run_suites(suite, opt);

  hdim::JsonWriter cfg;
  cfg.begin_object();
  cfg.key("command").value("verify");
  cfg.key("suite").value(suite);
  cfg.key("seed").value(static_cast<unsigned long long>(opt.seed));
  cfg.key("bound_scale").value(opt.bound_scale);
  cfg.key("trial_scale").value(opt.trial_scale);
  cfg.end_object();

  const std::string out = hdim::suite_reports_json(reports, cfg.str());
  std::cout << out;
  if (!json_out.empty()) hdim::write_text_file(json_out, out);

  for (const hdim::SuiteReport& report : reports) {
    if (!report.all_pass) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "norm statistics, shrinkage-calibrated tests, and empirical "
      "verification for jagged samples with missing entries"};
  app.require_subcommand(1);

  TestCliOptions test_opt;
  CLI::App* test_cmd =
      app.add_subcommand("test", "one- or two-sample norm test on CSV data");
  auto* one_opt = test_cmd->add_option("--one-sample", test_opt.one_sample,
                                       "CSV of replicates (rows) by "
                                       "variables (columns)");
  one_opt->expected(1);
  auto* two_opt = test_cmd->add_option("--two-sample", test_opt.two_sample,
                                       "two CSVs, one per group");
  two_opt->expected(2);
  one_opt->excludes(two_opt);
  test_cmd->add_option("--null-mean", test_opt.null_mean_path,
                       "file with the null mean profile (default: zeros)");
  test_cmd->add_option("--norm", test_opt.norm,
                       "norm: a number >= 2, or 'sup'");
  test_cmd->add_option("--normalizer", test_opt.normalizer,
                       "'random' (per-column counts) or 'sqrtn'");
  test_cmd->add_option("--alpha", test_opt.alpha, "test level in (0, 1)");
  test_cmd->add_option("--mc-draws", test_opt.mc_draws,
                       "Monte Carlo draws for the null distribution");
  test_cmd->add_option("--bandwidth", test_opt.bandwidth,
                       "Gaussian kernel bandwidth for density output");
  test_cmd->add_option("--target", test_opt.target,
                       "shrinkage target: identity, diag, cs, hcs");
  auto* lambda_opt = test_cmd->add_option(
      "--lambda", test_opt.lambda,
      "fixed shrinkage weight in [0, 1] (default: estimated)");
  test_cmd->add_flag("--pooled-center", test_opt.pooled_center,
                     "two-sample: center both groups at the pooled mean");
  test_cmd->add_option("--seed", test_opt.seed, "master RNG seed");
  test_cmd->add_option("--threads", test_opt.threads,
                       "worker threads (never affects results)");
  test_cmd->add_option("--density-out", test_opt.density_out,
                       "write the calibrated null density grid CSV here");
  test_cmd->add_option("--json-out", test_opt.json_out,
                       "also write the JSON report to this path");

  std::string simulate_config;
  int simulate_threads = 0;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "size sweeps over dimension and norm, from a JSON config");
  sim_cmd->add_option("--config", simulate_config, "JSON configuration file")
      ->required();
  sim_cmd->add_option("--threads", simulate_threads,
                      "override the config's thread count");

  std::string suite;
  hdim::SuiteOptions suite_opt;
  std::string verify_json_out;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "empirical verification suites for the library's guarantees");
  verify_cmd
      ->add_option("--suite", suite,
                   "bounds, rates, clt, lemma74, or all")
      ->required();
  verify_cmd->add_option("--seed", suite_opt.seed, "master RNG seed");
  verify_cmd->add_option("--threads", suite_opt.threads,
                         "worker threads (never affects results)");
  verify_cmd->add_option(
      "--bound-scale", suite_opt.bound_scale,
      "multiplier on every closed-form bound (sensitivity/failure hook)");
  verify_cmd->add_option("--trial-scale", suite_opt.trial_scale,
                         "multiplier on Monte Carlo budgets");
  verify_cmd->add_option("--json-out", verify_json_out,
                         "also write the JSON report to this path");

  try {
    app.parse(argc, argv);
    if (app.got_subcommand(test_cmd)) {
      test_opt.lambda_set = lambda_opt->count() > 0;
      return run_test(test_opt);
    }
    if (app.got_subcommand(sim_cmd)) {
      return run_simulate(simulate_config, simulate_threads);
    }
    return run_verify(suite, suite_opt, verify_json_out);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
