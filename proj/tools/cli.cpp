#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "lmbreak/asymptotics.hpp"
#include "lmbreak/core.hpp"
#include "lmbreak/datafile.hpp"
#include "lmbreak/dist.hpp"
#include "lmbreak/errors.hpp"
#include "lmbreak/keyvalue.hpp"
#include "lmbreak/montecarlo.hpp"
#include "lmbreak/parallel.hpp"

namespace lmbreak::cli {
namespace {

constexpr double kUnderflow = 1e-12;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TestOptions {
  std::string file;
  std::string column;
  std::string label_column;
  std::string kind = "returns";
  bool absolute = false;
  double alpha = 0.05;
  std::string format = "text";
};

struct SimulateOptions {
  std::string config;
  std::vector<int> series;
  bool all = false;
  std::vector<long> sizes;
  std::vector<double> alphas;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string format;
  std::string out_path;
  bool diagnostics = false;
};

int cmd_test(const TestOptions& o, std::ostream& out) {
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw UsageError("--alpha must lie in (0,1)");
  if (o.format != "text" && o.format != "json") throw UsageError("--format must be text or json");
  DataFileSpec spec;
  spec.path = o.file;
  spec.column = o.column;
  spec.label_column = o.label_column;
  if (o.kind == "levels") {
    spec.kind = DataKind::levels;
  } else if (o.kind == "returns") {
    spec.kind = DataKind::returns;
  } else {
    throw UsageError("--kind must be levels or returns");
  }
  spec.transform = o.absolute ? DataTransform::absolute : DataTransform::none;

  const LoadedSeries data = load_series(spec);
  const auto rows_needed = spec.kind == DataKind::levels ? 3 : 2;
  if (data.values.size() < 2) {
    throw DataError(fmt::format("need at least {} usable rows", rows_needed));
  }
  const auto est = null_estimates(data.values);
  const TestOutcome res = lm_test(data.values, o.alpha);
  const bool underflow = res.p_value < kUnderflow;
  const auto k = static_cast<std::size_t>(res.break_index);
  // Break after observation k: report the file line (and label) of observation k.
  const int line = data.line_numbers.at(k - 1);
  const std::string label = data.labels.empty() ? std::string{} : data.labels.at(k - 1);

  if (o.format == "json") {
    nlohmann::ordered_json doc;
    doc["file"] = o.file;
    doc["n"] = data.values.size();
    doc["mu_hat"] = est.mu_hat;
    doc["sigma2_hat"] = est.sigma2_hat;
    doc["statistic"] = res.statistic;
    doc["p_value"] = underflow ? 0.0 : res.p_value;
    doc["underflow"] = underflow;
    doc["break_index"] = res.break_index;
    doc["break_line"] = line;
    if (!label.empty()) doc["break_label"] = label;
    doc["alpha"] = o.alpha;
    doc["reject"] = res.reject;
    out << doc.dump(2) << "\n";
    return kOk;
  }
  out << fmt::format("file:          {}\n", o.file);
  out << fmt::format("observations:  {}\n", data.values.size());
  out << fmt::format("mu_hat:        {}\n", est.mu_hat);
  out << fmt::format("sigma2_hat:    {}\n", est.sigma2_hat);
  out << fmt::format("statistic:     {}\n", res.statistic);
  out << fmt::format("p-value:       {}\n",
                     underflow ? std::string("< 1e-12") : fmt::format("{}", res.p_value));
  out << fmt::format("break:         after observation {} (line {}{})\n", res.break_index, line,
                     label.empty() ? "" : ", " + label);
  out << fmt::format("decision:      {} the null of no change in the mean at alpha = {}\n",
                     res.reject ? "reject" : "do not reject", o.alpha);
  return kOk;
}

ExperimentConfig build_experiment(const SimulateOptions& o, TableFormat& format,
                                  std::string& out_path, bool& diagnostics) {
  KeyValueConfig file;
  if (!o.config.empty()) file = KeyValueConfig::load(o.config);

  ExperimentConfig cfg;
  cfg.workers = detail::default_workers();

  std::vector<int> ids = o.series;
  if (ids.empty()) {
    if (auto v = file.get_numbers("series")) {
      for (double d : *v) ids.push_back(static_cast<int>(d));
    }
  }
  const bool all = o.all || file.get("all").value_or("false") == "true";
  if (all) ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  for (int id : ids) cfg.designs.push_back(preset(id));
  if (file.contains("mean.variant") || file.contains("sigma.variant")) {
    SeriesDesign custom;
    custom.label = file.get("label").value_or("custom");
    custom.mean = file.contains("mean.variant") ? read_mean_spec(file) : MeanSpec{ConstantMean{0.0}};
    custom.sigma =
        file.contains("sigma.variant") ? read_sigma_spec(file) : SigmaSpec{ConstantSigma{1.0}};
    cfg.designs.push_back(std::move(custom));
  }
  if (cfg.designs.empty()) throw UsageError("select --series, --all, or a custom design in --config");

  if (!o.sizes.empty()) {
    cfg.sample_sizes.assign(o.sizes.begin(), o.sizes.end());
  } else if (auto v = file.get_numbers("n")) {
    cfg.sample_sizes.clear();
    for (double d : *v) cfg.sample_sizes.push_back(static_cast<Eigen::Index>(d));
  }
  if (!o.alphas.empty()) {
    cfg.levels = o.alphas;
  } else if (auto v = file.get_numbers("alpha")) {
    cfg.levels = *v;
  }
  std::sort(cfg.levels.begin(), cfg.levels.end());
  if (o.reps) {
    cfg.replications = *o.reps;
  } else if (auto v = file.get_number("reps")) {
    cfg.replications = static_cast<int>(*v);
  }
  if (o.seed) {
    cfg.master_seed = *o.seed;
  } else if (auto v = file.get("seed")) {
    cfg.master_seed = std::stoull(*v);
  }
  if (o.workers) {
    cfg.workers = *o.workers;
  } else if (auto v = file.get_number("workers")) {
    cfg.workers = static_cast<int>(*v);
  }

  const std::string fmt_name =
      !o.format.empty() ? o.format : file.get("format").value_or("text");
  const auto parsed = parse_table_format(fmt_name);
  if (!parsed) throw UsageError("--format must be csv, json or text");
  format = *parsed;
  out_path = !o.out_path.empty() ? o.out_path : file.get("out").value_or("");
  diagnostics = o.diagnostics || file.get("diagnostics").value_or("false") == "true";
  cfg.validate();
  return cfg;
}

void write_diagnostics(const ExperimentConfig& cfg, std::ostream& out) {
  const Eigen::Index n = *std::max_element(cfg.sample_sizes.begin(), cfg.sample_sizes.end());
  const std::vector<double> taus{0.25, 0.5, 0.75};
  const Eigen::IOFormat matrix_fmt(6, 0, " ", "\n", "    [", "]");
  out << fmt::format("Diagnostics at n = {}, {} replications\n", n, cfg.replications);
  for (const auto& d : cfg.designs) {
    const double bar2 = ergodic_variance_limit(d.sigma);
    out << fmt::format("{}\n  ergodic variance limit: {:.6f}\n", d.label, bar2);
    if (const auto* step = std::get_if<StepMean>(&d.mean); step && step->levels.size() == 2) {
      const auto lv = limit_variance_abrupt(step->fractions[0], step->levels[0], step->levels[1], bar2);
      out << fmt::format("  limit of sigma_hat^2:   {:.6f}\n", lv.sigma_star2);
    } else if (const auto* sm = std::get_if<SmoothMean>(&d.mean)) {
      const auto lv = limit_variance_smooth(sm->transition, sm->from, sm->to, bar2);
      out << fmt::format("  limit of sigma_hat^2:   {:.6f}\n", lv.sigma_star2);
      out << fmt::format("  max |T(tau)|:           {:.6f}\n", max_abs_drift(sm->transition));
    }
    const auto stats = simulate_statistics(d, n, cfg.replications, cfg.master_seed, cfg.workers);
    std::vector<double> finite;
    for (double s : stats) {
      if (!std::isnan(s)) finite.push_back(s);
    }
    if (!finite.empty()) {
      out << fmt::format("  KS distance to bridge law: {:.4f}\n", ks_distance_to_bridge_law(finite));
    }
    const auto reps = std::max(cfg.replications, 2);
    const Eigen::MatrixXd emp = wn_covariance(d.sigma, n, taus, reps, cfg.master_seed, cfg.workers);
    const Eigen::MatrixXd lim = wn_limit_covariance(d.sigma, taus);
    std::ostringstream e;
    std::ostringstream l;
    e << emp.format(matrix_fmt);
    l << lim.format(matrix_fmt);
    out << "  W_n covariance at tau = 0.25, 0.5, 0.75 (empirical):\n" << e.str() << "\n";
    out << "  W_n covariance limit:\n" << l.str() << "\n";
  }
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  TableFormat format = TableFormat::text;
  std::string out_path;
  bool diagnostics = false;
  ExperimentConfig cfg;
  try {
    cfg = build_experiment(o, format, out_path, diagnostics);
  } catch (const SpecError& e) {
    throw UsageError(e.what());
  } catch (const std::logic_error& e) {
    throw UsageError(e.what());
  }
  const auto table = run_experiment(cfg);
  const auto doc = emit_table(table, format);
  if (out_path.empty()) {
    out << doc;
  } else {
    std::ofstream file(out_path);
    if (!file) throw DataError("cannot write " + out_path);
    file << doc;
  }
  if (diagnostics) write_diagnostics(cfg, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LM-type CUSUM test for a change in the mean of a heteroskedastic series"};
  app.require_subcommand(1);

  TestOptions test_opts;
  auto* test = app.add_subcommand("test", "Test a data file for a change in the mean");
  test->add_option("file", test_opts.file, "Delimited text file")->required();
  test->add_option("--column", test_opts.column, "Value column (header name or 1-based index)");
  test->add_option("--label-column", test_opts.label_column, "Date/label column echoed for the break");
  test->add_option("--kind", test_opts.kind, "levels (prices, converted to log returns) or returns");
  test->add_flag("--abs", test_opts.absolute, "Test absolute values");
  test->add_option("--alpha", test_opts.alpha, "Significance level");
  test->add_option("--format", test_opts.format, "text or json");

  SimulateOptions sim_opts;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo size/power tables");
  sim->add_option("--config", sim_opts.config, "Flat key = value config file");
  sim->add_option("--series", sim_opts.series, "Preset series 1..9 (repeatable)");
  sim->add_flag("--all", sim_opts.all, "All nine presets");
  sim->add_option("--n", sim_opts.sizes, "Sample sizes (repeatable)");
  sim->add_option("--alpha", sim_opts.alphas, "Significance levels (repeatable)");
  sim->add_option("--reps", sim_opts.reps, "Replications per cell");
  sim->add_option("--seed", sim_opts.seed, "Master seed");
  sim->add_option("--workers", sim_opts.workers, "Worker threads");
  sim->add_option("--format", sim_opts.format, "csv, json or text");
  sim->add_option("--out", sim_opts.out_path, "Write the table here instead of stdout");
  sim->add_flag("--diagnostics", sim_opts.diagnostics, "Append limit-theory diagnostics");

  double quantile_p = 0.0;
  auto* quant = app.add_subcommand("quantile", "Quantile of the sup|Brownian bridge| law");
  quant->add_option("p", quantile_p, "Probability in (0,1)")->required();

  double pvalue_z = 0.0;
  auto* pval = app.add_subcommand("pvalue", "Upper-tail probability of the sup|Brownian bridge| law");
  pval->add_option("z", pvalue_z, "Statistic value >= 0")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*test) return cmd_test(test_opts, out);
    if (*sim) return cmd_simulate(sim_opts, out);
    if (*quant) {
      out << fmt::format("{:.7f}\n", bridge_sup_quantile(quantile_p));
      return kOk;
    }
    if (*pval) {
      out << fmt::format("{:.7f}\n", p_value(pvalue_z));
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    // Bad scalar arguments are usage errors; bad data values are data errors.
    err << "error: " << e.what() << "\n";
    return *test ? kDataError : kUsage;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DegenerateSeries& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const InsufficientData& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace lmbreak::cli
