#include "ushape/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "numeric.hpp"
#include "ushape/error.hpp"
#include "ushape/estimators.hpp"
#include "ushape/io.hpp"
#include "ushape/regularize.hpp"
#include "ushape/risk.hpp"

namespace ushape {

namespace {

struct RunConfig {
  std::string model;
  std::string shape;
  std::vector<double> interval;
  std::optional<double> mode;
  std::uint64_t seed = 1;
  std::size_t reps = 0;
  std::string input;
  std::string output;
  std::string suite;
  double constant = 49.0;
  // simulate extras
  std::optional<double> n;
  std::string truth;
  std::string censor;
  std::optional<double> sigma;
  std::string estimator = "shape_map";
  std::size_t cells = 8;
  std::string sample;
  std::string save_truth;
  // estimate extras
  std::string envelope;
  unsigned threads = 1;
};

Interval interval_of(const RunConfig& c) {
  if (c.interval.empty()) return {0.0, 1.0};
  if (c.interval.size() != 2) throw UsageError("--interval expects a,b");
  try {
    return {c.interval[0], c.interval[1]};
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

// Writes through `write` to the named file, or to `fallback` for "" or "-".
void emit_to(const std::string& path, std::ostream& fallback,
             const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path + "'");
  write(f);
  f.flush();
  if (!f) throw IoError("error while writing '" + path + "'");
}

StepFunction read_step_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_step_function_csv(in);
}

int run_estimate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.model.empty()) throw UsageError("estimate needs --model");
  if (c.input.empty()) throw UsageError("estimate needs --in");
  const Model model = parse_model(c.model);
  const Interval dom = interval_of(c);
  const auto data = ingest_file(c.input, model, dom);

  FitOptions opt;
  if (!c.shape.empty()) opt.shape = parse_shape(c.shape);
  opt.mode = c.mode;
  if (opt.mode && !dom.contains(*opt.mode)) throw UsageError("--mode lies outside --interval");
  const auto res = fit(data, model, opt);

  for (const auto& w : res.warnings) err << "warning: " << w << '\n';
  if (res.design_discrepancy)
    err << "design discrepancy: " << detail::format_number(*res.design_discrepancy) << '\n';
  if (!res.estimate.input_nondecreasing)
    err << "note: cumulative estimate is not monotone; the guarantee is conjectural here\n";
  if (model == Model::nhpp)
    err << "note: nhpp risks are reported in L1 normalized by T = "
        << detail::format_number(res.l1_normalizer) << '\n';

  emit_to(c.output, out, [&](std::ostream& o) { write_estimate_csv(o, res.estimate); });
  if (!c.envelope.empty())
    emit_to(c.envelope, out, [&](std::ostream& o) { write_csv(o, res.estimate.envelope); });
  return exit_ok;
}

int run_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.model.empty()) throw UsageError("simulate needs --model");
  const Model model = parse_model(c.model);
  const ShapeKind shape = c.shape.empty() ? default_shape(model) : parse_shape(c.shape);
  const std::size_t reps = c.reps ? c.reps : 100;

  std::optional<TruthSpec> spec;
  if (!c.truth.empty()) {
    auto g = read_step_file(c.truth);
    std::optional<StepFunction> censor;
    if (!c.censor.empty()) censor = read_step_file(c.censor);
    const double sigma = c.sigma.value_or(model == Model::regression ? 0.5 : 0.0);
    spec.emplace(model, std::move(g), shape, sigma, std::move(censor));
  } else {
    auto rng = make_rng(c.seed, ~std::uint64_t{0});
    const double T = model == Model::nhpp ? c.n.value_or(20.0) : 20.0;
    spec.emplace(random_truth(rng, model, shape, T));
  }
  const double n = model == Model::nhpp ? spec->horizon().b() : c.n.value_or(200.0);

  Estimator est;
  if (c.estimator == "shape_map")
    est = ShapeMapEstimator{shape};
  else if (c.estimator == "histogram")
    est = HistogramEstimator{Partition::uniform(spec->horizon(), c.cells)};
  else if (c.estimator == "known_mode")
    est = KnownModeEstimator{c.mode.value_or(spec->mode())};
  else if (c.estimator == "constant_mle")
    est = ConstantMleEstimator{};
  else
    throw UsageError("unknown estimator '" + c.estimator + "'");

  if (!c.save_truth.empty())
    emit_to(c.save_truth, out, [&](std::ostream& o) { write_csv(o, spec->g()); });
  if (!c.sample.empty())
    emit_to(c.sample, out,
            [&](std::ostream& o) { write_observations(o, generate(*spec, n, c.seed, 0)); });

  auto report = monte_carlo_risk(*spec, est, n, reps, c.seed, {false, c.threads});
  report.metrics.emplace_back("n_or_T", n);
  err << "mean L1 " << detail::format_number(report.mean_l1) << " (stderr "
      << detail::format_number(report.std_error) << ", " << reps << " replications)\n";
  emit_to(c.output, out, [&](std::ostream& o) { write_report_csv(o, report); });
  return exit_ok;
}

int run_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.suite.empty()) throw UsageError("verify needs --suite");
  std::vector<Suite> suites;
  if (c.suite == "all")
    suites = {Suite::theorem1, Suite::lemma2, Suite::lemma4,     Suite::lemma5,
              Suite::marshall, Suite::eq5_sandwich, Suite::prop_bounds};
  else
    suites = {parse_suite(c.suite)};
  const std::size_t trials = c.reps ? c.reps : 100;

  std::ostringstream buf;
  bool ok = true;
  for (auto s : suites) {
    const auto rep = verify_inequalities(s, trials, c.seed, {c.constant, c.threads});
    err << to_string(s) << ": " << rep.violations << " violation(s) in " << rep.replications
        << (s == Suite::prop_bounds ? " replications per check\n" : " trials\n");
    buf << "# suite=" << to_string(s) << '\n';
    write_report_csv(buf, rep);
    ok = ok && rep.passed();
  }
  emit_to(c.output, out, [&](std::ostream& o) { o << buf.str(); });
  return ok ? exit_ok : exit_verification;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shape-respecting estimation of U-shaped and unimodal functions", "ushape"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.require_subcommand(1);

  RunConfig c;
  app.add_option("--model", c.model, "density | regression | hazard | nhpp");
  app.add_option("--shape", c.shape, "u_shaped | unimodal | nonincreasing | nondecreasing");
  app.add_option("--interval", c.interval, "estimation interval a,b")->delimiter(',')->expected(2);
  app.add_option("--mode", c.mode, "known mode (skips the search)");
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--reps", c.reps, "replications (simulate) or trials (verify)");
  app.add_option("--in", c.input, "input CSV");
  app.add_option("--out", c.output, "output CSV (default: standard output)");
  app.add_option("--suite", c.suite, "theorem1 | lemma2 | lemma4 | lemma5 | marshall | "
                                     "eq5_sandwich | prop_bounds | all");
  app.add_option("--constant", c.constant, "risk bracket constant C (default 49)");
  app.add_option("--n", c.n, "sample size, or horizon T for nhpp");
  app.add_option("--truth", c.truth, "truth g as a t,value step CSV (default: random)");
  app.add_option("--censor", c.censor, "censoring density as a t,value step CSV");
  app.add_option("--sigma", c.sigma, "regression noise level");
  app.add_option("--estimator", c.estimator, "shape_map | histogram | known_mode | constant_mle");
  app.add_option("--cells", c.cells, "histogram cells (uniform partition)");
  app.add_option("--sample", c.sample, "also write one generated data set here");
  app.add_option("--save-truth", c.save_truth, "also write the truth here");
  app.add_option("--envelope", c.envelope, "also write the regularized cumulative here");
  app.add_option("--threads", c.threads, "worker threads for replications");

  auto* estimate = app.add_subcommand("estimate", "fit a shape-respecting estimate to data");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo L1 risk against a known truth");
  auto* verify = app.add_subcommand("verify", "randomized checks of the risk inequalities");
  for (auto* sub : {estimate, simulate, verify}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << '\n';
    return exit_io;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (*estimate) return run_estimate(c, out, err);
    if (*simulate) return run_simulate(c, out, err);
    return run_verify(c, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return exit_parse;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return exit_io;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
}

}  // namespace ushape
