#include "segmarket/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "segmarket/designer.hpp"
#include "segmarket/efficiency.hpp"
#include "segmarket/equilibrium.hpp"
#include "segmarket/errors.hpp"
#include "segmarket/oracle.hpp"
#include "segmarket/output.hpp"
#include "segmarket/planner.hpp"
#include "segmarket/scenario.hpp"

namespace segmarket::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string command;
  std::string scenario_path;
  std::string batch_dir;
  std::string out = "-";
  std::string format = "json";
  int mesh_override = 0;
  double tol = 1e-8;
  long seed = 0;  // accepted for reproducibility bookkeeping; solvers are deterministic
  // hosios
  double construct_split = 0.0;
  bool do_construct = false;
  // oracle
  double oracle_u = 0.0;
  bool has_oracle_u = false;
  bool bp_mode = false;
  bool exhaustive = false;
  int max_n = 12;
  // design
  bool with_oracle = false;
};

struct CommandResult {
  json payload;
  std::string csv;
};

json segmentation_json(const Segmentation& seg) {
  json subs = json::array();
  for (const auto& sub : seg.submarkets) {
    subs.push_back({{"weight", sub.weight}, {"posterior", sub.posterior}});
  }
  return {{"kind", "explicit"}, {"submarkets", subs}};
}

json certificate_json(const PriceCertificate& cert) {
  return {{"theta_c", cert.theta_c},
          {"boundary_split", cert.boundary_split},
          {"tangency_point", cert.tangency_point},
          {"slope", cert.slope},
          {"intercept", cert.intercept},
          {"checks",
           {{"envelope", cert.envelope_ok},
            {"support", cert.support_ok},
            {"mean", cert.mean_ok}}},
          {"worst_envelope_violation", cert.worst_envelope_violation},
          {"worst_support_gap", cert.worst_support_gap},
          {"mean_residual", cert.mean_residual}};
}

int default_mesh(const Scenario& sc, const Options& opt) {
  if (opt.mesh_override > 0) return opt.mesh_override;
  if (sc.mesh) return *sc.mesh;
  return 4 * static_cast<int>(sc.prior.size());
}

CommandResult run_equilibrium(const Scenario& sc) {
  const EquilibriumOutcome eq =
      solve_equilibrium(sc.prior, sc.segmentation, sc.meeting, sc.k, sc.split);
  json payload = {{"u_star", eq.u_star},
                  {"tightness", eq.tightness.tightness},
                  {"buyer_payoff", eq.buyer_payoff},
                  {"total_surplus", eq.total_surplus},
                  {"active", eq.active}};

  CsvWriter csv({"submarket_index", "posterior_mean", "weight", "tightness",
                 "meet_prob_buyer", "meet_prob_seller", "surplus_contrib"});
  const auto means = sc.segmentation.posterior_means(sc.prior);
  for (std::size_t s = 0; s < sc.segmentation.size(); ++s) {
    const double tau = eq.tightness.tightness[s];
    const double w = sc.segmentation.submarkets[s].weight;
    const double m = sc.meeting.m(tau);
    const double buyer_prob = tau > 0.0 ? m / tau : sc.meeting.beta();
    csv.add_row({std::to_string(s), CsvWriter::num(means[s]), CsvWriter::num(w),
                 CsvWriter::num(tau), CsvWriter::num(buyer_prob),
                 CsvWriter::num(m), CsvWriter::num(sc.k * w * m * means[s])});
  }
  return {std::move(payload), csv.str()};
}

CommandResult run_first_best(const Scenario& sc) {
  const PlannerOutcome fb =
      solve_first_best(sc.prior, sc.segmentation, sc.meeting, sc.k);
  json payload = {{"eta", fb.eta},
                  {"tightness", fb.tightness.tightness},
                  {"surplus", fb.total_surplus},
                  {"active", fb.active}};

  CsvWriter csv({"submarket_mean", "weight", "tightness", "meetings",
                 "surplus_share"});
  const auto means = sc.segmentation.posterior_means(sc.prior);
  for (std::size_t s = 0; s < sc.segmentation.size(); ++s) {
    const double tau = fb.tightness.tightness[s];
    const double w = sc.segmentation.submarkets[s].weight;
    const double meetings = sc.k * w * sc.meeting.m(tau);
    const double share =
        fb.total_surplus > 0.0 ? meetings * means[s] / fb.total_surplus : 0.0;
    csv.add_row({CsvWriter::num(means[s]), CsvWriter::num(w), CsvWriter::num(tau),
                 CsvWriter::num(meetings), CsvWriter::num(share)});
  }
  return {std::move(payload), csv.str()};
}

CommandResult run_hosios(const Scenario& sc, const Options& opt) {
  json payload;
  HosiosReport report{};
  if (opt.do_construct) {
    const HosiosSplitResult built = hosios_compatible_split(
        sc.prior, sc.meeting, sc.k, opt.construct_split);
    report = check_hosios(sc.prior, sc.meeting, sc.k, built.split);
    json table = json::array();
    for (std::size_t j = 0; j < sc.prior.size(); ++j) {
      table.push_back(built.split.at(sc.prior, j));
    }
    payload["lambda_table"] = table;
    payload["clamped"] = built.clamped;
  } else {
    report = check_hosios(sc.prior, sc.meeting, sc.k, sc.split);
  }
  payload["holds"] = report.holds;
  payload["eta_ps"] = report.eta_ps;
  payload["cutoff"] = report.cutoff;
  payload["lambda_at_cutoff"] = report.lambda_at_cutoff;
  payload["violations"] = {{"below", report.max_violation_below},
                           {"above", report.max_violation_above}};

  CsvWriter csv({"theta", "lambda", "elasticity_target", "excess_below"});
  const SurplusSplit& split = sc.split;
  for (std::size_t j = 0; j < sc.prior.size(); ++j) {
    const double theta = sc.prior.grid[j];
    const double lam = opt.do_construct
                           ? payload["lambda_table"][j].get<double>()
                           : split.at(sc.prior, j);
    double target = 0.0, excess = 0.0;
    if (theta > report.cutoff) {
      target = report.lambda_at_cutoff *
               sc.meeting.elasticity(sc.meeting.f(theta / report.eta_ps));
    } else {
      excess = lam * theta - report.lambda_at_cutoff * report.cutoff;
    }
    csv.add_row({CsvWriter::num(theta), CsvWriter::num(lam),
                 CsvWriter::num(target), CsvWriter::num(excess)});
  }
  return {std::move(payload), csv.str()};
}

CommandResult run_design(const Scenario& sc, const Options& opt) {
  if (!sc.split.is_constant()) {
    throw assumption_error("constant_split_required",
                           "design requires a constant surplus split");
  }
  const DesignOutcome out = design(sc.prior, sc.meeting, sc.k, sc.split.ell());
  json payload = {{"curvature", to_string(out.curvature)},
                  {"segmentation", segmentation_json(out.segmentation)},
                  {"u_bar", out.u_bar},
                  {"surplus", out.total_surplus}};
  if (out.cutoff_type) payload["theta_c"] = *out.cutoff_type;
  if (out.boundary_split) payload["boundary_split"] = *out.boundary_split;
  if (out.certificate) payload["certificate"] = certificate_json(*out.certificate);
  if (out.binary_alt_surplus) payload["binary_surplus"] = *out.binary_alt_surplus;
  if (opt.with_oracle) {
    const double u_lp = find_u_bar(sc.meeting, sc.prior, sc.split.ell(),
                                   default_mesh(sc, opt), sc.k);
    payload["oracle_gap"] = out.u_bar / sc.split.ell() - u_lp / sc.split.ell();
  }

  CsvWriter csv({"submarket_index", "posterior_mean", "weight", "tightness",
                 "active"});
  const auto means = out.segmentation.posterior_means(sc.prior);
  for (std::size_t s = 0; s < out.segmentation.size(); ++s) {
    csv.add_row({std::to_string(s), CsvWriter::num(means[s]),
                 CsvWriter::num(out.segmentation.submarkets[s].weight),
                 CsvWriter::num(out.equilibrium.tightness.tightness[s]),
                 out.equilibrium.active[s] ? "1" : "0"});
  }
  return {std::move(payload), csv.str()};
}

CommandResult run_oracle(const Scenario& sc, const Options& opt) {
  if (!sc.split.is_constant() && !opt.bp_mode) {
    throw assumption_error("constant_split_required",
                           "the LP oracle requires a constant surplus split");
  }
  json payload;
  CsvWriter csv({"point", "mass"});
  if (opt.bp_mode) {
    const BpResult bp = enumerate_bp(sc.prior, sc.meeting, sc.k, sc.split,
                                     opt.exhaustive, opt.max_n);
    payload["mode"] = "bp";
    payload["value"] = bp.total_surplus;
    payload["u_bar"] = bp.u_star;
    const MeanDistribution dist =
        posterior_mean_distribution(bp.segmentation, sc.prior);
    payload["support"] = dist.points;
    payload["masses"] = dist.masses;
    json blocks = json::array();
    for (const auto& block : bp.blocks) blocks.push_back(block);
    payload["blocks"] = blocks;
    payload["candidates"] = bp.candidates_evaluated;
    for (std::size_t i = 0; i < dist.points.size(); ++i) {
      csv.add_row({CsvWriter::num(dist.points[i]), CsvWriter::num(dist.masses[i])});
    }
  } else {
    const double ell = sc.split.ell();
    const int mesh = default_mesh(sc, opt);
    double u = 0.0;
    payload["mode"] = "lp";
    if (opt.has_oracle_u) {
      u = opt.oracle_u;
    } else {
      u = find_u_bar(sc.meeting, sc.prior, ell, mesh, sc.k);
      payload["u_bar"] = u;
    }
    const LpSolution lp = lp_value(sc.meeting, sc.prior, ell, u, mesh, sc.k);
    payload["value"] = lp.value;
    json support = json::array(), masses = json::array();
    for (std::size_t idx : lp.support) {
      support.push_back(lp.points[idx]);
      masses.push_back(lp.masses[idx]);
      csv.add_row({CsvWriter::num(lp.points[idx]), CsvWriter::num(lp.masses[idx])});
    }
    payload["support"] = support;
    payload["masses"] = masses;
  }
  return {std::move(payload), csv.str()};
}

CommandResult run_compare(const Scenario& sc) {
  const PlannerOutcome fb =
      solve_first_best(sc.prior, sc.segmentation, sc.meeting, sc.k);
  const EquilibriumOutcome eq =
      solve_equilibrium(sc.prior, sc.segmentation, sc.meeting, sc.k, sc.split);
  json deltas = json::array();
  for (std::size_t s = 0; s < sc.segmentation.size(); ++s) {
    deltas.push_back(eq.tightness.tightness[s] - fb.tightness.tightness[s]);
  }
  json payload = {
      {"efficiency_gap", eq.total_surplus / fb.total_surplus},
      {"first_best",
       {{"eta", fb.eta},
        {"tightness", fb.tightness.tightness},
        {"surplus", fb.total_surplus}}},
      {"equilibrium",
       {{"u_star", eq.u_star},
        {"tightness", eq.tightness.tightness},
        {"buyer_payoff", eq.buyer_payoff},
        {"total_surplus", eq.total_surplus}}},
      {"tightness_delta", deltas}};

  CsvWriter csv({"submarket_index", "posterior_mean", "weight", "tau_first_best",
                 "tau_equilibrium", "delta"});
  const auto means = sc.segmentation.posterior_means(sc.prior);
  for (std::size_t s = 0; s < sc.segmentation.size(); ++s) {
    csv.add_row({std::to_string(s), CsvWriter::num(means[s]),
                 CsvWriter::num(sc.segmentation.submarkets[s].weight),
                 CsvWriter::num(fb.tightness.tightness[s]),
                 CsvWriter::num(eq.tightness.tightness[s]),
                 CsvWriter::num(eq.tightness.tightness[s] -
                                fb.tightness.tightness[s])});
  }
  return {std::move(payload), csv.str()};
}

CommandResult dispatch(const std::string& command, const Scenario& sc,
                       const Options& opt) {
  if (command == "equilibrium") return run_equilibrium(sc);
  if (command == "first-best") return run_first_best(sc);
  if (command == "hosios") return run_hosios(sc, opt);
  if (command == "design") return run_design(sc, opt);
  if (command == "oracle") return run_oracle(sc, opt);
  if (command == "compare") return run_compare(sc);
  throw validation_error("bad_argument", "unknown command '" + command + "'");
}

void write_result(const CommandResult& result, const Options& opt,
                  const std::string& path, std::ostream& out) {
  const std::string text =
      opt.format == "csv" ? result.csv : canonical_json(result.payload);
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw validation_error("io_error", "cannot open output file '" + path + "'");
  }
  file << text;
}

int run_all(const Options& opt, std::ostream& out) {
  if (!opt.batch_dir.empty()) {
    if (opt.out == "-") {
      throw validation_error("bad_argument",
                             "--batch requires --out to name a directory");
    }
    fs::create_directories(opt.out);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(opt.batch_dir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      throw validation_error("bad_argument", "no scenario files in batch directory");
    }
    for (const auto& file : files) {
      const Scenario sc = load_scenario(file.string());
      const CommandResult result = dispatch(opt.command, sc, opt);
      const std::string ext = opt.format == "csv" ? ".csv" : ".json";
      write_result(result, opt, (fs::path(opt.out) / file.stem()).string() + ext,
                   out);
    }
    return 0;
  }
  const Scenario sc = load_scenario(opt.scenario_path);
  const CommandResult result = dispatch(opt.command, sc, opt);
  write_result(result, opt, opt.out, out);
  return 0;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  Options opt;

  CLI::App app{"Solver toolkit for frictional directed-search markets"};
  app.require_subcommand(1);

  const std::vector<std::string> commands = {"equilibrium", "first-best", "hosios",
                                             "design", "oracle", "compare"};
  std::vector<CLI::App*> subs;
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--scenario", opt.scenario_path, "Scenario JSON file");
    sub->add_option("--batch", opt.batch_dir, "Directory of scenario files");
    sub->add_option("--out", opt.out, "Output path, '-' for stdout");
    sub->add_option("--format", opt.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--mesh", opt.mesh_override, "LP refinement override");
    sub->add_option("--tol", opt.tol, "LP feasibility-root tolerance");
    sub->add_option("--seed", opt.seed, "Reproducibility seed (recorded only)");
    subs.push_back(sub);
  }
  subs[2]->add_option("--construct-split", opt.construct_split,
                      "Build the elasticity-matched split with this cutoff share")
      ->check(CLI::Range(0.0, 1.0));
  subs[3]->add_flag("--with-oracle", opt.with_oracle,
                    "Cross-check the design against the LP oracle");
  subs[4]->add_option("--u", opt.oracle_u, "Evaluate the LP at this payoff");
  subs[4]->add_flag("--bp", opt.bp_mode, "Enumerate partitional segmentations");
  subs[4]->add_flag("--exhaustive", opt.exhaustive,
                    "Enumerate all set partitions, not just intervals");
  subs[4]->add_option("--max-n", opt.max_n, "Grid size cap for enumeration");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << canonical_json(
        {{"code", "bad_arguments"}, {"message", e.what()}, {"context", "cli"}});
    return 2;
  }

  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (subs[i]->parsed()) {
      opt.command = commands[i];
      opt.do_construct = i == 2 && subs[i]->count("--construct-split") > 0;
      opt.has_oracle_u = i == 4 && subs[i]->count("--u") > 0;
    }
  }
  if (opt.scenario_path.empty() && opt.batch_dir.empty()) {
    err << canonical_json({{"code", "bad_arguments"},
                           {"message", "--scenario or --batch is required"},
                           {"context", opt.command}});
    return 2;
  }

  try {
    return run_all(opt, out);
  } catch (const validation_error& e) {
    err << canonical_json(
        {{"code", e.code()}, {"message", e.what()}, {"context", opt.command}});
    return 2;
  } catch (const assumption_error& e) {
    err << canonical_json(
        {{"code", e.code()}, {"message", e.what()}, {"context", opt.command}});
    return 4;
  } catch (const solver_error& e) {
    err << canonical_json(
        {{"code", e.code()}, {"message", e.what()}, {"context", opt.command}});
    return 3;
  } catch (const std::exception& e) {
    err << canonical_json({{"code", "internal_error"},
                           {"message", e.what()},
                           {"context", opt.command}});
    return 3;
  }
}

}  // namespace segmarket::cli
