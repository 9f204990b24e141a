// Command-line surface for search-space scoring: score, rank, prune,
// tune-or-fix severed dimensions, and reproduce the shipped experiments.
//
// Exit codes: 0 success, 2 input/validation error, 3 numerical/model failure.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spaceopt/bench.hpp"
#include "spaceopt/errors.hpp"
#include "spaceopt/experiments.hpp"
#include "spaceopt/io.hpp"
#include "spaceopt/scoring.hpp"
#include "spaceopt/workflows.hpp"

namespace {

using namespace spaceopt;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

// "1,5,10" or log-spaced "start:stop:count-log" (deduplicated after rounding).
std::vector<Budget> parse_budgets(const std::string& text) {
  std::vector<Budget> budgets;
  const auto log_pos = text.find("-log");
  if (log_pos != std::string::npos && text.find(':') != std::string::npos) {
    int start, stop, count;
    if (std::sscanf(text.c_str(), "%d:%d:%d-log", &start, &stop, &count) != 3 ||
        start < 1 || stop < start || count < 1) {
      throw ValidationError("bad budget sweep '" + text +
                            "' (expected start:stop:count-log)");
    }
    int prev = 0;
    for (int i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      const int b = static_cast<int>(std::lround(
          std::exp(std::log(static_cast<double>(start)) +
                   f * (std::log(static_cast<double>(stop)) -
                        std::log(static_cast<double>(start))))));
      if (b > prev) {
        budgets.push_back({b});
        prev = b;
      }
    }
    return budgets;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      budgets.push_back({std::stoi(tok)});
    } catch (const std::exception&) {
      throw ValidationError("bad budget '" + tok + "'");
    }
    if (budgets.back().count < 1) throw ValidationError("budgets must be >= 1");
  }
  if (budgets.empty()) throw ValidationError("no budgets given");
  return budgets;
}

// "0.1,0.2" or "start:stop:step".
std::vector<ReductionRate> parse_rates(const std::string& text) {
  std::vector<ReductionRate> rates;
  double start, stop, step;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) == 3) {
    if (step <= 0.0) throw ValidationError("rate step must be positive");
    for (int i = 0;; ++i) {
      const double r = start + i * step;
      if (r > stop + 1e-12) break;
      rates.push_back({r});
    }
  } else {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        rates.push_back({std::stod(tok)});
      } catch (const std::exception&) {
        throw ValidationError("bad rate '" + tok + "'");
      }
    }
  }
  if (rates.empty()) throw ValidationError("no rates given");
  for (const auto& r : rates) {
    if (!(r.rho > 0.0) || r.rho > 1.0) {
      throw ValidationError("rates must lie in (0, 1]");
    }
  }
  return rates;
}

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

Json score_estimate_json(const ScoreEstimate& e) {
  return {{"value", e.value},
          {"std_error", e.std_error},
          {"budget", e.budget.count},
          {"variant", std::string(variant_name(e.config.variant))},
          {"incumbent", e.incumbent}};
}

struct CommonScoreFlags {
  std::string variant = "mean-bEI";
  int nx = 1000;
  int ny = 1000;
  std::uint64_t seed = 0;
  int threads = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--variant", variant,
                    "mean-bEI | median-bEI | mean-bPI | median-bPI");
    cmd->add_option("--nx", nx, "number of sampled x-batches");
    cmd->add_option("--ny", ny, "posterior samples per batch");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
  }
  ScoreConfig config() const {
    ScoreConfig cfg;
    cfg.variant = parse_variant(variant);
    cfg.n_x_batches = nx;
    cfg.n_posterior_samples = ny;
    cfg.seed = RngSeed{seed};
    cfg.n_threads = threads;
    return cfg;
  }
};

int cmd_score(const std::string& space_file, const std::string& data_file,
              int budget, bool negate, const CommonScoreFlags& flags,
              const std::string& dump_model) {
  const SearchSpace space = load_space_file(space_file);
  const Dataset data = load_observations_csv(data_file, space, negate);
  const ScoreConfig cfg = flags.config();
  const GpModel model = GpModel::fit(data, derive_seed(cfg.seed, streams::kFit));
  if (!dump_model.empty()) {
    std::ofstream out(dump_model);
    if (!out) throw ValidationError("cannot write '" + dump_model + "'");
    out << model_to_json(model).dump(2) << "\n";
  }
  const ScoreEstimate e =
      predicted_score(model, space, {budget}, data.incumbent(), cfg);
  std::cout << kScoreCsvHeader << "\n"
            << score_csv_row(stem_of(space_file), e) << "\n"
            << csv_manifest_line(flags.seed) << "\n";
  return kExitOk;
}

int cmd_rank(const std::vector<std::string>& space_files,
             const std::string& data_file, const std::string& budgets_text,
             bool negate, const CommonScoreFlags& flags,
             const std::string& report_file) {
  const std::vector<Budget> budgets = parse_budgets(budgets_text);
  if (space_files.empty()) throw ValidationError("no space files given");

  std::vector<NamedSpace> spaces;
  for (const auto& f : space_files) spaces.push_back({stem_of(f), load_space_file(f)});
  const SearchSpace base = spaces.front().space;
  const Dataset data = load_observations_csv(data_file, base, negate);

  const auto rankings = rank_spaces_sweep(data, spaces, budgets, flags.config());

  std::cout << kScoreCsvHeader << ",rank\n";
  for (const auto& ranking : rankings) {
    for (std::size_t r = 0; r < ranking.entries.size(); ++r) {
      std::cout << score_csv_row(ranking.entries[r].first, ranking.entries[r].second)
                << "," << (r + 1) << "\n";
    }
  }
  std::cout << csv_manifest_line(flags.seed) << "\n";

  if (!report_file.empty()) {
    Json report;
    report["budgets"] = Json::array();
    for (const auto& ranking : rankings) {
      Json entry;
      entry["budget"] = ranking.budget.count;
      entry["ranking"] = Json::array();
      for (const auto& [id, est] : ranking.entries) {
        Json se = score_estimate_json(est);
        se["space_id"] = id;
        entry["ranking"].push_back(std::move(se));
      }
      report["budgets"].push_back(std::move(entry));
    }
    std::vector<std::filesystem::path> inputs(space_files.begin(), space_files.end());
    inputs.push_back(data_file);
    report["manifest"] = make_manifest(flags.seed, inputs);
    std::ofstream out(report_file);
    if (!out) throw ValidationError("cannot write '" + report_file + "'");
    out << report.dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_prune(const std::string& objective_name, double noise_sd,
              const std::string& table_file, const std::string& space_file,
              int b1, int b2, const std::string& rates_text, int per_rate,
              const CommonScoreFlags& flags, const std::string& curve_file,
              const std::string& scores_file) {
  PruneSettings gen;
  gen.rates = parse_rates(rates_text);
  gen.per_rate = per_rate;

  SearchSpace base = [&] {
    if (!space_file.empty()) return load_space_file(space_file);
    if (objective_name.empty()) {
      throw ValidationError("prune needs --objective or --space (or both)");
    }
    return bench::make_objective(objective_name, noise_sd).base;
  }();

  const ScoreConfig cfg = flags.config();
  const RngSeed seed{flags.seed};

  PruneResult result = [&] {
    if (!table_file.empty()) {
      const Dataset table = load_observations_csv(table_file, base);
      return one_shot_prune_tabular(table, base, {b1}, {b2}, gen, cfg, seed);
    }
    if (objective_name.empty()) {
      throw ValidationError("prune needs --objective NAME or --table FILE");
    }
    const auto objective = bench::make_objective(objective_name, noise_sd);
    if (!space_file.empty() && !base.same_dimensions(objective.base)) {
      throw ValidationError("--space does not match the objective's dimensions");
    }
    return one_shot_prune(objective.as_noisy(), base, {b1}, {b2}, gen, cfg, seed);
  }();

  Json j;
  j["chosen_space"] = space_to_json(result.chosen_space);
  j["chosen_rate"] = result.chosen_rate;
  j["fell_back"] = result.fell_back;
  j["best"] = {{"x", std::vector<double>(result.best.x.begin(), result.best.x.end())},
               {"y", result.best.y}};
  j["phase1_incumbent"] = result.phase1.incumbent();
  j["n_candidates"] = result.all_scores.size();
  {
    std::vector<std::filesystem::path> inputs;
    if (!space_file.empty()) inputs.push_back(space_file);
    if (!table_file.empty()) inputs.push_back(table_file);
    Json cfg_json = {{"b1", b1},        {"b2", b2},
                     {"rates", rates_text}, {"per_rate", per_rate},
                     {"variant", flags.variant}, {"nx", flags.nx},
                     {"ny", flags.ny}};
    if (!objective_name.empty()) cfg_json["objective"] = objective_name;
    j["manifest"] = make_manifest(flags.seed, inputs, cfg_json);
  }
  std::cout << j.dump(2) << "\n";

  if (!curve_file.empty()) {
    std::ofstream out(curve_file);
    if (!out) throw ValidationError("cannot write '" + curve_file + "'");
    out << "step,phase,best_so_far\n";
    double best = std::numeric_limits<double>::infinity();
    int step = 0;
    for (const auto& o : result.phase1.obs()) {
      best = std::min(best, o.y);
      out << ++step << ",1," << format_double(best) << "\n";
    }
    for (const auto& o : result.phase2.obs()) {
      best = std::min(best, o.y);
      out << ++step << ",2," << format_double(best) << "\n";
    }
    out << csv_manifest_line(flags.seed) << "\n";
  }
  if (!scores_file.empty()) {
    std::ofstream out(scores_file);
    if (!out) throw ValidationError("cannot write '" + scores_file + "'");
    out << "candidate,rate,value,std_error\n";
    for (std::size_t t = 0; t < result.all_scores.size(); ++t) {
      const auto& s = result.all_scores[t];
      out << t << "," << format_double(s.rate) << ","
          << format_double(s.score.value) << "," << format_double(s.score.std_error)
          << "\n";
    }
    out << csv_manifest_line(flags.seed) << "\n";
  }
  return kExitOk;
}

int cmd_tune_or_fix(const std::string& space_file, const std::string& data_file,
                    const std::string& dim, const std::vector<double>& fix_values,
                    const std::string& budgets_text, bool negate,
                    const CommonScoreFlags& flags, const std::string& curves_file) {
  const std::vector<Budget> budgets = parse_budgets(budgets_text);
  const SearchSpace base = load_space_file(space_file);
  const Dataset data = load_observations_csv(data_file, base, negate);
  const ScoreConfig cfg = flags.config();

  Json j;
  j["dim"] = dim;
  j["results"] = Json::array();
  std::vector<TuneOrFixResult> results;
  for (const Budget& b : budgets) {
    results.push_back(tune_or_fix(data, base, dim, fix_values, b, cfg));
    const TuneOrFixResult& res = results.back();
    Json entry;
    entry["budget"] = b.count;
    entry["recommendation"] = res.recommendation;
    entry["scored"] = Json::array();
    for (const auto& [label, est] : res.scored) {
      Json se = score_estimate_json(est);
      se["label"] = label;
      entry["scored"].push_back(std::move(se));
    }
    j["results"].push_back(std::move(entry));
  }
  j["manifest"] = make_manifest(flags.seed, {space_file, data_file});
  std::cout << j.dump(2) << "\n";

  if (!curves_file.empty()) {
    std::ofstream out(curves_file);
    if (!out) throw ValidationError("cannot write '" + curves_file + "'");
    out << "label,budget,value,std_error\n";
    for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
      for (const auto& [label, est] : results[bi].scored) {
        out << label << "," << budgets[bi].count << "," << format_double(est.value)
            << "," << format_double(est.std_error) << "\n";
      }
    }
    out << csv_manifest_line(flags.seed) << "\n";
  }
  return kExitOk;
}

int cmd_reproduce(const std::string& experiment, const std::string& spec_file,
                  const std::string& out_dir, std::optional<std::uint64_t> seed,
                  std::optional<int> repeats, std::optional<int> nx,
                  std::optional<int> ny, int threads) {
  Json spec;
  if (!spec_file.empty()) {
    std::ifstream in(spec_file);
    if (!in) throw ValidationError("cannot open spec file '" + spec_file + "'");
    try {
      spec = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(spec_file + ": " + e.what());
    }
  } else {
    spec = bench::default_experiment_spec(experiment);
  }
  bench::ExperimentOverrides ov;
  ov.seed = seed;
  ov.repeats = repeats;
  ov.n_x_batches = nx;
  ov.n_posterior_samples = ny;
  ov.n_threads = threads;
  const auto written = bench::run_experiment(spec, out_dir, ov);
  for (const auto& f : written) {
    std::cout << (std::filesystem::path(out_dir) / f).string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"search-space scoring for budget-aware black-box optimization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  // score
  auto* score = app.add_subcommand("score", "score one search space at one budget");
  std::string score_space, score_data, score_dump;
  int score_budget = 1;
  bool score_negate = false;
  CommonScoreFlags score_flags;
  score->add_option("--space", score_space, "search-space JSON file")->required();
  score->add_option("--data", score_data, "observations CSV")->required();
  score->add_option("--budget", score_budget, "future evaluation budget")->required();
  score->add_flag("--negate", score_negate, "negate objective values on load");
  score->add_option("--dump-model", score_dump, "write fitted model JSON here");
  score_flags.attach(score);

  // rank
  auto* rank = app.add_subcommand("rank", "rank search spaces across budgets");
  std::vector<std::string> rank_spaces_files;
  std::string rank_data, rank_budgets = "1", rank_report;
  bool rank_negate = false;
  CommonScoreFlags rank_flags;
  rank->add_option("--spaces", rank_spaces_files, "search-space JSON files")
      ->required()
      ->expected(-1);
  rank->add_option("--data", rank_data, "observations CSV")->required();
  rank->add_option("--budgets", rank_budgets,
                   "comma list or start:stop:count-log sweep");
  rank->add_flag("--negate", rank_negate, "negate objective values on load");
  rank->add_option("--report", rank_report, "write a JSON report here");
  rank_flags.attach(rank);

  // prune
  auto* prune = app.add_subcommand("prune", "one-shot search-space pruning");
  std::string prune_objective, prune_table, prune_space;
  double prune_noise = 0.0;
  int prune_b1 = 2, prune_b2 = 1, prune_per_rate = 1;
  std::string prune_rates = "0.1:0.9:0.1", prune_curve, prune_scores;
  CommonScoreFlags prune_flags;
  prune_flags.nx = 100;
  prune_flags.ny = 100;
  prune->add_option("--objective", prune_objective,
                    "synthetic objective (branin, hartmann6, sphere, constant)");
  prune->add_option("--noise-sd", prune_noise, "observation noise of the objective");
  prune->add_option("--table", prune_table, "offline evaluations CSV");
  prune->add_option("--space", prune_space,
                    "base space JSON (defaults to the objective's)");
  prune->add_option("--b1", prune_b1, "phase-1 budget (broad sampling)")->required();
  prune->add_option("--b2", prune_b2, "phase-2 budget (pruned sampling)")->required();
  prune->add_option("--rates", prune_rates, "volume reduction rates");
  prune->add_option("--per-rate", prune_per_rate, "candidate spaces per rate");
  prune->add_option("--curve-out", prune_curve, "write best-so-far CSV here");
  prune->add_option("--scores-out", prune_scores, "write per-candidate scores here");
  prune_flags.attach(prune);

  // tune-or-fix
  auto* tof = app.add_subcommand("tune-or-fix",
                                 "tune a dimension or pin it to a value");
  std::string tof_space, tof_data, tof_dim, tof_budgets = "1", tof_curves;
  std::vector<double> tof_fix;
  bool tof_negate = false;
  CommonScoreFlags tof_flags;
  tof->add_option("--space", tof_space, "search-space JSON file")->required();
  tof->add_option("--data", tof_data, "observations CSV")->required();
  tof->add_option("--dim", tof_dim, "dimension name")->required();
  tof->add_option("--fix", tof_fix, "candidate fixed value (repeatable)");
  tof->add_option("--budgets", tof_budgets, "comma list or start:stop:count-log");
  tof->add_flag("--negate", tof_negate, "negate objective values on load");
  tof->add_option("--curves-out", tof_curves, "write score curves CSV here");
  tof_flags.attach(tof);

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "run a shipped experiment");
  std::string rep_name, rep_spec, rep_out = "out";
  std::optional<std::uint64_t> rep_seed;
  std::optional<int> rep_repeats, rep_nx, rep_ny;
  int rep_threads = 0;
  rep->add_option("--experiment", rep_name, "experiment name (see --list)");
  rep->add_option("--spec", rep_spec, "experiment spec JSON file");
  rep->add_option("--out", rep_out, "output directory");
  rep->add_option("--seed", rep_seed, "master seed override");
  rep->add_option("--repeats", rep_repeats, "repeat count override");
  rep->add_option("--nx", rep_nx, "x-batch count override");
  rep->add_option("--ny", rep_ny, "posterior sample count override");
  rep->add_option("--threads", rep_threads, "worker threads (0 = all cores)");
  bool rep_list = false;
  rep->add_flag("--list", rep_list, "list available experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (score->parsed()) {
      return cmd_score(score_space, score_data, score_budget, score_negate,
                       score_flags, score_dump);
    }
    if (rank->parsed()) {
      return cmd_rank(rank_spaces_files, rank_data, rank_budgets, rank_negate,
                      rank_flags, rank_report);
    }
    if (prune->parsed()) {
      return cmd_prune(prune_objective, prune_noise, prune_table, prune_space,
                       prune_b1, prune_b2, prune_rates, prune_per_rate,
                       prune_flags, prune_curve, prune_scores);
    }
    if (tof->parsed()) {
      return cmd_tune_or_fix(tof_space, tof_data, tof_dim, tof_fix, tof_budgets,
                             tof_negate, tof_flags, tof_curves);
    }
    if (rep->parsed()) {
      if (rep_list) {
        for (const auto& n : bench::experiment_names()) std::cout << n << "\n";
        return kExitOk;
      }
      if (rep_name.empty() && rep_spec.empty()) {
        throw ValidationError("reproduce needs --experiment NAME or --spec FILE");
      }
      return cmd_reproduce(rep_name, rep_spec, rep_out, rep_seed, rep_repeats,
                           rep_nx, rep_ny, rep_threads);
    }
    throw ValidationError("no subcommand given");
  } catch (const ValidationError& e) {
    std::cerr << "spaceopt: error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "spaceopt: numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "spaceopt: failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
