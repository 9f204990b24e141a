#include "spaceopt/workflows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#include "spaceopt/bench.hpp"
#include "spaceopt/errors.hpp"
#include "spaceopt/parallel.hpp"

namespace spaceopt {

namespace {

void sort_entries(std::vector<std::pair<std::string, ScoreEstimate>>& entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second.value != b.second.value) return a.second.value > b.second.value;
    return a.first < b.first;
  });
}

}  // namespace

std::vector<RankingResult> rank_spaces_sweep(const Dataset& data,
                                             const std::vector<NamedSpace>& spaces,
                                             const std::vector<Budget>& budgets,
                                             const ScoreConfig& config) {
  if (spaces.empty()) throw ValidationError("no spaces to rank");
  if (budgets.empty()) throw ValidationError("no budgets to rank at");
  const GpModel model = GpModel::fit(data, derive_seed(config.seed, streams::kFit));
  const double incumbent = data.incumbent();

  std::vector<std::vector<ScoreEstimate>> scores(spaces.size());
  parallel_for(spaces.size(), config.n_threads, [&](std::size_t s) {
    ScoreConfig sub = config;
    sub.n_threads = 1;
    sub.seed = derive_seed(config.seed, streams::kScore, s);
    scores[s] = predicted_score_sweep(model, spaces[s].space, budgets, incumbent, sub);
  });

  std::vector<RankingResult> out(budgets.size());
  for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
    RankingResult& r = out[bi];
    r.budget = budgets[bi];
    r.entries.reserve(spaces.size());
    for (std::size_t s = 0; s < spaces.size(); ++s) {
      r.entries.emplace_back(spaces[s].id, scores[s][bi]);
    }
    sort_entries(r.entries);
  }
  return out;
}

RankingResult rank_spaces(const Dataset& data, const std::vector<NamedSpace>& spaces,
                          Budget budget, const ScoreConfig& config) {
  return rank_spaces_sweep(data, spaces, {budget}, config).front();
}

namespace {

using PhaseSampler = std::function<bench::StudyLog(const SearchSpace&, int n,
                                                   int eval_offset)>;

PruneResult prune_impl(const PhaseSampler& sample_observations,
                       const SearchSpace& base, Budget b1, Budget b2,
                       const PruneSettings& gen, const ScoreConfig& config,
                       RngSeed seed) {
  if (b1.count < 2) {
    throw ValidationError("pruning needs b1 >= 2 (the model fit requires at "
                          "least 2 observations)");
  }
  if (b2.count < 1) throw ValidationError("pruning needs b2 >= 1");

  const bench::StudyLog phase1_log = sample_observations(base, b1.count, 0);
  Dataset phase1(base, phase1_log.evals);
  const double incumbent = phase1.incumbent();

  const GpModel model = GpModel::fit(phase1, derive_seed(seed, streams::kFit));

  std::vector<RatedSpace> candidates = propose_search_spaces(
      base, gen.rates, gen.per_rate, derive_seed(seed, streams::kSpaceGen));

  std::vector<ScoredSpace> scored(candidates.size());
  parallel_for(candidates.size(), config.n_threads, [&](std::size_t t) {
    ScoreConfig sub = config;
    sub.n_threads = 1;
    sub.seed = derive_seed(seed, streams::kScore, t);
    ScoredSpace& s = scored[t];
    s.space = candidates[t].space;
    s.rate = candidates[t].rate;
    s.score = predicted_score(model, candidates[t].space, b2, incumbent, sub);
  });

  std::size_t best_idx = 0;
  for (std::size_t t = 1; t < scored.size(); ++t) {
    if (scored[t].score.value > scored[best_idx].score.value) best_idx = t;
  }

  PruneResult result{.chosen_space = base,
                     .chosen_rate = 1.0,
                     .fell_back = false,
                     .all_scores = std::move(scored),
                     .phase1 = std::move(phase1),
                     .phase2 = Dataset(base, {}),
                     .best = {}};
  if (result.all_scores[best_idx].score.value <= 0.0) {
    // Nothing scored above zero, typically a degenerate fit; the safe action
    // is to keep sampling the base space.
    result.fell_back = true;
    std::cerr << "spaceopt: warning: all candidate spaces scored zero; "
                 "falling back to the base space\n";
  } else {
    result.chosen_space = result.all_scores[best_idx].space;
    result.chosen_rate = result.all_scores[best_idx].rate;
  }

  const bench::StudyLog phase2_log =
      sample_observations(result.chosen_space, b2.count, b1.count);
  result.phase2 = Dataset(result.chosen_space, phase2_log.evals);

  result.best = result.phase1.obs()[static_cast<std::size_t>(result.phase1.argmin())];
  for (const auto& o : result.phase2.obs()) {
    if (o.y < result.best.y) result.best = o;
  }
  return result;
}

}  // namespace

PruneResult one_shot_prune(const NoisyObjective& objective, const SearchSpace& base,
                           Budget b1, Budget b2, const PruneSettings& gen,
                           const ScoreConfig& config, RngSeed seed) {
  PhaseSampler sampler = [&](const SearchSpace& space, int n, int offset) {
    bench::StudyLog log;
    log.evals.resize(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), gen.eval_threads, [&](std::size_t i) {
      Rng rng(derive_seed(seed, streams::kEvals,
                          static_cast<std::uint64_t>(offset) + i));
      Observation o;
      o.x = space.sample(rng);
      o.y = objective(o.x, rng);
      log.evals[i] = std::move(o);
    });
    return log;
  };
  return prune_impl(sampler, base, b1, b2, gen, config, seed);
}

PruneResult one_shot_prune_tabular(const Dataset& table, const SearchSpace& base,
                                   Budget b1, Budget b2, const PruneSettings& gen,
                                   const ScoreConfig& config, RngSeed seed) {
  PhaseSampler sampler = [&](const SearchSpace& space, int n, int offset) {
    return bench::tabular_random_search(table, space, n, seed, offset);
  };
  return prune_impl(sampler, base, b1, b2, gen, config, seed);
}

TuneOrFixResult tune_or_fix(const Dataset& data, const SearchSpace& base,
                            const std::string& dim,
                            const std::vector<double>& fixed_values, Budget budget,
                            const ScoreConfig& config) {
  const int k = base.dim_index(dim);
  if (k < 0) {
    throw ValidationError("dimension '" + dim + "' not found in the search space");
  }
  const ParamDomain& domain = base.dim(k);
  std::vector<NamedSpace> spaces;
  spaces.push_back({"tuned", base});
  for (double value : fixed_values) {
    if (!domain.contains(value)) {
      throw ValidationError("fixed value " + std::to_string(value) +
                            " outside dimension '" + dim + "' [" +
                            std::to_string(domain.lower) + ", " +
                            std::to_string(domain.upper) + "]");
    }
    std::vector<ParamDomain> dims = base.dims();
    dims[static_cast<std::size_t>(k)] =
        ParamDomain::fixed(domain.name, domain.scale, value);
    char label[64];
    std::snprintf(label, sizeof(label), "%s=%g", dim.c_str(), value);
    spaces.push_back({label, SearchSpace(std::move(dims))});
  }

  const GpModel model = GpModel::fit(data, derive_seed(config.seed, streams::kFit));
  const double incumbent = data.incumbent();

  TuneOrFixResult result;
  result.scored.resize(spaces.size());
  parallel_for(spaces.size(), config.n_threads, [&](std::size_t s) {
    // All candidates share one sample stream (common random numbers), so two
    // geometrically identical spaces receive identical scores.
    ScoreConfig sub = config;
    sub.n_threads = 1;
    result.scored[s] = {spaces[s].id,
                        predicted_score(model, spaces[s].space, budget, incumbent, sub)};
  });

  std::size_t best = 0;
  for (std::size_t s = 1; s < result.scored.size(); ++s) {
    if (result.scored[s].second.value > result.scored[best].second.value) best = s;
  }
  result.recommendation = result.scored[best].first;
  return result;
}

std::vector<RankAgreementBin> rank_preservation_probability(
    const std::vector<double>& emp, const std::vector<double>& pred, int n_pairs,
    int n_bins, RngSeed seed, PairMode mode) {
  if (emp.size() != pred.size()) {
    throw ValidationError("empirical and predicted score lists differ in length");
  }
  if (emp.size() < 2) throw ValidationError("need at least 2 spaces to rank pairs");
  if (n_pairs < 1 || n_bins < 1) {
    throw ValidationError("n_pairs and n_bins must be >= 1");
  }
  const std::size_t n = emp.size();
  std::size_t best = 0;
  if (mode == PairMode::kRandomVsBest) {
    for (std::size_t i = 1; i < n; ++i) {
      if (emp[i] > emp[best]) best = i;
    }
  }

  struct Pair {
    double distance;
    bool agree;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(n_pairs));
  Rng rng(derive_seed(seed, streams::kPairs));
  auto sign = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
  for (int p = 0; p < n_pairs; ++p) {
    std::size_t i, j;
    if (mode == PairMode::kRandomVsBest) {
      j = best;
      do {
        i = rng.uniform_int(n);
      } while (i == j);
    } else {
      i = rng.uniform_int(n);
      do {
        j = rng.uniform_int(n);
      } while (j == i);
    }
    const double de = emp[i] - emp[j];
    const double dp = pred[i] - pred[j];
    pairs.push_back({std::abs(de), sign(de) == sign(dp)});
  }

  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.distance < b.distance; });

  std::vector<RankAgreementBin> bins(static_cast<std::size_t>(n_bins));
  for (int k = 0; k < n_bins; ++k) {
    const std::size_t lo = pairs.size() * static_cast<std::size_t>(k) /
                           static_cast<std::size_t>(n_bins);
    const std::size_t hi = pairs.size() * static_cast<std::size_t>(k + 1) /
                           static_cast<std::size_t>(n_bins);
    RankAgreementBin& bin = bins[static_cast<std::size_t>(k)];
    bin.count = static_cast<int>(hi - lo);
    if (bin.count == 0) continue;
    int agree = 0;
    for (std::size_t p = lo; p < hi; ++p) agree += pairs[p].agree ? 1 : 0;
    bin.accuracy = static_cast<double>(agree) / bin.count;
    bin.std_error = std::sqrt(std::max(0.0, bin.accuracy * (1.0 - bin.accuracy)) /
                              bin.count);
    bin.distance_lo = pairs[lo].distance;
    bin.distance_hi = pairs[hi - 1].distance;
  }
  return bins;
}

}  // namespace spaceopt
