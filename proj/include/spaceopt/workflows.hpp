#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spaceopt/gp.hpp"
#include "spaceopt/scoring.hpp"
#include "spaceopt/search_space.hpp"
#include "spaceopt/spacegen.hpp"

namespace spaceopt {

struct NamedSpace {
  std::string id;
  SearchSpace space;
};

/// Spaces ordered by descending predicted score; ties break by id.
struct RankingResult {
  std::vector<std::pair<std::string, ScoreEstimate>> entries;
  Budget budget;
};

/// Fits one surrogate on the data (incumbent = best observed value), scores
/// every candidate space at the budget with a deterministic per-space
/// sub-seed, and returns the descending ranking.
RankingResult rank_spaces(const Dataset& data, const std::vector<NamedSpace>& spaces,
                          Budget budget, const ScoreConfig& config);

/// Budget-sweep version used for score-vs-budget curves; each space is scored
/// across all budgets from one coupled sample stream.
std::vector<RankingResult> rank_spaces_sweep(const Dataset& data,
                                             const std::vector<NamedSpace>& spaces,
                                             const std::vector<Budget>& budgets,
                                             const ScoreConfig& config);

struct ScoredSpace {
  SearchSpace space;
  double rate = 1.0;
  ScoreEstimate score;
};

struct PruneResult {
  SearchSpace chosen_space;
  double chosen_rate = 1.0;
  bool fell_back = false;  // every candidate scored zero; kept the base space
  std::vector<ScoredSpace> all_scores;
  Dataset phase1;
  Dataset phase2;
  Observation best;
};

struct PruneSettings {
  std::vector<ReductionRate> rates;
  int per_rate = 1;
  int eval_threads = 1;  // parallelism for objective evaluations
};

/// One round of search-space pruning: spend b1 evaluations uniformly on the
/// base space, fit a surrogate, generate candidate subspaces, spend b2
/// evaluations uniformly in the best-scoring one, return the best point seen.
/// Evaluation streams are numbered 0..b1+b2-1 across both phases, so with a
/// base-space candidate the procedure degenerates to plain random search.
PruneResult one_shot_prune(const NoisyObjective& objective, const SearchSpace& base,
                           Budget b1, Budget b2, const PruneSettings& gen,
                           const ScoreConfig& config, RngSeed seed);

/// Offline variant: evaluations draw rows from the table instead of querying
/// an objective.
PruneResult one_shot_prune_tabular(const Dataset& table, const SearchSpace& base,
                                   Budget b1, Budget b2, const PruneSettings& gen,
                                   const ScoreConfig& config, RngSeed seed);

struct TuneOrFixResult {
  /// Scores in input order: the tuned space first (label "tuned"), then one
  /// "<dim>=<value>" entry per fixed value.
  std::vector<std::pair<std::string, ScoreEstimate>> scored;
  std::string recommendation;  // label with the best score; ties prefer tuning
};

/// Decides between tuning a dimension over its range and pinning it to each
/// candidate value, by scoring the corresponding spaces under one shared
/// model and one shared sample stream (common random numbers). Pinned spaces
/// keep the full dimensionality; sampling just returns the fixed coordinate.
TuneOrFixResult tune_or_fix(const Dataset& data, const SearchSpace& base,
                            const std::string& dim,
                            const std::vector<double>& fixed_values, Budget budget,
                            const ScoreConfig& config);

enum class PairMode {
  kRandomVsRandom,  // both spaces of a pair drawn at random
  kRandomVsBest,    // one random space against the best-empirical-score space
};

struct RankAgreementBin {
  double accuracy = 0.0;
  double std_error = 0.0;  // binomial
  int count = 0;
  double distance_lo = 0.0;  // |emp difference| range covered by this bin
  double distance_hi = 0.0;
};

/// How often the predicted scores order a pair of spaces the same way the
/// empirical scores do, binned by empirical-score distance quantiles
/// (bin 0 = closest pairs). emp and pred are per-space scores in one shared
/// order.
std::vector<RankAgreementBin> rank_preservation_probability(
    const std::vector<double>& emp, const std::vector<double>& pred, int n_pairs,
    int n_bins, RngSeed seed, PairMode mode);

}  // namespace spaceopt
