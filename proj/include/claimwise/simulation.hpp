#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "claimwise/dataset.hpp"
#include "claimwise/document.hpp"
#include "claimwise/hash.hpp"
#include "claimwise/providers.hpp"

namespace claimwise::sim {

enum class Strategy {
  Baseline,
  Decomposition,
  DecompositionRanking,
  DecompositionRankingLinking,
};

inline constexpr Strategy kAllStrategies[] = {
    Strategy::Baseline, Strategy::Decomposition, Strategy::DecompositionRanking,
    Strategy::DecompositionRankingLinking};

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);
/// Comma-separated names, or "all". Throws ValidationError on unknown names.
std::vector<Strategy> parse_strategies(std::string_view list);

enum class Aggregation { Mean, Sum };

std::string_view to_string(Aggregation a);
Aggregation aggregation_from_string(std::string_view s);

/// "lo:hi:step" inclusive grid; "0:10:0.5" has 21 points. A single number
/// is a one-point grid.
std::vector<double> parse_beta_grid(std::string_view spec);

struct SimulationConfig {
  std::vector<Strategy> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  std::vector<double> betas;
  int trials = 1000;
  double relevance_threshold = 0.3;
  double link_similarity_threshold = 0.7;
  Aggregation aggregation = Aggregation::Mean;
  std::uint64_t master_seed = 42;
  int parallelism = 4;

  void validate() const;
};

struct StrategyScore {
  std::string pair_id;
  Strategy strategy = Strategy::Baseline;
  double s_a = 0.5;
  double s_b = 0.5;
  std::vector<std::string> included_a;
  std::vector<std::string> included_b;
  bool neutral_a = false;  // empty included set, scored 0.5
  bool neutral_b = false;
};

/// Ids of the claims a strategy scores on one side. Baseline scores the full
/// text and includes no claims.
std::vector<std::string> included_claims(const DecompositionResult& doc, Side side,
                                         Strategy strategy, const SimulationConfig& config);

/// Scores both responses under `strategy`. `doc` may be null for Baseline.
/// Throws JudgeParseError from the judge and ValidationError when a
/// decomposition strategy has no document.
StrategyScore strategy_score(HelpfulnessJudge& judge, const ResponsePair& pair,
                             const DecompositionResult* doc, Strategy strategy,
                             const SimulationConfig& config);

/// P(A preferred) = exp(b*sa) / (exp(b*sa) + exp(b*sb)), evaluated as
/// 1 / (1 + exp(-b * (sa - sb))).
double boltzmann_probability(double s_a, double s_b, double beta);

/// Counter-based random stream for one (pair, strategy, beta) cell; trial t
/// draws are a pure function of the cell key and t.
class CellStream {
 public:
  CellStream(std::uint64_t master_seed, std::string_view pair_id, Strategy strategy,
             std::size_t beta_index);
  double uniform(std::uint64_t trial) const { return unit_interval(mix64(key_ ^ mix64(trial))); }

 private:
  std::uint64_t key_;
};

/// A with probability p_a, using draw `u` in [0, 1).
inline Side sample_choice(double p_a, double u) { return u < p_a ? Side::A : Side::B; }

struct SweepRow {
  Strategy strategy;
  double beta;
  double analytic_accuracy;
  double sampled_accuracy;
  int trials;          // per instance
  std::size_t instances;
  double ci_halfwidth;  // 95% normal approximation over instances * trials draws
};

struct InstanceRow {
  std::string pair_id;
  Strategy strategy;
  double beta;
  double s_a;
  double s_b;
  double p_correct;
  double sampled_correct;
};

struct SkippedInstance {
  std::string pair_id;
  Strategy strategy;
  std::string reason;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // strategy-major, betas in grid order
  std::vector<InstanceRow> instances;
  std::vector<SkippedInstance> skipped;
  std::vector<StrategyScore> scores;
};

/// Runs every (strategy, beta) cell over the pairs. Instances without a
/// ground truth, without a decomposition, or whose judge output fails to
/// parse are skipped for that strategy. Throws DataError if a strategy has
/// no usable instance.
SweepResult run_sweep(const std::vector<ResponsePair>& pairs,
                      const std::map<std::string, DecompositionResult>& decompositions,
                      HelpfulnessJudge& judge, const SimulationConfig& config);

void write_sweep_csv(const std::string& path, const SweepResult& result);
void write_instances_csv(const std::string& path, const SweepResult& result);
/// {"strategies": {name: {"beta": [...], "analytic": [...], "sampled": [...]}}}
nlohmann::json plot_data(const SweepResult& result);

}  // namespace claimwise::sim
