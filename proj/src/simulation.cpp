#include "claimwise/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "claimwise/error.hpp"
#include "claimwise/parallel.hpp"
#include "claimwise/text.hpp"

namespace claimwise::sim {

using nlohmann::json;

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Baseline: return "baseline";
    case Strategy::Decomposition: return "decomposition";
    case Strategy::DecompositionRanking: return "decomposition_ranking";
    case Strategy::DecompositionRankingLinking: return "decomposition_ranking_linking";
  }
  return "unknown";
}

Strategy strategy_from_string(std::string_view s) {
  for (Strategy k : kAllStrategies) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("unknown strategy '" + std::string(s) + "'");
}

std::vector<Strategy> parse_strategies(std::string_view list) {
  if (text::trim(list) == "all") return {std::begin(kAllStrategies), std::end(kAllStrategies)};
  std::vector<Strategy> out;
  for (const auto& name : text::split(list, ',')) {
    const auto s = strategy_from_string(text::trim(name));
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  if (out.empty()) throw ValidationError("no strategies given");
  return out;
}

std::string_view to_string(Aggregation a) { return a == Aggregation::Mean ? "mean" : "sum"; }

Aggregation aggregation_from_string(std::string_view s) {
  if (s == "mean") return Aggregation::Mean;
  if (s == "sum") return Aggregation::Sum;
  throw ValidationError("unknown aggregation '" + std::string(s) + "'");
}

namespace {

double parse_real(std::string_view s) {
  s = text::trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ValidationError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::vector<double> parse_beta_grid(std::string_view spec) {
  const auto parts = text::split(spec, ':');
  if (parts.size() == 1) return {parse_real(parts[0])};
  if (parts.size() != 3) throw ValidationError("beta grid must be lo:hi:step");
  const double lo = parse_real(parts[0]);
  const double hi = parse_real(parts[1]);
  const double step = parse_real(parts[2]);
  if (step <= 0.0 || hi < lo) throw ValidationError("beta grid needs step > 0 and hi >= lo");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return grid;
}

void SimulationConfig::validate() const {
  if (strategies.empty()) throw ValidationError("no strategies selected");
  if (betas.empty()) throw ValidationError("beta grid is empty");
  for (double b : betas) {
    if (!std::isfinite(b) || b < 0.0) throw ValidationError("betas must be finite and >= 0");
  }
  if (trials < 1) throw ValidationError("trials must be >= 1");
  for (double t : {relevance_threshold, link_similarity_threshold}) {
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("thresholds must lie in [0, 1]");
  }
}

std::vector<std::string> included_claims(const DecompositionResult& doc, Side side,
                                         Strategy strategy, const SimulationConfig& config) {
  std::set<std::string> linked;
  if (strategy == Strategy::DecompositionRankingLinking) {
    for (const auto& l : doc.links) {
      if (l.similarity >= config.link_similarity_threshold) {
        linked.insert(side == Side::A ? l.claim_a_id : l.claim_b_id);
      }
    }
  }
  std::vector<std::string> ids;
  for (const auto& c : doc.claims(side)) {
    bool take = false;
    switch (strategy) {
      case Strategy::Baseline: break;
      case Strategy::Decomposition: take = true; break;
      case Strategy::DecompositionRanking: take = c.relevance >= config.relevance_threshold; break;
      case Strategy::DecompositionRankingLinking:
        take = c.relevance >= config.relevance_threshold || linked.count(c.id) > 0;
        break;
    }
    if (take) ids.push_back(c.id);
  }
  return ids;
}

StrategyScore strategy_score(HelpfulnessJudge& judge, const ResponsePair& pair,
                             const DecompositionResult* doc, Strategy strategy,
                             const SimulationConfig& config) {
  StrategyScore out;
  out.pair_id = pair.pair_id;
  out.strategy = strategy;
  if (strategy == Strategy::Baseline) {
    out.s_a = judge.judge(pair.query, pair.response_a);
    out.s_b = judge.judge(pair.query, pair.response_b);
    return out;
  }
  if (!doc) throw ValidationError("strategy " + std::string(to_string(strategy)) +
                                  " needs a decomposition for " + pair.pair_id);
  for (Side side : {Side::A, Side::B}) {
    auto ids = included_claims(*doc, side, strategy, config);
    double total = 0.0;
    for (const auto& id : ids) total += judge.judge(pair.query, doc->find_claim(id)->text);
    double s = 0.5;
    if (!ids.empty()) {
      s = config.aggregation == Aggregation::Mean ? total / static_cast<double>(ids.size()) : total;
    }
    if (side == Side::A) {
      out.s_a = s;
      out.neutral_a = ids.empty();
      out.included_a = std::move(ids);
    } else {
      out.s_b = s;
      out.neutral_b = ids.empty();
      out.included_b = std::move(ids);
    }
  }
  return out;
}

double boltzmann_probability(double s_a, double s_b, double beta) {
  return 1.0 / (1.0 + std::exp(-beta * (s_a - s_b)));
}

CellStream::CellStream(std::uint64_t master_seed, std::string_view pair_id, Strategy strategy,
                       std::size_t beta_index)
    : key_(hash64(std::to_string(master_seed) + '\x1f' + std::string(pair_id) + '\x1f' +
                  std::string(to_string(strategy)) + '\x1f' + std::to_string(beta_index))) {}

SweepResult run_sweep(const std::vector<ResponsePair>& pairs,
                      const std::map<std::string, DecompositionResult>& decompositions,
                      HelpfulnessJudge& judge, const SimulationConfig& config) {
  config.validate();
  const auto n_strat = config.strategies.size();

  // Scores per (pair, strategy); empty reason means usable.
  struct Cell {
    StrategyScore score;
    std::string skip_reason;
  };
  std::vector<Cell> cells(pairs.size() * n_strat);
  parallel_for(pairs.size(), config.parallelism, [&](std::size_t p) {
    const auto& pair = pairs[p];
    auto it = decompositions.find(pair.pair_id);
    const DecompositionResult* doc = it == decompositions.end() ? nullptr : &it->second;
    for (std::size_t s = 0; s < n_strat; ++s) {
      auto& cell = cells[p * n_strat + s];
      const auto strategy = config.strategies[s];
      if (!pair.ground_truth) {
        cell.skip_reason = "no_ground_truth";
      } else if (strategy != Strategy::Baseline && !doc) {
        cell.skip_reason = "missing_decomposition";
      } else {
        try {
          cell.score = strategy_score(judge, pair, doc, strategy, config);
        } catch (const ProviderError& e) {
          cell.skip_reason = std::string("judge_error: ") + e.what();
        }
      }
    }
  });

  SweepResult result;
  for (std::size_t s = 0; s < n_strat; ++s) {
    const auto strategy = config.strategies[s];
    std::vector<std::size_t> usable;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto& cell = cells[p * n_strat + s];
      if (cell.skip_reason.empty()) {
        usable.push_back(p);
        result.scores.push_back(cell.score);
      } else {
        result.skipped.push_back({pairs[p].pair_id, strategy, cell.skip_reason});
      }
    }
    if (usable.empty()) {
      throw DataError("every instance was skipped for strategy " + std::string(to_string(strategy)));
    }
    for (std::size_t b = 0; b < config.betas.size(); ++b) {
      const double beta = config.betas[b];
      double analytic = 0.0;
      std::uint64_t correct_total = 0;
      for (std::size_t p : usable) {
        const auto& sc = cells[p * n_strat + s].score;
        const Side truth = *pairs[p].ground_truth;
        const double p_a = boltzmann_probability(sc.s_a, sc.s_b, beta);
        const double p_correct = truth == Side::A ? p_a : 1.0 - p_a;
        const CellStream stream(config.master_seed, pairs[p].pair_id, strategy, b);
        std::uint64_t correct = 0;
        for (int t = 0; t < config.trials; ++t) {
          if (sample_choice(p_a, stream.uniform(static_cast<std::uint64_t>(t))) == truth) ++correct;
        }
        analytic += p_correct;
        correct_total += correct;
        result.instances.push_back({pairs[p].pair_id, strategy, beta, sc.s_a, sc.s_b, p_correct,
                                    static_cast<double>(correct) / config.trials});
      }
      const double draws = static_cast<double>(usable.size()) * config.trials;
      const double sampled = static_cast<double>(correct_total) / draws;
      result.rows.push_back({strategy, beta, analytic / static_cast<double>(usable.size()), sampled,
                             config.trials, usable.size(),
                             1.96 * std::sqrt(sampled * (1.0 - sampled) / draws)});
    }
  }
  return result;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "strategy,beta,analytic_acc,sampled_acc,trials,ci\n";
  for (const auto& r : result.rows) {
    out << to_string(r.strategy) << ',' << fmt(r.beta) << ',' << fmt(r.analytic_accuracy) << ','
        << fmt(r.sampled_accuracy) << ',' << r.trials << ',' << fmt(r.ci_halfwidth) << '\n';
  }
}

void write_instances_csv(const std::string& path, const SweepResult& result) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "pair_id,strategy,beta,s_a,s_b,p_correct,sampled_correct\n";
  for (const auto& r : result.instances) {
    out << r.pair_id << ',' << to_string(r.strategy) << ',' << fmt(r.beta) << ',' << fmt(r.s_a)
        << ',' << fmt(r.s_b) << ',' << fmt(r.p_correct) << ',' << fmt(r.sampled_correct) << '\n';
  }
  for (const auto& s : result.skipped) {
    out << "# skipped " << s.pair_id << ' ' << to_string(s.strategy) << ": " << s.reason << '\n';
  }
}

json plot_data(const SweepResult& result) {
  json series = json::object();
  for (const auto& r : result.rows) {
    auto& entry = series[std::string(to_string(r.strategy))];
    entry["beta"].push_back(r.beta);
    entry["analytic"].push_back(r.analytic_accuracy);
    entry["sampled"].push_back(r.sampled_accuracy);
    entry["ci"].push_back(r.ci_halfwidth);
  }
  return json{{"title", "simulated annotator accuracy by beta"},
              {"x", "beta"},
              {"y", "accuracy"},
              {"strategies", series}};
}

}  // namespace claimwise::sim
