#include <gtest/gtest.h>

#include <cmath>

#include "claimwise/error.hpp"
#include "claimwise/simulation.hpp"
#include "claimwise/synthetic.hpp"
#include "support.hpp"

using namespace claimwise;
using namespace claimwise::sim;
using namespace testing_support;

namespace {

Claim claim(const std::string& id, Side side, std::size_t rank, double relevance) {
  Claim c;
  c.id = id;
  c.side = side;
  c.narrative_rank = rank;
  c.relevance = relevance;
  c.text = "text of " + id;
  return c;
}

std::unique_ptr<HelpfulnessJudge> table_judge(std::map<std::string, double> scores) {
  return fn_provider<HelpfulnessJudge>(ProviderKind::HelpfulnessJudge,
                                       [scores](const ProviderRequest& r) {
                                         return nlohmann::json(scores.at(r.fields.at("claim")))
                                             .dump();
                                       });
}

// Side A: judge [0.9, 0.5, 0.1] with relevance [0.9, 0.5, 0.1], plus a
// low-relevance claim (0.2, judge 0.4) linked at 0.8. Side B: one claim.
struct StrategyFixture {
  ResponsePair pair;
  DecompositionResult doc;
  std::map<std::string, double> scores;

  explicit StrategyFixture(bool with_linked_claim) {
    pair.pair_id = "fx";
    pair.query = "Human: q";
    pair.response_a = "full A";
    pair.response_b = "full B";
    pair.ground_truth = Side::A;
    doc.pair_id = "fx";
    doc.claims_a = {claim("a0", Side::A, 0, 0.9), claim("a1", Side::A, 1, 0.5),
                    claim("a2", Side::A, 2, 0.1)};
    doc.claims_b = {claim("b0", Side::B, 0, 0.6)};
    scores = {{"text of a0", 0.9}, {"text of a1", 0.5}, {"text of a2", 0.1},
              {"text of b0", 0.3}, {"full A", 0.8},     {"full B", 0.2}};
    if (with_linked_claim) {
      doc.claims_a.push_back(claim("a3", Side::A, 3, 0.2));
      scores["text of a3"] = 0.4;
      doc.links.push_back({"a3", "b0", 0.8, "k"});
      doc.links.push_back({"a2", "b0", 0.65, "k"});  // below the link threshold
    }
  }
};

}  // namespace

TEST(Boltzmann, ClosedForms) {
  EXPECT_EQ(boltzmann_probability(0.9, 0.1, 0.0), 0.5);
  EXPECT_EQ(boltzmann_probability(0.4, 0.4, 7.0), 0.5);
  EXPECT_NEAR(boltzmann_probability(1.0, 0.0, std::log(3.0)), 0.75, 1e-12);
}

TEST(Boltzmann, ComplementAndShift) {
  SplitMix64 rng(123);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(), b = rng.uniform(), beta = rng.uniform(0, 10);
    const double c = rng.uniform(-5, 5);
    const double p = boltzmann_probability(a, b, beta);
    EXPECT_NEAR(p + boltzmann_probability(b, a, beta), 1.0, 1e-12);
    EXPECT_NEAR(boltzmann_probability(a + c, b + c, beta), p, 1e-12);
    // Exponential form as an independent check.
    EXPECT_NEAR(p, std::exp(beta * a) / (std::exp(beta * a) + std::exp(beta * b)), 1e-12);
  }
}

TEST(SampleChoice, DegenerateAndFair) {
  CellStream stream(1, "p", Strategy::Baseline, 0);
  std::size_t a = 0;
  for (std::uint64_t t = 0; t < 100000; ++t) {
    const double u = stream.uniform(t);
    EXPECT_EQ(sample_choice(1.0, u), Side::A);
    EXPECT_EQ(sample_choice(0.0, u), Side::B);
    a += sample_choice(0.5, u) == Side::A;
  }
  EXPECT_NEAR(static_cast<double>(a) / 100000.0, 0.5, 0.005);
}

TEST(CellStream, PureFunctionOfCell) {
  CellStream x(7, "pair", Strategy::Decomposition, 3), y(7, "pair", Strategy::Decomposition, 3);
  CellStream z(7, "pair", Strategy::Decomposition, 4);
  EXPECT_EQ(x.uniform(99), y.uniform(99));
  EXPECT_NE(x.uniform(99), z.uniform(99));
}

TEST(BetaGrid, Parsing) {
  const auto g = parse_beta_grid("0:10:0.5");
  ASSERT_EQ(g.size(), 21u);
  EXPECT_DOUBLE_EQ(g.front(), 0.0);
  EXPECT_DOUBLE_EQ(g[3], 1.5);
  EXPECT_DOUBLE_EQ(g.back(), 10.0);
  EXPECT_EQ(parse_beta_grid("0:1:0.1").size(), 11u);
  EXPECT_EQ(parse_beta_grid("2.5"), std::vector<double>{2.5});
  EXPECT_THROW(parse_beta_grid("0:1"), ValidationError);
  EXPECT_THROW(parse_beta_grid("0:1:0"), ValidationError);
  EXPECT_THROW(parse_beta_grid("x:1:0.1"), ValidationError);
}

TEST(Strategies, Parsing) {
  EXPECT_EQ(parse_strategies("all").size(), 4u);
  EXPECT_EQ(parse_strategies("baseline, decomposition"),
            (std::vector<Strategy>{Strategy::Baseline, Strategy::Decomposition}));
  EXPECT_THROW(parse_strategies("baseline,nope"), ValidationError);
}

TEST(StrategyScore, WorkedAggregates) {
  StrategyFixture f(false);
  auto judge = table_judge(f.scores);
  SimulationConfig cfg;
  EXPECT_NEAR(strategy_score(*judge, f.pair, &f.doc, Strategy::Decomposition, cfg).s_a, 0.5, 1e-12);
  EXPECT_NEAR(strategy_score(*judge, f.pair, &f.doc, Strategy::DecompositionRanking, cfg).s_a, 0.7,
              1e-12);
  const auto base = strategy_score(*judge, f.pair, nullptr, Strategy::Baseline, cfg);
  EXPECT_DOUBLE_EQ(base.s_a, 0.8);
  EXPECT_DOUBLE_EQ(base.s_b, 0.2);
  cfg.aggregation = Aggregation::Sum;
  EXPECT_NEAR(strategy_score(*judge, f.pair, &f.doc, Strategy::Decomposition, cfg).s_a, 1.5, 1e-12);
}

TEST(StrategyScore, LinkUnionWithoutDoubleCounting) {
  StrategyFixture f(true);
  auto judge = table_judge(f.scores);
  SimulationConfig cfg;
  const auto s = strategy_score(*judge, f.pair, &f.doc, Strategy::DecompositionRankingLinking, cfg);
  EXPECT_NEAR(s.s_a, 0.6, 1e-12);
  EXPECT_EQ(s.included_a, (std::vector<std::string>{"a0", "a1", "a3"}));
  EXPECT_EQ(s.included_b, (std::vector<std::string>{"b0"}));
}

TEST(StrategyScore, EmptySetIsNeutral) {
  StrategyFixture f(false);
  for (auto& c : f.doc.claims_b) c.relevance = 0.0;
  auto judge = table_judge(f.scores);
  SimulationConfig cfg;
  const auto s = strategy_score(*judge, f.pair, &f.doc, Strategy::DecompositionRanking, cfg);
  EXPECT_DOUBLE_EQ(s.s_b, 0.5);
  EXPECT_TRUE(s.neutral_b);
  EXPECT_FALSE(s.neutral_a);
}

TEST(Sweep, BetaZeroAndMonotone) {
  SyntheticSpec spec;
  spec.instances = 8;
  auto world = generate_world(spec);
  ProviderConfig pc;
  pc.kind = ProviderKind::HelpfulnessJudge;
  pc.backend = BackendKind::Replay;
  auto judge = make_provider<HelpfulnessJudge>(pc, world.judge_transcript);
  std::map<std::string, DecompositionResult> docs;
  for (const auto& d : world.decompositions) docs[d.pair_id] = d;
  SimulationConfig cfg;
  cfg.betas = parse_beta_grid("0:10:0.5");
  cfg.trials = 50;
  const auto r = run_sweep(world.pairs, docs, *judge, cfg);
  ASSERT_EQ(r.rows.size(), 4u * 21u);
  for (const auto& row : r.rows) {
    if (row.beta == 0.0) EXPECT_EQ(row.analytic_accuracy, 0.5);
    EXPECT_EQ(row.instances, 8u);
  }
  std::map<std::pair<std::string, Strategy>, std::vector<const InstanceRow*>> series;
  for (const auto& i : r.instances) series[{i.pair_id, i.strategy}].push_back(&i);
  for (const auto& [key, rows] : series) {
    ASSERT_EQ(rows.size(), 21u);
    if (rows[0]->s_a == rows[0]->s_b) continue;
    const bool truth_ahead = rows[0]->p_correct <= rows[1]->p_correct;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (truth_ahead) {
        EXPECT_GT(rows[k]->p_correct, rows[k - 1]->p_correct);
      } else {
        EXPECT_LT(rows[k]->p_correct, rows[k - 1]->p_correct);
      }
    }
  }
}

TEST(Sweep, DeterministicFiles) {
  SyntheticSpec spec;
  spec.instances = 5;
  auto world = generate_world(spec);
  std::map<std::string, DecompositionResult> docs;
  for (const auto& d : world.decompositions) docs[d.pair_id] = d;
  ProviderConfig pc;
  pc.kind = ProviderKind::HelpfulnessJudge;
  pc.backend = BackendKind::Replay;
  SimulationConfig cfg;
  cfg.betas = parse_beta_grid("0:2:1");
  cfg.trials = 200;
  TempDir dir;
  for (const char* name : {"a.csv", "b.csv"}) {
    auto judge = make_provider<HelpfulnessJudge>(pc, world.judge_transcript);
    write_sweep_csv(dir / name, run_sweep(world.pairs, docs, *judge, cfg));
  }
  EXPECT_EQ(read_file(dir / "a.csv"), read_file(dir / "b.csv"));
  EXPECT_EQ(read_file(dir / "a.csv").substr(0, 44), "strategy,beta,analytic_acc,sampled_acc,trial");
}

TEST(Sweep, SkipsAndFailures) {
  StrategyFixture f(false);
  auto judge = table_judge(f.scores);
  ResponsePair unlabeled = f.pair;
  unlabeled.pair_id = "nolabel";
  unlabeled.ground_truth.reset();
  std::map<std::string, DecompositionResult> docs{{"fx", f.doc}};
  SimulationConfig cfg;
  cfg.betas = {1.0};
  cfg.trials = 10;
  const auto r = run_sweep({f.pair, unlabeled}, docs, *judge, cfg);
  EXPECT_EQ(r.rows.front().instances, 1u);
  EXPECT_EQ(r.skipped.size(), 4u);
  EXPECT_EQ(r.skipped.front().reason, "no_ground_truth");
  EXPECT_THROW(run_sweep({unlabeled}, docs, *judge, cfg), DataError);
}

TEST(Sweep, UnparseableJudgeSkipsInstance) {
  StrategyFixture f(false);
  auto judge = fn_provider<HelpfulnessJudge>(ProviderKind::HelpfulnessJudge,
                                             [](const ProviderRequest&) { return "great"; });
  SimulationConfig cfg;
  cfg.betas = {1.0};
  cfg.strategies = {Strategy::Baseline};
  EXPECT_THROW(run_sweep({f.pair}, {}, *judge, cfg), DataError);
}

TEST(Synthetic, WorldIsReproducibleAndConsistent) {
  SyntheticSpec spec;
  spec.instances = 6;
  spec.seed = 9;
  const auto a = generate_world(spec);
  const auto b = generate_world(spec);
  ASSERT_EQ(a.pairs.size(), 6u);
  EXPECT_EQ(a.judge_transcript->to_json(), b.judge_transcript->to_json());
  for (const auto& doc : a.decompositions) {
    EXPECT_NO_THROW(validate(doc));
    for (Side s : {Side::A, Side::B}) {
      EXPECT_GE(doc.claims(s).size(), spec.min_claims);
      EXPECT_LE(doc.claims(s).size(), spec.max_claims);
    }
  }
}
