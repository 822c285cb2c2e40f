#include <gtest/gtest.h>

#include <cmath>

#include "claimwise/annotate.hpp"
#include "claimwise/error.hpp"
#include "support.hpp"

using namespace claimwise;
using namespace testing_support;
using nlohmann::json;

namespace {

Claim make_claim(const std::string& id, Side side, std::size_t rank, double relevance = 0.0,
                 std::string text = "") {
  Claim c;
  c.id = id;
  c.side = side;
  c.narrative_rank = rank;
  c.relevance = relevance;
  c.text = text.empty() ? id : std::move(text);
  return c;
}

double naive_cos(const std::vector<double>& x, const std::vector<double>& y) {
  double dot = 0, nx = 0, ny = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  return nx == 0 || ny == 0 ? 0.0 : dot / std::sqrt(nx * ny);
}

// Two A claims plus a zero-vector one; three B claims.
struct LinkFixture {
  std::vector<Claim> a{make_claim("a0", Side::A, 0), make_claim("a1", Side::A, 1),
                       make_claim("a2", Side::A, 2)};
  std::vector<Claim> b{make_claim("b0", Side::B, 0), make_claim("b1", Side::B, 1),
                       make_claim("b2", Side::B, 2)};
  std::vector<std::vector<double>> ea{{1, 0, 0}, {0, 1, 0}, {0, 0, 0}};
  std::vector<std::vector<double>> eb{
      {1, 1, 0}, {0.6999, std::sqrt(1 - 0.6999 * 0.6999), 0}, {0, 0, 1}};

  // Independent brute force over every cross pair.
  std::set<std::pair<std::string, std::string>> expected(double th) const {
    std::set<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        if (naive_cos(ea[i], eb[j]) >= th) out.insert({a[i].id, b[j].id});
    return out;
  }
};

std::set<std::pair<std::string, std::string>> as_set(const std::vector<Link>& links) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& l : links) out.insert({l.claim_a_id, l.claim_b_id});
  return out;
}

}  // namespace

TEST(Cosine, HandComputedValues) {
  const std::vector<double> x{1, 1}, y{1, 0}, z{0, 1}, zero{0, 0};
  EXPECT_NEAR(cosine_similarity(x, y), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(cosine_similarity(y, z), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(x, x), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(x, zero), 0.0);
}

TEST(Linking, BoundaryCasesAtDefaultThreshold) {
  LinkFixture f;
  const auto links = link_embeddings(f.a, f.ea, f.b, f.eb, 0.7);
  ASSERT_EQ(links.size(), 3u);
  // a1-b1 ~0.714, then the two 0.7071 ties ordered by A rank.
  EXPECT_EQ(links[0].claim_a_id, "a1");
  EXPECT_EQ(links[0].claim_b_id, "b1");
  EXPECT_EQ(links[1].claim_a_id, "a0");
  EXPECT_EQ(links[1].claim_b_id, "b0");
  EXPECT_NEAR(links[1].similarity, 0.70710678, 1e-8);
  EXPECT_EQ(links[2].claim_a_id, "a1");
  EXPECT_EQ(links[2].claim_b_id, "b0");
  EXPECT_EQ(as_set(links), f.expected(0.7));
  EXPECT_EQ(as_set(links).count({"a0", "b1"}), 0u);  // 0.6999
}

TEST(Linking, ThresholdAntiMonotone) {
  LinkFixture f;
  const auto l5 = as_set(link_embeddings(f.a, f.ea, f.b, f.eb, 0.5));
  const auto l7 = as_set(link_embeddings(f.a, f.ea, f.b, f.eb, 0.7));
  const auto l9 = as_set(link_embeddings(f.a, f.ea, f.b, f.eb, 0.9));
  EXPECT_EQ(l5, f.expected(0.5));
  EXPECT_EQ(l9, f.expected(0.9));
  EXPECT_TRUE(std::includes(l5.begin(), l5.end(), l7.begin(), l7.end()));
  EXPECT_TRUE(std::includes(l7.begin(), l7.end(), l9.begin(), l9.end()));
  EXPECT_GT(l5.size(), l7.size());
  EXPECT_GT(l7.size(), l9.size());
}

TEST(Linking, ThresholdMustBeInUnitInterval) {
  LinkFixture f;
  EXPECT_THROW(link_embeddings(f.a, f.ea, f.b, f.eb, 0.0), ValidationError);
  EXPECT_THROW(link_embeddings(f.a, f.ea, f.b, f.eb, 1.01), ValidationError);
  EXPECT_NO_THROW(link_embeddings(f.a, f.ea, f.b, f.eb, 1.0));
}

TEST(Linking, IdenticalVectorsLinkAtOne) {
  std::vector<Claim> a{make_claim("x", Side::A, 0)}, b{make_claim("y", Side::B, 0)};
  const auto links = link_embeddings(a, {{0.3, 0.4}}, b, {{0.3, 0.4}}, 1.0);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_DOUBLE_EQ(links[0].similarity, 1.0);
}

TEST(Linking, EmbedderZeroVectorIsFlagged) {
  LinkFixture f;
  std::map<std::string, std::vector<double>> table;
  for (std::size_t i = 0; i < 3; ++i) table[f.a[i].text] = f.ea[i];
  for (std::size_t i = 0; i < 3; ++i) table[f.b[i].text] = f.eb[i];
  auto embedder = fn_provider<Embedder>(ProviderKind::Embedder, [&](const ProviderRequest& r) {
    return json(table.at(r.fields.at("text").get<std::string>())).dump();
  });
  Provenance prov;
  const auto links = link_claims(*embedder, f.a, f.b, 0.7, prov);
  EXPECT_EQ(as_set(links), f.expected(0.7));
  ASSERT_EQ(prov.events.size(), 1u);
  EXPECT_EQ(prov.events[0].target, "a2");
  EXPECT_EQ(prov.events[0].reason, "zero_embedding");
}

TEST(Ranking, StubScoresAndKeepsOrder) {
  auto scorer = stub_provider<RelevanceScorer>(ProviderKind::RelevanceScorer);
  std::vector<Claim> claims{
      make_claim("c0", Side::A, 0, 0, "Tomatoes should be planted in spring"),
      make_claim("c1", Side::A, 1, 0, "When should I plant tomatoes?"),
      make_claim("c2", Side::A, 2, 0, "Cats purr")};
  Provenance prov;
  rank_claims(*scorer, "When should I plant tomatoes?", claims, prov);
  EXPECT_NEAR(claims[0].relevance, 1.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(claims[1].relevance, 1.0);
  EXPECT_DOUBLE_EQ(claims[2].relevance, 0.0);
  EXPECT_EQ(claims[2].id, "c2");
  EXPECT_TRUE(prov.events.empty());
}

TEST(Ranking, ScorerFailureIsNeutral) {
  auto scorer = fn_provider<RelevanceScorer>(ProviderKind::RelevanceScorer,
                                             [](const ProviderRequest& r) -> std::string {
                                               if (r.fields.at("text") == "bad")
                                                 throw ProviderUnavailable("down");
                                               return "0.9";
                                             });
  std::vector<Claim> claims{make_claim("c0", Side::A, 0, 0, "good"),
                            make_claim("c1", Side::A, 1, 0, "bad")};
  Provenance prov;
  rank_claims(*scorer, "q", claims, prov);
  EXPECT_DOUBLE_EQ(claims[0].relevance, 0.9);
  EXPECT_DOUBLE_EQ(claims[1].relevance, 0.5);
  ASSERT_EQ(prov.events.size(), 1u);
  EXPECT_EQ(prov.events[0].target, "c1");
}

TEST(Ranking, BlankQueryRejected) {
  auto scorer = stub_provider<RelevanceScorer>(ProviderKind::RelevanceScorer);
  std::vector<Claim> claims{make_claim("c0", Side::A, 0)};
  Provenance prov;
  EXPECT_THROW(rank_claims(*scorer, " ", claims, prov), ValidationError);
}

TEST(Labeling, SummarizerKeywordsAndGroups) {
  DecompositionResult doc;
  doc.claims_a = {make_claim("a0", Side::A, 0, 0.9, "Plant tomatoes in spring"),
                  make_claim("a1", Side::A, 1, 0.5, "Spring frost hurts seedlings"),
                  make_claim("a2", Side::A, 2, 0.1, "Loose soil drains well")};
  doc.claims_b = {make_claim("b0", Side::B, 0, 0.4, "Wait for spring warmth"),
                  make_claim("b1", Side::B, 1, 0.4, "Add compost to soil")};
  doc.links = {{"a0", "b0", 0.9, ""}, {"a1", "b0", 0.8, ""}, {"a2", "b1", 0.75, ""}};
  auto summarizer = fn_provider<KeywordSummarizer>(
      ProviderKind::KeywordSummarizer, [](const ProviderRequest& r) {
        const auto c1 = r.fields.at("claim1").get<std::string>();
        return std::string(c1.find("oil") != std::string::npos ? "\"Soil.\"" : "Spring");
      });
  Provenance prov;
  label_links(*summarizer, "When should I plant tomatoes?", doc.links, doc, prov);
  EXPECT_EQ(doc.links[0].keyword, "Spring");
  EXPECT_EQ(doc.links[1].keyword, "Spring");
  EXPECT_EQ(doc.links[2].keyword, "Soil");

  const auto model = build_presentation(doc.claims_a, doc.claims_b, doc.links, OrderMode::Narrative);
  ASSERT_EQ(model.groups.size(), 2u);
  EXPECT_EQ(model.groups.at("spring").links.size(), 2u);
  EXPECT_EQ(model.groups.at("spring").label, "Spring");
  EXPECT_EQ(model.groups.at("soil").links.size(), 1u);
  const auto j = to_json(model);
  EXPECT_EQ(j.at("groups").at("spring").at("count"), 2);
}

TEST(Labeling, FallbackUsesSharedToken) {
  DecompositionResult doc;
  doc.claims_a = {make_claim("a0", Side::A, 0, 0, "He wrote two films")};
  doc.claims_b = {make_claim("b0", Side::B, 0, 0, "He wrote two short films")};
  doc.links = {{"a0", "b0", 0.9, ""}};
  auto summarizer = fn_provider<KeywordSummarizer>(
      ProviderKind::KeywordSummarizer,
      [](const ProviderRequest&) -> std::string { throw ProviderUnavailable("down"); });
  Provenance prov;
  label_links(*summarizer, "q", doc.links, doc, prov);
  EXPECT_EQ(doc.links[0].keyword, "films");
  EXPECT_EQ(prov.events.size(), 1u);
}

TEST(Labeling, LongKeywordTruncated) {
  EXPECT_EQ(truncate_keyword("one two three four five six seven"), "one two three four five");
  EXPECT_EQ(keyword_key("Spring"), "spring");
}

TEST(Presentation, OpacityMap) {
  EXPECT_NEAR(opacity_for(0.9), 0.935, 1e-12);
  EXPECT_NEAR(opacity_for(0.5), 0.675, 1e-12);
  EXPECT_NEAR(opacity_for(0.1), 0.415, 1e-12);
  EXPECT_DOUBLE_EQ(opacity_for(-1), 0.35);
  EXPECT_DOUBLE_EQ(opacity_for(2), 1.0);
}

TEST(Presentation, RelevanceOrderIsStable) {
  std::vector<Claim> claims{make_claim("c0", Side::A, 0, 0.2), make_claim("c1", Side::A, 1, 0.8),
                            make_claim("c2", Side::A, 2, 0.2), make_claim("c3", Side::A, 3, 0.9)};
  EXPECT_EQ(display_order(claims, OrderMode::Relevance), (std::vector<std::size_t>{3, 1, 0, 2}));
  EXPECT_EQ(display_order(claims, OrderMode::Narrative), (std::vector<std::size_t>{0, 1, 2, 3}));
  for (auto& c : claims) c.relevance = 0.5;
  EXPECT_EQ(display_order(claims, OrderMode::Relevance), (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Presentation, ModelCarriesOrderAndOpacity) {
  std::vector<Claim> a{make_claim("a0", Side::A, 0, 0.1), make_claim("a1", Side::A, 1, 0.9)};
  std::vector<Claim> b{make_claim("b0", Side::B, 0, 0.5)};
  const auto m = build_presentation(a, b, {}, OrderMode::Relevance);
  EXPECT_EQ(m.order_a, (std::vector<std::string>{"a1", "a0"}));
  EXPECT_EQ(m.order_b, (std::vector<std::string>{"b0"}));
  EXPECT_NEAR(m.opacity.at("a1"), 0.935, 1e-12);
  EXPECT_TRUE(m.groups.empty());
}
