#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include <httplib.h>

#include "claimwise/error.hpp"
#include "claimwise/providers.hpp"
#include "support.hpp"

using namespace claimwise;
using namespace testing_support;
using nlohmann::json;

TEST(ClaimLines, ParsesPrefixedLines) {
  EXPECT_EQ(parse_claim_lines("Claim: driver needs to be paying attention\n"
                              "Claim: driver must be able to see clearly"),
            (std::vector<std::string>{"driver needs to be paying attention",
                                      "driver must be able to see clearly"}));
  EXPECT_EQ(parse_claim_lines("  Claim:   spaced out  \nnoise\nClaim:\n"),
            (std::vector<std::string>{"spaced out"}));
  EXPECT_TRUE(parse_claim_lines("nothing here").empty());
}

TEST(ClaimExtractor, NoClaimLinesIsEmptyResult) {
  auto ex = fn_provider<ClaimExtractor>(ProviderKind::ClaimExtractor,
                                        [](const ProviderRequest&) { return "I cannot."; });
  EXPECT_THROW(ex->extract("A sentence.", ""), EmptyResult);
}

TEST(ClaimExtractor, ReplaysWorkedExample) {
  ProviderConfig c;
  c.backend = BackendKind::Replay;
  auto ex = make_provider<ClaimExtractor>(c, worked_example_transcript());
  EXPECT_EQ(ex->extract(kActorSentence, "ctx"),
            (std::vector<std::string>{"He has acting roles", "He has written two short films",
                                      "He has directed two short films",
                                      "He is currently in development on his feature debut"}));
  EXPECT_EQ(ex->extract(kDoughSentence, ""),
            (std::vector<std::string>{"You can then add water",
                                      "You can mix everything until you have a firm dough"}));
  EXPECT_THROW(ex->extract("Unrecorded sentence.", ""), ProviderUnavailable);
}

TEST(ClaimExtractor, StubPassesSingleClauseThrough) {
  auto ex = stub_provider<ClaimExtractor>(ProviderKind::ClaimExtractor);
  EXPECT_EQ(ex->extract("The sky is blue.", ""), (std::vector<std::string>{"The sky is blue."}));
  EXPECT_EQ(ex->extract("Water boils, and ice melts; steam rises.", ""),
            (std::vector<std::string>{"Water boils", "ice melts", "steam rises."}));
}

TEST(JudgeParse, FirstUnitNumber) {
  EXPECT_DOUBLE_EQ(parse_unit_score("0.85"), 0.85);
  EXPECT_DOUBLE_EQ(parse_unit_score("Score: 1"), 1.0);
  EXPECT_DOUBLE_EQ(parse_unit_score("1.0000000001"), 1.0);
  EXPECT_DOUBLE_EQ(parse_unit_score("I'd say .3 overall"), 0.3);
  EXPECT_THROW(parse_unit_score("very helpful"), JudgeParseError);
  EXPECT_THROW(parse_unit_score("7"), JudgeParseError);
}

TEST(Judge, CachesByQueryAndText) {
  int calls = 0;
  auto judge = fn_provider<HelpfulnessJudge>(ProviderKind::HelpfulnessJudge,
                                             [&](const ProviderRequest&) {
                                               ++calls;
                                               return std::string("0.4");
                                             });
  EXPECT_DOUBLE_EQ(judge->judge("q", "t"), 0.4);
  EXPECT_DOUBLE_EQ(judge->judge("q", "t"), 0.4);
  EXPECT_DOUBLE_EQ(judge->judge("q", "u"), 0.4);
  EXPECT_EQ(calls, 2);
}

TEST(Relevance, StubTokenOverlap) {
  auto scorer = stub_provider<RelevanceScorer>(ProviderKind::RelevanceScorer);
  EXPECT_NEAR(scorer->score("When should I plant tomatoes?", "Tomatoes should be planted in spring"),
              2.0 / 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(scorer->score("When should I plant tomatoes?", "When should I plant tomatoes?"), 1.0);
  EXPECT_DOUBLE_EQ(scorer->score("When should I plant tomatoes?", "Cats purr loudly"), 0.0);
}

TEST(Relevance, OutOfRangeIsClamped) {
  auto scorer = fn_provider<RelevanceScorer>(ProviderKind::RelevanceScorer,
                                             [](const ProviderRequest&) { return "1.7"; });
  EXPECT_DOUBLE_EQ(scorer->score("q", "c"), 1.0);
}

TEST(Embedder, StubIsDeterministicAndUnitNorm) {
  auto e = stub_provider<Embedder>(ProviderKind::Embedder);
  const auto a = e->embed("Tomatoes grow in spring");
  EXPECT_EQ(a, e->embed("Tomatoes grow in spring"));
  ASSERT_EQ(a.size(), 64u);
  double norm = 0;
  for (double x : a) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  const auto zero = e->embed("   ");
  EXPECT_TRUE(std::all_of(zero.begin(), zero.end(), [](double x) { return x == 0.0; }));
}

TEST(Embedder, StubDisjointTokensAreOrthogonal) {
  auto e = stub_provider<Embedder>(ProviderKind::Embedder);
  const auto a = e->embed("alpha beta");
  const auto b = e->embed("gamma delta");
  // Bucket sets are disjoint for this vocabulary under seed 0.
  double dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  EXPECT_DOUBLE_EQ(dot, 0.0);
}

TEST(Transcript, KeyIsSha256OfKindAndPrompt) {
  ProviderRequest req{ProviderKind::RelevanceScorer, R"({"query":"q","text":"t"})", {}};
  EXPECT_EQ(transcript_key(req), "5e8ddc5d5fafe4a07b03663406dd95cd5961747e355522eebe71056de9b06ac0");
}

TEST(Transcript, SaveLoadRoundTrip) {
  TempDir dir;
  Transcript t;
  t.put("k1", "v1");
  t.put("k2", "Claim: x\n");
  t.save(dir / "t.json");
  auto loaded = Transcript::load(dir / "t.json");
  EXPECT_EQ(loaded->size(), 2u);
  EXPECT_EQ(*loaded->find("k2"), "Claim: x\n");
  EXPECT_FALSE(loaded->find("k3"));
}

TEST(Transcript, RecordingCapturesCompletions) {
  auto sink = std::make_shared<Transcript>();
  ProviderConfig c;
  c.kind = ProviderKind::KeywordSummarizer;
  auto s = make_provider<KeywordSummarizer>(c, nullptr, sink);
  EXPECT_EQ(s->summarize("q", "He wrote two films", "He wrote two short films"), "films");
  EXPECT_EQ(sink->size(), 1u);

  ProviderConfig r = c;
  r.backend = BackendKind::Replay;
  auto replay = make_provider<KeywordSummarizer>(r, sink);
  EXPECT_EQ(replay->summarize("q", "He wrote two films", "He wrote two short films"), "films");
}

TEST(Prompts, FilesMatchEmbeddedDefaults) {
  const std::string dir = CLAIMWISE_PROMPTS_DIR;
  EXPECT_EQ(read_file(dir + "/extract_claims.txt"), default_prompt(ProviderKind::ClaimExtractor));
  EXPECT_EQ(read_file(dir + "/summarize_keyword.txt"), default_prompt(ProviderKind::KeywordSummarizer));
  EXPECT_EQ(read_file(dir + "/judge_helpfulness.txt"), default_prompt(ProviderKind::HelpfulnessJudge));
}

TEST(Prompts, JudgeRequestRendersQueryAndClaim) {
  const auto req = make_judge_request("Q={query} C={claim}", "why?", "because");
  EXPECT_EQ(req.prompt, "Q=why? C=because");
  EXPECT_EQ(req.kind, ProviderKind::HelpfulnessJudge);
}

namespace {

struct MockServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~MockServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port) + path;
  }
};

}  // namespace

TEST(Remote, ChatCompletionRetriesTransientFailures) {
  MockServer mock;
  std::atomic<int> hits{0};
  json last_body;
  std::mutex m;
  mock.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    if (hits++ < 2) {
      res.status = 503;
      return;
    }
    {
      std::lock_guard lock(m);
      last_body = json::parse(req.body);
    }
    EXPECT_EQ(req.get_header_value("Authorization"), "Bearer secret");
    res.set_content(json{{"choices", {{{"message", {{"content", "0.85"}}}}}}}.dump(),
                    "application/json");
  });
  mock.start();

  ProviderConfig c;
  c.kind = ProviderKind::HelpfulnessJudge;
  c.backend = BackendKind::RemoteLlm;
  c.endpoint = mock.url("/v1/chat/completions");
  c.model = "test-model";
  c.api_key = "secret";
  c.retry_budget = 2;
  auto judge = make_provider<HelpfulnessJudge>(c);
  EXPECT_DOUBLE_EQ(judge->judge("Human: hi", "Hello"), 0.85);
  EXPECT_EQ(hits.load(), 3);
  EXPECT_EQ(last_body.at("model"), "test-model");
  EXPECT_EQ(last_body.at("temperature"), 0);
  EXPECT_EQ(last_body.at("messages").at(0).at("content"),
            make_judge_request(default_prompt(ProviderKind::HelpfulnessJudge), "Human: hi", "Hello")
                .prompt);
}

TEST(Remote, RetryBudgetExhaustedIsUnavailable) {
  MockServer mock;
  std::atomic<int> hits{0};
  mock.server.Post("/chat", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
  });
  mock.start();
  ProviderConfig c;
  c.kind = ProviderKind::ClaimExtractor;
  c.backend = BackendKind::RemoteLlm;
  c.endpoint = mock.url("/chat");
  c.retry_budget = 1;
  auto ex = make_provider<ClaimExtractor>(c);
  EXPECT_THROW(ex->extract("Some sentence.", ""), ProviderUnavailable);
  EXPECT_EQ(hits.load(), 2);
}

TEST(Remote, ClientErrorIsNotRetried) {
  MockServer mock;
  std::atomic<int> hits{0};
  mock.server.Post("/chat", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 401;
  });
  mock.start();
  ProviderConfig c;
  c.kind = ProviderKind::ClaimExtractor;
  c.backend = BackendKind::RemoteLlm;
  c.endpoint = mock.url("/chat");
  auto ex = make_provider<ClaimExtractor>(c);
  EXPECT_THROW(ex->extract("Some sentence.", ""), ProviderUnavailable);
  EXPECT_EQ(hits.load(), 1);
}

TEST(Remote, EmbeddingAndRerankShapes) {
  MockServer mock;
  mock.server.Post("/embeddings", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    EXPECT_EQ(body.at("input"), "hello");
    res.set_content(json{{"data", {{{"embedding", {3.0, 4.0}}}}}}.dump(), "application/json");
  });
  mock.server.Post("/rerank", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    EXPECT_EQ(body.at("texts").at(0), "claim");
    res.set_content(json{{"results", {{{"index", 0}, {"relevance_score", 0.25}}}}}.dump(),
                    "application/json");
  });
  mock.start();

  ProviderConfig e;
  e.kind = ProviderKind::Embedder;
  e.backend = BackendKind::RemoteEmbedding;
  e.endpoint = mock.url("/embeddings");
  auto embedder = make_provider<Embedder>(e);
  const auto v = embedder->embed("hello");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_NEAR(v[0], 0.6, 1e-12);
  EXPECT_NEAR(v[1], 0.8, 1e-12);

  ProviderConfig r;
  r.kind = ProviderKind::RelevanceScorer;
  r.backend = BackendKind::RemoteEmbedding;
  r.endpoint = mock.url("/rerank");
  auto scorer = make_provider<RelevanceScorer>(r);
  EXPECT_DOUBLE_EQ(scorer->score("query", "claim"), 0.25);
}

TEST(Remote, UnreachableEndpointIsUnavailable) {
  ProviderConfig c;
  c.kind = ProviderKind::HelpfulnessJudge;
  c.backend = BackendKind::RemoteLlm;
  c.endpoint = "http://127.0.0.1:1/chat";
  c.retry_budget = 0;
  auto judge = make_provider<HelpfulnessJudge>(c);
  EXPECT_THROW(judge->judge("q", "t"), ProviderUnavailable);
}

TEST(Remote, MissingEndpointFailsFast) {
  ProviderConfig c;
  c.backend = BackendKind::RemoteLlm;
  EXPECT_THROW(make_provider<ClaimExtractor>(c), ProviderUnavailable);
}
