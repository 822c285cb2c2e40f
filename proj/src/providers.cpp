#include "claimwise/providers.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "claimwise/error.hpp"
#include "claimwise/hash.hpp"
#include "claimwise/text.hpp"
#include "prompts.hpp"

namespace claimwise {

using nlohmann::json;

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::ClaimExtractor: return "claim-extractor";
    case ProviderKind::RelevanceScorer: return "relevance-scorer";
    case ProviderKind::Embedder: return "embedder";
    case ProviderKind::KeywordSummarizer: return "keyword-summarizer";
    case ProviderKind::HelpfulnessJudge: return "helpfulness-judge";
  }
  return "unknown";
}

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::RemoteLlm: return "remote-llm";
    case BackendKind::RemoteEmbedding: return "remote-embedding";
    case BackendKind::Stub: return "stub";
    case BackendKind::Replay: return "replay";
  }
  return "unknown";
}

BackendKind backend_from_string(std::string_view s) {
  if (s == "remote-llm") return BackendKind::RemoteLlm;
  if (s == "remote-embedding") return BackendKind::RemoteEmbedding;
  if (s == "stub") return BackendKind::Stub;
  if (s == "replay") return BackendKind::Replay;
  throw ValidationError("unknown provider backend '" + std::string(s) + "'");
}

std::string_view default_prompt(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::ClaimExtractor: return prompts::kExtractClaims;
    case ProviderKind::KeywordSummarizer: return prompts::kSummarizeKeyword;
    case ProviderKind::HelpfulnessJudge: return prompts::kJudgeHelpfulness;
    default: return {};
  }
}

std::string_view ProviderConfig::effective_template() const {
  return prompt_template.empty() ? default_prompt(kind) : std::string_view(prompt_template);
}

std::string ProviderConfig::describe() const {
  std::string out(to_string(backend));
  if (!model.empty()) out += ":" + model;
  return out;
}

std::string transcript_key(const ProviderRequest& request) {
  return sha256_hex(std::string(to_string(request.kind)) + "\n" + request.prompt);
}

// ---------------------------------------------------------------------------
// Transcript

std::shared_ptr<Transcript> Transcript::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open transcript " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("transcript " + path + ": " + e.what());
  }
  auto t = std::make_shared<Transcript>();
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) throw DataError("transcript " + path + ": non-string completion");
    t->entries_[key] = value.get<std::string>();
  }
  return t;
}

void Transcript::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write transcript " + path);
  out << to_json().dump(2) << "\n";
}

std::optional<std::string> Transcript::find(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void Transcript::put(const std::string& key, std::string completion) {
  std::lock_guard lock(mutex_);
  entries_[key] = std::move(completion);
}

std::size_t Transcript::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

json Transcript::to_json() const {
  std::lock_guard lock(mutex_);
  json j = json::object();
  for (const auto& [k, v] : entries_) j[k] = v;
  return j;
}

// ---------------------------------------------------------------------------
// Backends

namespace {

std::vector<std::string> split_clauses(std::string_view sentence) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= sentence.size()) {
    std::size_t best = std::string_view::npos;
    std::size_t sep_len = 0;
    for (std::string_view sep : {std::string_view(", and "), std::string_view("; ")}) {
      const auto pos = sentence.find(sep, start);
      if (pos < best) {
        best = pos;
        sep_len = sep.size();
      }
    }
    const auto piece = text::trim(sentence.substr(start, best == std::string_view::npos
                                                            ? std::string_view::npos
                                                            : best - start));
    if (!piece.empty()) parts.emplace_back(piece);
    if (best == std::string_view::npos) break;
    start = best + sep_len;
  }
  return parts;
}

std::string format_number(double v) { return json(v).dump(); }

}  // namespace

std::string StubBackend::complete(const ProviderRequest& request) {
  const auto& f = request.fields;
  switch (request.kind) {
    case ProviderKind::ClaimExtractor: {
      std::string out;
      for (const auto& clause : split_clauses(f.at("sentence").get<std::string>())) {
        out += "Claim: " + clause + "\n";
      }
      return out;
    }
    case ProviderKind::RelevanceScorer:
      return format_number(text::multiset_containment(
          text::tokenize(f.at("text").get<std::string>()),
          text::tokenize(f.at("query").get<std::string>())));
    case ProviderKind::HelpfulnessJudge:
      return format_number(text::multiset_containment(
          text::tokenize(f.at("claim").get<std::string>()),
          text::tokenize(f.at("query").get<std::string>())));
    case ProviderKind::Embedder: {
      std::vector<double> v(dimension_, 0.0);
      const auto seed_prefix = std::to_string(seed_) + ":";
      for (const auto& token : text::tokenize(f.at("text").get<std::string>())) {
        v[hash64(seed_prefix + token) % dimension_] += 1.0;
      }
      return json(v).dump();
    }
    case ProviderKind::KeywordSummarizer:
      return text::shared_content_token(f.at("claim1").get<std::string>(),
                                        f.at("claim2").get<std::string>());
  }
  throw ProviderError("stub: unsupported provider kind");
}

std::string ReplayBackend::complete(const ProviderRequest& request) {
  if (!transcript_) throw ProviderUnavailable("replay backend has no transcript");
  auto hit = transcript_->find(transcript_key(request));
  if (!hit) {
    throw ProviderUnavailable("replay transcript has no entry for " +
                              std::string(to_string(request.kind)) + " request " +
                              transcript_key(request).substr(0, 12));
  }
  return *hit;
}

std::string RecordingBackend::complete(const ProviderRequest& request) {
  auto completion = inner_->complete(request);
  transcript_->put(transcript_key(request), completion);
  return completion;
}

json post_json(const std::string& url, const json& body, const std::string& api_key) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ProviderUnavailable("endpoint must be a URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string base = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(10);
  client.set_read_timeout(120);
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) throw TransportError("POST " + url + ": " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("POST " + url + ": HTTP " + std::to_string(res->status));
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProviderUnavailable("POST " + url + ": HTTP " + std::to_string(res->status));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProviderUnavailable("POST " + url + ": invalid JSON response");
  }
}

std::string RemoteLlmBackend::complete(const ProviderRequest& request) {
  json body = {{"model", model_},
               {"temperature", 0},
               {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})}};
  const auto res = post_json(endpoint_, body, api_key_);
  try {
    return res.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw ProviderUnavailable("chat completion response has no choices[0].message.content");
  }
}

std::string RemoteEncoderBackend::complete(const ProviderRequest& request) {
  const auto& f = request.fields;
  try {
    if (request.kind == ProviderKind::Embedder) {
      const auto res = post_json(endpoint_, {{"model", model_}, {"input", f.at("text")}}, api_key_);
      return res.at("data").at(0).at("embedding").dump();
    }
    if (request.kind == ProviderKind::RelevanceScorer) {
      json body = {{"query", f.at("query")}, {"texts", json::array({f.at("text")})}};
      if (!model_.empty()) body["model"] = model_;
      const auto res = post_json(endpoint_, body, api_key_);
      const auto& results = res.is_array() ? res : res.at("results");
      const auto& first = results.at(0);
      const auto& score = first.contains("score") ? first.at("score") : first.at("relevance_score");
      return format_number(score.get<double>());
    }
  } catch (const json::exception&) {
    throw ProviderUnavailable("unexpected encoder response shape");
  }
  throw ProviderError("remote-embedding backend cannot serve " + std::string(to_string(request.kind)));
}

std::unique_ptr<Backend> make_backend(const ProviderConfig& config,
                                      std::shared_ptr<const Transcript> transcript,
                                      std::shared_ptr<Transcript> record_to) {
  std::unique_ptr<Backend> backend;
  switch (config.backend) {
    case BackendKind::Stub:
      backend = std::make_unique<StubBackend>(config.seed, config.dimension);
      break;
    case BackendKind::Replay:
      if (!transcript) throw ProviderUnavailable("replay backend requires a transcript");
      backend = std::make_unique<ReplayBackend>(std::move(transcript));
      break;
    case BackendKind::RemoteLlm:
      if (config.endpoint.empty()) throw ProviderUnavailable("remote-llm backend requires an endpoint");
      backend = std::make_unique<RemoteLlmBackend>(config.endpoint, config.model, config.api_key);
      break;
    case BackendKind::RemoteEmbedding:
      if (config.endpoint.empty()) {
        throw ProviderUnavailable("remote-embedding backend requires an endpoint");
      }
      backend = std::make_unique<RemoteEncoderBackend>(config.endpoint, config.model, config.api_key);
      break;
  }
  if (record_to) backend = std::make_unique<RecordingBackend>(std::move(backend), std::move(record_to));
  return backend;
}

// ---------------------------------------------------------------------------
// Typed providers

Provider::Provider(ProviderConfig config, std::unique_ptr<Backend> backend)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      slots_(std::clamp(config_.parallelism_limit, 1, 1024)) {}

std::string Provider::call(const ProviderRequest& request) {
  const int attempts = 1 + std::max(0, config_.retry_budget);
  for (int attempt = 0;; ++attempt) {
    slots_.acquire();
    try {
      auto out = backend_->complete(request);
      slots_.release();
      return out;
    } catch (const TransportError& e) {
      slots_.release();
      if (attempt + 1 >= attempts) {
        throw ProviderUnavailable(std::string(e.what()) + " (after " + std::to_string(attempts) +
                                  " attempts)");
      }
    } catch (...) {
      slots_.release();
      throw;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50 * (attempt + 1)));
  }
}

std::vector<std::string> parse_claim_lines(std::string_view completion) {
  std::vector<std::string> claims;
  for (const auto& raw : text::split(completion, '\n')) {
    auto line = text::trim(raw);
    constexpr std::string_view kPrefix = "Claim:";
    if (line.substr(0, kPrefix.size()) != kPrefix) continue;
    auto claim = text::trim(line.substr(kPrefix.size()));
    if (!claim.empty()) claims.emplace_back(claim);
  }
  return claims;
}

std::vector<std::string> ClaimExtractor::extract(std::string_view sentence,
                                                 std::string_view context) {
  ProviderRequest req{ProviderKind::ClaimExtractor,
                      text::render_template(config().effective_template(),
                                            {{"sentence", std::string(sentence)},
                                             {"context", std::string(context)}}),
                      {{"sentence", sentence}, {"context", context}}};
  auto claims = parse_claim_lines(call(req));
  if (claims.empty()) throw EmptyResult("extractor returned no \"Claim:\" lines");
  return claims;
}

double RelevanceScorer::score(std::string_view query, std::string_view claim) {
  json fields = {{"query", query}, {"text", claim}};
  ProviderRequest req{ProviderKind::RelevanceScorer, fields.dump(), fields};
  const auto completion = call(req);
  double v = 0.0;
  try {
    v = json::parse(completion).get<double>();
  } catch (const json::exception&) {
    throw ProviderError("relevance completion is not a number: " + completion);
  }
  if (!std::isfinite(v)) throw ProviderError("relevance score is not finite");
  return std::clamp(v, 0.0, 1.0);
}

std::vector<double> Embedder::embed(std::string_view text) {
  if (text::trim(text).empty()) return std::vector<double>(dimension(), 0.0);
  json fields = {{"text", text}};
  ProviderRequest req{ProviderKind::Embedder, fields.dump(), fields};
  const auto completion = call(req);
  std::vector<double> v;
  try {
    v = json::parse(completion).get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ProviderError("embedding completion is not a number array");
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0 || !std::isfinite(norm)) return std::vector<double>(v.size(), 0.0);
  for (double& x : v) x /= norm;
  return v;
}

std::string KeywordSummarizer::summarize(std::string_view query, std::string_view claim1,
                                         std::string_view claim2) {
  ProviderRequest req{ProviderKind::KeywordSummarizer,
                      text::render_template(config().effective_template(),
                                            {{"query", std::string(query)},
                                             {"claim1", std::string(claim1)},
                                             {"claim2", std::string(claim2)}}),
                      {{"query", query}, {"claim1", claim1}, {"claim2", claim2}}};
  auto keyword = std::string(text::trim(call(req)));
  // Models often wrap the label in quotes or end it with a period.
  while (!keyword.empty() && (keyword.back() == '.' || keyword.back() == '"')) keyword.pop_back();
  while (!keyword.empty() && keyword.front() == '"') keyword.erase(keyword.begin());
  keyword = std::string(text::trim(keyword));
  if (keyword.empty()) throw EmptyResult("summarizer returned an empty keyword");
  return keyword;
}

double parse_unit_score(std::string_view completion) {
  constexpr double kSlack = 1e-6;
  std::size_t i = 0;
  while (i < completion.size()) {
    const char c = completion[i];
    const bool starts_number =
        std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '-' || c == '.') && i + 1 < completion.size() &&
         std::isdigit(static_cast<unsigned char>(completion[i + 1])));
    if (!starts_number) {
      ++i;
      continue;
    }
    double value = 0.0;
    const auto* first = completion.data() + i;
    const auto* last = completion.data() + completion.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{}) {
      ++i;
      continue;
    }
    i = static_cast<std::size_t>(ptr - completion.data());
    if (value >= 0.0 && value <= 1.0) return value;
    if (value > 1.0 && value <= 1.0 + kSlack) return 1.0;
  }
  throw JudgeParseError("no score in [0, 1] in judge completion: " + std::string(completion));
}

ProviderRequest make_judge_request(std::string_view tmpl, std::string_view query,
                                   std::string_view text) {
  return {ProviderKind::HelpfulnessJudge,
          text::render_template(tmpl, {{"query", std::string(query)}, {"claim", std::string(text)}}),
          {{"query", query}, {"claim", text}}};
}

double HelpfulnessJudge::judge(std::string_view query, std::string_view text) {
  auto key = std::make_pair(std::string(query), std::string(text));
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const double score =
      parse_unit_score(call(make_judge_request(config().effective_template(), query, text)));
  std::lock_guard lock(cache_mutex_);
  cache_.emplace(std::move(key), score);
  return score;
}

}  // namespace claimwise
