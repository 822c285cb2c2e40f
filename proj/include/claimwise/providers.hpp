#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace claimwise {

enum class ProviderKind {
  ClaimExtractor,
  RelevanceScorer,
  Embedder,
  KeywordSummarizer,
  HelpfulnessJudge,
};

/// remote-llm speaks chat completions; remote-embedding covers encoder
/// services (an embeddings endpoint for the embedder, a rerank endpoint for
/// the relevance scorer).
enum class BackendKind { RemoteLlm, RemoteEmbedding, Stub, Replay };

std::string_view to_string(ProviderKind kind);
std::string_view to_string(BackendKind kind);
BackendKind backend_from_string(std::string_view s);

/// Built-in prompt templates, byte-identical to the files under prompts/.
std::string_view default_prompt(ProviderKind kind);

struct ProviderConfig {
  ProviderKind kind = ProviderKind::ClaimExtractor;
  BackendKind backend = BackendKind::Stub;
  std::string endpoint;
  std::string api_key;
  std::string model;
  std::string prompt_template;  // empty selects default_prompt(kind)
  int retry_budget = 2;
  int parallelism_limit = 4;
  std::uint64_t seed = 0;       // stub backends
  std::size_t dimension = 64;   // stub embedder

  std::string_view effective_template() const;
  /// Identifier recorded in document provenance, e.g. "stub" or "remote-llm:gpt-4o".
  std::string describe() const;
};

/// One call to a backend. `prompt` is the fully rendered prompt for LLM
/// kinds and a canonical JSON rendering of `fields` for the others; it is
/// what replay transcripts are keyed on.
struct ProviderRequest {
  ProviderKind kind;
  std::string prompt;
  nlohmann::json fields;
};

std::string transcript_key(const ProviderRequest& request);

/// Thread-safe {prompt_hash -> completion} store backing replay and recording.
class Transcript {
 public:
  Transcript() = default;

  static std::shared_ptr<Transcript> load(const std::string& path);
  void save(const std::string& path) const;

  std::optional<std::string> find(const std::string& key) const;
  void put(const std::string& key, std::string completion);
  std::size_t size() const;
  nlohmann::json to_json() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> entries_;
};

/// Produces raw completion text for a request. Implementations must be safe
/// for concurrent use.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const ProviderRequest& request) = 0;
};

/// Pure local stand-ins: clause splitting, token overlap, feature hashing.
class StubBackend : public Backend {
 public:
  explicit StubBackend(std::uint64_t seed = 0, std::size_t dimension = 64)
      : seed_(seed), dimension_(dimension) {}
  std::string complete(const ProviderRequest& request) override;

 private:
  std::uint64_t seed_;
  std::size_t dimension_;
};

class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(std::shared_ptr<const Transcript> transcript)
      : transcript_(std::move(transcript)) {}
  std::string complete(const ProviderRequest& request) override;

 private:
  std::shared_ptr<const Transcript> transcript_;
};

/// Forwards to `inner` and stores every successful completion.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(std::unique_ptr<Backend> inner, std::shared_ptr<Transcript> transcript)
      : inner_(std::move(inner)), transcript_(std::move(transcript)) {}
  std::string complete(const ProviderRequest& request) override;

 private:
  std::unique_ptr<Backend> inner_;
  std::shared_ptr<Transcript> transcript_;
};

/// Chat-completions style JSON over HTTP, temperature 0.
class RemoteLlmBackend : public Backend {
 public:
  RemoteLlmBackend(std::string endpoint, std::string model, std::string api_key)
      : endpoint_(std::move(endpoint)), model_(std::move(model)), api_key_(std::move(api_key)) {}
  std::string complete(const ProviderRequest& request) override;

 private:
  std::string endpoint_;
  std::string model_;
  std::string api_key_;
};

/// Embedding endpoint ({model, input} -> data[0].embedding) or rerank
/// endpoint ({query, texts} -> [{index, score}]) depending on request kind.
class RemoteEncoderBackend : public Backend {
 public:
  RemoteEncoderBackend(std::string endpoint, std::string model, std::string api_key)
      : endpoint_(std::move(endpoint)), model_(std::move(model)), api_key_(std::move(api_key)) {}
  std::string complete(const ProviderRequest& request) override;

 private:
  std::string endpoint_;
  std::string model_;
  std::string api_key_;
};

/// POSTs `body` as JSON to `url` and returns the parsed response.
/// Throws TransportError on connection failure or non-2xx status.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         const std::string& api_key);

/// Backend plus throttling and retries. Base of the typed providers.
class Provider {
 public:
  Provider(ProviderConfig config, std::unique_ptr<Backend> backend);
  virtual ~Provider() = default;

  const ProviderConfig& config() const { return config_; }
  std::string describe() const { return config_.describe(); }

 protected:
  /// At most parallelism_limit concurrent calls; TransportError is retried
  /// retry_budget times before surfacing as ProviderUnavailable.
  std::string call(const ProviderRequest& request);

 private:
  ProviderConfig config_;
  std::unique_ptr<Backend> backend_;
  std::counting_semaphore<1024> slots_;
};

class ClaimExtractor : public Provider {
 public:
  using Provider::Provider;
  /// Throws ProviderUnavailable or EmptyResult; callers fall back.
  std::vector<std::string> extract(std::string_view sentence, std::string_view context);
};

/// Lines beginning "Claim:", prefix and surrounding whitespace stripped.
std::vector<std::string> parse_claim_lines(std::string_view completion);

class RelevanceScorer : public Provider {
 public:
  using Provider::Provider;
  double score(std::string_view query, std::string_view claim);
};

class Embedder : public Provider {
 public:
  using Provider::Provider;
  std::size_t dimension() const { return config().dimension; }
  /// Unit-norm vector, or an all-zero vector when `text` is blank or the
  /// backend returns a zero vector.
  std::vector<double> embed(std::string_view text);
};

class KeywordSummarizer : public Provider {
 public:
  using Provider::Provider;
  std::string summarize(std::string_view query, std::string_view claim1, std::string_view claim2);
};

class HelpfulnessJudge : public Provider {
 public:
  using Provider::Provider;
  /// Cached by (query, text). Throws JudgeParseError on unparseable output.
  double judge(std::string_view query, std::string_view text);

 private:
  std::mutex cache_mutex_;
  std::map<std::pair<std::string, std::string>, double> cache_;
};

/// The request HelpfulnessJudge sends for (query, text) under `tmpl`.
ProviderRequest make_judge_request(std::string_view tmpl, std::string_view query,
                                   std::string_view text);

/// First real number in [0, 1] in `completion`; values up to 1 + 1e-6 are
/// clamped to 1. Throws JudgeParseError when there is none.
double parse_unit_score(std::string_view completion);

/// Builds the backend described by `config`. Replay backends read from
/// `transcript`; when `record_to` is set, the backend is wrapped to record.
std::unique_ptr<Backend> make_backend(const ProviderConfig& config,
                                      std::shared_ptr<const Transcript> transcript,
                                      std::shared_ptr<Transcript> record_to = nullptr);

template <typename P>
std::unique_ptr<P> make_provider(const ProviderConfig& config,
                                 std::shared_ptr<const Transcript> transcript = nullptr,
                                 std::shared_ptr<Transcript> record_to = nullptr) {
  return std::make_unique<P>(config, make_backend(config, std::move(transcript),
                                                  std::move(record_to)));
}

}  // namespace claimwise
