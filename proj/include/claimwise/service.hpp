#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "claimwise/dataset.hpp"
#include "claimwise/document.hpp"
#include "claimwise/error.hpp"

namespace httplib {
class Server;
}

namespace claimwise::service {

enum class Mode { Baseline, Decomposed };

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view s);

struct Session {
  std::string session_id;
  std::string annotator_id;
  std::vector<std::string> task_ids;  // pair ids
  std::vector<Mode> modes;            // parallel to task_ids
  std::string created_at;
  std::size_t ordinal = 0;
};

enum class EventKind {
  Render,
  DecomposeToggle,
  SortToggle,
  GroupToggle,
  HoverClaim,
  HoverKeyword,
  Submit,
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view s);

struct InteractionEvent {
  std::int64_t timestamp = 0;  // milliseconds
  EventKind kind = EventKind::Render;
  std::string target_id;
};

struct Annotation {
  std::string session_id;
  std::string pair_id;
  Side choice = Side::A;
  int certainty = 0;
  std::int64_t elapsed_ms = 0;
  Mode mode = Mode::Baseline;
  std::vector<InteractionEvent> events;
};

void to_json(nlohmann::json& j, const Session& s);
void from_json(const nlohmann::json& j, Session& s);
void to_json(nlohmann::json& j, const Annotation& a);
void from_json(const nlohmann::json& j, Annotation& a);

/// Request-level failure with a stable error code and HTTP status.
class ServiceError : public ValidationError {
 public:
  ServiceError(std::string code, int status, const std::string& message)
      : ValidationError(message), code_(std::move(code)), status_(status) {}
  const std::string& code() const { return code_; }
  int status() const { return status_; }

 private:
  std::string code_;
  int status_;
};

/// Checks certainty bounds, event kinds, exactly one submit, and that
/// elapsed_ms equals submit minus the first render timestamp.
/// Throws ServiceError (invalid-certainty, invalid-events, invalid-timing).
void validate_annotation(const Annotation& a);

struct PreferenceRecord {
  std::string prompt;
  std::string chosen;
  std::string rejected;
  int certainty = 0;
  Mode mode = Mode::Baseline;
  std::string annotator_id;  // pseudonymous
};

void to_json(nlohmann::json& j, const PreferenceRecord& r);
void from_json(const nlohmann::json& j, PreferenceRecord& r);

/// The record as an HH-RLHF style chosen/rejected transcript pair.
RawRecord to_raw_record(const PreferenceRecord& r);

struct ModeMetrics {
  std::size_t count = 0;
  std::size_t correct = 0;
  std::optional<double> accuracy;
  /// Subset excluding certainty-5 responses.
  std::size_t low_certainty_count = 0;
  std::optional<double> low_certainty_accuracy;
  std::optional<double> mean_ms;
  std::optional<double> median_ms;
  std::optional<double> p95_ms;  // nearest rank
};

struct MetricsReport {
  std::map<std::string, ModeMetrics> by_mode;  // "baseline", "decomposed", "all"
  std::size_t without_ground_truth = 0;
};

nlohmann::json to_json(const MetricsReport& report);

/// Pure function of the annotations and ground truth labels.
MetricsReport compute_metrics(const std::vector<Annotation>& annotations,
                              const std::map<std::string, Side>& ground_truth);

struct ServiceOptions {
  std::filesystem::path store_dir;
  /// Write a snapshot after this many appended events (0 disables).
  std::size_t snapshot_every = 100;
  /// Salt for annotator pseudonyms; empty reads or creates <store>/salt.
  std::string pseudonym_salt;
  std::function<std::string()> clock;  // ISO-8601 UTC; defaults to system time
};

/// Task pool, append-only event log, and the operations behind the HTTP API.
/// Safe for concurrent use; writes are serialized through one appender.
class Service {
 public:
  Service(std::vector<ResponsePair> pairs, std::vector<DecompositionResult> decompositions,
          ServiceOptions options);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Throws ServiceError invalid-task-count or insufficient-tasks.
  Session create_session(const std::string& annotator_id, std::size_t task_count);

  /// Throws ServiceError unknown-session or index-out-of-range.
  nlohmann::json get_task(const std::string& session_id, std::size_t index) const;

  /// Returns {"receipt_id", "seq"}. Throws ServiceError unknown-session,
  /// unknown-task, duplicate-submission, or a validation code.
  nlohmann::json submit_annotation(const Annotation& annotation);

  std::vector<PreferenceRecord> export_preferences(std::optional<Mode> mode = std::nullopt) const;
  MetricsReport metrics() const;

  std::vector<Session> sessions() const;
  std::vector<Annotation> annotations() const;
  std::size_t eligible_pool_size() const { return pool_.size(); }

  /// Writes a snapshot of the current state now.
  void snapshot();

 private:
  void replay_from_disk();
  void apply_event(const nlohmann::json& event);
  std::uint64_t append_event(nlohmann::json event);
  void write_snapshot_locked();
  std::string pseudonym(const std::string& annotator_id) const;
  const nlohmann::json& decomposed_view(const std::string& pair_id) const;

  ServiceOptions options_;
  std::map<std::string, ResponsePair> pairs_;
  std::map<std::string, DecompositionResult> decompositions_;
  std::vector<std::string> pool_;  // eligible pair ids, sorted
  std::map<std::string, nlohmann::json> view_cache_;

  mutable std::shared_mutex mutex_;
  std::uint64_t seq_ = 0;
  std::uint64_t events_since_snapshot_ = 0;
  std::map<std::string, Session> sessions_;
  std::vector<std::string> session_order_;
  std::vector<Annotation> annotations_;
  std::set<std::pair<std::string, std::string>> submitted_;
  std::string salt_;
};

/// Routes: POST /sessions, GET /sessions/{id}/tasks/{i}, POST /annotations,
/// GET /export?mode=..., GET /metrics. When `token` is non-empty every
/// request must carry it in the X-Session-Token header.
std::unique_ptr<httplib::Server> make_http_server(Service& service, std::string token = {});

}  // namespace claimwise::service
