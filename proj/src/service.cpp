#include "claimwise/service.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <random>

#include "claimwise/annotate.hpp"
#include "claimwise/hash.hpp"

namespace claimwise::service {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Mode mode) { return mode == Mode::Baseline ? "baseline" : "decomposed"; }

Mode mode_from_string(std::string_view s) {
  if (s == "baseline") return Mode::Baseline;
  if (s == "decomposed") return Mode::Decomposed;
  throw ServiceError("invalid-mode", 400, "unknown mode '" + std::string(s) + "'");
}

namespace {

constexpr std::pair<EventKind, std::string_view> kEventNames[] = {
    {EventKind::Render, "render"},
    {EventKind::DecomposeToggle, "decompose_toggle"},
    {EventKind::SortToggle, "sort_toggle"},
    {EventKind::GroupToggle, "group_toggle"},
    {EventKind::HoverClaim, "hover_claim"},
    {EventKind::HoverKeyword, "hover_keyword"},
    {EventKind::Submit, "submit"},
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kEventNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

EventKind event_kind_from_string(std::string_view s) {
  for (const auto& [k, name] : kEventNames) {
    if (name == s) return k;
  }
  throw ServiceError("invalid-events", 400, "unknown event kind '" + std::string(s) + "'");
}

void to_json(json& j, const Session& s) {
  std::vector<std::string> modes;
  for (Mode m : s.modes) modes.emplace_back(to_string(m));
  j = json{{"session_id", s.session_id}, {"annotator_id", s.annotator_id},
           {"task_ids", s.task_ids},     {"mode_order", modes},
           {"created_at", s.created_at}, {"ordinal", s.ordinal}};
}

void from_json(const json& j, Session& s) {
  j.at("session_id").get_to(s.session_id);
  j.at("annotator_id").get_to(s.annotator_id);
  j.at("task_ids").get_to(s.task_ids);
  s.modes.clear();
  for (const auto& m : j.at("mode_order")) s.modes.push_back(mode_from_string(m.get<std::string>()));
  j.at("created_at").get_to(s.created_at);
  j.at("ordinal").get_to(s.ordinal);
}

void to_json(json& j, const Annotation& a) {
  json events = json::array();
  for (const auto& e : a.events) {
    events.push_back({{"timestamp", e.timestamp}, {"kind", to_string(e.kind)}, {"target_id", e.target_id}});
  }
  j = json{{"session_id", a.session_id}, {"pair_id", a.pair_id},
           {"choice", to_string(a.choice)},  {"certainty", a.certainty},
           {"elapsed_ms", a.elapsed_ms},     {"mode", to_string(a.mode)},
           {"events", events}};
}

void from_json(const json& j, Annotation& a) {
  try {
    j.at("session_id").get_to(a.session_id);
    j.at("pair_id").get_to(a.pair_id);
    const auto choice = j.at("choice").get<std::string>();
    if (choice != "A" && choice != "B") {
      throw ServiceError("invalid-choice", 400, "choice must be \"A\" or \"B\"");
    }
    a.choice = side_from_string(choice);
    j.at("certainty").get_to(a.certainty);
    j.at("elapsed_ms").get_to(a.elapsed_ms);
    a.mode = mode_from_string(j.at("mode").get<std::string>());
    a.events.clear();
    for (const auto& e : j.value("events", json::array())) {
      a.events.push_back({e.at("timestamp").get<std::int64_t>(),
                          event_kind_from_string(e.at("kind").get<std::string>()),
                          e.value("target_id", "")});
    }
  } catch (const json::exception& e) {
    throw ServiceError("invalid-payload", 400, std::string("annotation payload: ") + e.what());
  }
}

void validate_annotation(const Annotation& a) {
  if (a.certainty < 1 || a.certainty > 5) {
    throw ServiceError("invalid-certainty", 400, "certainty must be an integer from 1 to 5");
  }
  const InteractionEvent* render = nullptr;
  const InteractionEvent* submit = nullptr;
  std::size_t submits = 0;
  for (const auto& e : a.events) {
    if (e.kind == EventKind::Render && !render) render = &e;
    if (e.kind == EventKind::Submit) {
      submit = &e;
      ++submits;
    }
  }
  if (submits != 1) throw ServiceError("invalid-events", 400, "exactly one submit event is required");
  if (!render) throw ServiceError("invalid-events", 400, "a render event is required");
  if (a.elapsed_ms < 0 || a.elapsed_ms != submit->timestamp - render->timestamp) {
    throw ServiceError("invalid-timing", 400,
                       "elapsed_ms must equal the submit timestamp minus the render timestamp");
  }
}

void to_json(json& j, const PreferenceRecord& r) {
  j = json{{"prompt", r.prompt},       {"chosen", r.chosen}, {"rejected", r.rejected},
           {"certainty", r.certainty}, {"mode", to_string(r.mode)},
           {"annotator_id", r.annotator_id}};
}

void from_json(const json& j, PreferenceRecord& r) {
  j.at("prompt").get_to(r.prompt);
  j.at("chosen").get_to(r.chosen);
  j.at("rejected").get_to(r.rejected);
  r.certainty = j.value("certainty", 0);
  r.mode = mode_from_string(j.value("mode", "baseline"));
  r.annotator_id = j.value("annotator_id", "");
}

RawRecord to_raw_record(const PreferenceRecord& r) {
  return {render_transcript(r.prompt, r.chosen), render_transcript(r.prompt, r.rejected)};
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

ModeMetrics summarize(const std::vector<const Annotation*>& items,
                      const std::map<std::string, Side>& ground_truth) {
  ModeMetrics m;
  std::size_t low_correct = 0;
  std::vector<double> times;
  for (const auto* a : items) {
    const bool correct = ground_truth.at(a->pair_id) == a->choice;
    ++m.count;
    if (correct) ++m.correct;
    if (a->certainty != 5) {
      ++m.low_certainty_count;
      if (correct) ++low_correct;
    }
    times.push_back(static_cast<double>(a->elapsed_ms));
  }
  if (m.count == 0) return m;
  m.accuracy = static_cast<double>(m.correct) / static_cast<double>(m.count);
  if (m.low_certainty_count > 0) {
    m.low_certainty_accuracy =
        static_cast<double>(low_correct) / static_cast<double>(m.low_certainty_count);
  }
  std::sort(times.begin(), times.end());
  double total = 0.0;
  for (double t : times) total += t;
  const auto n = times.size();
  m.mean_ms = total / static_cast<double>(n);
  m.median_ms = n % 2 == 1 ? times[n / 2] : (times[n / 2 - 1] + times[n / 2]) / 2.0;
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  m.p95_ms = times[std::max<std::size_t>(rank, 1) - 1];
  return m;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

MetricsReport compute_metrics(const std::vector<Annotation>& annotations,
                              const std::map<std::string, Side>& ground_truth) {
  MetricsReport report;
  std::map<std::string, std::vector<const Annotation*>> groups{
      {"baseline", {}}, {"decomposed", {}}, {"all", {}}};
  for (const auto& a : annotations) {
    if (!ground_truth.count(a.pair_id)) {
      ++report.without_ground_truth;
      continue;
    }
    groups[std::string(to_string(a.mode))].push_back(&a);
    groups["all"].push_back(&a);
  }
  for (const auto& [name, items] : groups) report.by_mode[name] = summarize(items, ground_truth);
  return report;
}

json to_json(const MetricsReport& report) {
  json modes = json::object();
  for (const auto& [name, m] : report.by_mode) {
    modes[name] = {{"count", m.count},
                   {"correct", m.correct},
                   {"accuracy", optional_json(m.accuracy)},
                   {"low_certainty_count", m.low_certainty_count},
                   {"low_certainty_accuracy", optional_json(m.low_certainty_accuracy)},
                   {"mean_ms", optional_json(m.mean_ms)},
                   {"median_ms", optional_json(m.median_ms)},
                   {"p95_ms", optional_json(m.p95_ms)}};
  }
  return json{{"modes", modes}, {"without_ground_truth", report.without_ground_truth}};
}

// ---------------------------------------------------------------------------
// Service

Service::Service(std::vector<ResponsePair> pairs, std::vector<DecompositionResult> decompositions,
                 ServiceOptions options)
    : options_(std::move(options)) {
  if (!options_.clock) options_.clock = utc_now;
  for (auto& p : pairs) {
    const auto id = p.pair_id;
    if (!pairs_.emplace(id, std::move(p)).second) throw DataError("duplicate pair id " + id);
  }
  for (auto& d : decompositions) {
    validate(d);
    const auto id = d.pair_id;
    decompositions_[id] = std::move(d);
  }
  for (const auto& [id, pair] : pairs_) {
    if (decompositions_.count(id)) pool_.push_back(id);
  }
  // Decomposed views are precomputed so requests never touch the pipeline.
  for (const auto& id : pool_) {
    const auto& doc = decompositions_.at(id);
    auto presentation = to_json(build_presentation(doc.claims_a, doc.claims_b, doc.links,
                                                   OrderMode::Narrative));
    const auto relevance = build_presentation(doc.claims_a, doc.claims_b, doc.links,
                                              OrderMode::Relevance);
    presentation["relevance_order_a"] = relevance.order_a;
    presentation["relevance_order_b"] = relevance.order_b;
    view_cache_[id] = json{{"decomposition", doc}, {"presentation", presentation}};
  }

  fs::create_directories(options_.store_dir);
  salt_ = options_.pseudonym_salt;
  if (salt_.empty()) {
    const auto salt_path = options_.store_dir / "salt";
    std::ifstream in(salt_path);
    if (in) std::getline(in, salt_);
    if (salt_.empty()) {
      std::random_device rd;
      salt_ = sha256_hex(std::to_string(rd()) + std::to_string(rd()) + utc_now()).substr(0, 32);
      std::ofstream(salt_path) << salt_ << "\n";
    }
  }
  replay_from_disk();
}

Service::~Service() = default;

void Service::replay_from_disk() {
  const auto snapshot_path = options_.store_dir / "snapshot.json";
  std::uint64_t snapshot_seq = 0;
  if (std::ifstream in(snapshot_path); in) {
    json snap;
    try {
      in >> snap;
    } catch (const json::exception& e) {
      throw DataError("corrupt snapshot " + snapshot_path.string() + ": " + e.what());
    }
    snapshot_seq = snap.at("seq").get<std::uint64_t>();
    for (const auto& s : snap.at("sessions")) {
      auto session = s.get<Session>();
      session_order_.push_back(session.session_id);
      sessions_[session.session_id] = std::move(session);
    }
    for (const auto& a : snap.at("annotations")) {
      auto ann = a.get<Annotation>();
      submitted_.insert({ann.session_id, ann.pair_id});
      annotations_.push_back(std::move(ann));
    }
    seq_ = snapshot_seq;
  }
  std::ifstream log(options_.store_dir / "events.jsonl");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(log, line)) {
    ++line_no;
    if (line.empty()) continue;
    json event;
    try {
      event = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("events.jsonl:" + std::to_string(line_no) + ": " + e.what());
    }
    const auto seq = event.at("seq").get<std::uint64_t>();
    if (seq <= snapshot_seq) continue;
    apply_event(event);
    seq_ = seq;
  }
}

void Service::apply_event(const json& event) {
  const auto type = event.at("type").get<std::string>();
  if (type == "session_created") {
    auto session = event.at("session").get<Session>();
    session_order_.push_back(session.session_id);
    sessions_[session.session_id] = std::move(session);
  } else if (type == "annotation_submitted") {
    auto ann = event.at("annotation").get<Annotation>();
    submitted_.insert({ann.session_id, ann.pair_id});
    annotations_.push_back(std::move(ann));
  } else {
    throw DataError("unknown event type " + type);
  }
}

std::uint64_t Service::append_event(json event) {
  event["seq"] = ++seq_;
  {
    std::ofstream out(options_.store_dir / "events.jsonl", std::ios::app);
    if (!out) throw DataError("cannot append to event log");
    out << event.dump() << "\n";
    out.flush();
    if (!out) throw DataError("event log write failed");
  }
  apply_event(event);
  if (options_.snapshot_every > 0 && ++events_since_snapshot_ >= options_.snapshot_every) {
    write_snapshot_locked();
  }
  return seq_;
}

void Service::snapshot() {
  std::unique_lock lock(mutex_);
  write_snapshot_locked();
}

void Service::write_snapshot_locked() {
  json snap = {{"seq", seq_}, {"sessions", json::array()}, {"annotations", annotations_}};
  for (const auto& id : session_order_) snap["sessions"].push_back(sessions_.at(id));
  const auto tmp = options_.store_dir / "snapshot.json.tmp";
  std::ofstream(tmp) << snap.dump() << "\n";
  fs::rename(tmp, options_.store_dir / "snapshot.json");
  events_since_snapshot_ = 0;
}

Session Service::create_session(const std::string& annotator_id, std::size_t task_count) {
  if (task_count == 0) throw ServiceError("invalid-task-count", 400, "task_count must be >= 1");
  if (annotator_id.empty()) throw ServiceError("invalid-annotator", 400, "annotator_id is required");
  std::unique_lock lock(mutex_);
  if (task_count > pool_.size()) {
    throw ServiceError("insufficient-tasks", 409,
                       "requested " + std::to_string(task_count) + " tasks but only " +
                           std::to_string(pool_.size()) + " are eligible");
  }
  Session s;
  s.ordinal = session_order_.size();
  s.annotator_id = annotator_id;
  s.session_id =
      "s-" + sha256_hex(std::to_string(s.ordinal) + '\x1f' + annotator_id).substr(0, 12);
  s.created_at = options_.clock();
  // Consecutive sessions walk the pool so coverage stays balanced.
  const std::size_t offset = (s.ordinal * task_count) % pool_.size();
  const std::size_t first_block = (task_count + 1) / 2;
  const bool baseline_first = s.ordinal % 2 == 0;
  for (std::size_t i = 0; i < task_count; ++i) {
    s.task_ids.push_back(pool_[(offset + i) % pool_.size()]);
    const bool in_first = i < first_block;
    s.modes.push_back(in_first == baseline_first ? Mode::Baseline : Mode::Decomposed);
  }
  append_event({{"type", "session_created"}, {"session", s}});
  return s;
}

const json& Service::decomposed_view(const std::string& pair_id) const {
  return view_cache_.at(pair_id);
}

json Service::get_task(const std::string& session_id, std::size_t index) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ServiceError("unknown-session", 404, "unknown session " + session_id);
  const auto& s = it->second;
  if (index >= s.task_ids.size()) {
    throw ServiceError("index-out-of-range", 404,
                       "task index " + std::to_string(index) + " out of range");
  }
  const auto& pair = pairs_.at(s.task_ids[index]);
  json payload = {{"session_id", s.session_id},
                  {"index", index},
                  {"task_count", s.task_ids.size()},
                  {"pair_id", pair.pair_id},
                  {"query", pair.query},
                  {"response_a", pair.response_a},
                  {"response_b", pair.response_b},
                  {"mode", to_string(s.modes[index])}};
  if (s.modes[index] == Mode::Decomposed) {
    const auto& view = decomposed_view(pair.pair_id);
    payload["decomposition"] = view.at("decomposition");
    payload["presentation"] = view.at("presentation");
  }
  return payload;
}

json Service::submit_annotation(const Annotation& annotation) {
  std::unique_lock lock(mutex_);
  auto it = sessions_.find(annotation.session_id);
  if (it == sessions_.end()) {
    throw ServiceError("unknown-session", 404, "unknown session " + annotation.session_id);
  }
  const auto& s = it->second;
  const auto task = std::find(s.task_ids.begin(), s.task_ids.end(), annotation.pair_id);
  if (task == s.task_ids.end()) {
    throw ServiceError("unknown-task", 404,
                       "pair " + annotation.pair_id + " is not assigned to this session");
  }
  if (submitted_.count({annotation.session_id, annotation.pair_id})) {
    throw ServiceError("duplicate-submission", 409, "this task was already submitted");
  }
  validate_annotation(annotation);
  const Mode task_mode = s.modes[static_cast<std::size_t>(task - s.task_ids.begin())];
  if (task_mode == Mode::Baseline) {
    if (annotation.mode != Mode::Baseline) {
      throw ServiceError("invalid-mode", 400, "baseline tasks must be submitted in baseline mode");
    }
    for (const auto& e : annotation.events) {
      if (e.kind != EventKind::Render && e.kind != EventKind::Submit) {
        throw ServiceError("invalid-events", 400,
                           "baseline tasks have no decomposition interactions");
      }
    }
  }
  const auto receipt = "r-" + sha256_hex(annotation.session_id + '\x1f' + annotation.pair_id).substr(0, 12);
  const auto seq = append_event(
      {{"type", "annotation_submitted"}, {"receipt_id", receipt}, {"annotation", annotation}});
  return {{"receipt_id", receipt}, {"seq", seq}};
}

std::string Service::pseudonym(const std::string& annotator_id) const {
  return "anon-" + sha256_hex(salt_ + '\x1f' + annotator_id).substr(0, 12);
}

std::vector<PreferenceRecord> Service::export_preferences(std::optional<Mode> mode) const {
  std::shared_lock lock(mutex_);
  std::vector<PreferenceRecord> out;
  for (const auto& a : annotations_) {
    if (mode && a.mode != *mode) continue;
    const auto& pair = pairs_.at(a.pair_id);
    PreferenceRecord r;
    r.prompt = pair.query;
    r.chosen = pair.response(a.choice);
    r.rejected = pair.response(a.choice == Side::A ? Side::B : Side::A);
    r.certainty = a.certainty;
    r.mode = a.mode;
    r.annotator_id = pseudonym(sessions_.at(a.session_id).annotator_id);
    out.push_back(std::move(r));
  }
  return out;
}

MetricsReport Service::metrics() const {
  std::map<std::string, Side> truth;
  for (const auto& [id, pair] : pairs_) {
    if (pair.ground_truth) truth[id] = *pair.ground_truth;
  }
  return compute_metrics(annotations(), truth);
}

std::vector<Session> Service::sessions() const {
  std::shared_lock lock(mutex_);
  std::vector<Session> out;
  for (const auto& id : session_order_) out.push_back(sessions_.at(id));
  return out;
}

std::vector<Annotation> Service::annotations() const {
  std::shared_lock lock(mutex_);
  return annotations_;
}

}  // namespace claimwise::service
