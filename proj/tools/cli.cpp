#include "cli.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "claimwise/dataset.hpp"
#include "claimwise/error.hpp"
#include "claimwise/hash.hpp"
#include "claimwise/pipeline.hpp"
#include "claimwise/service.hpp"
#include "claimwise/simulation.hpp"
#include "claimwise/synthetic.hpp"
#include "claimwise/text.hpp"

#ifndef CLAIMWISE_VERSION
#define CLAIMWISE_VERSION "0.0.0"
#endif

namespace claimwise::cli {

using nlohmann::json;

std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

RunManifest::RunManifest(std::string command, json config)
    : command_(std::move(command)), config_(std::move(config)),
      start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_input(const std::string& path) { inputs_.push_back(path); }
void RunManifest::add_output(const std::string& path) { outputs_.push_back(path); }

json RunManifest::finish() const {
  json inputs = json::object();
  for (const auto& p : inputs_) inputs[p] = file_sha256(p);
  json outputs = json::object();
  for (const auto& p : outputs_) outputs[p] = file_sha256(p);
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
  return json{{"command", command_},
              {"config", config_},
              {"inputs", inputs},
              {"outputs", outputs},
              {"seed", seed_ ? json(*seed_) : json(nullptr)},
              {"tool_version", CLAIMWISE_VERSION},
              {"duration_s", elapsed.count()}};
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << finish().dump(2) << "\n";
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string env_or_empty(const std::string& name) {
  if (name.empty()) return {};
  const char* v = std::getenv(name.c_str());
  return v ? v : "";
}

// ---------------------------------------------------------------------------
// dataset

struct DatasetArgs {
  std::string in;
  std::string out;
  std::string rejected_out;
  std::string rounds = "1,2";
  std::size_t min_sentences = 5;
  std::size_t max_word_diff = 30;
  std::vector<std::string> blocklist;
  std::size_t sample = 50;
  std::uint64_t seed = 0;
  bool no_shuffle = false;
};

int cmd_dataset(const DatasetArgs& a, std::ostream& out, std::ostream& err) {
  RunManifest manifest("dataset", {{"in", a.in},
                                   {"out", a.out},
                                   {"rejected", a.rejected_out},
                                   {"rounds", a.rounds},
                                   {"min_sentences", a.min_sentences},
                                   {"max_word_diff", a.max_word_diff},
                                   {"blocklist", a.blocklist},
                                   {"sample", a.sample},
                                   {"seed", a.seed},
                                   {"shuffle", !a.no_shuffle}});
  manifest.set_seed(a.seed);
  manifest.add_input(a.in);

  FilterRules rules;
  rules.allowed_rounds.clear();
  for (const auto& r : text::split(a.rounds, ',')) {
    try {
      rules.allowed_rounds.insert(std::stoi(r));
    } catch (const std::exception&) {
      throw ValidationError("--rounds must be a comma-separated list of integers");
    }
  }
  rules.min_sentences = a.min_sentences;
  rules.max_word_diff = a.max_word_diff;
  rules.keyword_blocklist = a.blocklist;
  rules.sample_size = a.sample;
  rules.seed = a.seed;
  rules.validate();

  ParseOptions parse_options;
  if (!a.no_shuffle) parse_options.shuffle_seed = a.seed;
  std::vector<ResponsePair> pairs;
  for (const auto& raw : read_raw_records(a.in)) {
    try {
      pairs.push_back(parse_record(raw, parse_options, raw.line));
    } catch (const DataError& e) {
      throw DataError(a.in + ":" + std::to_string(raw.line) + ": " + e.what());
    }
  }

  auto outcome = apply_filters(pairs, rules);
  std::map<std::string, std::size_t> per_reason{
      {"rounds", 0}, {"min_sentences", 0}, {"max_word_diff", 0}, {"blocklist", 0}};
  for (const auto& r : outcome.rejected) ++per_reason[r.reason];

  std::vector<ResponsePair> selected = outcome.kept;
  if (outcome.kept.empty()) {
    err << "warning: zero pairs kept\n";
  } else if (a.sample > 0) {
    selected = sample(outcome.kept, a.sample, a.seed);
  }
  write_pairs(a.out, selected);
  manifest.add_output(a.out);
  if (!a.rejected_out.empty()) {
    std::ofstream rej(a.rejected_out);
    if (!rej) throw DataError("cannot write " + a.rejected_out);
    for (const auto& r : outcome.rejected) {
      rej << json{{"pair_id", r.pair.pair_id}, {"reason", r.reason}, {"pair", r.pair}}.dump() << "\n";
    }
    rej.close();
    manifest.add_output(a.rejected_out);
  }

  out << "records: " << pairs.size() << "\n";
  out << "kept: " << outcome.kept.size() << "\n";
  for (const auto& [reason, n] : per_reason) out << "rejected." << reason << ": " << n << "\n";
  out << "written: " << selected.size() << "\n";
  manifest.write(a.out + ".manifest.json");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// decompose

struct DecomposeArgs {
  std::string pairs;
  std::string out;
  std::string provider = "stub";
  std::string extractor;
  std::string scorer;
  std::string embedder;
  std::string summarizer;
  std::string transcript;
  std::string record;
  std::string endpoint;
  std::string model = "gpt-4o-2024-08-06";
  std::string embedding_endpoint;
  std::string embedding_model;
  std::string rerank_endpoint;
  std::string rerank_model;
  std::string api_key_env = "OPENAI_API_KEY";
  std::string extract_prompt_file;
  std::string keyword_prompt_file;
  double link_threshold = 0.7;
  double flag_threshold = 0.8;
  int parallelism = 4;
  int retry_budget = 2;
  std::uint64_t stub_seed = 0;
  std::string timestamp;
};

ProviderConfig provider_config(ProviderKind kind, const std::string& choice,
                               const DecomposeArgs& a) {
  ProviderConfig c;
  c.kind = kind;
  c.retry_budget = a.retry_budget;
  c.parallelism_limit = a.parallelism;
  c.seed = a.stub_seed;
  if (choice == "stub") {
    c.backend = BackendKind::Stub;
  } else if (choice == "replay") {
    c.backend = BackendKind::Replay;
  } else if (choice == "remote") {
    const auto key = env_or_empty(a.api_key_env);
    c.api_key = key;
    switch (kind) {
      case ProviderKind::Embedder:
        c.backend = BackendKind::RemoteEmbedding;
        c.endpoint = a.embedding_endpoint;
        c.model = a.embedding_model;
        break;
      case ProviderKind::RelevanceScorer:
        c.backend = BackendKind::RemoteEmbedding;
        c.endpoint = a.rerank_endpoint;
        c.model = a.rerank_model;
        break;
      default:
        c.backend = BackendKind::RemoteLlm;
        c.endpoint = a.endpoint;
        c.model = a.model;
    }
  } else {
    throw ValidationError("unknown provider '" + choice + "' (expected stub, replay or remote)");
  }
  if (kind == ProviderKind::ClaimExtractor && !a.extract_prompt_file.empty()) {
    c.prompt_template = read_file(a.extract_prompt_file);
  }
  if (kind == ProviderKind::KeywordSummarizer && !a.keyword_prompt_file.empty()) {
    c.prompt_template = read_file(a.keyword_prompt_file);
  }
  return c;
}

int cmd_decompose(const DecomposeArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.link_threshold > 0.0 && a.link_threshold <= 1.0)) {
    throw ValidationError("--link-threshold must be in (0, 1]");
  }
  if (!(a.flag_threshold >= 0.0 && a.flag_threshold <= 1.0)) {
    throw ValidationError("--flag-threshold must be in [0, 1]");
  }
  const auto pick = [&](const std::string& v) { return v.empty() ? a.provider : v; };
  json config = {{"pairs", a.pairs},
                 {"out", a.out},
                 {"extractor", pick(a.extractor)},
                 {"scorer", pick(a.scorer)},
                 {"embedder", pick(a.embedder)},
                 {"summarizer", pick(a.summarizer)},
                 {"transcript", a.transcript},
                 {"record", a.record},
                 {"endpoint", a.endpoint},
                 {"model", a.model},
                 {"embedding_endpoint", a.embedding_endpoint},
                 {"rerank_endpoint", a.rerank_endpoint},
                 {"link_threshold", a.link_threshold},
                 {"flag_threshold", a.flag_threshold},
                 {"parallelism", a.parallelism},
                 {"retry_budget", a.retry_budget},
                 {"stub_seed", a.stub_seed}};
  const std::string timestamp = a.timestamp.empty() ? utc_timestamp() : a.timestamp;
  config["timestamp"] = timestamp;
  RunManifest manifest("decompose", config);
  manifest.set_seed(a.stub_seed);
  manifest.add_input(a.pairs);

  std::shared_ptr<Transcript> transcript;
  if (!a.transcript.empty()) {
    transcript = Transcript::load(a.transcript);
    manifest.add_input(a.transcript);
  }
  std::shared_ptr<Transcript> recorder = a.record.empty() ? nullptr : std::make_shared<Transcript>();

  PipelineProviders providers;
  providers.extractor = make_provider<ClaimExtractor>(
      provider_config(ProviderKind::ClaimExtractor, pick(a.extractor), a), transcript, recorder);
  providers.scorer = make_provider<RelevanceScorer>(
      provider_config(ProviderKind::RelevanceScorer, pick(a.scorer), a), transcript, recorder);
  providers.embedder = make_provider<Embedder>(
      provider_config(ProviderKind::Embedder, pick(a.embedder), a), transcript, recorder);
  providers.summarizer = make_provider<KeywordSummarizer>(
      provider_config(ProviderKind::KeywordSummarizer, pick(a.summarizer), a), transcript,
      recorder);

  PipelineOptions options;
  options.link_threshold = a.link_threshold;
  options.decompose.flag_threshold = a.flag_threshold;
  options.decompose.parallelism = a.parallelism;
  options.decompose.timestamp = timestamp;

  const auto pairs = read_pairs(a.pairs);
  std::vector<DecompositionResult> docs;
  std::size_t claims = 0;
  std::size_t links = 0;
  std::size_t fallbacks = 0;
  for (const auto& pair : pairs) {
    docs.push_back(run_pipeline(pair, providers, options));
    claims += docs.back().claims_a.size() + docs.back().claims_b.size();
    links += docs.back().links.size();
    fallbacks += docs.back().provenance.events.size();
  }
  write_decompositions(a.out, docs);
  manifest.add_output(a.out);
  if (recorder) {
    recorder->save(a.record);
    manifest.add_output(a.record);
  }
  out << "pairs: " << docs.size() << "\nclaims: " << claims << "\nlinks: " << links
      << "\nprovenance_events: " << fallbacks << "\n";
  if (fallbacks > 0) err << "note: " << fallbacks << " fallback/flag events recorded in provenance\n";
  manifest.write(a.out + ".manifest.json");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SweepArgs {
  std::string pairs;
  std::string decomp;
  std::string strategies = "all";
  std::string betas = "0:10:0.5";
  int trials = 1000;
  std::uint64_t seed = 42;
  std::string aggregation = "mean";
  double relevance_threshold = 0.3;
  double link_threshold = 0.7;
  std::string out;
  std::string plot;
  std::string instances;
  std::string judge = "stub";
  std::string transcript;
  std::string record;
  std::string endpoint;
  std::string model = "gpt-4o-2024-08-06";
  std::string api_key_env = "OPENAI_API_KEY";
  int parallelism = 4;
  int retry_budget = 2;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  sim::SimulationConfig config;
  config.strategies = sim::parse_strategies(a.strategies);
  config.betas = sim::parse_beta_grid(a.betas);
  config.trials = a.trials;
  config.master_seed = a.seed;
  config.aggregation = sim::aggregation_from_string(a.aggregation);
  config.relevance_threshold = a.relevance_threshold;
  config.link_similarity_threshold = a.link_threshold;
  config.parallelism = a.parallelism;
  config.validate();

  const std::string plot_path = a.plot.empty() ? a.out + ".plot.json" : a.plot;
  std::vector<std::string> strategy_names;
  for (auto s : config.strategies) strategy_names.emplace_back(sim::to_string(s));
  RunManifest manifest("simulate sweep", {{"pairs", a.pairs},
                                          {"decomp", a.decomp},
                                          {"strategies", strategy_names},
                                          {"betas", config.betas},
                                          {"trials", a.trials},
                                          {"seed", a.seed},
                                          {"aggregation", a.aggregation},
                                          {"relevance_threshold", a.relevance_threshold},
                                          {"link_threshold", a.link_threshold},
                                          {"judge", a.judge},
                                          {"transcript", a.transcript},
                                          {"out", a.out},
                                          {"plot", plot_path},
                                          {"instances", a.instances}});
  manifest.set_seed(a.seed);
  manifest.add_input(a.pairs);
  if (!a.decomp.empty()) manifest.add_input(a.decomp);

  ProviderConfig jc;
  jc.kind = ProviderKind::HelpfulnessJudge;
  jc.retry_budget = a.retry_budget;
  jc.parallelism_limit = a.parallelism;
  if (a.judge == "stub") {
    jc.backend = BackendKind::Stub;
  } else if (a.judge == "replay") {
    jc.backend = BackendKind::Replay;
  } else if (a.judge == "remote") {
    jc.backend = BackendKind::RemoteLlm;
    jc.endpoint = a.endpoint;
    jc.model = a.model;
    jc.api_key = env_or_empty(a.api_key_env);
  } else {
    throw ValidationError("unknown judge '" + a.judge + "' (expected stub, replay or remote)");
  }
  std::shared_ptr<Transcript> transcript;
  if (!a.transcript.empty()) {
    transcript = Transcript::load(a.transcript);
    manifest.add_input(a.transcript);
  }
  std::shared_ptr<Transcript> recorder = a.record.empty() ? nullptr : std::make_shared<Transcript>();
  auto judge = make_provider<HelpfulnessJudge>(jc, transcript, recorder);

  const auto pairs = read_pairs(a.pairs);
  std::map<std::string, DecompositionResult> docs;
  if (!a.decomp.empty()) {
    for (auto& d : read_decompositions(a.decomp)) {
      const auto id = d.pair_id;
      docs.emplace(id, std::move(d));
    }
  }

  const auto result = sim::run_sweep(pairs, docs, *judge, config);
  sim::write_sweep_csv(a.out, result);
  manifest.add_output(a.out);
  {
    std::ofstream plot(plot_path);
    if (!plot) throw DataError("cannot write " + plot_path);
    plot << sim::plot_data(result).dump(2) << "\n";
  }
  manifest.add_output(plot_path);
  if (!a.instances.empty()) {
    sim::write_instances_csv(a.instances, result);
    manifest.add_output(a.instances);
  }
  if (recorder) {
    recorder->save(a.record);
    manifest.add_output(a.record);
  }
  for (const auto& s : result.skipped) {
    err << "skipped " << s.pair_id << " [" << sim::to_string(s.strategy) << "]: " << s.reason << "\n";
  }
  const auto finished = manifest.finish();
  manifest.write(a.out + ".manifest.json");
  out << finished.dump(2) << "\n";
  return kExitOk;
}

struct SyntheticArgs {
  std::size_t instances = 50;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int cmd_synthetic(const SyntheticArgs& a, std::ostream& out) {
  namespace fs = std::filesystem;
  sim::SyntheticSpec spec;
  spec.instances = a.instances;
  spec.seed = a.seed;
  if (spec.instances == 0) throw ValidationError("--instances must be >= 1");
  fs::create_directories(a.out_dir);
  const auto world = sim::generate_world(spec);
  const auto pairs_path = (fs::path(a.out_dir) / "pairs.jsonl").string();
  const auto decomp_path = (fs::path(a.out_dir) / "decomp.jsonl").string();
  const auto transcript_path = (fs::path(a.out_dir) / "judge_transcript.json").string();
  RunManifest manifest("simulate synthetic",
                       {{"instances", a.instances}, {"seed", a.seed}, {"out_dir", a.out_dir}});
  manifest.set_seed(a.seed);
  write_pairs(pairs_path, world.pairs);
  write_decompositions(decomp_path, world.decompositions);
  world.judge_transcript->save(transcript_path);
  for (const auto& p : {pairs_path, decomp_path, transcript_path}) manifest.add_output(p);
  manifest.write((fs::path(a.out_dir) / "manifest.json").string());
  out << "pairs: " << pairs_path << "\ndecompositions: " << decomp_path
      << "\njudge transcript: " << transcript_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// serve

struct ServeArgs {
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string store;
  std::string pairs;
  std::string decomp;
  std::string token;
  std::size_t snapshot_every = 100;
};

std::atomic<httplib::Server*> g_server{nullptr};

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  auto pairs = read_pairs(a.pairs);
  auto docs = read_decompositions(a.decomp);
  service::ServiceOptions options;
  options.store_dir = a.store;
  options.snapshot_every = a.snapshot_every;
  service::Service svc(std::move(pairs), std::move(docs), options);
  auto server = service::make_http_server(svc, a.token);
  g_server = server.get();
  std::signal(SIGINT, [](int) {
    if (auto* s = g_server.load()) s->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (auto* s = g_server.load()) s->stop();
  });
  out << "serving " << svc.eligible_pool_size() << " tasks on http://" << a.host << ":" << a.port
      << std::endl;
  const bool ok = server->listen(a.host, a.port);
  g_server = nullptr;
  svc.snapshot();
  if (!ok) throw ValidationError("cannot listen on " + a.host + ":" + std::to_string(a.port));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"claimwise: decomposed pairwise preference collection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CLAIMWISE_VERSION);

  DatasetArgs ds;
  auto* dataset = app.add_subcommand("dataset", "Parse, filter and sample HH-RLHF style records");
  dataset->add_option("--in", ds.in, "Input JSON-lines with chosen/rejected")->required();
  dataset->add_option("--out", ds.out, "Output JSON-lines of response pairs")->required();
  dataset->add_option("--rejected", ds.rejected_out, "Optional rejection report (JSON-lines)");
  dataset->add_option("--rounds", ds.rounds, "Allowed conversation rounds")->capture_default_str();
  dataset->add_option("--min-sentences", ds.min_sentences)->capture_default_str();
  dataset->add_option("--max-word-diff", ds.max_word_diff)->capture_default_str();
  dataset->add_option("--blocklist", ds.blocklist, "Keywords that exclude a pair")->delimiter(',');
  dataset->add_option("--sample", ds.sample, "Pairs to sample (0 keeps all)")->capture_default_str();
  dataset->add_option("--seed", ds.seed)->capture_default_str();
  dataset->add_flag("--no-shuffle", ds.no_shuffle, "Keep the chosen response on side A");

  DecomposeArgs dc;
  auto* decompose = app.add_subcommand("decompose", "Decompose, rank, link and label response pairs");
  decompose->add_option("--pairs", dc.pairs)->required();
  decompose->add_option("--out", dc.out)->required();
  decompose->add_option("--provider", dc.provider, "stub | replay | remote")->capture_default_str();
  decompose->add_option("--extractor", dc.extractor, "Override --provider for claim extraction");
  decompose->add_option("--scorer", dc.scorer, "Override --provider for relevance scoring");
  decompose->add_option("--embedder", dc.embedder, "Override --provider for embeddings");
  decompose->add_option("--summarizer", dc.summarizer, "Override --provider for keywords");
  decompose->add_option("--transcript", dc.transcript, "Replay transcript (JSON)");
  decompose->add_option("--record", dc.record, "Write a transcript of every provider call");
  decompose->add_option("--endpoint", dc.endpoint, "Chat completions URL");
  decompose->add_option("--model", dc.model)->capture_default_str();
  decompose->add_option("--embedding-endpoint", dc.embedding_endpoint);
  decompose->add_option("--embedding-model", dc.embedding_model);
  decompose->add_option("--rerank-endpoint", dc.rerank_endpoint);
  decompose->add_option("--rerank-model", dc.rerank_model);
  decompose->add_option("--api-key-env", dc.api_key_env)->capture_default_str();
  decompose->add_option("--extract-prompt", dc.extract_prompt_file, "Claim extraction template file");
  decompose->add_option("--keyword-prompt", dc.keyword_prompt_file, "Keyword template file");
  decompose->add_option("--link-threshold", dc.link_threshold)->capture_default_str();
  decompose->add_option("--flag-threshold", dc.flag_threshold)->capture_default_str();
  decompose->add_option("--parallelism", dc.parallelism)->capture_default_str();
  decompose->add_option("--retry-budget", dc.retry_budget)->capture_default_str();
  decompose->add_option("--stub-seed", dc.stub_seed)->capture_default_str();
  decompose->add_option("--timestamp", dc.timestamp, "Provenance timestamp (default: now)");

  auto* simulate = app.add_subcommand("simulate", "Simulated annotator experiments");
  simulate->require_subcommand(1);
  SweepArgs sw;
  auto* sweep = simulate->add_subcommand("sweep", "Accuracy over a rationality grid");
  sweep->add_option("--pairs", sw.pairs)->required();
  sweep->add_option("--decomp", sw.decomp);
  sweep->add_option("--strategies", sw.strategies)->capture_default_str();
  sweep->add_option("--betas", sw.betas, "lo:hi:step")->capture_default_str();
  sweep->add_option("--trials", sw.trials)->capture_default_str();
  sweep->add_option("--seed", sw.seed)->capture_default_str();
  sweep->add_option("--aggregation", sw.aggregation, "mean | sum")->capture_default_str();
  sweep->add_option("--relevance-threshold", sw.relevance_threshold)->capture_default_str();
  sweep->add_option("--link-threshold", sw.link_threshold)->capture_default_str();
  sweep->add_option("--out", sw.out, "Sweep CSV")->required();
  sweep->add_option("--plot", sw.plot, "Plot data JSON (default <out>.plot.json)");
  sweep->add_option("--instances", sw.instances, "Per-instance breakdown CSV");
  sweep->add_option("--judge", sw.judge, "stub | replay | remote")->capture_default_str();
  sweep->add_option("--transcript", sw.transcript);
  sweep->add_option("--record", sw.record);
  sweep->add_option("--endpoint", sw.endpoint);
  sweep->add_option("--model", sw.model)->capture_default_str();
  sweep->add_option("--api-key-env", sw.api_key_env)->capture_default_str();
  sweep->add_option("--parallelism", sw.parallelism)->capture_default_str();
  sweep->add_option("--retry-budget", sw.retry_budget)->capture_default_str();

  SyntheticArgs sy;
  auto* synthetic = simulate->add_subcommand("synthetic", "Generate the synthetic noise-model fixture");
  synthetic->add_option("--instances", sy.instances)->capture_default_str();
  synthetic->add_option("--seed", sy.seed)->capture_default_str();
  synthetic->add_option("--out-dir", sy.out_dir)->required();

  ServeArgs sv;
  auto* serve = app.add_subcommand("serve", "Run the annotation HTTP service");
  serve->add_option("--port", sv.port)->capture_default_str();
  serve->add_option("--host", sv.host)->capture_default_str();
  serve->add_option("--store", sv.store)->required();
  serve->add_option("--pairs", sv.pairs)->required();
  serve->add_option("--decomp", sv.decomp)->required();
  serve->add_option("--token", sv.token, "Shared X-Session-Token");
  serve->add_option("--snapshot-every", sv.snapshot_every)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << CLAIMWISE_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*dataset) return cmd_dataset(ds, out, err);
    if (*decompose) return cmd_decompose(dc, out, err);
    if (*sweep) return cmd_sweep(sw, out, err);
    if (*synthetic) return cmd_synthetic(sy, out);
    if (*serve) return cmd_serve(sv, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ProviderError& e) {
    err << "provider error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const nlohmann::json::exception& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace claimwise::cli
