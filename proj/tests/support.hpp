#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <unistd.h>

#include "claimwise/providers.hpp"
#include "claimwise/text.hpp"

namespace testing_support {

inline std::string data_path(const std::string& name) {
  return std::string(CLAIMWISE_TEST_DATA) + "/" + name;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("claimwise-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

/// Backend driven by a lambda; lets tests script completions and faults.
class FnBackend : public claimwise::Backend {
 public:
  explicit FnBackend(std::function<std::string(const claimwise::ProviderRequest&)> fn)
      : fn_(std::move(fn)) {}
  std::string complete(const claimwise::ProviderRequest& request) override { return fn_(request); }

 private:
  std::function<std::string(const claimwise::ProviderRequest&)> fn_;
};

template <typename P>
std::unique_ptr<P> fn_provider(claimwise::ProviderKind kind,
                               std::function<std::string(const claimwise::ProviderRequest&)> fn) {
  claimwise::ProviderConfig config;
  config.kind = kind;
  return std::make_unique<P>(config, std::make_unique<FnBackend>(std::move(fn)));
}

template <typename P>
std::unique_ptr<P> stub_provider(claimwise::ProviderKind kind) {
  claimwise::ProviderConfig config;
  config.kind = kind;
  config.backend = claimwise::BackendKind::Stub;
  return claimwise::make_provider<P>(config);
}

inline const char* kActorSentence =
    "In addition to his acting roles, he has written and directed two short films and is "
    "currently in development on his feature debut.";
inline const char* kActorCompletion =
    "Claim: He has acting roles\n"
    "Claim: He has written two short films\n"
    "Claim: He has directed two short films\n"
    "Claim: He is currently in development on his feature debut\n";
inline const char* kDoughSentence =
    "You can then add water and mix everything until you have a firm dough";
inline const char* kDoughCompletion =
    "Claim: You can then add water\n\nClaim:  You can mix everything until you have a firm dough\n";

/// Extractor transcript holding completions for the two published examples,
/// keyed exactly as the default extraction prompt would be.
inline std::shared_ptr<claimwise::Transcript> worked_example_transcript() {
  auto t = std::make_shared<claimwise::Transcript>();
  const auto tmpl = claimwise::default_prompt(claimwise::ProviderKind::ClaimExtractor);
  for (const auto& [sentence, completion] :
       {std::pair{kActorSentence, kActorCompletion}, std::pair{kDoughSentence, kDoughCompletion}}) {
    claimwise::ProviderRequest req{claimwise::ProviderKind::ClaimExtractor,
                                   claimwise::text::render_template(tmpl, {{"sentence", sentence}}),
                                   {}};
    t->put(claimwise::transcript_key(req), completion);
  }
  return t;
}

}  // namespace testing_support
