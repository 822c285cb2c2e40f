#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace claimwise::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitProvider = 3;

/// Record of one batch invocation, written next to its primary output.
class RunManifest {
 public:
  RunManifest(std::string command, nlohmann::json config);

  void add_input(const std::string& path);
  void add_output(const std::string& path);
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  /// Finalizes digests and duration.
  nlohmann::json finish() const;
  void write(const std::string& path) const;

 private:
  std::string command_;
  nlohmann::json config_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::optional<std::uint64_t> seed_;
  std::chrono::steady_clock::time_point start_;
};

std::string file_sha256(const std::string& path);

/// Entry point shared by the binary and the tests. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace claimwise::cli
