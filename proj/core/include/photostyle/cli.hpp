#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "photostyle/pipeline.hpp"

namespace photostyle {

struct CliOptions {
  std::filesystem::path content;
  std::filesystem::path style;
  std::filesystem::path out;
  std::optional<std::filesystem::path> content_labels;
  std::optional<std::filesystem::path> style_labels;
  bool timing_only = false;  ///< run and report timing without writing the output
  PipelineConfig config;
};

/// Thrown by parse_cli for bad or missing flags. `usage` holds the help text.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& what, std::string usage)
      : std::runtime_error(what), usage_(std::move(usage)) {}
  const std::string& usage() const noexcept { return usage_; }

 private:
  std::string usage_;
};

/// Parses arguments (without the program name). Returns nullopt when help was requested.
std::optional<CliOptions> parse_cli(const std::vector<std::string>& args, std::ostream& help_out);

/// Exit codes: 0 success, 1 usage error, 2 runtime error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace photostyle
