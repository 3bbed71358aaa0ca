#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace geogate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;

/// Flat key = value document mirroring the long flags of one subcommand.
struct RunConfig {
  std::vector<std::pair<std::string, std::string>> values;

  static RunConfig parse(const std::string& text);
  std::string str() const;
};

/// Entry point: argv[0] is the program name, argv[1] the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geogate::cli
