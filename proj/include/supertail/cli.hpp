#pragma once

// Command-line front end. Every command is a pure function of its RunConfig:
// repeated runs with the same flags write identical bytes.
//
// Exit codes: 0 success, 1 usage error, 2 verification failure,
// 3 oracle mismatch.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "supertail/binomial.hpp"
#include "supertail/simulate.hpp"

namespace supertail::cli {

enum class Command { bound, sweep, constants, compare, verify, oracle_check };
enum class Format { json, csv, table };
enum class Units { y, x };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerifyFailed = 2;
inline constexpr int kExitOracleMismatch = 3;

struct Problem {
  std::int64_t n = 0;
  std::optional<Probability> p;            // lattice parameterisation
  std::optional<double> d;                 // martingale parameterisation
  std::optional<double> sigma;
  std::vector<double> sigmas;
};

struct Grid {
  double start = 0.0;
  std::optional<double> stop;  // defaults to n
  double step = 0.1;
};

struct RunConfig {
  Command command = Command::bound;
  Problem problem;
  Units units = Units::x;
  std::vector<double> query;
  Format format = Format::json;
  std::optional<std::string> out_path;
  std::int64_t trials = 1'000'000;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
  std::vector<FamilyKind> families;
  double drift = 0.1;
  Grid grid;
  double oracle_step = 1e-3;
  std::int64_t oracle_queries = 10'000;
};

// Parses "0.03" or "3/100".
Probability parse_probability(const std::string& text);

// Throws std::invalid_argument (usage errors) with a message naming the flag.
RunConfig parse_args(const std::vector<std::string>& args);

// Runs one command, writing the report to `out`. Returns the exit code.
int execute(const RunConfig& config, std::ostream& out);

// parse_args + execute, with errors reported on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace supertail::cli
