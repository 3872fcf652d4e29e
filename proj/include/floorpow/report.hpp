#pragma once

// Command implementations behind the floorpow tool.  Each command writes its
// report to the given stream and returns the process exit status.

#include <cstdint>
#include <iosfwd>
#include <string>

namespace floorpow {

enum class Command { scan, gamma, lemmas, exppair, sweep };
enum class Format { automatic, json, csv };

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitExceptions = 2;
inline constexpr int kExitUsage = 64;

struct RunConfig {
  Command command = Command::scan;
  std::string c = "82/79";
  std::uint64_t N_lo = 0;  // scan range
  std::uint64_t N_hi = 0;
  std::uint64_t N = 0;  // gamma, sweep
  std::string rho = "1/4";
  std::string output_path;  // empty: standard output
  Format format = Format::automatic;
  unsigned threads = 1;
  std::uint64_t seed = 42;
  // sweep grid
  std::uint64_t d_max = 3;
  std::int64_t h_max = 3;
  std::int64_t r_max = 3;
  // exppair
  std::string word = "BA";
  std::string kappa = "13/84";
  std::string lambda = "55/84";
  // lemmas: optional Vaaler coefficient table
  std::string coefficients_csv;
  std::int64_t coefficients_H = 100;
};

std::string to_string(Command command);
std::string to_string(Format format);

// FLOORPOW_THREADS, when set to a positive integer, wins over the flag.
unsigned resolve_threads(unsigned requested);

int cmd_scan(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_gamma(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_lemmas(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_exppair(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);

// Dispatches on config.command, opens output_path and maps errors to exit
// codes: usage problems (bad exponent, bad rational) 64, anything else 1.
int run_command(const RunConfig& config, std::ostream& err);

}  // namespace floorpow
