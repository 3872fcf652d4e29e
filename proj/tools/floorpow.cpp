// floorpow: exception scans, Gamma reports, lemma contract suites,
// exponent-pair arithmetic and exponential-sum sweeps.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "floorpow/report.hpp"

using floorpow::Command;
using floorpow::Format;
using floorpow::RunConfig;

namespace {

void parse_range(const std::string& text, RunConfig& config) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--range", "expected lo:hi");
  try {
    std::size_t used = 0;
    config.N_lo = std::stoull(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(text);
    const std::string hi = text.substr(colon + 1);
    config.N_hi = std::stoull(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(text);
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--range", "expected lo:hi with nonnegative integers, got " + text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floor-power representation toolkit: N = [p^c] + [m^c] with p prime and m squarefree"};
  app.require_subcommand(1);

  RunConfig config;
  std::string range;
  const std::map<std::string, Format> formats{{"json", Format::json}, {"csv", Format::csv}};

  auto common = [&](CLI::App* sub) {
    sub->add_option("-o,--output", config.output_path, "Output file (default: standard output)");
    sub->add_option("--format", config.format, "json or csv")->transform(CLI::CheckedTransformer(formats));
    sub->add_option("--threads", config.threads, "Worker threads (FLOORPOW_THREADS overrides)")
        ->check(CLI::PositiveNumber);
  };

  auto* scan = app.add_subcommand("scan", "List N in a range with no representation");
  scan->add_option("--c", config.c, "Exponent a/b with 1 < a/b < 2");
  scan->add_option("--range", range, "lo:hi, inclusive")->required();
  common(scan);

  auto* gamma = app.add_subcommand("gamma", "Gamma decomposition report for one N");
  gamma->add_option("--N", config.N, "Target integer")->required();
  gamma->add_option("--c", config.c, "Exponent a/b with 1 < a/b < 2");
  gamma->add_option("--rho", config.rho, "Window constant: P = rho N^(1/c), 0 < rho <= 1/2");
  common(gamma);

  auto* lemmas = app.add_subcommand("lemmas", "Run the lemma contract suites");
  lemmas->add_option("--seed", config.seed, "Seed for the randomized checks");
  lemmas->add_option("--coefficients-csv", config.coefficients_csv, "Also write Vaaler coefficients (h,re,im,b)");
  lemmas->add_option("--H", config.coefficients_H, "Degree for --coefficients-csv")->check(CLI::PositiveNumber);
  common(lemmas);

  auto* exppair = app.add_subcommand("exppair", "Apply a word of A/B processes to an exponent pair");
  exppair->add_option("word", config.word, "Letters A and B, applied right to left")->required();
  exppair->add_option("kappa", config.kappa, "Seed kappa")->required();
  exppair->add_option("lambda", config.lambda, "Seed lambda")->required();
  common(exppair);

  auto* sweep = app.add_subcommand("sweep", "|U(N, r, h/d^2)| over a (d, h, r) grid");
  sweep->add_option("--N", config.N, "Target integer")->required();
  sweep->add_option("--c", config.c, "Exponent a/b with 1 < a/b < 2");
  sweep->add_option("--rho", config.rho, "Window constant");
  sweep->add_option("--d-max", config.d_max, "Largest d")->check(CLI::PositiveNumber);
  sweep->add_option("--h-max", config.h_max, "Largest h")->check(CLI::PositiveNumber);
  sweep->add_option("--r-max", config.r_max, "Largest |r|")->check(CLI::NonNegativeNumber);
  common(sweep);

  try {
    app.parse(argc, argv);
    if (scan->parsed()) {
      config.command = Command::scan;
      parse_range(range, config);
    } else if (gamma->parsed()) {
      config.command = Command::gamma;
    } else if (lemmas->parsed()) {
      config.command = Command::lemmas;
    } else if (exppair->parsed()) {
      config.command = Command::exppair;
    } else {
      config.command = Command::sweep;
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return floorpow::kExitUsage;
  }
  return floorpow::run_command(config, std::cerr);
}
