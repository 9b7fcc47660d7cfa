#pragma once

#include "minball/oracle.hpp"
#include "minball/solver.hpp"
#include "minball_cli/instance_io.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace minball::cli {

enum ExitCode : int {
  exit_certified = 0,
  exit_io_error = 1,
  exit_iteration_cap = 2,
  exit_not_certified = 3,
};

// Default tolerances with the activity tolerance taken from --tol, else from
// MINBALL_TOL, else the library default.
Tolerances resolve_tolerances(std::optional<double> flag);

struct RunRecord {
  std::string algorithm;
  std::string status;  // optimal, iteration_limit or error
  std::string message;
  CoveringBall ball;
  ActiveSet support;
  Vec weights;
  int iterations = 0;
  double wall_time_ms = 0.0;
  Certificate certificate;
  std::vector<TraceEntry> trace;
};

RunRecord run_algorithm(const Instance& inst, const std::string& algorithm,
                        const SolveOptions& opt);

struct BenchCell {
  int n = 2;
  int m = 10;
  std::vector<std::uint64_t> seeds;
};

struct BenchRow {
  int n;
  int m;
  std::uint64_t seed;
  std::string algorithm;
  double z;
  int iterations;
  double wall_time_ms;
  bool certified;
};

std::vector<BenchRow> run_bench(const std::vector<BenchCell>& cells,
                                const std::vector<std::string>& algorithms, double radius_max,
                                Distribution distribution, const SolveOptions& opt);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

// Parses "n,m,k" (seeds 1..k) or "n,m,a-b" (seeds a..b).
BenchCell parse_cell(const std::string& text);

// Entry point shared by the executable and the tests.  args excludes the
// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace minball::cli
