#pragma once

#include <cstdint>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "sketchls/problems.hpp"
#include "sketchls/sketch.hpp"
#include "sketchls/solver.hpp"

namespace sketchls::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;    // validation / parse / IO problems
inline constexpr int kExitSolver = 2;   // evaluation or geometry failure

// Resolves a sketch-size expression against the problem dimension: either a
// plain positive integer ("100") or a multiple of the dimension ("2d", "d").
// Throws std::invalid_argument otherwise.
int resolve_sketch_size(const std::string& expr, int dim);

struct RunOptions {
  std::string problem = "rosenbrock";  // rosenbrock | random | dataset
  int dim = 10;
  int nres = 0;  // residual count for `random`; 0 means 10 * dim
  std::string dataset;
  LinkKind link = LinkKind::linear;
  bool intercept = false;

  SketchKind sketch = SketchKind::none;
  std::string sketch_size = "d";
  int hash_nnz = 1;

  double budget = 2.0;  // evaluation budget as a multiple of d+1
  double max_time_s = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  int repeats = 1;

  std::string out;          // trace CSV path; empty skips the file
  std::string timings_out;  // timing-breakdown JSON path; empty skips
};

// Runs (problem x sketch-variant) for `repeats` seeds, writing a
// per-iteration trace CSV per run, a cumulative timing-breakdown JSON, a
// mean-trace CSV for multi-seed runs, and one summary line per run to
// `summary`. Returns a process exit code.
int run_bench(const RunOptions& options, std::ostream& summary = std::cout,
              std::ostream& errors = std::cerr);

struct ScalingOptions {
  std::vector<int> dims{50, 100, 200, 400};
  std::vector<SketchKind> variants{SketchKind::none};
  std::string sketch_size = "d";
  int hash_nnz = 1;
  double budget = 3.0;  // multiple of d+1
  std::uint64_t seed = 0;
  std::string out;  // report CSV path; empty skips the file
};

// Runs the chained Rosenbrock problem for every (dimension x variant) pair
// and reports the per-task runtime split plus the model-construction share
// of the total, one CSV row per run.
int scaling_report(const ScalingOptions& options,
                   std::ostream& summary = std::cout,
                   std::ostream& errors = std::cerr);

// Output helpers, exposed for tests.
void write_trace_csv(const std::string& path,
                     const std::vector<IterationRecord>& trace);
void write_timings_json(const std::string& path, const TaskTimers& timers);
std::string format_double(double value);  // shortest round-trip decimal form

}  // namespace sketchls::bench
