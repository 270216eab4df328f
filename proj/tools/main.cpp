#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sketchls/bench.hpp"

namespace {

sketchls::SketchKind parse_sketch(const std::string& name, const char* flag) {
  const auto kind = sketchls::sketch_kind_from_string(name);
  if (!kind.has_value()) {
    throw std::invalid_argument(
        std::string(flag) + ": unknown sketch '" + name +
        "' (expected none, gaussian, sampling or hashing)");
  }
  return *kind;
}

sketchls::LinkKind parse_link(const std::string& name) {
  if (name == "linear") return sketchls::LinkKind::linear;
  if (name == "logistic") return sketchls::LinkKind::logistic;
  throw std::invalid_argument("--link: unknown link '" + name +
                              "' (expected linear or logistic)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivative-free nonlinear least-squares solver with "
               "residual-space sketching"};
  app.require_subcommand(1);

  // --- run: one benchmark configuration -----------------------------------
  auto* run = app.add_subcommand(
      "run", "Solve one problem and write trace/timing files");
  sketchls::bench::RunOptions ropt;
  std::string run_sketch = "none";
  std::string run_link = "linear";
  run->add_option("--problem", ropt.problem,
                  "Problem family: rosenbrock, random or dataset")
      ->capture_default_str();
  run->add_option("--dim", ropt.dim, "Problem dimension d")
      ->capture_default_str();
  run->add_option("--nres", ropt.nres,
                  "Residual count n for --problem random (default 10*d)");
  run->add_option("--dataset", ropt.dataset,
                  "CSV file for --problem dataset (header row, label last)");
  run->add_option("--link", run_link,
                  "Dataset link function: linear or logistic")
      ->capture_default_str();
  run->add_flag("--intercept", ropt.intercept,
                "Add an intercept coordinate to dataset problems");
  run->add_option("--sketch", run_sketch,
                  "Sketch kind: none, gaussian, sampling or hashing")
      ->capture_default_str();
  run->add_option("--sketch-size", ropt.sketch_size,
                  "Sketch rows m: integer or multiple of d such as 2d")
      ->capture_default_str();
  run->add_option("--hash-nnz", ropt.hash_nnz,
                  "Nonzeros per column for hashing sketches")
      ->capture_default_str();
  run->add_option("--budget", ropt.budget,
                  "Evaluation budget as a multiple of d+1")
      ->capture_default_str();
  run->add_option("--max-time", ropt.max_time_s, "Wall-time budget (seconds)");
  run->add_option("--seed", ropt.seed, "Base random seed")
      ->capture_default_str();
  run->add_option("--repeats", ropt.repeats,
                  "Independent runs with seeds seed, seed+1, ...")
      ->capture_default_str();
  run->add_option("--out", ropt.out, "Per-iteration trace CSV path");
  run->add_option("--timings-out", ropt.timings_out,
                  "Timing-breakdown JSON path");

  // --- scaling: runtime split across dimensions ---------------------------
  auto* scaling = app.add_subcommand(
      "scaling", "Per-task runtime split of Rosenbrock runs across dimensions");
  sketchls::bench::ScalingOptions sopt;
  std::vector<std::string> scaling_variants{"none"};
  scaling->add_option("--dims", sopt.dims, "Dimensions to run")
      ->capture_default_str();
  scaling->add_option("--variants", scaling_variants,
                      "Sketch kinds to run at every dimension")
      ->capture_default_str();
  scaling->add_option("--sketch-size", sopt.sketch_size,
                      "Sketch rows m for the sketched variants")
      ->capture_default_str();
  scaling->add_option("--hash-nnz", sopt.hash_nnz,
                      "Nonzeros per column for hashing sketches")
      ->capture_default_str();
  scaling->add_option("--budget", sopt.budget,
                      "Evaluation budget as a multiple of d+1")
      ->capture_default_str();
  scaling->add_option("--seed", sopt.seed, "Random seed")
      ->capture_default_str();
  scaling->add_option("--out", sopt.out, "Report CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sketchls::bench::kExitUsage;
  }

  try {
    if (run->parsed()) {
      ropt.sketch = parse_sketch(run_sketch, "--sketch");
      ropt.link = parse_link(run_link);
      return sketchls::bench::run_bench(ropt);
    }
    sopt.variants.clear();
    for (const auto& name : scaling_variants) {
      sopt.variants.push_back(parse_sketch(name, "--variants"));
    }
    return sketchls::bench::scaling_report(sopt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sketchls::bench::kExitUsage;
  }
}
