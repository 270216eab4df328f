#include "sketchls/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace sketchls::bench {

namespace {

Problem build_problem(const RunOptions& opt) {
  if (opt.problem == "rosenbrock") {
    return gen_rosenbrock(opt.dim);
  }
  if (opt.problem == "random") {
    const int n = opt.nres > 0 ? opt.nres : 10 * opt.dim;
    return random_nlls(opt.dim, n, opt.seed);
  }
  if (opt.problem == "dataset") {
    if (opt.dataset.empty()) {
      throw std::invalid_argument(
          "--dataset is required for --problem dataset");
    }
    return dataset_problem(opt.dataset, opt.link, opt.intercept);
  }
  throw std::invalid_argument("--problem: unknown problem '" + opt.problem +
                              "' (expected rosenbrock, random or dataset)");
}

SolverConfig build_config(const RunOptions& opt, const Problem& problem,
                          std::uint64_t seed) {
  SolverConfig cfg;
  cfg.sketch.kind = opt.sketch;
  if (opt.sketch != SketchKind::none) {
    cfg.sketch.m = resolve_sketch_size(opt.sketch_size, problem.dim);
  }
  if (opt.sketch == SketchKind::hashing && opt.hash_nnz < 1) {
    throw std::invalid_argument("--hash-nnz must be at least 1, got " +
                                std::to_string(opt.hash_nnz));
  }
  cfg.sketch.hash_nnz = opt.hash_nnz;
  cfg.sketch.seed = seed;
  cfg.seed = seed;
  if (!(opt.budget > 0.0)) {
    throw std::invalid_argument("--budget must be positive");
  }
  cfg.max_evals =
      static_cast<long>(std::llround(opt.budget * (problem.dim + 1)));
  cfg.max_evals = std::max<long>(cfg.max_evals, 1);
  cfg.max_time_s = opt.max_time_s;
  return cfg;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix + path.substr(dot);
}

void summary_line(std::ostream& out, const Problem& problem,
                  const SolverConfig& cfg, const SolveResult& result) {
  out << "problem=" << problem.name
      << " variant=" << to_string(cfg.sketch.kind)
      << " m=" << (cfg.sketch.kind == SketchKind::none ? problem.n_residuals
                                                       : cfg.sketch.m)
      << " evals=" << result.n_evals
      << " time=" << format_double(result.wall_time_s)
      << " f_final=" << format_double(result.f_final)
      << " status=" << to_string(result.status) << "\n";
}

// Mean of f_best across runs at matched evaluation counts: for each
// evaluation count in the common range, every run contributes its best
// objective value at that point of its own budget.
void write_mean_trace_csv(const std::string& path,
                          const std::vector<SolveResult>& results) {
  long first = 0;
  long last = std::numeric_limits<long>::max();
  std::set<long> grid;
  for (const auto& r : results) {
    if (r.trace.empty()) return;
    first = std::max(first, r.trace.front().n_evals);
    last = std::min(last, r.trace.back().n_evals);
    for (const auto& rec : r.trace) grid.insert(rec.n_evals);
  }

  std::ofstream file(path);
  if (!file) {
    throw std::runtime_error("cannot write mean trace CSV '" + path + "'");
  }
  file << "n_evals,f_best_mean\n";
  for (long e : grid) {
    if (e < first || e > last) continue;
    double sum = 0.0;
    for (const auto& r : results) {
      double f = r.trace.front().f_best;
      for (const auto& rec : r.trace) {
        if (rec.n_evals > e) break;
        f = rec.f_best;
      }
      sum += f;
    }
    file << e << ',' << format_double(sum / results.size()) << "\n";
  }
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

int resolve_sketch_size(const std::string& expr, int dim) {
  if (expr.empty()) {
    throw std::invalid_argument("--sketch-size: empty expression");
  }
  const bool dim_multiple = expr.back() == 'd';
  std::string digits = dim_multiple ? expr.substr(0, expr.size() - 1) : expr;
  if (dim_multiple && digits.empty()) digits = "1";
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || value < 1) {
    throw std::invalid_argument(
        "--sketch-size: cannot parse '" + expr +
        "' (expected a positive integer or '<k>d', e.g. 100 or 2d)");
  }
  return dim_multiple ? value * dim : value;
}

void write_trace_csv(const std::string& path,
                     const std::vector<IterationRecord>& trace) {
  std::ofstream file(path);
  if (!file) {
    throw std::runtime_error("cannot write trace CSV '" + path + "'");
  }
  file << "k,n_evals,wall_time_s,f_best,delta,rho,step_norm\n";
  for (const auto& rec : trace) {
    file << rec.k << ',' << rec.n_evals << ','
         << format_double(rec.wall_time_s) << ',' << format_double(rec.f_best)
         << ',' << format_double(rec.delta) << ','
         << (rec.rho_defined ? format_double(rec.rho) : "nan") << ','
         << format_double(rec.step_norm) << "\n";
  }
}

void write_timings_json(const std::string& path, const TaskTimers& timers) {
  nlohmann::json doc;
  for (int i = 0; i < kNumTasks; ++i) {
    doc[std::string(kTaskNames[i])] = timers.seconds(static_cast<Task>(i));
  }
  doc["total"] = timers.total();
  std::ofstream file(path);
  if (!file) {
    throw std::runtime_error("cannot write timings JSON '" + path + "'");
  }
  file << doc.dump(2) << "\n";
}

int run_bench(const RunOptions& opt, std::ostream& summary,
              std::ostream& errors) {
  try {
    if (opt.repeats < 1) {
      throw std::invalid_argument("--repeats must be at least 1");
    }
    const Problem problem = build_problem(opt);

    std::vector<SolveResult> results;
    TaskTimers cumulative;
    bool solver_failed = false;
    for (int rep = 0; rep < opt.repeats; ++rep) {
      const SolverConfig cfg = build_config(opt, problem, opt.seed + rep);
      SolveResult result = solve(problem, cfg);
      cumulative += result.timers;
      summary_line(summary, problem, cfg, result);
      solver_failed |= result.status == SolveStatus::eval_failure;
      if (!opt.out.empty()) {
        const std::string path =
            opt.repeats == 1
                ? opt.out
                : with_suffix(opt.out, "_rep" + std::to_string(rep));
        write_trace_csv(path, result.trace);
      }
      results.push_back(std::move(result));
    }
    if (!opt.out.empty() && opt.repeats > 1) {
      write_mean_trace_csv(with_suffix(opt.out, "_mean"), results);
    }
    if (!opt.timings_out.empty()) {
      write_timings_json(opt.timings_out, cumulative);
    }
    return solver_failed ? kExitSolver : kExitOk;
  } catch (const EvaluationError& e) {
    errors << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const GeometryError& e) {
    errors << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    errors << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int scaling_report(const ScalingOptions& opt, std::ostream& summary,
                   std::ostream& errors) {
  try {
    if (opt.dims.empty()) {
      throw std::invalid_argument("--dims: need at least one dimension");
    }
    for (int d : opt.dims) {
      if (d < 2) {
        throw std::invalid_argument(
            "--dims: dimensions must be at least 2, got " + std::to_string(d));
      }
    }
    if (opt.variants.empty()) {
      throw std::invalid_argument("--variants: need at least one variant");
    }
    if (!(opt.budget > 0.0)) {
      throw std::invalid_argument("--budget must be positive");
    }

    std::ofstream file;
    if (!opt.out.empty()) {
      file.open(opt.out);
      if (!file) {
        throw std::runtime_error("cannot write report CSV '" + opt.out + "'");
      }
    }
    const auto header = [] {
      std::string h = "d,variant,total_s";
      for (const auto& name : kTaskNames) {
        h += ',';
        h += name;
        h += "_s";
      }
      h += ",model_fraction";
      return h;
    }();
    if (file.is_open()) file << header << "\n";
    summary << header << "\n";

    for (int d : opt.dims) {
      const Problem problem = gen_rosenbrock(d);
      for (SketchKind variant : opt.variants) {
        SolverConfig cfg;
        cfg.sketch.kind = variant;
        if (variant != SketchKind::none) {
          cfg.sketch.m = resolve_sketch_size(opt.sketch_size, d);
          cfg.sketch.hash_nnz = opt.hash_nnz;
        }
        cfg.seed = opt.seed;
        cfg.sketch.seed = opt.seed;
        cfg.max_evals =
            static_cast<long>(std::llround(opt.budget * (d + 1)));
        const SolveResult result = solve(problem, cfg);

        const double total = result.timers.total();
        const double model_fraction =
            total > 0.0 ? (result.timers.seconds(Task::interp_solve) +
                           result.timers.seconds(Task::model_build)) / total
                        : 0.0;
        std::string row = std::to_string(d) + ',' +
                          std::string(to_string(variant)) + ',' +
                          format_double(total);
        for (int i = 0; i < kNumTasks; ++i) {
          row += ',';
          row += format_double(result.timers.seconds(static_cast<Task>(i)));
        }
        row += ',';
        row += format_double(model_fraction);
        if (file.is_open()) file << row << "\n";
        summary << row << "\n";
      }
    }
    return kExitOk;
  } catch (const EvaluationError& e) {
    errors << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const GeometryError& e) {
    errors << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    errors << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace sketchls::bench
