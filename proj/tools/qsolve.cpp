#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qsolve/cegqi.hpp"
#include "qsolve/parser.hpp"

namespace fs = std::filesystem;
using namespace qsolve;

namespace {

struct Config {
  std::string selector = "lw";
  std::string bounds = "lower";
  uint64_t budget = 10'000;
  bool trace = false;
  bool stats = false;
  bool check_model = false;
  std::string oracle;
  bool strict_nested = false;
  bool reduce_theta = false;
  bool machine = false;
  unsigned jobs = 1;
};

LraMode selector_mode(const std::string& s) {
  if (s == "simple") return LraMode::Simple;
  if (s == "lw") return LraMode::LwDelta;
  if (s == "fr") return LraMode::FrMid;
  if (s == "lw-inf") return LraMode::LwInf;
  if (s == "fr-inf") return LraMode::FrInf;
  throw CLI::ValidationError("--selector", "unknown selector: " + s);
}

SolverOptions make_options(const Config& cfg, bool eager) {
  SolverOptions opt;
  opt.mode = selector_mode(cfg.selector);
  opt.prefer_lower = cfg.bounds == "lower";
  opt.budget = cfg.budget;
  opt.trace = cfg.trace && !eager;
  opt.trace_out = &std::cout;
  opt.check_model = cfg.check_model;
  opt.strict_nested = cfg.strict_nested;
  opt.reduce_theta = cfg.reduce_theta;
  opt.eager = eager;
  return opt;
}

const char* verdict_token(Status s) {
  switch (s) {
    case Status::Sat: return "sat";
    case Status::Unsat: return "unsat";
    case Status::Unknown: return "unknown";
  }
  return "unknown";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunOutcome {
  Status status = Status::Unknown;
  std::string output;       // everything after the verdict line
  SolverStats stats;
  double millis = 0;
  std::string expect;
};

RunOutcome run_problem(const fs::path& path, const Config& cfg, bool quiet) {
  RunOutcome out;
  VarTable vt;
  Parser parser(vt);
  ParsedProblem problem = parser.parse(read_file(path));
  out.expect = problem.expect;

  std::ostringstream side;
  SolverOptions opt = make_options(cfg, false);
  if (quiet) opt.trace = false;
  std::ostringstream tracebuf;
  opt.trace_out = &tracebuf;

  auto t0 = std::chrono::steady_clock::now();
  Solver solver(vt, problem.logic, opt);
  Verdict v = solver.solve(problem.assertions);
  auto t1 = std::chrono::steady_clock::now();
  out.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
  out.status = v.status;
  out.stats = solver.stats();

  if (cfg.oracle == "eager") {
    // independent re-run with the full candidate closure; disagreement is
    // an internal error
    VarTable vt2;
    Parser p2(vt2);
    ParsedProblem prob2 = p2.parse(read_file(path));
    Solver eager(vt2, prob2.logic, make_options(cfg, true));
    Verdict ev = eager.solve(prob2.assertions);
    if (ev.status != Status::Unknown && v.status != Status::Unknown &&
        ev.status != v.status) {
      std::ostringstream dump;
      dump << "oracle disagreement on " << path.string() << ": lazy="
           << verdict_token(v.status) << " eager=" << verdict_token(ev.status) << "\n"
           << read_file(path);
      throw std::logic_error(dump.str());
    }
  }

  side << tracebuf.str();
  if (cfg.machine) {
    side << "file=" << path.string() << "\n"
         << "instances=" << out.stats.instances << "\n"
         << "ground_checks=" << out.stats.ground_checks << "\n"
         << "iterations=" << out.stats.iterations << "\n"
         << "time_ms=" << out.millis << "\n";
    if (v.status == Status::Unknown) side << "reason=" << v.reason << "\n";
  }
  if (v.status == Status::Sat && (problem.get_model || cfg.check_model) && !cfg.machine) {
    Printer pr(vt);
    for (VarId var : problem.declared) {
      side << "(define-fun " << vt.name(var) << " () "
           << (vt.sort(var) == Sort::Real ? "Real" : "Int") << " "
           << pr.rational(v.model.value(var)) << ")\n";
    }
  }
  if (cfg.stats && !cfg.machine) {
    side << "instantiations: " << out.stats.instances << "\n"
         << "ground checks: " << out.stats.ground_checks << "\n"
         << "time: " << out.millis << " ms\n";
  }
  out.output = side.str();
  return out;
}

int run_single(const fs::path& path, const Config& cfg) {
  RunOutcome out = run_problem(path, cfg, false);
  std::cout << verdict_token(out.status) << "\n" << out.output;
  return 0;
}

int run_corpus(const fs::path& dir, const Config& cfg) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".smt2") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<RunOutcome> results(files.size());
  std::vector<std::string> errors(files.size());
  std::atomic<size_t> next{0};
  unsigned jobs = std::max(1u, cfg.jobs);
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= files.size()) break;
      try {
        results[i] = run_problem(files[i], cfg, true);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  size_t mismatches = 0, unchecked = 0;
  for (size_t i = 0; i < files.size(); ++i) {
    std::string name = files[i].filename().string();
    if (!errors[i].empty()) {
      std::cout << name << " error " << errors[i] << "\n";
      ++mismatches;
      continue;
    }
    const RunOutcome& r = results[i];
    std::string got = verdict_token(r.status);
    std::string verdict;
    if (r.expect.empty()) {
      verdict = "unchecked";
      ++unchecked;
    } else if (r.expect == got) {
      verdict = "ok";
    } else {
      verdict = "MISMATCH(expected " + r.expect + ")";
      ++mismatches;
    }
    std::cout << name << " " << got << " " << verdict << " " << r.stats.instances
              << " instances " << r.millis << " ms\n";
  }
  std::cout << files.size() << " files, " << mismatches << " mismatches, " << unchecked
            << " unchecked\n";
  return mismatches == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"instantiation-based solver for quantified linear arithmetic"};
  Config cfg;
  std::string input;
  app.add_option("input", input, "input .smt2 file, or a directory for corpus mode")
      ->required();
  app.add_option("--selector", cfg.selector, "term selection mode")
      ->check(CLI::IsMember({"simple", "lw", "fr", "lw-inf", "fr-inf"}));
  app.add_option("--bounds", cfg.bounds, "bound preference when both sides exist")
      ->check(CLI::IsMember({"lower", "upper"}));
  app.add_option("--budget", cfg.budget, "instantiation budget");
  app.add_flag("--trace", cfg.trace, "log one line per instantiation");
  app.add_flag("--stats", cfg.stats, "print run statistics");
  app.add_flag("--check-model", cfg.check_model, "re-verify sat models and print them");
  app.add_option("--oracle", cfg.oracle, "cross-check against the eager closure")
      ->check(CLI::IsMember({"eager"}));
  app.add_flag("--strict-nested", cfg.strict_nested,
               "report unknown instead of sat on nested quantification");
  app.add_flag("--reduce-theta", cfg.reduce_theta, "shrink integer moduli when possible");
  app.add_flag("--machine", cfg.machine, "key=value output after the verdict");
  app.add_option("--jobs", cfg.jobs, "corpus worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    fs::path p(input);
    if (fs::is_directory(p)) return run_corpus(p, cfg);
    return run_single(p, cfg);
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const unsupported_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
