#include "minball_cli/commands.hpp"

#include "minball/dual.hpp"
#include "minball/geometry.hpp"
#include "minball/primal.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>

namespace minball::cli {

using nlohmann::json;

namespace {

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

json certificate_to_json(const Certificate& c) {
  return {{"feasibility_margin", c.feasibility_margin},
          {"kkt_residual", c.kkt_residual},
          {"support", c.support},
          {"barycentric", vec_to_json(c.barycentric)},
          {"accepted", c.accepted}};
}

json trace_to_json(const std::vector<TraceEntry>& trace) {
  json rows = json::array();
  for (const TraceEntry& t : trace) {
    rows.push_back({{"iteration", t.iteration},
                    {"z", t.z},
                    {"active_size", t.active_size},
                    {"path", t.path},
                    {"step", t.step},
                    {"event", to_string(t.event)},
                    {"index", t.index}});
  }
  return rows;
}

json record_to_json(const RunRecord& r) {
  json j = {{"algorithm", r.algorithm},
            {"status", r.status},
            {"center", vec_to_json(r.ball.center)},
            {"radius", r.ball.radius},
            {"support", r.support},
            {"weights", vec_to_json(r.weights)},
            {"iterations", r.iterations},
            {"wall_time_ms", r.wall_time_ms},
            {"certificate", certificate_to_json(r.certificate)}};
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> algorithms_for(const std::string& choice) {
  if (choice == "both") return {"primal", "dual"};
  return {choice};
}

}  // namespace

Tolerances resolve_tolerances(std::optional<double> flag) {
  Tolerances tol;
  if (flag) {
    tol.activity = *flag;
    return tol;
  }
  if (const char* env = std::getenv("MINBALL_TOL"); env && *env) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) {
      throw Error(std::string("MINBALL_TOL: expected a positive number, got '") + env + "'");
    }
    tol.activity = v;
  }
  return tol;
}

RunRecord run_algorithm(const Instance& inst, const std::string& algorithm,
                        const SolveOptions& opt) {
  RunRecord rec;
  rec.algorithm = algorithm;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    SolveResult res;
    if (algorithm == "primal") {
      res = primal_solve(inst, opt);
    } else if (algorithm == "dual") {
      res = dual_solve(inst, opt);
    } else if (algorithm == "oracle") {
      res.algorithm = "oracle";
      res.ball = oracle_subgradient(inst, 1000000, 0);
    } else {
      throw Error("unknown algorithm '" + algorithm + "'");
    }
    rec.status = "optimal";
    rec.ball = res.ball;
    rec.support = res.support;
    rec.weights = res.weights;
    rec.iterations = res.iterations;
    rec.trace = std::move(res.trace);
  } catch (const IterationLimitError& e) {
    rec.status = "iteration_limit";
    rec.message = e.what();
    rec.ball = e.best;
    rec.iterations = e.iterations;
  } catch (const Error& e) {
    rec.status = "error";
    rec.message = e.what();
  }
  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (rec.status != "error") rec.certificate = validate(inst, rec.ball, rec.support, opt.tol);
  return rec;
}

BenchCell parse_cell(const std::string& text) {
  BenchCell cell;
  std::stringstream ss(text);
  std::string n, m, seeds;
  if (!std::getline(ss, n, ',') || !std::getline(ss, m, ',') || !std::getline(ss, seeds)) {
    throw Error("bench: cell '" + text + "' is not of the form n,m,seeds");
  }
  try {
    cell.n = std::stoi(n);
    cell.m = std::stoi(m);
    const auto dash = seeds.find('-');
    std::uint64_t lo = 1, hi;
    if (dash == std::string::npos) {
      hi = std::stoull(seeds);
    } else {
      lo = std::stoull(seeds.substr(0, dash));
      hi = std::stoull(seeds.substr(dash + 1));
    }
    for (std::uint64_t s = lo; s <= hi; ++s) cell.seeds.push_back(s);
  } catch (const std::logic_error&) {
    throw Error("bench: cell '" + text + "' has a non-numeric field");
  }
  if (cell.n < 1 || cell.m < 1) throw Error("bench: cell '" + text + "' needs n, m >= 1");
  return cell;
}

std::vector<BenchRow> run_bench(const std::vector<BenchCell>& cells,
                                const std::vector<std::string>& algorithms, double radius_max,
                                Distribution distribution, const SolveOptions& opt) {
  std::vector<BenchRow> rows;
  for (const BenchCell& cell : cells) {
    for (std::uint64_t seed : cell.seeds) {
      GenerateOptions g{cell.n, cell.m, radius_max, seed, distribution};
      const Instance inst = generate(g).instance;
      for (const std::string& alg : algorithms) {
        RunRecord r = run_algorithm(inst, alg, opt);
        rows.push_back({cell.n, cell.m, seed, alg, r.ball.radius, r.iterations, r.wall_time_ms,
                        r.status == "optimal" && r.certificate.accepted});
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "n,m,seed,algorithm,z,iterations,wall_time_ms,certified\n";
  for (const BenchRow& r : rows) {
    out << r.n << ',' << r.m << ',' << r.seed << ',' << r.algorithm << ',' << shortest(r.z) << ','
        << r.iterations << ',' << shortest(r.wall_time_ms) << ','
        << (r.certified ? "true" : "false") << '\n';
  }
}

namespace {

int cmd_gen(const GenerateOptions& g, const std::string& name, const std::string& out_path,
            std::ostream& out) {
  InstanceFile file = generate(g);
  if (!name.empty()) file.metadata->name = name;
  const std::string text = serialize_instance(file);
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    write_text_file(out_path, text);
  }
  return exit_certified;
}

int cmd_solve(const std::string& path, const std::string& algorithm, std::optional<double> tol,
              int max_iters, const std::string& trace_path, std::ostream& out) {
  const InstanceFile file = read_instance_file(path);
  SolveOptions opt;
  opt.tol = resolve_tolerances(tol);
  opt.max_iterations = max_iters;
  opt.trace = !trace_path.empty();

  std::vector<RunRecord> runs;
  for (const std::string& alg : algorithms_for(algorithm))
    runs.push_back(run_algorithm(file.instance, alg, opt));

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["instance"] = path;
  json results = json::array();
  for (const RunRecord& r : runs) results.push_back(record_to_json(r));
  doc["results"] = results;
  if (runs.size() == 2 && runs[0].status != "error" && runs[1].status != "error") {
    const double dz = std::abs(runs[0].ball.radius - runs[1].ball.radius);
    doc["agreement"] = {
        {"radius_delta", dz},
        {"relative_radius_delta", dz / std::max(1.0, std::abs(runs[0].ball.radius))},
        {"center_delta", (runs[0].ball.center - runs[1].ball.center).norm()}};
  }
  out << doc.dump(2) << "\n";

  if (!trace_path.empty()) {
    json tdoc;
    tdoc["schema_version"] = kSchemaVersion;
    json traces = json::array();
    for (const RunRecord& r : runs)
      traces.push_back({{"algorithm", r.algorithm}, {"records", trace_to_json(r.trace)}});
    tdoc["traces"] = traces;
    write_text_file(trace_path, tdoc.dump(2) + "\n");
  }

  bool capped = false;
  bool certified = true;
  for (const RunRecord& r : runs) {
    if (r.status == "iteration_limit") capped = true;
    if (r.status != "optimal" || !r.certificate.accepted) certified = false;
  }
  if (capped) return exit_iteration_cap;
  return certified ? exit_certified : exit_not_certified;
}

int cmd_verify(const std::string& instance_path, const std::string& result_path,
               const std::string& algorithm, std::optional<double> tol, std::ostream& out) {
  const InstanceFile file = read_instance_file(instance_path);
  const std::string text = read_text_file(result_path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("result: ") + e.what());
  }
  json rec = doc;
  if (doc.contains("results")) {
    rec = json();
    for (const json& r : doc["results"]) {
      if (algorithm.empty() || r.value("algorithm", "") == algorithm) {
        rec = r;
        break;
      }
    }
    if (rec.is_null()) throw ParseError("result: no record for algorithm '" + algorithm + "'");
  }
  if (!rec.contains("center") || !rec.contains("radius"))
    throw ParseError("result: fields 'center' and 'radius' are required");
  CoveringBall ball;
  const json& c = rec["center"];
  if (!c.is_array()) throw ParseError("result: field 'center' must be an array");
  if (static_cast<int>(c.size()) != file.instance.dim)
    throw DimensionError("verify: result center has dimension " + std::to_string(c.size()) +
                         ", instance has " + std::to_string(file.instance.dim));
  ball.center.resize(file.instance.dim);
  for (int k = 0; k < file.instance.dim; ++k) ball.center[k] = c[k].get<double>();
  ball.radius = rec["radius"].get<double>();
  ActiveSet support;
  if (rec.contains("support")) support = rec["support"].get<ActiveSet>();
  for (int i : support) {
    if (i < 0 || i >= static_cast<int>(file.instance.size()))
      throw ParseError("result: support index " + std::to_string(i) + " out of range");
  }
  const Certificate cert = validate(file.instance, ball, support, resolve_tolerances(tol));
  json outdoc = {{"schema_version", kSchemaVersion}, {"certificate", certificate_to_json(cert)}};
  out << outdoc.dump(2) << "\n";
  return cert.accepted ? exit_certified : exit_not_certified;
}

int cmd_bench(const std::vector<std::string>& cell_specs, const std::string& suite_path,
              const std::string& algorithm, double radius_max, const std::string& distribution,
              std::optional<double> tol, int max_iters, const std::string& out_path,
              std::ostream& out) {
  std::vector<BenchCell> cells;
  double rmax = radius_max;
  Distribution dist = parse_distribution(distribution);
  if (!suite_path.empty()) {
    json suite;
    try {
      suite = json::parse(read_text_file(suite_path));
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("suite: ") + e.what());
    }
    if (!suite.contains("cells") || !suite["cells"].is_array())
      throw ParseError("suite: field 'cells' must be an array");
    for (const json& c : suite["cells"]) {
      BenchCell cell;
      cell.n = c.at("n").get<int>();
      cell.m = c.at("m").get<int>();
      cell.seeds = c.at("seeds").get<std::vector<std::uint64_t>>();
      cells.push_back(cell);
    }
    if (suite.contains("radius_max")) rmax = suite["radius_max"].get<double>();
    if (suite.contains("distribution"))
      dist = parse_distribution(suite["distribution"].get<std::string>());
  }
  for (const std::string& s : cell_specs) cells.push_back(parse_cell(s));
  if (cells.empty()) throw Error("bench: give at least one --cell or a --suite file");
  SolveOptions opt;
  opt.tol = resolve_tolerances(tol);
  opt.max_iterations = max_iters;
  opt.trace = false;
  const std::vector<BenchRow> rows = run_bench(cells, algorithms_for(algorithm), rmax, dist, opt);
  if (out_path.empty() || out_path == "-") {
    write_bench_csv(out, rows);
  } else {
    std::ostringstream ss;
    write_bench_csv(ss, rows);
    write_text_file(out_path, ss.str());
  }
  return exit_certified;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimum covering ball of balls"};
  app.require_subcommand(1);

  GenerateOptions g;
  std::string gen_dist = "uniform", gen_name, gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  gen->add_option("-n,--dim", g.n, "Dimension")->required();
  gen->add_option("-m,--balls", g.m, "Number of balls")->required();
  gen->add_option("--radius-max", g.radius_max, "Radii are uniform in [0, radius-max]");
  gen->add_option("--seed", g.seed, "splitmix64 seed");
  gen->add_option("--distribution", gen_dist, "uniform or sphere")
      ->check(CLI::IsMember({"uniform", "sphere"}));
  gen->add_option("--name", gen_name, "Name stored in the metadata");
  gen->add_option("-o,--out", gen_out, "Output file (default stdout)");

  std::string solve_file, solve_alg = "both", solve_trace;
  std::optional<double> solve_tol;
  int solve_iters = 0;
  auto* solve = app.add_subcommand("solve", "Solve an instance file");
  solve->add_option("file", solve_file, "Instance file")->required();
  solve->add_option("--algorithm", solve_alg, "primal, dual or both")
      ->check(CLI::IsMember({"primal", "dual", "both"}));
  solve->add_option("--tol", solve_tol, "Activity tolerance");
  solve->add_option("--max-iters", solve_iters, "Iteration cap (default 100 m)");
  solve->add_option("--trace", solve_trace, "Write per-iteration trace records to this file");

  std::string verify_file, verify_result, verify_alg;
  std::optional<double> verify_tol;
  auto* verify = app.add_subcommand("verify", "Check a claimed solution");
  verify->add_option("file", verify_file, "Instance file")->required();
  verify->add_option("result", verify_result, "Result document")->required();
  verify->add_option("--algorithm", verify_alg, "Record to check in a solve document");
  verify->add_option("--tol", verify_tol, "Activity tolerance");

  std::vector<std::string> bench_cells;
  std::string bench_suite, bench_alg = "both", bench_dist = "uniform", bench_out;
  double bench_rmax = 0.3;
  std::optional<double> bench_tol;
  int bench_iters = 0;
  auto* bench = app.add_subcommand("bench", "Run a benchmark suite and print CSV rows");
  bench->add_option("--cell", bench_cells, "n,m,seeds where seeds is k (1..k) or a-b");
  bench->add_option("--suite", bench_suite, "JSON suite file with a 'cells' array");
  bench->add_option("--algorithm", bench_alg, "primal, dual or both")
      ->check(CLI::IsMember({"primal", "dual", "both"}));
  bench->add_option("--radius-max", bench_rmax, "Radii are uniform in [0, radius-max]");
  bench->add_option("--distribution", bench_dist, "uniform or sphere")
      ->check(CLI::IsMember({"uniform", "sphere"}));
  bench->add_option("--tol", bench_tol, "Activity tolerance");
  bench->add_option("--max-iters", bench_iters, "Iteration cap (default 100 m)");
  bench->add_option("-o,--out", bench_out, "Output CSV file (default stdout)");

  std::vector<std::string> argv_store{"minball"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_certified;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return exit_io_error;
  }

  try {
    if (*gen) {
      g.distribution = parse_distribution(gen_dist);
      return cmd_gen(g, gen_name, gen_out, out);
    }
    if (*solve) return cmd_solve(solve_file, solve_alg, solve_tol, solve_iters, solve_trace, out);
    if (*verify) return cmd_verify(verify_file, verify_result, verify_alg, verify_tol, out);
    if (*bench) {
      return cmd_bench(bench_cells, bench_suite, bench_alg, bench_rmax, bench_dist, bench_tol,
                       bench_iters, bench_out, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_io_error;
  }
  return exit_io_error;
}

}  // namespace minball::cli
