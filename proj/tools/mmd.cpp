#include <minmaxdelay/gadgets.hpp>
#include <minmaxdelay/int_solver.hpp>
#include <minmaxdelay/io.hpp>
#include <minmaxdelay/oracle.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace mmd;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kUsage = 2;
constexpr int kBudget = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + out_path + "'");
  out << content;
}

Rational parse_rate(const std::string& text) {
  auto r = Rational::parse(text);
  if (!r || !r->is_positive()) throw ParseError("--rate wants a positive integer or p/q, got '" + text + "'");
  return *r;
}

GraphInstance load_instance(const std::string& path, const std::string& rate_override) {
  GraphInstance g = read_instance(read_file(path));
  if (!rate_override.empty()) g.rate = parse_rate(rate_override);
  require_valid(g);
  return g;
}

std::string join_edges(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ' ';
    out += id;
  }
  return out;
}

void print_flow(std::ostream& os, const GraphInstance& g, const PathFlow& flow) {
  os << "flow (" << flow.paths.size() << (flow.paths.size() == 1 ? " path, " : " paths, ")
     << "rate " << flow.total_rate().str() << "):\n";
  for (const auto& p : flow.paths)
    os << "  rate " << p.rate.str() << "  delay " << path_delay(g, p.edges) << "  edges "
       << join_edges(p.edges) << "\n";
}

const char* branch_name(Branch b) { return b == Branch::Accept ? "accept" : "reject"; }

ordered_json iterations_json(const SolveReport& report) {
  ordered_json arr = ordered_json::array();
  for (const auto& it : report.iterations) {
    ordered_json row;
    row["delay_bound"] = it.delay_bound;
    row["rate"] = mmd::detail::rational_json(it.rate);
    row["branch"] = branch_name(it.branch);
    arr.push_back(std::move(row));
  }
  return arr;
}

int run_solve(const std::string& instance_path, const std::string& rate, bool json, bool trace,
              const std::string& out_path) {
  GraphInstance g = load_instance(instance_path, rate);
  SolveReport report = min_max_delay(g);

  if (json) {
    ordered_json doc;
    doc["status"] = report.status == SolveStatus::Solved ? "solved" : "infeasible";
    doc["max_flow"] = mmd::detail::rational_json(report.max_flow_value);
    if (report.status == SolveStatus::Solved) doc["max_delay"] = report.optimal_value;
    if (trace) doc["iterations"] = iterations_json(report);
    if (report.status == SolveStatus::Solved) doc["flow"] = flow_json(g, report.flow);
    emit(out_path, doc.dump(2) + "\n");
    return report.status == SolveStatus::Solved ? kOk : kInfeasible;
  }

  if (trace) {
    std::cout << "trace:\n";
    for (const auto& it : report.iterations)
      std::cout << "  T=" << it.delay_bound << "  rate=" << it.rate.str() << "  "
                << branch_name(it.branch) << "\n";
  }
  if (report.status != SolveStatus::Solved) {
    std::cout << "status: infeasible\n";
    std::cout << "max_flow: " << report.max_flow_value.str() << " (required " << g.rate.str()
              << ")\n";
    return kInfeasible;
  }
  std::cout << "max_delay: " << report.optimal_value << "\n";
  print_flow(std::cout, g, report.flow);
  if (!out_path.empty()) emit(out_path, write_flow(g, report.flow));
  return kOk;
}

int run_dcmaxflow(const std::string& instance_path, const std::string& rate, std::int64_t bound,
                  bool json, bool dump_lp, const std::string& out_path) {
  GraphInstance g = load_instance(instance_path, rate);
  if (bound < 0) throw ParseError("--delay-bound must be non-negative");

  if (dump_lp) {
    auto prob = expand(g, bound);
    std::cout << lp_dump(prob.lp());
  }
  DcMaxFlowResult r = dc_max_flow(g, bound);

  if (json) {
    ordered_json doc;
    doc["delay_bound"] = r.delay_bound;
    doc["value"] = mmd::detail::rational_json(r.value);
    doc["flow"] = flow_json(g, r.path_flow);
    emit(out_path, doc.dump(2) + "\n");
    return kOk;
  }
  std::cout << "value: " << r.value.str() << "\n";
  print_flow(std::cout, g, r.path_flow);
  if (!out_path.empty()) emit(out_path, write_flow(g, r.path_flow));
  return kOk;
}

int run_intsolve(const std::string& instance_path, const std::string& rate, const SearchBudget& budget,
                 bool json, const std::string& out_path) {
  GraphInstance g = load_instance(instance_path, rate);
  IntSolveResult r = int_min_max_delay(g, budget);

  if (json) {
    ordered_json doc;
    doc["status"] = r.status == SolveStatus::Solved ? "solved" : "infeasible";
    if (r.status == SolveStatus::Solved) {
      doc["max_delay"] = r.optimal_value;
      doc["flow"] = flow_json(g, r.flow);
    }
    emit(out_path, doc.dump(2) + "\n");
    return r.status == SolveStatus::Solved ? kOk : kInfeasible;
  }
  if (r.status != SolveStatus::Solved) {
    std::cout << "status: infeasible\n";
    return kInfeasible;
  }
  std::cout << "max_delay: " << r.optimal_value << "\n";
  print_flow(std::cout, g, r.flow);
  if (!out_path.empty()) emit(out_path, write_flow(g, r.flow));
  return kOk;
}

int run_gap(const std::string& instance_path, const std::string& rate, const SearchBudget& budget,
            bool json) {
  GraphInstance g = load_instance(instance_path, rate);
  IntGapResult r = int_gap(g, budget);
  std::string gap_text = r.infinite ? "infinite" : r.ratio.str();

  if (json) {
    ordered_json doc;
    doc["frac_optimum"] = r.frac_optimum;
    doc["int_optimum"] = r.int_optimum;
    if (r.infinite)
      doc["int_gap"] = "infinite";
    else
      doc["int_gap"] = mmd::detail::rational_json(r.ratio);
    emit("", doc.dump(2) + "\n");
    return kOk;
  }
  std::cout << "frac_max_delay: " << r.frac_optimum << "\n";
  std::cout << "int_max_delay: " << r.int_optimum << "\n";
  std::cout << "int_gap: " << gap_text << "\n";
  return kOk;
}

struct CheckRow {
  std::string name;
  std::string status;  // "pass", "FAIL", "skip"
  std::string detail;
};

std::vector<CheckRow> verify_instance(const GraphInstance& g, const SearchBudget& budget) {
  std::vector<CheckRow> rows;
  auto errors = validate(g);
  if (!errors.empty()) {
    rows.push_back({"validate", "FAIL", errors.front()});
    return rows;
  }
  rows.push_back({"validate", "pass", ""});

  std::optional<std::vector<PathRecord>> paths;
  try {
    paths = enumerate_paths(g, budget);
  } catch (const BudgetExceededError&) {
    // brute-force comparisons are skipped below
  }
  const std::int64_t horizon = g.delay_horizon();

  if (paths) {
    bool ok = true;
    std::string detail;
    for (std::int64_t t = 0; t <= horizon && ok; ++t) {
      Rational expect = oracle_path_rate(g, *paths, t);
      Rational got = dc_max_flow(g, t).value;
      if (expect != got) {
        ok = false;
        detail = "T=" + std::to_string(t) + ": " + got.str() + " vs " + expect.str();
      }
    }
    rows.push_back({"rate-vs-brute-force", ok ? "pass" : "FAIL",
                    ok ? "all T in [0, " + std::to_string(horizon) + "]" : detail});
  } else {
    rows.push_back({"rate-vs-brute-force", "skip", "too many paths to enumerate"});
  }

  SolveReport report = min_max_delay(g);
  if (paths) {
    OracleAnswer expect = oracle_min_max_delay(g, budget);
    bool solved = report.status == SolveStatus::Solved;
    bool ok = solved == expect.feasible &&
              (!solved || Rational(report.optimal_value) == expect.value);
    rows.push_back({"optimum-vs-brute-force", ok ? "pass" : "FAIL",
                    ok ? "" : "solver and brute force disagree"});
  } else {
    rows.push_back({"optimum-vs-brute-force", "skip", "too many paths to enumerate"});
  }

  if (report.status == SolveStatus::Solved) {
    std::vector<std::string> bad;
    if (report.flow.total_rate() != g.rate) bad.push_back("total rate off");
    auto flow_errors = validate_flow(g, report.flow);
    bad.insert(bad.end(), flow_errors.begin(), flow_errors.end());
    if (max_delay(g, report.flow) != report.optimal_value) bad.push_back("max delay off");
    if (total_delay_by_paths(g, report.flow) != total_delay_by_edges(g, report.flow))
      bad.push_back("delay totals disagree");
    rows.push_back({"witness", bad.empty() ? "pass" : "FAIL",
                    bad.empty() ? "" : bad.front()});
  } else {
    rows.push_back({"witness", "skip", "instance infeasible at its rate"});
  }

  if (g.rate.is_integer() && g.rate <= Rational(8) && paths && paths->size() <= 64) {
    OracleAnswer expect = oracle_int_min_max_delay(g, budget);
    auto whole = int_min_max_delay(g, budget);
    bool solved = whole.status == SolveStatus::Solved;
    bool ok = solved == expect.feasible &&
              (!solved || Rational(whole.optimal_value) == expect.value);
    rows.push_back({"integer-vs-brute-force", ok ? "pass" : "FAIL",
                    ok ? "" : "integer solver and brute force disagree"});
  } else {
    rows.push_back({"integer-vs-brute-force", "skip", "instance too large for brute force"});
  }
  return rows;
}

int run_verify(const std::string& instance_path, const std::string& dir, int jobs,
               const SearchBudget& budget, bool json) {
  std::vector<std::string> files;
  if (!dir.empty()) {
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ParseError("no .json files under '" + dir + "'");
  } else {
    files.push_back(instance_path);
  }

  std::vector<std::vector<CheckRow>> results(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= files.size()) return;
      try {
        GraphInstance g = read_instance(read_file(files[i]));
        results[i] = verify_instance(g, budget);
      } catch (const std::exception& e) {
        results[i] = {{"load", "FAIL", e.what()}};
      }
    }
  };
  int workers = std::max(1, std::min<int>(jobs, static_cast<int>(files.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool all_ok = true;
  if (json) {
    ordered_json doc;
    doc["instances"] = ordered_json::array();
    for (std::size_t i = 0; i < files.size(); ++i) {
      ordered_json entry;
      entry["file"] = files[i];
      entry["checks"] = ordered_json::array();
      for (const auto& row : results[i]) {
        ordered_json c;
        c["name"] = row.name;
        c["status"] = row.status == "pass" ? "pass" : row.status == "skip" ? "skip" : "fail";
        if (!row.detail.empty()) c["detail"] = row.detail;
        entry["checks"].push_back(std::move(c));
        if (row.status == "FAIL") all_ok = false;
      }
      doc["instances"].push_back(std::move(entry));
    }
    std::cout << doc.dump(2) << "\n";
    return all_ok ? kOk : kInfeasible;
  }

  for (std::size_t i = 0; i < files.size(); ++i) {
    std::cout << files[i] << "\n";
    for (const auto& row : results[i]) {
      std::cout << "  " << std::left << std::setw(26) << row.name << std::setw(6) << row.status;
      if (!row.detail.empty()) std::cout << row.detail;
      std::cout << "\n";
      if (row.status == "FAIL") all_ok = false;
    }
  }
  std::cout << (all_ok ? "all checks passed" : "CHECKS FAILED") << "\n";
  return all_ok ? kOk : kInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact solver for min-max-delay flow routing"};
  app.require_subcommand(1);

  std::string instance_path, rate, out_path;
  bool json = false, trace = false, dump_lp = false;
  std::int64_t delay_bound = 0;
  std::int64_t budget_nodes = SearchBudget{}.max_nodes;
  int jobs = 1;

  auto add_common = [&](CLI::App* cmd, bool needs_instance) {
    if (needs_instance) cmd->add_option("--instance", instance_path, "instance file")->required();
    cmd->add_option("--rate", rate, "override the instance rate (integer or p/q)");
    cmd->add_flag("--json", json, "machine-readable output");
  };

  CLI::App* solve = app.add_subcommand("solve", "minimize the worst path delay at the required rate");
  add_common(solve, true);
  solve->add_flag("--trace", trace, "print each probe of the bound search");
  solve->add_option("-o,--output", out_path, "also write the flow to this file");

  CLI::App* dcmf = app.add_subcommand("dcmaxflow", "maximize rate under a delay ceiling");
  add_common(dcmf, true);
  dcmf->add_option("--delay-bound", delay_bound, "delay ceiling")->required();
  dcmf->add_flag("--dump-lp", dump_lp, "print the level-expanded program");
  dcmf->add_option("-o,--output", out_path, "also write the flow to this file");

  CLI::App* intsolve = app.add_subcommand("intsolve", "minimize the worst path delay with whole-unit paths");
  add_common(intsolve, true);
  intsolve->add_option("--budget", budget_nodes, "search node budget");
  intsolve->add_option("-o,--output", out_path, "also write the flow to this file");

  CLI::App* gap = app.add_subcommand("gap", "ratio of the integer optimum to the fractional one");
  add_common(gap, true);
  gap->add_option("--budget", budget_nodes, "search node budget");

  CLI::App* gen = app.add_subcommand("gen", "write a generated instance");
  gen->require_subcommand(1);
  std::vector<std::int64_t> elements;
  int size = 5;
  std::uint64_t seed = 1;
  int g_nodes = 6, g_edges = 10;
  std::int64_t g_cap = 3, g_delay = 5;
  std::string gen_rate;
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("-o,--output", out_path, "output file, - for stdout");
  };
  CLI::App* gen_partition = gen->add_subcommand("partition", "subset-sum chain with bypasses");
  gen_partition->add_option("--elements", elements, "comma-separated positive integers")
      ->required()
      ->delimiter(',');
  add_out(gen_partition);
  CLI::App* gen_3partition = gen->add_subcommand("3partition", "grouped chain for three-way splits");
  gen_3partition->add_option("--elements", elements, "comma-separated positive integers, 3k of them")
      ->required()
      ->delimiter(',');
  add_out(gen_3partition);
  CLI::App* gen_block = gen->add_subcommand("block", "ladder of dashed/solid edge pairs");
  gen_block->add_option("--size", size, "node count, at least 3")->required();
  gen_block->add_option("--rate", gen_rate, "required rate (integer or p/q), default 2");
  add_out(gen_block);
  CLI::App* gen_composite = gen->add_subcommand("composite", "side-by-side ladders behind shared endpoints");
  gen_composite->add_option("--size", size, "ladder size, at least 3")->required();
  add_out(gen_composite);
  CLI::App* gen_random = gen->add_subcommand("random", "seeded random instance");
  gen_random->add_option("--seed", seed, "rng seed");
  gen_random->add_option("--nodes", g_nodes, "node count");
  gen_random->add_option("--edges", g_edges, "edge count");
  gen_random->add_option("--max-capacity", g_cap, "largest capacity");
  gen_random->add_option("--max-delay", g_delay, "largest delay");
  add_out(gen_random);

  CLI::App* verify = app.add_subcommand("verify", "cross-check solvers against brute force");
  verify->add_option("--instance", instance_path, "instance file");
  std::string dir;
  verify->add_option("--dir", dir, "verify every .json file under this directory");
  verify->add_option("--jobs", jobs, "parallel instances in --dir mode");
  verify->add_option("--budget", budget_nodes, "search node budget");
  verify->add_flag("--json", json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  SearchBudget budget;
  budget.max_nodes = budget_nodes;

  try {
    if (solve->parsed()) return run_solve(instance_path, rate, json, trace, out_path);
    if (dcmf->parsed()) return run_dcmaxflow(instance_path, rate, delay_bound, json, dump_lp, out_path);
    if (intsolve->parsed()) return run_intsolve(instance_path, rate, budget, json, out_path);
    if (gap->parsed()) return run_gap(instance_path, rate, budget, json);
    if (gen->parsed()) {
      GraphInstance g;
      if (gen_partition->parsed()) {
        g = partition_gadget(elements).instance;
      } else if (gen_3partition->parsed()) {
        g = three_partition_gadget(elements).instance;
      } else if (gen_block->parsed()) {
        g = gen_rate.empty() ? building_block(size) : building_block(size, parse_rate(gen_rate));
      } else if (gen_composite->parsed()) {
        g = gap_composite(size);
      } else {
        g = random_instance(seed, g_nodes, g_edges, g_cap, g_delay);
      }
      emit(out_path, write_instance(g));
      return kOk;
    }
    if (verify->parsed()) {
      if (instance_path.empty() && dir.empty())
        throw ParseError("verify needs --instance or --dir");
      return run_verify(instance_path, dir, jobs, budget, json);
    }
  } catch (const BudgetExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBudget;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
