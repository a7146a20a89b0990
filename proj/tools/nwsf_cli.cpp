// Command-line front end: instance generation, experiment runs, exact
// oracles, the baseline comparison experiment, and a quick self-test.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "nwsf/experiment.hpp"
#include "nwsf/generators.hpp"
#include "nwsf/oracles.hpp"

using namespace nwsf;

namespace {

void write_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << std::endl;
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot open output file: " + path);
  f << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open input file: " + path);
  nlohmann::json j;
  f >> j;
  return j;
}

int cmd_generate(const std::string& type, uint64_t seed, const std::string& out, int n, int k,
                 long cost_hi) {
  Rng rng(seed);
  if (type == "sc") {
    SetCoverInstance inst = gen_random_sc(rng, k, n, 1, cost_hi);
    write_json(out, inst.to_json());
  } else if (type == "nmfl") {
    NmflInstance inst = gen_random_nmfl(rng, n, k, cost_hi, cost_hi);
    write_json(out, inst.to_json());
  } else if (type == "sc-reduction") {
    SetCoverInstance sc = gen_random_sc(rng, k, n, 1, cost_hi);
    write_json(out, pcnwsf_to_json(gen_sc_reduction(sc)));
  } else if (type == "counterexample") {
    write_json(out, pcnwsf_to_json(gen_counterexample(k)));
  } else if (type == "pcnwsf") {
    write_json(out, pcnwsf_to_json(gen_random_pcnwsf(rng, n, k, cost_hi, true)));
  } else {
    std::cerr << "unknown instance type: " << type << '\n';
    return 2;
  }
  return 0;
}

int cmd_oracle(const std::string& type, const std::string& path) {
  nlohmann::json j = read_json(path);
  nlohmann::json out;
  if (type == "sc") {
    SetCoverInstance inst = SetCoverInstance::from_json(j);
    std::vector<int> elements;
    for (int e = 0; e < inst.n_elements(); ++e) elements.push_back(e);
    ScOracleResult r = opt_set_cover(inst, elements);
    out["opt"] = to_double(r.opt);
    out["sets"] = r.sets;
    out["nodes_explored"] = r.nodes_explored;
  } else if (type == "nmfl") {
    NmflInstance inst = NmflInstance::from_json(j);
    std::vector<int> clients;
    for (int c = 0; c < inst.n_clients(); ++c) clients.push_back(c);
    NmflOracleResult r = opt_nmfl(inst, clients);
    out["opt"] = to_double(r.opt);
    out["open"] = r.open;
    auto asg = nlohmann::json::array();
    for (const auto& [c, f] : r.assignment) asg.push_back({c, f});
    out["assignment"] = asg;
    out["nodes_explored"] = r.nodes_explored;
  } else if (type == "pcnwsf") {
    PcNwsfInstance inst = pcnwsf_from_json(j);
    NwsfOracleResult r = opt_pc_nwsf(inst.graph, inst.pairs);
    out["opt"] = to_double(r.opt);
    out["bought"] = r.bought;
    auto pen = nlohmann::json::array();
    for (std::size_t i = 0; i < r.penalized.size(); ++i)
      if (r.penalized[i]) pen.push_back(i);
    out["penalized_pairs"] = pen;
    out["nodes_explored"] = r.nodes_explored;
  } else {
    std::cerr << "unknown oracle type: " << type << '\n';
    return 2;
  }
  std::cout << out.dump(2) << std::endl;
  return 0;
}

int cmd_reproduce_appendix_b(long trials, uint64_t seed, const std::string& out) {
  std::ostringstream csv;
  csv << "k,baseline_mean_cost,pipeline_mean_cost,opt,baseline_fallbacks,pipeline_fallbacks\n";
  double base256 = 0;
  for (int k : {256, 512}) {
    AppendixBResult r = run_appendix_b(k, trials, seed);
    double lower = std::exp(-4.0) * (k - std::log2(static_cast<double>(k)));
    std::printf("k=%d baseline_mean=%.4f (lower bound %.4f) pipeline_mean=%.4f opt=%.6f ratio=%.2f\n",
                k, r.baseline_mean_cost, lower, r.pipeline_mean_cost, r.opt,
                r.pipeline_mean_ratio);
    csv << k << ',' << fmt_num(r.baseline_mean_cost) << ',' << fmt_num(r.pipeline_mean_cost)
        << ',' << fmt_num(r.opt) << ',' << r.baseline_fallbacks << ',' << r.pipeline_fallbacks
        << '\n';
    if (k == 256) base256 = r.baseline_mean_cost;
    if (k == 512 && base256 > 0)
      std::printf("baseline growth factor 256 -> 512: %.3f\n", r.baseline_mean_cost / base256);
  }
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw InputError("cannot open output file: " + out);
    f << csv.str();
  }
  return 0;
}

int cmd_selftest(uint64_t seed) {
  long violations = 0;
  // driver feasibility / irrevocability sweep
  Rng rng(seed);
  for (int iter = 0; iter < 50; ++iter) {
    int n = static_cast<int>(rng.next_in(6, 14));
    int k = static_cast<int>(rng.next_in(1, 6));
    bool pc = rng.next_unit() < 0.5;
    PcNwsfInstance inst = gen_random_pcnwsf(rng, n, k, 8, pc);
    DriverConfig cfg;
    cfg.k = k;
    cfg.prize_collecting = pc;
    cfg.seed = rng.next_u64();
    SteinerDriver d(inst.graph, cfg);
    for (const auto& ev : inst.pairs) d.arrive(ev);
    if (!d.all_pairs_feasible()) ++violations;
  }
  // generator validators
  for (int iter = 0; iter < 200; ++iter) {
    int ne = static_cast<int>(rng.next_in(1, 12));
    int ns = static_cast<int>(rng.next_in(1, 10));
    try {
      validate_sc_coverage(gen_random_sc(rng, ne, ns, 1, 9), ne);
    } catch (const std::exception&) {
      ++violations;
    }
  }
  try {
    validate_counterexample_feed(make_counterexample_feed(64));
  } catch (const std::exception&) {
    ++violations;
  }
  std::printf("selftest violations: %ld\n", violations);
  return violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online node-weighted Steiner forest toolkit"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "generate an instance file");
  std::string gen_type = "pcnwsf", gen_out;
  uint64_t gen_seed = 1;
  int gen_n = 8, gen_k = 4;
  long gen_cost = 8;
  gen->add_option("--type", gen_type, "sc | nmfl | sc-reduction | counterexample | pcnwsf");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output path (default stdout)");
  gen->add_option("-n", gen_n, "sets / facilities / vertices");
  gen->add_option("-k", gen_k, "elements / clients / pairs");
  gen->add_option("--cost-max", gen_cost, "cost range upper bound");

  auto* run = app.add_subcommand("run", "run an experiment and write a CSV");
  std::string run_config, run_algorithm = "pc_nwsf", run_out;
  long run_trials = 10;
  uint64_t run_seed = 1;
  run->add_option("--config", run_config, "experiment config JSON file");
  run->add_option("--algorithm", run_algorithm,
                  "nwsf | pc_nwsf | nmfl | sc_round | sc_baseline_single_threshold");
  run->add_option("--trials", run_trials, "number of trials");
  run->add_option("--seed", run_seed, "master seed");
  run->add_option("--out", run_out, "CSV output path");

  auto* oracle = app.add_subcommand("oracle", "exact offline optimum of an instance file");
  std::string oracle_type = "pcnwsf", oracle_path;
  oracle->add_option("--type", oracle_type, "sc | nmfl | pcnwsf");
  oracle->add_option("--instance", oracle_path, "instance JSON file")->required();

  auto* appb = app.add_subcommand("reproduce-appendix-b",
                                  "baseline vs threshold rounding on the hub family");
  long appb_trials = 10000;
  uint64_t appb_seed = 1;
  std::string appb_out;
  appb->add_option("--trials", appb_trials, "trials per k");
  appb->add_option("--seed", appb_seed, "master seed");
  appb->add_option("--out", appb_out, "CSV output path");

  auto* self = app.add_subcommand("selftest", "run quick invariant sweeps");
  uint64_t self_seed = 12345;
  self->add_option("--seed", self_seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(gen_type, gen_seed, gen_out, gen_n, gen_k, gen_cost);
    if (oracle->parsed()) return cmd_oracle(oracle_type, oracle_path);
    if (appb->parsed()) return cmd_reproduce_appendix_b(appb_trials, appb_seed, appb_out);
    if (self->parsed()) return cmd_selftest(self_seed);
    if (run->parsed()) {
      ExperimentConfig cfg;
      if (!run_config.empty()) {
        cfg = ExperimentConfig::from_json(read_json(run_config));
      } else {
        cfg.algorithm = algorithm_from_string(run_algorithm);
        cfg.trials = run_trials;
        cfg.seed = run_seed;
      }
      if (!run_out.empty()) cfg.out = run_out;
      ExperimentSummary s = run_experiment(cfg, &std::cout);
      return s.violations == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
