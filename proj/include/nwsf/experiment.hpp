#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nwsf/adversary.hpp"
#include "nwsf/covering_lp.hpp"
#include "nwsf/generators.hpp"
#include "nwsf/nmfl_online.hpp"
#include "nwsf/oracles.hpp"
#include "nwsf/sc_rounding.hpp"
#include "nwsf/steiner_online.hpp"
#include "nwsf/util.hpp"

namespace nwsf {

enum class Algorithm { Nwsf, PcNwsf, Nmfl, ScRound, ScBaselineSingleThreshold };

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "nwsf") return Algorithm::Nwsf;
  if (s == "pc_nwsf") return Algorithm::PcNwsf;
  if (s == "nmfl") return Algorithm::Nmfl;
  if (s == "sc_round") return Algorithm::ScRound;
  if (s == "sc_baseline_single_threshold") return Algorithm::ScBaselineSingleThreshold;
  throw InputError("unknown algorithm: " + s);
}

inline std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Nwsf: return "nwsf";
    case Algorithm::PcNwsf: return "pc_nwsf";
    case Algorithm::Nmfl: return "nmfl";
    case Algorithm::ScRound: return "sc_round";
    case Algorithm::ScBaselineSingleThreshold: return "sc_baseline_single_threshold";
  }
  return "?";
}

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::PcNwsf;
  nlohmann::json generator = nlohmann::json::object();  // {"type": ..., params...}
  long trials = 1;
  uint64_t seed = 1;
  bool scale_guess = false;
  bool k_doubling = false;
  bool budget_doubling = true;
  bool p_doubling = false;
  double p_factor = 2.0;
  std::string out;

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    if (j.contains("generator")) c.generator = j.at("generator");
    if (j.contains("trials")) c.trials = j.at("trials").get<long>();
    if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("p_factor")) c.p_factor = j.at("p_factor").get<double>();
    if (j.contains("wrappers")) {
      const auto& w = j.at("wrappers");
      if (w.contains("scale_guess")) c.scale_guess = w.at("scale_guess").get<bool>();
      if (w.contains("k_doubling")) c.k_doubling = w.at("k_doubling").get<bool>();
      if (w.contains("budget_doubling")) c.budget_doubling = w.at("budget_doubling").get<bool>();
      if (w.contains("p_doubling")) c.p_doubling = w.at("p_doubling").get<bool>();
    }
    if (c.trials < 1) throw InputError("trials must be >= 1");
    return c;
  }
};

struct ExperimentRecord {
  long instance_id = 0;
  std::string algorithm;
  uint64_t seed = 0;
  int n = 0;
  int k = 0;
  double greedy_cost = 0, aug_cost = 0, facility_cost = 0, connection_cost = 0, penalty_cost = 0;
  double alg_cost = 0;
  double opt_cost = 0;
  bool opt_known = false;
  long fallback_events = 0;
  long reinit_count = 0;
  long runtime_ms = 0;
  bool violation = false;
};

inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline std::string record_ratio(const ExperimentRecord& r) {
  if (!r.opt_known) return "nan";
  if (r.opt_cost > 0) return fmt_num(r.alg_cost / r.opt_cost);
  return r.alg_cost <= 0 ? "1" : "inf";
}

inline const char* kCsvHeader =
    "instance_id,algorithm,seed,n,k,greedy_cost,aug_cost,facility_cost,connection_cost,"
    "penalty_cost,alg_cost,opt_cost,ratio,fallback_events,reinit_count,runtime_ms";

inline std::string record_to_csv(const ExperimentRecord& r) {
  std::ostringstream os;
  os << r.instance_id << ',' << r.algorithm << ',' << r.seed << ',' << r.n << ',' << r.k << ','
     << fmt_num(r.greedy_cost) << ',' << fmt_num(r.aug_cost) << ',' << fmt_num(r.facility_cost)
     << ',' << fmt_num(r.connection_cost) << ',' << fmt_num(r.penalty_cost) << ','
     << fmt_num(r.alg_cost) << ',' << (r.opt_known ? fmt_num(r.opt_cost) : std::string("nan"))
     << ',' << record_ratio(r) << ',' << r.fallback_events << ',' << r.reinit_count << ','
     << r.runtime_ms;
  return os.str();
}

struct ExperimentSummary {
  long trials = 0;
  double mean_ratio = 0;
  double max_ratio = 0;
  long violations = 0;
  long fallback_events = 0;
};

namespace detail {

inline long elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               t0)
      .count();
}

inline ExperimentRecord run_driver_trial(const ExperimentConfig& cfg, long trial) {
  Rng rng = Rng(cfg.seed).substream(static_cast<uint64_t>(trial));
  ExperimentRecord rec;
  rec.instance_id = trial;
  rec.algorithm = algorithm_name(cfg.algorithm);
  rec.seed = cfg.seed;
  auto t0 = std::chrono::steady_clock::now();

  bool pc = cfg.algorithm == Algorithm::PcNwsf;
  const auto& gen = cfg.generator;
  std::string type = gen.value("type", "random_pcnwsf");
  PcNwsfInstance inst = [&]() -> PcNwsfInstance {
    if (type == "random_pcnwsf") {
      int n_min = gen.value("n_min", 6), n_max = gen.value("n_max", 14);
      int k = gen.value("k", 5);
      long wmax = gen.value("wmax", 8);
      int n = static_cast<int>(rng.next_in(n_min, n_max));
      return gen_random_pcnwsf(rng, n, k, wmax, pc);
    }
    if (type == "sc_reduction") {
      int n_elems = gen.value("n_elems", 6), n_sets = gen.value("n_sets", 6);
      long lo = gen.value("cost_lo", 1), hi = gen.value("cost_hi", 8);
      SetCoverInstance sc = gen_random_sc(rng, n_elems, n_sets, lo, hi);
      return gen_sc_reduction(sc);
    }
    if (type == "counterexample") return gen_counterexample(gen.value("k", 8));
    throw InputError("unknown generator type for driver runs: " + type);
  }();

  rec.n = inst.graph.vertex_count();
  rec.k = static_cast<int>(inst.pairs.size());

  DriverConfig dcfg;
  dcfg.k = std::max<long>(2, static_cast<long>(inst.pairs.size()));
  dcfg.prize_collecting = pc;
  dcfg.seed = rng.next_u64();
  dcfg.p_factor = cfg.p_factor;
  dcfg.budget_doubling = cfg.budget_doubling;
  dcfg.p_doubling = cfg.p_doubling;

  if (cfg.k_doubling || cfg.scale_guess) {
    std::unique_ptr<ScaleWrapper> sw;
    std::unique_ptr<KDoublingWrapper> kw;
    const RealLedger* ledger = nullptr;
    long reinits = 0;
    if (cfg.k_doubling) {
      kw = std::make_unique<KDoublingWrapper>(inst.graph, dcfg);
      for (const auto& ev : inst.pairs) kw->arrive(ev);
      ledger = &kw->ledger();
      reinits = static_cast<long>(kw->reinit_indices().size());
      if (!kw->all_pairs_feasible()) rec.violation = true;
    } else {
      sw = std::make_unique<ScaleWrapper>(inst.graph, dcfg.k, dcfg);
      for (const auto& ev : inst.pairs) sw->arrive(ev);
      ledger = &sw->ledger();
      reinits = static_cast<long>(sw->reset_indices().size());
      if (!sw->all_pairs_feasible()) rec.violation = true;
    }
    rec.greedy_cost = to_double(ledger->vertex_cost());
    rec.penalty_cost = to_double(ledger->penalty_total());
    rec.alg_cost = to_double(ledger->total());
    rec.reinit_count = reinits;
  } else {
    SteinerDriver driver(inst.graph, dcfg);
    for (const auto& ev : inst.pairs) driver.arrive(ev);
    if (!driver.all_pairs_feasible()) rec.violation = true;
    rec.greedy_cost = to_double(driver.greedy_paid());
    rec.aug_cost = to_double(driver.aug_paid());
    rec.facility_cost = to_double(driver.facility_paid());
    rec.connection_cost = to_double(driver.connection_paid());
    rec.penalty_cost = to_double(driver.penalty_paid());
    rec.alg_cost = to_double(driver.total_paid());
    rec.fallback_events = driver.nmfl().fallback_count();
  }

  if (inst.graph.vertex_count() <= 20 && inst.pairs.size() <= 10) {
    NwsfOracleResult opt = opt_pc_nwsf(inst.graph, inst.pairs);
    rec.opt_cost = to_double(opt.opt);
    rec.opt_known = true;
  }
  rec.runtime_ms = elapsed_ms(t0);
  return rec;
}

inline ExperimentRecord run_nmfl_trial(const ExperimentConfig& cfg, long trial) {
  Rng rng = Rng(cfg.seed).substream(static_cast<uint64_t>(trial));
  ExperimentRecord rec;
  rec.instance_id = trial;
  rec.algorithm = algorithm_name(cfg.algorithm);
  rec.seed = cfg.seed;
  auto t0 = std::chrono::steady_clock::now();

  const auto& gen = cfg.generator;
  int nf = gen.value("n_fac", 6), nc = gen.value("n_clients", 6);
  long fac_max = gen.value("fac_max", 10), conn_max = gen.value("conn_max", 8);
  NmflInstance inst = gen_random_nmfl(rng, nf, nc, fac_max, conn_max);
  rec.n = nf;
  rec.k = nc;

  NmflConfig ncfg;
  ncfg.rounding.seed = rng.next_u64();
  ncfg.rounding.element_guess = static_cast<long>(nc) * 8;
  ncfg.rounding.budget_doubling = cfg.budget_doubling;
  ncfg.rounding.p_doubling = cfg.p_doubling;
  ncfg.rounding.p_factor = cfg.p_factor;
  NmflOnline run(ncfg);
  for (int c = 0; c < nc; ++c) {
    std::vector<FacCandidate> cands;
    for (const auto& [f, w] : inst.conn[static_cast<std::size_t>(c)])
      cands.push_back({f, inst.fac_costs[static_cast<std::size_t>(f)], w});
    run.arrive(c, cands);
  }
  rec.facility_cost = to_double(run.facility_paid());
  rec.connection_cost = to_double(run.connection_paid());
  rec.alg_cost = to_double(run.total_paid());
  rec.fallback_events = run.fallback_count();

  std::vector<int> clients(static_cast<std::size_t>(nc));
  for (int c = 0; c < nc; ++c) clients[static_cast<std::size_t>(c)] = c;
  if (nf <= 20) {
    NmflOracleResult opt = opt_nmfl(inst, clients);
    rec.opt_cost = to_double(opt.opt);
    rec.opt_known = true;
  }
  rec.runtime_ms = elapsed_ms(t0);
  return rec;
}

inline ExperimentRecord run_sc_trial(const ExperimentConfig& cfg, long trial) {
  Rng rng = Rng(cfg.seed).substream(static_cast<uint64_t>(trial));
  ExperimentRecord rec;
  rec.instance_id = trial;
  rec.algorithm = algorithm_name(cfg.algorithm);
  rec.seed = cfg.seed;
  auto t0 = std::chrono::steady_clock::now();

  const auto& gen = cfg.generator;
  int n_elems = gen.value("n_elems", 8), n_sets = gen.value("n_sets", 8);
  long lo = gen.value("cost_lo", 1), hi = gen.value("cost_hi", 8);
  SetCoverInstance inst = gen_random_sc(rng, n_elems, n_sets, lo, hi);
  validate_sc_coverage(inst, n_elems);
  rec.n = n_sets;
  rec.k = n_elems;

  FractionalState frac;
  bool baseline = cfg.algorithm == Algorithm::ScBaselineSingleThreshold;
  RoundingConfig rcfg;
  rcfg.seed = rng.next_u64();
  rcfg.element_guess = n_elems;
  rcfg.p_factor = cfg.p_factor;
  rcfg.budget_doubling = cfg.budget_doubling;
  rcfg.p_doubling = cfg.p_doubling;
  ScRounder rounder(rcfg);
  SingleThresholdRounder single(n_elems, rcfg.seed);

  double total = 0;
  long fallbacks = 0;
  for (int e = 0; e < n_elems; ++e) {
    std::vector<SetCandidate> lpc;
    std::vector<RoundingCandidate> rc;
    for (int s : inst.covering_sets(e)) {
      lpc.push_back({s, inst.set_costs[static_cast<std::size_t>(s)]});
      rc.push_back({s, to_double(inst.set_costs[static_cast<std::size_t>(s)])});
    }
    std::vector<int> changed = fsc_arrive(frac, e, lpc);
    std::vector<FracUpdate> ups;
    for (int s : changed)
      ups.push_back({s, to_double(frac.x_set(s)), to_double(inst.set_costs[static_cast<std::size_t>(s)])});
    RoundingStep st = baseline ? single.arrive(e, rc, ups) : rounder.arrive(e, rc, ups);
    total += st.step_cost;
    if (st.fallback) ++fallbacks;
  }
  rec.facility_cost = total;
  rec.alg_cost = total;
  rec.fallback_events = fallbacks;

  std::vector<int> elements(static_cast<std::size_t>(n_elems));
  for (int e = 0; e < n_elems; ++e) elements[static_cast<std::size_t>(e)] = e;
  if (n_sets <= 25) {
    ScOracleResult opt = opt_set_cover(inst, elements);
    rec.opt_cost = to_double(opt.opt);
    rec.opt_known = true;
  }
  rec.runtime_ms = elapsed_ms(t0);
  return rec;
}

}  // namespace detail

inline ExperimentRecord run_trial(const ExperimentConfig& cfg, long trial) {
  switch (cfg.algorithm) {
    case Algorithm::Nwsf:
    case Algorithm::PcNwsf:
      return detail::run_driver_trial(cfg, trial);
    case Algorithm::Nmfl:
      return detail::run_nmfl_trial(cfg, trial);
    case Algorithm::ScRound:
    case Algorithm::ScBaselineSingleThreshold:
      return detail::run_sc_trial(cfg, trial);
  }
  throw InputError("unhandled algorithm");
}

// Runs every trial on its own seed substream and writes one CSV row per
// trial in trial order. The ratio columns are reproducible byte-for-byte for
// a fixed config+seed; runtime_ms is wall-clock and excluded from that
// guarantee.
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg, std::ostream* summary_out,
                                        unsigned threads = 0) {
  std::vector<ExperimentRecord> records(static_cast<std::size_t>(cfg.trials));
  parallel_for(
      static_cast<std::size_t>(cfg.trials),
      [&](std::size_t i) { records[i] = run_trial(cfg, static_cast<long>(i)); }, threads);

  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out);
    if (!f) throw InputError("cannot open output file: " + cfg.out);
    f << kCsvHeader << '\n';
    for (const auto& r : records) f << record_to_csv(r) << '\n';
  }

  ExperimentSummary s;
  s.trials = cfg.trials;
  long counted = 0;
  for (const auto& r : records) {
    if (r.violation) ++s.violations;
    s.fallback_events += r.fallback_events;
    if (r.opt_known && r.opt_cost > 0) {
      double ratio = r.alg_cost / r.opt_cost;
      s.mean_ratio += ratio;
      s.max_ratio = std::max(s.max_ratio, ratio);
      ++counted;
    }
  }
  if (counted) s.mean_ratio /= static_cast<double>(counted);
  if (summary_out) {
    *summary_out << "trials=" << s.trials << " mean_ratio=" << fmt_num(s.mean_ratio)
                 << " max_ratio=" << fmt_num(s.max_ratio) << " violations=" << s.violations
                 << " fallbacks=" << s.fallback_events << '\n';
  }
  return s;
}

// ---------------------------------------------------------------------------
// Focused statistical experiments shared by the acceptance suite and the CLI.

struct Claim1Cell {
  int p = 0;
  double x_final = 0;
  double empirical = 0;
  double bound = 0;   // 2 * p * x_final
  double sigma = 0;
};

// One set is inflated toward x_final in small steps while a free certificate
// set keeps every arrival covered; measures how often the inflated set's
// threshold is crossed by the end.
inline Claim1Cell run_claim1_cell(int p, double x_final, long trials, uint64_t seed) {
  Claim1Cell cell;
  cell.p = p;
  cell.x_final = x_final;
  const int steps = 20;
  long hits = 0;
  Rng master(seed);
  for (long t = 0; t < trials; ++t) {
    RoundingConfig rc;
    rc.p = p;
    rc.seed = master.substream(static_cast<uint64_t>(t)).next_u64();
    ScRounder r(rc);
    for (int i = 1; i <= steps; ++i) {
      double x = x_final * static_cast<double>(i) / steps;
      std::vector<RoundingCandidate> cands{{0, 1.0}, {1, 0.0}};
      std::vector<FracUpdate> ups{{0, x, 1.0}, {1, 1.0, 0.0}};
      r.arrive(i, cands, ups);
    }
    if (r.is_purchased(0)) ++hits;
  }
  cell.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  cell.bound = 2.0 * p * x_final;
  cell.sigma = std::sqrt(std::max(1e-12, cell.empirical * (1 - cell.empirical) /
                                              static_cast<double>(trials)));
  return cell;
}

struct Claim2Result {
  long arrivals = 0;
  long fallbacks = 0;
  double rate = 0;
  double sigma = 0;  // binomial standard error at the theoretical rate
  int p = 0;
};

// Fixed 8-element super-instance with a balanced, exactly feasible constant
// feed: each element's fractional mass is split evenly over its covering
// sets, so no set saturates and the fallback event keeps positive (but
// bounded) probability. Serving a constant monotone solution is a legitimate
// choice for the committed adversary; the element picker adapts to the
// observed purchases.
inline Claim2Result run_claim2(long trials, uint64_t seed, AdversaryStrategy strategy,
                               double* theoretical_rate = nullptr) {
  const int n_elems = 8;
  Rng setup(seed ^ 0xC1A22ULL);
  SetCoverInstance inst = gen_random_sc(setup, n_elems, 10, 1, 8);
  validate_sc_coverage(inst, n_elems);

  std::vector<double> x(static_cast<std::size_t>(inst.n_sets()), 0.0);
  for (int e = 0; e < n_elems; ++e) {
    std::vector<int> covers = inst.covering_sets(e);
    double share = 1.0 / static_cast<double>(covers.size());
    for (int s : covers) x[static_cast<std::size_t>(s)] = std::max(x[static_cast<std::size_t>(s)], share);
  }
  std::vector<FracUpdate> all_values;
  for (int s = 0; s < inst.n_sets(); ++s)
    all_values.push_back({s, x[static_cast<std::size_t>(s)], to_double(inst.set_costs[static_cast<std::size_t>(s)])});

  int p = std::max(1, static_cast<int>(std::ceil(2.0 * std::log2(static_cast<double>(n_elems)))));

  if (theoretical_rate) {
    // Mean over elements of prod_{S covering e} (1 - x_S)^p.
    double sum = 0;
    for (int e = 0; e < n_elems; ++e) {
      double pr = 1.0;
      for (int s : inst.covering_sets(e))
        pr *= std::pow(std::max(0.0, 1.0 - x[static_cast<std::size_t>(s)]), p);
      sum += pr;
    }
    *theoretical_rate = sum / n_elems;
  }

  Claim2Result out;
  out.p = p;
  Rng master(seed);
  for (long t = 0; t < trials; ++t) {
    RoundingConfig rc;
    rc.p = p;
    rc.seed = master.substream(static_cast<uint64_t>(t)).next_u64();
    ScRounder r(rc);
    SemiAdaptiveScAdversary adv(inst, n_elems, strategy);
    bool first = true;
    while (auto e = adv.next([&](int s) { return r.is_purchased(s); })) {
      std::vector<RoundingCandidate> cands;
      for (int s : adv.covering_sets(*e)) cands.push_back({s, to_double(inst.set_costs[static_cast<std::size_t>(s)])});
      RoundingStep st = r.arrive(*e, cands, first ? all_values : std::vector<FracUpdate>{});
      first = false;
      ++out.arrivals;
      if (st.fallback) ++out.fallbacks;
    }
  }
  out.rate = static_cast<double>(out.fallbacks) / static_cast<double>(out.arrivals);
  double p0 = std::exp(-static_cast<double>(p));
  out.sigma = std::sqrt(p0 * (1 - p0) / static_cast<double>(out.arrivals));
  return out;
}

struct AppendixBResult {
  int k = 0;
  double baseline_mean_cost = 0;
  double pipeline_mean_cost = 0;
  double pipeline_mean_ratio = 0;
  double opt = 0;
  long baseline_fallbacks = 0;
  long pipeline_fallbacks = 0;
};

// A/B experiment on the counterexample family under the published fractional
// feed: the single-threshold baseline against the per-set-threshold rounder.
inline AppendixBResult run_appendix_b(int k, long trials, uint64_t seed, unsigned threads = 0) {
  CounterexampleFeed feed = make_counterexample_feed(k);
  validate_counterexample_feed(feed);
  AppendixBResult out;
  out.k = k;
  out.opt = feed.opt;
  long n_elements = k - 1;

  std::vector<double> base_cost(static_cast<std::size_t>(trials));
  std::vector<double> pipe_cost(static_cast<std::size_t>(trials));
  std::vector<long> base_fb(static_cast<std::size_t>(trials)), pipe_fb(static_cast<std::size_t>(trials));
  Rng master(seed);
  std::vector<uint64_t> seeds(static_cast<std::size_t>(trials));
  for (long t = 0; t < trials; ++t) seeds[static_cast<std::size_t>(t)] = master.substream(static_cast<uint64_t>(t)).next_u64();

  parallel_for(
      static_cast<std::size_t>(trials),
      [&](std::size_t t) {
        SingleThresholdRounder single(n_elements, seeds[t]);
        for (std::size_t i = 0; i < feed.cands.size(); ++i)
          single.arrive(static_cast<int>(i), feed.cands[i], feed.updates[i]);
        base_cost[t] = single.total_cost();
        base_fb[t] = single.fallback_count();

        RoundingConfig rc;
        rc.element_guess = n_elements;
        rc.seed = seeds[t] ^ 0x9E3779B97F4A7C15ULL;
        ScRounder r(rc);
        for (std::size_t i = 0; i < feed.cands.size(); ++i)
          r.arrive(static_cast<int>(i), feed.cands[i], feed.updates[i]);
        pipe_cost[t] = r.total_cost();
        pipe_fb[t] = r.fallback_count();
      },
      threads);

  for (long t = 0; t < trials; ++t) {
    out.baseline_mean_cost += base_cost[static_cast<std::size_t>(t)];
    out.pipeline_mean_cost += pipe_cost[static_cast<std::size_t>(t)];
    out.baseline_fallbacks += base_fb[static_cast<std::size_t>(t)];
    out.pipeline_fallbacks += pipe_fb[static_cast<std::size_t>(t)];
  }
  out.baseline_mean_cost /= static_cast<double>(trials);
  out.pipeline_mean_cost /= static_cast<double>(trials);
  out.pipeline_mean_ratio = out.pipeline_mean_cost / out.opt;
  return out;
}

}  // namespace nwsf
