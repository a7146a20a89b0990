#include <catch2/catch_amalgamated.hpp>
#include <fstream>
#include <sstream>

#include "nwsf/adversary.hpp"
#include "nwsf/experiment.hpp"
#include "nwsf/generators.hpp"

using namespace nwsf;

TEST_CASE("random set cover generation") {
  SECTION("one element, one set") {
    Rng rng(1);
    SetCoverInstance inst = gen_random_sc(rng, 1, 1, 1, 5);
    REQUIRE(inst.n_sets() == 1);
    REQUIRE_FALSE(inst.covering_sets(0).empty());
  }
  SECTION("fixed seed reproduces the instance") {
    Rng a(77), b(77);
    SetCoverInstance x = gen_random_sc(a, 8, 6, 1, 9);
    SetCoverInstance y = gen_random_sc(b, 8, 6, 1, 9);
    REQUIRE(x.set_costs == y.set_costs);
    REQUIRE(x.sets == y.sets);
  }
  SECTION("coverage validator passes on a large sweep") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
      int ne = static_cast<int>(rng.next_in(1, 12));
      int ns = static_cast<int>(rng.next_in(1, 10));
      SetCoverInstance inst = gen_random_sc(rng, ne, ns, 0, 9);
      REQUIRE_NOTHROW(validate_sc_coverage(inst, ne));
    }
  }
  SECTION("impossible parameters are rejected") {
    Rng rng(1);
    REQUIRE_THROWS_AS(gen_random_sc(rng, 3, 0, 1, 2), InputError);
  }
}

TEST_CASE("set cover to forest reduction") {
  Rng rng(9);
  SetCoverInstance sc = gen_random_sc(rng, 5, 4, 1, 6);
  PcNwsfInstance red = gen_sc_reduction(sc);
  SECTION("vertex and pair counts") {
    REQUIRE(red.graph.vertex_count() == 5 + 4 + 1);
    REQUIRE(red.pairs.size() == 5);
    for (const auto& ev : red.pairs) REQUIRE(ev.t == 9);
  }
  SECTION("element and root vertices are free, set vertices carry costs") {
    for (int e = 0; e < 5; ++e) REQUIRE(red.graph.weight(e) == rat(0));
    for (int s = 0; s < 4; ++s) REQUIRE(red.graph.weight(5 + s) == sc.set_costs[static_cast<std::size_t>(s)]);
    REQUIRE(red.graph.weight(9) == rat(0));
  }
  SECTION("empty instance reduces to a lone root") {
    SetCoverInstance empty;
    PcNwsfInstance r = gen_sc_reduction(empty);
    REQUIRE(r.graph.vertex_count() == 1);
    REQUIRE(r.pairs.empty());
  }
}

TEST_CASE("counterexample family") {
  SECTION("k = 2 structure") {
    PcNwsfInstance inst = gen_counterexample(2);
    REQUIRE(inst.graph.vertex_count() == 4);
    REQUIRE(inst.pairs.size() == 1);
    // v_2 (id 3) is adjacent to both terminals and forced into any solution
    NwsfOracleResult opt = opt_pc_nwsf(inst.graph, inst.pairs);
    REQUIRE(opt.opt == Rat(1) + rat(2, 1000000));
  }
  SECTION("k below two is rejected") { REQUIRE_THROWS_AS(gen_counterexample(1), InputError); }
  SECTION("published fractional feed is feasible at every step") {
    for (int k : {4, 16, 64}) {
      CounterexampleFeed feed = make_counterexample_feed(k);
      REQUIRE_NOTHROW(validate_counterexample_feed(feed));
    }
  }
}

TEST_CASE("pairs JSON round trip") {
  std::vector<TerminalEvent> pairs{{0, 1, std::nullopt}, {2, 3, rat(5)}, {1, 3, rat(0)}};
  std::vector<TerminalEvent> back = pairs_from_json(pairs_to_json(pairs));
  REQUIRE(back.size() == 3);
  REQUIRE_FALSE(back[0].penalty.has_value());
  REQUIRE(*back[1].penalty == rat(5));
  REQUIRE(*back[2].penalty == rat(0));
}

TEST_CASE("adversary strategies") {
  Rng rng(3);
  SetCoverInstance inst = gen_random_sc(rng, 6, 5, 1, 5);
  SECTION("replay emits the fixed sequence") {
    SemiAdaptiveScAdversary adv(inst, 6, AdversaryStrategy::Replay);
    for (int e = 0; e < 6; ++e) {
      auto nxt = adv.next([](int) { return false; });
      REQUIRE(nxt.has_value());
      REQUIRE(*nxt == e);
    }
    REQUIRE_FALSE(adv.next([](int) { return false; }).has_value());
  }
  SECTION("uncovered seeking still emits when everything is covered") {
    SemiAdaptiveScAdversary adv(inst, 6, AdversaryStrategy::UncoveredSeeking);
    int count = 0;
    while (adv.next([](int) { return true; })) ++count;
    REQUIRE(count == 6);
  }
  SECTION("uncovered seeking raises the fallback rate versus replay") {
    Claim2Result replay = run_claim2(3000, 11, AdversaryStrategy::Replay);
    Claim2Result seeking = run_claim2(3000, 11, AdversaryStrategy::UncoveredSeeking);
    REQUIRE(seeking.rate >= replay.rate);
  }
}

TEST_CASE("experiment runner") {
  SECTION("single trial with a fixed seed is deterministic") {
    ExperimentConfig cfg;
    cfg.algorithm = Algorithm::PcNwsf;
    cfg.trials = 1;
    cfg.seed = 42;
    ExperimentRecord a = run_trial(cfg, 0);
    ExperimentRecord b = run_trial(cfg, 0);
    REQUIRE(a.alg_cost == b.alg_cost);
    REQUIRE(a.opt_cost == b.opt_cost);
    REQUIRE(record_ratio(a) == record_ratio(b));
  }
  SECTION("identical config and seed give identical CSV apart from timing") {
    auto run_to_rows = [](const std::string& path) {
      ExperimentConfig cfg;
      cfg.algorithm = Algorithm::ScRound;
      cfg.trials = 20;
      cfg.seed = 7;
      cfg.out = path;
      run_experiment(cfg, nullptr, 2);
      std::ifstream f(path);
      std::vector<std::string> rows;
      std::string line;
      while (std::getline(f, line)) {
        // drop the trailing runtime_ms column, which is wall-clock
        rows.push_back(line.substr(0, line.rfind(',')));
      }
      return rows;
    };
    auto r1 = run_to_rows("/tmp/nwsf_csv_a.csv");
    auto r2 = run_to_rows("/tmp/nwsf_csv_b.csv");
    REQUIRE(r1 == r2);
    REQUIRE(r1.size() == 21);
  }
  SECTION("the algorithm never beats the oracle") {
    ExperimentConfig cfg;
    cfg.algorithm = Algorithm::PcNwsf;
    cfg.trials = 60;
    cfg.seed = 3;
    for (long t = 0; t < cfg.trials; ++t) {
      ExperimentRecord r = run_trial(cfg, t);
      REQUIRE_FALSE(r.violation);
      if (r.opt_known && r.opt_cost > 0)
        REQUIRE(r.alg_cost / r.opt_cost >= 1.0 - 1e-9);
      if (r.opt_known && r.opt_cost == 0) REQUIRE(r.alg_cost >= -1e-12);
    }
  }
  SECTION("all algorithm kinds run end to end") {
    for (Algorithm a : {Algorithm::Nwsf, Algorithm::PcNwsf, Algorithm::Nmfl, Algorithm::ScRound,
                        Algorithm::ScBaselineSingleThreshold}) {
      ExperimentConfig cfg;
      cfg.algorithm = a;
      cfg.trials = 5;
      cfg.seed = 99;
      ExperimentSummary s = run_experiment(cfg, nullptr, 1);
      REQUIRE(s.trials == 5);
      REQUIRE(s.violations == 0);
    }
  }
}

TEST_CASE("claim experiments produce sane statistics") {
  SECTION("claim 1 cells respect the threshold-crossing bound") {
    Claim1Cell cell = run_claim1_cell(2, 0.25, 4000, 5);
    REQUIRE(cell.empirical <= cell.bound + 3 * cell.sigma);
    // closed form 1-(1-x)^p within Monte-Carlo noise
    REQUIRE(std::abs(cell.empirical - (1 - 0.75 * 0.75)) < 0.03);
  }
  SECTION("claim 2 fallback rate is near the theoretical product") {
    double theory = 0;
    Claim2Result r = run_claim2(4000, 17, AdversaryStrategy::UncoveredSeeking, &theory);
    REQUIRE(r.p == 6);
    REQUIRE(r.rate <= std::exp(-6.0) + 3 * r.sigma + 0.002);
    REQUIRE(theory <= std::exp(-6.0));
  }
}

TEST_CASE("appendix-b experiment shapes") {
  AppendixBResult r = run_appendix_b(32, 400, 23, 2);
  REQUIRE(r.opt > 1.0);
  REQUIRE(r.opt < 1.01);
  // the single-threshold baseline pays linearly in k, the pipeline does not
  REQUIRE(r.baseline_mean_cost > r.pipeline_mean_cost);
  REQUIRE(r.baseline_mean_cost >= std::exp(-4.0) * (32 - 5));
}

TEST_CASE("the shared threshold exceeds 1/(2 log k) at constant rate") {
  // mu = min of 2*ceil(log2 k) uniforms stays above the critical value with
  // probability at least exp(-2)
  const int k = 256;
  const long trials = 20000;
  long high = 0;
  Rng master(31);
  for (long t = 0; t < trials; ++t) {
    SingleThresholdRounder r(k - 1, master.substream(static_cast<uint64_t>(t)).next_u64());
    if (r.mu() >= 1.0 / (2.0 * std::log2(static_cast<double>(k)))) ++high;
  }
  double freq = static_cast<double>(high) / trials;
  REQUIRE(freq >= std::exp(-2.0));
}

TEST_CASE("p-doubling on the hub family stays within a logarithmic budget factor") {
  const int k = 64;
  CounterexampleFeed feed = make_counterexample_feed(k);
  // budget: the final fractional cost of the feed
  std::vector<double> final_x(static_cast<std::size_t>(k) + 1, 0.0);
  for (const auto& us : feed.updates)
    for (const auto& u : us) final_x[static_cast<std::size_t>(u.set)] = u.x;
  double budget = 0;
  for (int j = 1; j <= k; ++j)
    budget += final_x[static_cast<std::size_t>(j)] * feed.hub_cost[static_cast<std::size_t>(j - 1)];

  const long trials = 500;
  double total = 0;
  Rng master(47);
  for (long t = 0; t < trials; ++t) {
    RoundingConfig rc;
    rc.p_doubling = true;
    rc.seed = master.substream(static_cast<uint64_t>(t)).next_u64();
    ScRounder r(rc);
    for (std::size_t i = 0; i < feed.cands.size(); ++i)
      r.arrive(static_cast<int>(i), feed.cands[i], feed.updates[i]);
    total += r.total_cost();
  }
  double mean = total / trials;
  double measured_factor = mean / (std::log2(static_cast<double>(k - 1)) * budget);
  INFO("p-doubling mean cost " << mean << " = " << measured_factor << " * log2|X| * B");
  REQUIRE(measured_factor <= 4.0);
}

TEST_CASE("wrapped experiment runs stay feasible") {
  for (bool kd : {false, true}) {
    ExperimentConfig cfg;
    cfg.algorithm = Algorithm::PcNwsf;
    cfg.trials = 15;
    cfg.seed = 1234;
    cfg.scale_guess = !kd;
    cfg.k_doubling = kd;
    ExperimentSummary s = run_experiment(cfg, nullptr, 2);
    REQUIRE(s.violations == 0);
  }
}
