#include <catch2/catch_amalgamated.hpp>

#include "nwsf/generators.hpp"
#include "nwsf/oracles.hpp"
#include "nwsf/steiner_online.hpp"

using namespace nwsf;

TEST_CASE("set cover oracle picks the cheapest cover") {
  SetCoverInstance inst;
  inst.set_costs = {rat(1), rat(1), rat(3, 2)};
  inst.sets = {{0}, {1}, {0, 1}};
  ScOracleResult r = opt_set_cover(inst, {0, 1});
  REQUIRE(r.opt == rat(3, 2));
  REQUIRE(r.sets == std::vector<int>{2});
}

TEST_CASE("set cover oracle trivial cases") {
  SetCoverInstance inst;
  inst.set_costs = {rat(7)};
  inst.sets = {{0}};
  SECTION("empty element set costs nothing") {
    ScOracleResult r = opt_set_cover(inst, {});
    REQUIRE(r.opt == rat(0));
    REQUIRE(r.sets.empty());
  }
  SECTION("single element, single set") {
    ScOracleResult r = opt_set_cover(inst, {0});
    REQUIRE(r.opt == rat(7));
    REQUIRE(r.sets == std::vector<int>{0});
  }
  SECTION("uncoverable element is infeasible") {
    REQUIRE_THROWS_AS(opt_set_cover(inst, {3}), InfeasibleError);
  }
  SECTION("size cap is enforced") {
    SetCoverInstance big;
    for (int i = 0; i < 30; ++i) {
      big.set_costs.push_back(rat(1));
      big.sets.push_back({0});
    }
    REQUIRE_THROWS_AS(opt_set_cover(big, {0}), SizeCapError);
  }
}

TEST_CASE("set cover oracle matches exhaustive enumeration") {
  Rng rng(314);
  for (int iter = 0; iter < 100; ++iter) {
    int n_sets = static_cast<int>(rng.next_in(1, 8));
    int n_elems = static_cast<int>(rng.next_in(1, 8));
    SetCoverInstance inst = gen_random_sc(rng, n_elems, n_sets, 1, 9);
    std::vector<int> elements;
    for (int e = 0; e < n_elems; ++e) elements.push_back(e);
    ScOracleResult fast = opt_set_cover(inst, elements);
    // enumerate all subsets
    MaybeRat best;
    for (int mask = 0; mask < (1 << n_sets); ++mask) {
      std::vector<char> covered(static_cast<std::size_t>(n_elems), 0);
      Rat cost(0);
      for (int s = 0; s < n_sets; ++s)
        if (mask & (1 << s)) {
          cost += inst.set_costs[static_cast<std::size_t>(s)];
          for (int e : inst.sets[static_cast<std::size_t>(s)]) covered[static_cast<std::size_t>(e)] = 1;
        }
      bool all = true;
      for (char c : covered) all = all && c;
      if (all && (!best || cost < *best)) best = cost;
    }
    REQUIRE(best.has_value());
    REQUIRE(fast.opt == *best);
  }
}

TEST_CASE("facility location oracle") {
  SECTION("one facility, one client") {
    NmflInstance inst;
    inst.fac_costs = {rat(5)};
    inst.conn = {{{0, rat(1)}}};
    NmflOracleResult r = opt_nmfl(inst, {0});
    REQUIRE(r.opt == rat(6));
    REQUIRE(r.open == std::vector<int>{0});
    REQUIRE(r.assignment.at(0) == 0);
  }
  SECTION("disjoint connection patterns force both facilities") {
    NmflInstance inst;
    inst.fac_costs = {rat(2), rat(3)};
    inst.conn = {{{0, rat(1)}}, {{1, rat(4)}}};
    NmflOracleResult r = opt_nmfl(inst, {0, 1});
    REQUIRE(r.opt == rat(2 + 1 + 3 + 4));
    REQUIRE(r.open == std::vector<int>{0, 1});
  }
  SECTION("no clients costs nothing") {
    NmflInstance inst;
    inst.fac_costs = {rat(2)};
    inst.conn = {{{0, rat(1)}}};
    NmflOracleResult r = opt_nmfl(inst, {});
    REQUIRE(r.opt == rat(0));
    REQUIRE(r.open.empty());
  }
  SECTION("matches exhaustive enumeration") {
    Rng rng(7);
    for (int iter = 0; iter < 60; ++iter) {
      int nf = static_cast<int>(rng.next_in(1, 6));
      int nc = static_cast<int>(rng.next_in(1, 5));
      NmflInstance inst = gen_random_nmfl(rng, nf, nc, 7, 6);
      std::vector<int> clients;
      for (int c = 0; c < nc; ++c) clients.push_back(c);
      NmflOracleResult fast = opt_nmfl(inst, clients);
      MaybeRat best;
      for (int mask = 1; mask < (1 << nf); ++mask) {
        Rat cost(0);
        for (int f = 0; f < nf; ++f)
          if (mask & (1 << f)) cost += inst.fac_costs[static_cast<std::size_t>(f)];
        bool ok = true;
        for (int c = 0; c < nc && ok; ++c) {
          MaybeRat cheapest;
          for (const auto& [f, w] : inst.conn[static_cast<std::size_t>(c)])
            if ((mask & (1 << f)) && (!cheapest || w < *cheapest)) cheapest = w;
          if (!cheapest)
            ok = false;
          else
            cost += *cheapest;
        }
        if (ok && (!best || cost < *best)) best = cost;
      }
      REQUIRE(fast.opt == *best);
    }
  }
}

TEST_CASE("prize-collecting forest oracle") {
  SECTION("adjacent pair costs nothing") {
    NodeWeightedGraph g(2, {rat(4), rat(4)}, {{0, 1}});
    NwsfOracleResult r = opt_pc_nwsf(g, {{0, 1, std::nullopt}});
    REQUIRE(r.opt == rat(0));
  }
  SECTION("all penalties zero means pay them all") {
    NodeWeightedGraph g(4, {rat(0), rat(9), rat(9), rat(0)}, {{0, 1}, {1, 2}, {2, 3}});
    NwsfOracleResult r = opt_pc_nwsf(g, {{0, 3, rat(0)}});
    REQUIRE(r.opt == rat(0));
    REQUIRE(r.penalized == std::vector<char>{1});
  }
  SECTION("size caps are enforced") {
    NodeWeightedGraph g(21, std::vector<Rat>(21, rat(1)), {});
    REQUIRE_THROWS_AS(opt_pc_nwsf(g, {}), SizeCapError);
  }
  SECTION("steiner vertex choice is exact") {
    // two mid vertices, cheaper one should be chosen
    NodeWeightedGraph g(4, {rat(0), rat(6), rat(2), rat(0)}, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
    NwsfOracleResult r = opt_pc_nwsf(g, {{0, 3, std::nullopt}});
    REQUIRE(r.opt == rat(2));
    REQUIRE(r.bought == std::vector<int>{2});
  }
}

TEST_CASE("reduction instances have equal optima under both oracles") {
  Rng rng(123);
  for (int iter = 0; iter < 50; ++iter) {
    int n_sets = static_cast<int>(rng.next_in(1, 8));
    int n_elems = static_cast<int>(rng.next_in(1, 8));
    SetCoverInstance sc = gen_random_sc(rng, n_elems, n_sets, 1, 9);
    std::vector<int> elements;
    for (int e = 0; e < n_elems; ++e) elements.push_back(e);
    ScOracleResult sc_opt = opt_set_cover(sc, elements);
    PcNwsfInstance red = gen_sc_reduction(sc);
    NwsfOracleResult fo = opt_pc_nwsf(red.graph, red.pairs);
    REQUIRE(fo.opt == sc_opt.opt);
  }
}

TEST_CASE("witness construction") {
  SECTION("no clients opens the forest only") {
    NodeWeightedGraph g(3, {rat(0), rat(3), rat(0)}, {{0, 1}, {1, 2}});
    std::vector<char> term{1, 0, 1};
    WitnessResult w = lemma1_witness(g, {1}, term, {}, 2);
    REQUIRE(w.feasible);
    REQUIRE(w.cost == rat(6));  // ell * w(forest)
  }
  SECTION("single client connects via the path interior") {
    // a - m - b, client (a, 2) after the pair (a,b): boundary vertex is m
    NodeWeightedGraph g(3, {rat(0), rat(3), rat(0)}, {{0, 1}, {1, 2}});
    std::vector<char> term{1, 0, 1};
    EmittedClient c;
    c.client_id = 0;
    c.terminal = 0;
    c.other = 2;
    c.level = 2;
    WitnessResult w = lemma1_witness(g, {1}, term, {c}, 2);
    REQUIRE(w.feasible);
    REQUIRE(w.connection_cost == rat(0));  // d_G(a, m) = 0
    REQUIRE(w.cost == rat(6));
  }
  SECTION("forest leaving a mandatory pair disconnected is flagged") {
    NodeWeightedGraph g(3, {rat(0), rat(3), rat(0)}, {{0, 1}, {1, 2}});
    std::vector<char> term{1, 0, 1};
    EmittedClient c;
    c.client_id = 0;
    c.terminal = 0;
    c.other = 2;
    c.level = 2;
    WitnessResult w = lemma1_witness(g, {}, term, {c}, 2);
    REQUIRE_FALSE(w.feasible);
  }
}

TEST_CASE("witness sweep over driver runs stays within twice ell times opt") {
  Rng rng(8711);
  int failures = 0;
  for (int iter = 0; iter < 60; ++iter) {
    int n = static_cast<int>(rng.next_in(6, 12));
    int k = static_cast<int>(rng.next_in(2, 5));
    bool pc = rng.next_unit() < 0.5;
    PcNwsfInstance inst = gen_random_pcnwsf(rng, n, k, 6, pc);
    DriverConfig cfg;
    cfg.k = k;
    cfg.prize_collecting = pc;
    cfg.seed = rng.next_u64();
    SteinerDriver d(inst.graph, cfg);
    for (const auto& ev : inst.pairs) d.arrive(ev);
    NwsfOracleResult opt = opt_pc_nwsf(inst.graph, inst.pairs);
    std::vector<char> term(static_cast<std::size_t>(n), 0);
    for (const auto& ev : inst.pairs) {
      term[static_cast<std::size_t>(ev.s)] = 1;
      term[static_cast<std::size_t>(ev.t)] = 1;
    }
    WitnessResult w = lemma1_witness(inst.graph, opt.bought, term, d.emitted_clients(), d.ell());
    if (!w.feasible) {
      ++failures;
      continue;
    }
    Rat reference = witness_reference_opt(inst.graph, inst.pairs, opt);
    if (w.cost > rat(2) * rat(d.ell()) * reference) ++failures;
  }
  REQUIRE(failures == 0);
}
