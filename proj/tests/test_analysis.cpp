#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mrrh/analysis.hpp"

using namespace mrrh;

namespace {

BoundInputs base_inputs() {
  BoundInputs inp;
  inp.lambda = 1.0;
  inp.latency = 1.0;
  inp.n = 1024;
  inp.k_channels = 3;
  inp.radius = 1.0;
  inp.eta0 = 1.0;
  inp.d = 2.0;
  return inp;
}

NodePosition meridian(double ang, double r = 1.0) {
  return NodePosition::from_unit(std::sin(ang), 0.0, std::cos(ang), r);
}

HierarchicalNetwork make_net(std::vector<NodePosition> positions,
                             std::vector<int> levels) {
  NetworkConfig cfg;
  cfg.node_count = positions.size();
  cfg.radius = positions.front().r;
  cfg.seed = 0;
  ChannelPlan plan = build_channel_plan(1024, cfg.radius);
  return HierarchicalNetwork(cfg, std::move(plan), std::move(positions),
                             std::move(levels));
}

RouteTrace delivered_trace(NodeId src, NodeId dst, std::vector<Hop> hops) {
  RouteTrace t;
  t.status = RouteStatus::Delivered;
  t.source = src;
  t.destination = dst;
  t.hops = std::move(hops);
  return t;
}

}  // namespace

TEST_CASE("power lower bound") {
  BoundInputs inp = base_inputs();
  // R / 4L = 0.25 <= 1, so the loss term saturates at 1.
  CHECK(power_lower_bound(inp) ==
        doctest::Approx(0.09016844005556021).epsilon(1e-12));

  inp.radius = 20.0;  // R / 4L = 5, gamma = 1/25
  CHECK(power_lower_bound(inp) ==
        doctest::Approx(2.2542110013890055).epsilon(1e-12));

  SUBCASE("scales linearly in lambda and eta0") {
    BoundInputs two = base_inputs();
    two.lambda = 2.0;
    two.eta0 = 3.0;
    CHECK(power_lower_bound(two) ==
          doctest::Approx(6.0 * power_lower_bound(base_inputs())).epsilon(1e-12));
  }

  SUBCASE("weakly decreasing in latency") {
    BoundInputs inp2 = base_inputs();
    inp2.radius = 100.0;
    double prev = std::numeric_limits<double>::infinity();
    for (double latency : {1.0, 2.0, 5.0, 10.0, 50.0}) {
      inp2.latency = latency;
      double bound = power_lower_bound(inp2);
      CHECK(bound <= prev + 1e-15);
      prev = bound;
    }
  }

  SUBCASE("invalid inputs throw") {
    BoundInputs bad = base_inputs();
    bad.latency = 0.5;
    CHECK_THROWS_AS(power_lower_bound(bad), InvalidConfig);
    bad = base_inputs();
    bad.n = 0;
    CHECK_THROWS_AS(power_lower_bound(bad), InvalidConfig);
  }
}

TEST_CASE("constant-density power bound") {
  BoundInputs inp = base_inputs();
  inp.latency = 4.0;
  CHECK(power_lower_bound_constant_density(inp, 1.0) ==
        doctest::Approx(0.1061032953945969).epsilon(1e-12));
  // Quadratic in 1/L.
  BoundInputs fast = base_inputs();
  fast.latency = 2.0;
  CHECK(power_lower_bound_constant_density(fast, 1.0) ==
        doctest::Approx(4.0 * power_lower_bound_constant_density(inp, 1.0))
            .epsilon(1e-12));
  CHECK_THROWS_AS(power_lower_bound_constant_density(inp, 0.0), InvalidConfig);
}

TEST_CASE("bandwidth lower bound") {
  BoundInputs inp = base_inputs();
  // gamma(2 pi) / gamma(0.25) * 1024 / 48 with d = 2.
  CHECK(bandwidth_lower_bound(inp) ==
        doctest::Approx(0.5403796460924681).epsilon(1e-12));

  SUBCASE("inverse in the channel count") {
    BoundInputs one = base_inputs();
    one.k_channels = 1;
    CHECK(bandwidth_lower_bound(one) ==
          doctest::Approx(3.0 * bandwidth_lower_bound(inp)).epsilon(1e-12));
  }

  SUBCASE("weakly decreasing in latency") {
    BoundInputs inp2 = base_inputs();
    inp2.radius = 100.0;
    double prev = std::numeric_limits<double>::infinity();
    for (double latency : {1.0, 3.0, 10.0, 100.0}) {
      inp2.latency = latency;
      double bound = bandwidth_lower_bound(inp2);
      CHECK(bound <= prev + 1e-15);
      prev = bound;
    }
  }
}

TEST_CASE("distant pair fraction") {
  auto net = make_net({meridian(0.0), meridian(0.1), meridian(0.5), meridian(2.0)},
                      {0, 0, 0, 0});
  Workload w;
  w.pairs = {{0, 1}, {0, 2}, {0, 3}, {1, 2}};
  // Angles 0.1, 0.5, 2.0, 0.4: three of four reach 0.25 rad.
  CHECK(distant_pair_fraction(net, w) == doctest::Approx(0.75).epsilon(1e-12));
  Workload empty;
  CHECK(distant_pair_fraction(net, empty) == 0.0);

  SUBCASE("random pairings match the closed form (1 + cos 1/4) / 2") {
    NetworkConfig cfg;
    cfg.node_count = 4096;
    cfg.radius = 1.0;
    cfg.seed = 29;
    HierarchicalNetwork big = build_network(cfg);
    double sum = 0.0;
    const int reps = 20;
    for (int s = 0; s < reps; ++s)
      sum += distant_pair_fraction(big, generate_pairing(big.size(), 100 + s));
    double expected = 0.9844562108553223;
    double sigma = std::sqrt(expected * (1 - expected) /
                             (reps * static_cast<double>(cfg.node_count / 2)));
    CHECK(std::abs(sum / reps - expected) < 4.0 * sigma);
  }
}

TEST_CASE("latency stats") {
  WorkloadResult res;
  auto with_hops = [](std::size_t k) {
    RouteTrace t;
    t.status = RouteStatus::Delivered;
    t.hops.resize(k);
    return t;
  };
  res.traces = {with_hops(1), with_hops(3), with_hops(5), with_hops(20)};
  RouteTrace stuck;
  stuck.status = RouteStatus::Stuck;
  res.traces.push_back(stuck);

  LatencyStats stats = latency_stats(res);
  CHECK(stats.delivered == 4);
  CHECK(stats.undelivered == 1);
  CHECK(stats.delivered_fraction == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(stats.mean == doctest::Approx(7.25).epsilon(1e-12));
  CHECK(stats.max == 20);
  CHECK(stats.p50 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(stats.p95 == doctest::Approx(20.0).epsilon(1e-12));

  WorkloadResult empty;
  CHECK_THROWS_AS(latency_stats(empty), InvalidInput);

  WorkloadResult none;
  none.traces = {stuck};
  LatencyStats zero = latency_stats(none);
  CHECK(zero.delivered == 0);
  CHECK(zero.mean == 0.0);
}

TEST_CASE("usage check") {
  // N = 16: bound on channel k is 2^(k+2) * 4.
  std::vector<std::vector<std::uint32_t>> usage = {
      {16, 17, 0},  // channel 0, bound 16: one violation
      {32, 32, 33},  // channel 1, bound 32: one violation
  };
  UsageReport report = usage_check(usage, 16);
  CHECK(report.cells == 6);
  CHECK(report.violations == 2);
  CHECK(report.violation_fraction == doctest::Approx(2.0 / 6.0).epsilon(1e-12));

  UsageReport none = usage_check({}, 16);
  CHECK(none.cells == 0);
  CHECK(none.violation_fraction == 0.0);

  SUBCASE("agrees with a direct tally over routed traffic") {
    NetworkConfig cfg;
    cfg.node_count = 512;
    cfg.radius = 1.0;
    cfg.seed = 31;
    HierarchicalNetwork net = build_network(cfg);
    Workload w = generate_pairing(net.size(), 33);
    WorkloadResult res = route_workload(net, w, 4096);
    UsageReport from_matrix = usage_check(res.usage_smallest, net.size());

    double log_n = 9.0;
    std::size_t violations = 0;
    for (std::size_t k = 0; k < res.usage_smallest.size(); ++k) {
      double bound = std::ldexp(log_n, static_cast<int>(k) + 2);
      for (std::uint32_t u : res.usage_smallest[k])
        if (u > bound) violations++;
    }
    CHECK(from_matrix.violations == violations);
    CHECK(from_matrix.cells == res.usage_smallest.size() * net.size());
  }
}

TEST_CASE("channel discipline") {
  // theta = (0.8128, 1.1864, 1.8235, pi) for the N = 1024 plan.
  auto net = make_net({meridian(0.0), meridian(0.7), meridian(1.4),
                       meridian(2.1), meridian(2.8)},
                      {3, 3, 3, 3, 3});

  SUBCASE("drops with the destination in reach are clean") {
    // After h2 the relay (node 2, at 1.4) is 1.4 rad from the destination,
    // inside the theta_2 cap, so the drop to channel 1 is legitimate.
    Hop h1{0, 1, 2, 2, 2, 2.1};
    Hop h2{1, 2, 2, 2, 1, 1.4};
    Hop h3{2, 4, 1, 1, 1, 0.0};
    auto report =
        channel_discipline(net, {delivered_trace(0, 4, {h1, h2, h3})});
    CHECK(report.transitions == 2);
    CHECK(report.monotonicity_violations == 0);
    CHECK(report.exit_violations == 0);
  }

  SUBCASE("a drop with the destination out of reach is flagged") {
    // After h1 the relay (node 1, at 0.7) is 2.1 rad from the destination,
    // outside the theta_1 cap, yet the channel drops to 0.
    Hop h1{0, 1, 1, 1, 2, 2.1};
    Hop h2{1, 2, 0, 0, 2, 1.4};
    Hop h3{2, 4, 2, 2, 1, 0.0};
    auto report =
        channel_discipline(net, {delivered_trace(0, 4, {h1, h2, h3})});
    CHECK(report.transitions == 2);
    CHECK(report.monotonicity_violations == 1);
    CHECK(report.monotonicity_violation_fraction == doctest::Approx(0.5));
  }

  SUBCASE("long same-channel runs above the phase flag the trace") {
    // 2 log2(5) = 4.64: a run of 6 same-channel hops with phase above channel.
    std::vector<Hop> hops;
    for (int t = 0; t < 7; ++t) hops.push_back(Hop{0, 1, 0, 0, 2, 2.0});
    auto report = channel_discipline(net, {delivered_trace(0, 4, hops)});
    CHECK(report.exit_violations == 1);

    std::vector<Hop> short_run(hops.begin(), hops.begin() + 3);
    auto clean = channel_discipline(net, {delivered_trace(0, 4, short_run)});
    CHECK(clean.exit_violations == 0);
  }

  SUBCASE("real routed traffic is clean") {
    NetworkConfig cfg;
    cfg.node_count = 1024;
    cfg.radius = 1.0;
    cfg.seed = 37;
    HierarchicalNetwork big = build_network(cfg);
    Workload w = generate_pairing(big.size(), 39);
    WorkloadResult res = route_workload(big, w, 4096);
    auto report = channel_discipline(big, res.traces);
    CHECK(report.traces == res.traces.size());
    CHECK(report.monotonicity_violation_fraction <= 0.05);
    CHECK(report.exit_violation_fraction <= 0.05);
  }
}

TEST_CASE("optimality ratios") {
  PhyProvision prov;
  prov.p_avg = 10.0;
  prov.b_total = 100.0;
  LatencyStats stats;
  stats.mean = 5.0;
  BoundInputs inp = base_inputs();

  OptimalityReport report = optimality_ratios(prov, stats, inp);
  inp.latency = 5.0;
  CHECK(report.latency_used == 5.0);
  CHECK(report.p_lower_bound == doctest::Approx(power_lower_bound(inp)).epsilon(1e-12));
  CHECK(report.b_lower_bound ==
        doctest::Approx(bandwidth_lower_bound(inp)).epsilon(1e-12));
  CHECK(report.p_ratio ==
        doctest::Approx(10.0 / report.p_lower_bound).epsilon(1e-12));
  CHECK(report.b_ratio ==
        doctest::Approx(100.0 / report.b_lower_bound).epsilon(1e-12));

  // Zero-hop workloads are floored at one hop.
  LatencyStats zero;
  zero.mean = 0.0;
  CHECK(optimality_ratios(prov, zero, base_inputs()).latency_used == 1.0);
}

TEST_CASE("log-log slope") {
  std::vector<double> x = {2.0, 4.0, 8.0, 16.0};
  std::vector<double> quad, lin, flat;
  for (double v : x) {
    quad.push_back(v * v);
    lin.push_back(3.0 * v);
    flat.push_back(7.0);
  }
  CHECK(log_log_slope(x, quad) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(log_log_slope(x, lin) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(log_log_slope(x, flat) == doctest::Approx(0.0));
  CHECK_THROWS_AS(log_log_slope({1.0}, {1.0}), InvalidInput);
  CHECK_THROWS_AS(log_log_slope(x, {1.0, 2.0}), InvalidInput);
}
