#include <doctest.h>

#include <map>
#include <set>

#include "uwoan/scenario.hpp"
#include "uwoan/sim_engine.hpp"

using namespace uwoan;

namespace {

SimConfig small_config()
{
  SimConfig cfg;
  cfg.t_max = 20.0;
  return cfg;
}

const NodeResult& node(const SimReport& r, std::size_t i) { return r.nodes.at(i); }

} // namespace

TEST_CASE("event queue order")
{
  EventQueue q;
  auto push = [&](double t, EventKind k) {
    Event e;
    e.time = t;
    e.kind = k;
    q.schedule(e);
  };
  push(2.0, EventKind::SimEnd);
  push(1.0, EventKind::SuperframeTx);
  push(1.0, EventKind::TimeoutCheck);
  push(0.5, EventKind::SonarPing);
  CHECK(q.pop().kind == EventKind::SonarPing);
  CHECK(q.pop().kind == EventKind::SuperframeTx);
  CHECK(q.pop().kind == EventKind::TimeoutCheck);
  CHECK(q.now() == 1.0);
  Event late;
  late.time = 0.9;
  CHECK_THROWS_AS(q.schedule(late), std::logic_error);
  CHECK(q.pop().kind == EventKind::SimEnd);
  CHECK(q.empty());
}

TEST_CASE("world kinematics are closed form")
{
  World w;
  w.nodes.push_back({{10, 10, 100}, 0.0, 0.0, 0});
  w.set_vertical_velocity(0, 0.5, 2.0);
  CHECK(w.position_of(0, 6.0).depth == doctest::Approx(102.0));
  w.set_vertical_velocity(0, -0.25, 6.0);
  CHECK(w.position_of(0, 10.0).depth == doctest::Approx(101.0));
  CHECK(w.nodes[0].epoch == 2);
  CHECK(w.position_of(0, 1000.0).depth == 0.0); // clamped at the surface

  w.current = {0.1, 0.0, 0.0};
  CHECK(w.position_of(0, 16.0).east == doctest::Approx(11.0));
}

TEST_CASE("deployment generation")
{
  const SimConfig cfg;
  const World a = generate(cfg, 5);
  const World b = generate(cfg, 5);
  const World c = generate(cfg, 6);
  REQUIRE(a.nodes.size() == 50);
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    CHECK(cfg.region.contains(a.nodes[i].anchor));
    CHECK(a.nodes[i].anchor == b.nodes[i].anchor);
  }
  CHECK_FALSE(a.nodes[0].anchor == c.nodes[0].anchor);
  CHECK(a.bs == Position{100, 100, 0});
  CHECK_THROWS_AS(make_world(cfg, {{100, 100, 250}}), ConfigError);
}

TEST_CASE("one node below the BS")
{
  const SimConfig cfg = small_config();
  const TracedRun t = trace(cfg, make_world(cfg, {{100, 100, 50}}), 1);
  const SimReport& r = t.report;
  CHECK(r.access_rate == 1.0);
  CHECK(r.dual_hop_rate == 0.0);
  CHECK(r.max_decomp_delay == 0.0);
  // Stationary at 50 m: every delivery takes 50/1500 s.
  CHECK(r.avg_sound_delay == doctest::Approx(50.0 / 1500.0).epsilon(1e-12));
  const NodeResult& n = node(r, 0);
  CHECK(n.outcome == "accessed");
  CHECK(n.network_id == 1);
  REQUIRE(n.access_time);
  CHECK(*n.access_time == doctest::Approx(1.1));
  CHECK(r.edges == std::vector<TopologyEdge>{{1, kBsTopologyId, 1}});

  // Trigger at 50/1500, first frame at 0.1 + 50/1500, beam accepted at once.
  bool saw_beam = false;
  for (const auto& e : t.trace) {
    if (e.kind == EventKind::OpticalArrival && e.subject == "bs") {
      CHECK(e.time == doctest::Approx(0.1 + 50.0 / 1500.0));
      CHECK(e.beam_accepted);
      saw_beam = true;
      break;
    }
  }
  CHECK(saw_beam);
}

TEST_CASE("node outside the acoustic radius stays dormant")
{
  SimConfig cfg = small_config();
  cfg.acoustic_radius = 100.0;
  const SimReport r = run(cfg, make_world(cfg, {{100, 100, 50}, {0, 0, 190}}), 1);
  CHECK(node(r, 0).outcome == "accessed");
  CHECK(node(r, 1).outcome == "dormant");
  CHECK(node(r, 1).lifecycle == "DORMANT");
  CHECK(r.access_rate == 0.5);
}

TEST_CASE("deep node reaches the BS through a relay")
{
  SimConfig cfg = small_config();
  cfg.water.c0 = 0.151;
  const World w = make_world(cfg, {{100, 100, 100}, {100, 100, 190}});
  const TracedRun t = trace(cfg, w, 3);
  const SimReport& r = t.report;
  REQUIRE(node(r, 0).outcome == "accessed");
  REQUIRE(node(r, 1).outcome == "accessed");
  CHECK_FALSE(node(r, 0).via_relay);
  CHECK(node(r, 1).via_relay);
  CHECK(node(r, 1).relay_id == 1);
  CHECK(r.dual_hop_rate == 0.5);
  CHECK(r.edges == std::vector<TopologyEdge>{{1, kBsTopologyId, 1}, {2, 1, 2}});

  std::size_t forwarded = 0;
  for (const auto& e : t.trace)
    if (e.kind == EventKind::OpticalArrival && e.subject == "uwn:0" && e.detail.find("forwarded") != std::string::npos)
      ++forwarded;
  CHECK(forwarded >= 1);
}

TEST_CASE("co-depth pair decomposes")
{
  const SimConfig cfg = small_config();
  const World w = make_world(cfg, {{60, 100, 100.0}, {140, 100, 100.3}});
  const SimReport r = run(cfg, w, 7);
  CHECK(r.access_rate == 1.0);
  CHECK(r.max_decomp_delay > 0.0);
  CHECK(node(r, 0).decomposition_time > 0.0);
  CHECK(r.n_misidentified == 0);
}

TEST_CASE("trace basics")
{
  const SimConfig cfg = small_config();
  const TracedRun t = trace(cfg, 11);
  REQUIRE_FALSE(t.trace.empty());
  CHECK(t.trace.front().kind == EventKind::SonarPing);
  CHECK(t.trace.front().time == 0.0);
  CHECK(t.trace.back().kind == EventKind::SimEnd);
  CHECK(t.trace.back().time == cfg.t_max);

  for (std::size_t k = 1; k < t.trace.size(); ++k) {
    const auto& a = t.trace[k - 1];
    const auto& b = t.trace[k];
    CHECK((a.time < b.time || (a.time == b.time && a.seq < b.seq)));
  }
  std::size_t pings = 0, frames = 0;
  for (const auto& e : t.trace) {
    pings += e.kind == EventKind::SonarPing;
    frames += e.kind == EventKind::SuperframeTx;
    if (e.kind == EventKind::AcousticArrival) {
      CHECK(e.origin == "bs");
      CHECK(e.time - e.sent_at == doctest::Approx(distance(e.tx_position, e.rx_position) / 1500.0).epsilon(1e-12));
    }
  }
  CHECK(pings == 20);
  CHECK(frames == 20);
  CHECK(t.trace.front().line().rfind("0.000000000 SONAR_PING bs", 0) == 0);
}

TEST_CASE("runs are reproducible")
{
  const SimConfig cfg = small_config();
  const TracedRun a = trace(cfg, 21);
  const TracedRun b = trace(cfg, 21);
  CHECK(trace_text(a.trace) == trace_text(b.trace));
  CHECK(report_to_json(a.report) == report_to_json(b.report));
  CHECK(report_to_json(run(cfg, 21)) == report_to_json(a.report));
  CHECK(trace_text(trace(cfg, 22).trace) != trace_text(a.trace));
}

TEST_CASE("report bookkeeping adds up")
{
  const SimConfig cfg;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SimReport r = run(cfg, seed);
    CHECK(r.n_accessed + r.n_failed + r.n_unresolved + r.n_dormant == r.n_uwn);
    CHECK(r.access_rate == doctest::Approx(static_cast<double>(r.n_accessed) / r.n_uwn));
    CHECK(r.edges.size() == r.n_accessed);
    std::set<NetworkId> ids;
    for (const auto& n : r.nodes)
      if (n.network_id)
        CHECK(ids.insert(*n.network_id).second);
    CHECK(r.seed == seed);
    CHECK(r.c0 == cfg.water.c0);
  }
}

TEST_CASE("frame loss is survivable")
{
  SimConfig cfg = small_config();
  cfg.p_frame_loss = 0.3;
  cfg.t_max = 50.0;
  const SimReport r = run(cfg, make_world(cfg, {{100, 100, 50}}), 4);
  CHECK(r.access_rate == 1.0);
}
