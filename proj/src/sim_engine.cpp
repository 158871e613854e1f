#include "uwoan/sim_engine.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "uwoan/bs_protocol.hpp"
#include "uwoan/channel.hpp"
#include "uwoan/uwn_protocol.hpp"

namespace uwoan {

const char* to_string(EventKind k)
{
  switch (k) {
  case EventKind::SonarPing: return "SONAR_PING";
  case EventKind::SuperframeTx: return "SUPERFRAME_TX";
  case EventKind::AcousticArrival: return "ACOUSTIC_ARRIVAL";
  case EventKind::OpticalArrival: return "OPTICAL_ARRIVAL";
  case EventKind::MovementExpiry: return "MOVEMENT_EXPIRY";
  case EventKind::TimeoutCheck: return "TIMEOUT_CHECK";
  case EventKind::SimEnd: return "SIM_END";
  }
  return "?";
}

void EventQueue::schedule(Event e)
{
  if (e.time < m_now)
    throw std::logic_error("event scheduled in the past");
  e.seq = m_next_seq++;
  m_heap.push(std::move(e));
}

Event EventQueue::pop()
{
  Event e = m_heap.top();
  m_heap.pop();
  m_now = e.time;
  return e;
}

std::string TraceEntry::line() const
{
  char head[64];
  std::snprintf(head, sizeof head, "%.9f", time);
  std::string out = head;
  out += ' ';
  out += to_string(kind);
  out += ' ';
  out += subject;
  if (!detail.empty()) {
    out += ' ';
    out += detail;
  }
  return out;
}

std::string trace_text(const std::vector<TraceEntry>& trace)
{
  std::string out;
  for (const auto& e : trace) {
    out += e.line();
    out += '\n';
  }
  return out;
}

World generate(const SimConfig& cfg, Rng& rng)
{
  World w;
  w.bs = cfg.bs_position();
  w.region = cfg.region;
  w.current = {cfg.current_east, cfg.current_north, 0.0};
  w.nodes.reserve(cfg.n_uwn);
  for (std::size_t i = 0; i < cfg.n_uwn; ++i) {
    NodeKinematics k;
    k.anchor.east = rng.uniform(0.0, cfg.region.east);
    k.anchor.north = rng.uniform(0.0, cfg.region.north);
    k.anchor.depth = rng.uniform(0.0, cfg.region.depth);
    w.nodes.push_back(k);
  }
  return w;
}

World generate(const SimConfig& cfg, std::uint64_t seed)
{
  Rng rng(seed);
  return generate(cfg, rng);
}

World make_world(const SimConfig& cfg, const std::vector<Position>& positions)
{
  World w;
  w.bs = cfg.bs_position();
  w.region = cfg.region;
  w.current = {cfg.current_east, cfg.current_north, 0.0};
  for (const auto& p : positions) {
    if (!is_finite(p) || !cfg.region.contains(p))
      throw ConfigError("node position outside the region");
    NodeKinematics k;
    k.anchor = p;
    w.nodes.push_back(k);
  }
  return w;
}

namespace {

std::string node_name(std::size_t i)
{
  return i == kBsNode ? std::string("bs") : "uwn:" + std::to_string(i);
}

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

class Simulation
{
public:
  Simulation(const SimConfig& cfg, World world, Rng rng, bool keep_trace)
    : m_cfg(cfg),
      m_bs_cfg(cfg.bs_config()),
      m_uwn_cfg(cfg.uwn_config()),
      m_budget(cfg.uwn_budget()),
      m_world(std::move(world)),
      m_rng(std::move(rng)),
      m_keep_trace(keep_trace)
  {
    for (const auto& k : m_world.nodes) {
      m_uwns.push_back(make_uwn(k.anchor.depth));
      m_initial.push_back(k.anchor);
    }
  }

  SimReport execute()
  {
    schedule_at(m_cfg.t_max, EventKind::SimEnd);
    if (m_cfg.first_ping < m_cfg.t_max)
      schedule_at(m_cfg.first_ping, EventKind::SonarPing);
    if (m_cfg.first_superframe < m_cfg.t_max) {
      schedule_at(m_cfg.first_superframe, EventKind::TimeoutCheck);
      schedule_at(m_cfg.first_superframe, EventKind::SuperframeTx);
    }

    while (!m_queue.empty()) {
      Event e = m_queue.pop();
      if (e.kind == EventKind::SimEnd) {
        record(e, "");
        break;
      }
      dispatch(e);
    }
    return build_report();
  }

  std::vector<TraceEntry> take_trace() { return std::move(m_trace); }

private:
  void schedule_at(double t, EventKind kind, std::size_t node = kBsNode)
  {
    Event e;
    e.time = t;
    e.kind = kind;
    e.node = node;
    m_queue.schedule(std::move(e));
  }

  TraceEntry* record(const Event& e, std::string detail, std::string origin = "")
  {
    if (!m_keep_trace)
      return nullptr;
    TraceEntry t;
    t.time = e.time;
    t.seq = e.seq;
    t.kind = e.kind;
    t.subject = node_name(e.node);
    t.origin = std::move(origin);
    t.detail = std::move(detail);
    m_trace.push_back(std::move(t));
    return &m_trace.back();
  }

  void dispatch(const Event& e)
  {
    switch (e.kind) {
    case EventKind::SonarPing: on_sonar_ping(e); break;
    case EventKind::TimeoutCheck: on_timeout_check(e); break;
    case EventKind::SuperframeTx: on_superframe_tx(e); break;
    case EventKind::AcousticArrival: on_acoustic_arrival(e); break;
    case EventKind::OpticalArrival: on_optical_arrival_event(e); break;
    case EventKind::MovementExpiry: on_movement_expiry(e); break;
    case EventKind::SimEnd: break;
    }
  }

  void broadcast(double now, std::shared_ptr<const std::vector<std::uint8_t>> bytes)
  {
    const bool is_frame = bytes != nullptr;
    for (std::size_t i = 0; i < m_world.nodes.size(); ++i) {
      const Position rx = m_world.position_of(i, now);
      const double d = distance(m_world.bs, rx);
      if (d > m_cfg.acoustic_radius)
        continue;
      if (is_frame && m_cfg.p_frame_loss > 0.0 && m_rng.bernoulli(m_cfg.p_frame_loss))
        continue;
      Event a;
      a.time = now + acoustic_delay(d, m_cfg.water);
      a.kind = EventKind::AcousticArrival;
      a.node = i;
      a.frame_bytes = bytes;
      a.sent_at = now;
      a.tx_position = m_world.bs;
      a.rx_position = rx;
      m_queue.schedule(std::move(a));
    }
  }

  void on_sonar_ping(const Event& e)
  {
    const double now = e.time;
    const auto positions = m_world.positions_at(now);
    const auto detections = sonar_scan(m_world.bs, positions, m_bs_cfg, m_rng);
    const std::size_t before = m_bs.registry.size();
    update_decomposition(m_bs, detections, now, m_bs_cfg);
    allocate(m_bs, detections, now, m_bs_cfg);
    check_invariants(m_bs);

    std::size_t conflicted = 0;
    for (const auto& [id, rec] : m_bs.registry)
      conflicted += rec.stage == HandshakeStage::Conflicted;
    record(e,
           "detections=" + std::to_string(detections.size()) + " new=" + std::to_string(m_bs.registry.size() - before) +
             " conflicted=" + std::to_string(conflicted),
           "bs");

    broadcast(now, nullptr);
    if (now + m_cfg.superframe_period < m_cfg.t_max)
      schedule_at(now + m_cfg.superframe_period, EventKind::SonarPing);
  }

  void on_timeout_check(const Event& e)
  {
    std::vector<std::pair<NetworkId, HandshakeStage>> before;
    for (const auto& [id, rec] : m_bs.registry)
      before.emplace_back(id, rec.stage);
    handle_timeouts(m_bs, e.time, m_bs_cfg);
    check_invariants(m_bs);

    std::string detail;
    for (const auto& [id, stage] : before) {
      const NodeRecord& rec = m_bs.registry.at(id);
      if (rec.stage == stage)
        continue;
      if (!detail.empty())
        detail += ' ';
      detail += std::to_string(id) + ":" + to_string(stage) + ">" + to_string(rec.stage);
      if (rec.relayed_by)
        detail += "@" + std::to_string(*rec.relayed_by);
    }
    record(e, detail);
  }

  void on_superframe_tx(const Event& e)
  {
    const double now = e.time;
    const SuperFrame frame = compose_superframe(m_bs, m_world.bs, now);
    check_invariants(m_bs);
    auto bytes = std::make_shared<const std::vector<std::uint8_t>>(encode(frame));

    if (TraceEntry* t = record(e, "", "bs")) {
      std::string detail = "seq=" + std::to_string(frame.frame_seq) + " slots=";
      for (std::size_t k = 0; k < frame.slots.size(); ++k) {
        const auto& s = frame.slots[k];
        t->slots.emplace_back(s.network_id, s.stage);
        if (k)
          detail += ',';
        detail += std::to_string(s.network_id) + ":" + to_string(s.stage);
        if (s.conflict_flag)
          detail += "!";
        if (s.partner_id)
          detail += ">" + std::to_string(s.partner_id);
      }
      t->detail = std::move(detail);
    }

    broadcast(now, bytes);
    if (now + m_cfg.superframe_period < m_cfg.t_max) {
      schedule_at(now + m_cfg.superframe_period, EventKind::TimeoutCheck);
      schedule_at(now + m_cfg.superframe_period, EventKind::SuperframeTx);
    }
  }

  void set_motion(std::size_t i, const Movement& m, double now)
  {
    m_world.set_vertical_velocity(i, m.velocity, now);
    if (m.velocity != 0.0) {
      Event x;
      x.time = now + m.duration;
      x.kind = EventKind::MovementExpiry;
      x.node = i;
      x.epoch = m_world.nodes[i].epoch;
      m_queue.schedule(std::move(x));
    }
  }

  void on_acoustic_arrival(const Event& e)
  {
    const double now = e.time;
    const std::size_t i = e.node;
    UwnState& uwn = m_uwns[i];
    uwn.own_depth = m_world.position_of(i, now).depth;
    m_delay_sum += now - e.sent_at;
    ++m_deliveries;

    std::string detail;
    if (!e.frame_bytes) {
      on_trigger(uwn, m_uwn_cfg);
      detail = "trigger";
    } else {
      const SuperFrame& frame = decoded(e.frame_bytes);
      const FrameResponse r = match_frame(uwn, frame, now, m_rng, m_uwn_cfg);
      detail = "frame=" + std::to_string(frame.frame_seq);
      if (r.movement) {
        set_motion(i, *r.movement, now);
        detail += " move=" + fmt(r.movement->velocity);
      }
      if (r.emit_beam)
        detail += " emit=" + std::to_string(*uwn.matched_id);
      detail += std::string(" state=") + to_string(uwn.lifecycle);
      if (r.emit_beam)
        emit_from(i, now);
    }

    if (TraceEntry* t = record(e, detail, "bs")) {
      t->sent_at = e.sent_at;
      t->tx_position = e.tx_position;
      t->rx_position = e.rx_position;
      t->trigger = !e.frame_bytes;
    }
  }

  // Every receiver decodes the same broadcast bytes; decode them once.
  const SuperFrame& decoded(const std::shared_ptr<const std::vector<std::uint8_t>>& bytes)
  {
    if (bytes != m_decoded_bytes) {
      m_decoded = decode(*bytes);
      m_decoded_bytes = bytes;
    }
    return m_decoded;
  }

  void emit_from(std::size_t i, double now)
  {
    const UwnState& uwn = m_uwns[i];
    Beam b;
    b.emitter = i;
    b.source = m_world.position_of(i, now);
    b.direction = unit_vector(*uwn.emission_bearing);
    b.claimed_id = *uwn.matched_id;
    deliver_optical(b, now, 0.0);
  }

  void deliver_optical(const Beam& beam, double now, double delay)
  {
    const Vec3 bs_boresight{0.0, 0.0, 1.0};
    const double bs_fov = deg_to_rad(m_cfg.bs_rx_fov_deg);
    if (check_optical_link(beam.source, beam.direction, m_world.bs, bs_boresight, bs_fov, m_budget, m_cfg.water)
          .delivered())
      schedule_optical(beam, kBsNode, now + delay);
    if (beam.relayed)
      return;

    for (std::size_t j = 0; j < m_uwns.size(); ++j) {
      const UwnState& r = m_uwns[j];
      if (j == beam.emitter || r.lifecycle != Lifecycle::Accessed || !r.relay_duty)
        continue;
      const Position rx = m_world.position_of(j, now);
      if (distance(rx, beam.source) == 0.0)
        continue;
      const Vec3 boresight = unit_vector(r.relay_duty->receiver_bearing);
      if (check_optical_link(beam.source, beam.direction, rx, boresight, m_budget.rx_fov_half_angle, m_budget,
                             m_cfg.water)
            .delivered())
        schedule_optical(beam, j, now + delay);
    }
  }

  void schedule_optical(const Beam& beam, std::size_t receiver, double t)
  {
    Event o;
    o.time = t;
    o.kind = EventKind::OpticalArrival;
    o.node = receiver;
    o.beam = beam;
    m_queue.schedule(std::move(o));
  }

  void on_optical_arrival_event(const Event& e)
  {
    const double now = e.time;
    const Beam& beam = e.beam;
    bool accepted = false;
    std::string detail = "id=" + std::to_string(beam.claimed_id) + (beam.relayed ? " relayed" : " direct");

    if (e.node == kBsNode) {
      accepted = on_optical_arrival(m_bs, {beam.claimed_id, beam.relayed}, now);
      check_invariants(m_bs);
      detail += accepted ? " accepted" : " ignored";
    } else {
      const std::size_t j = e.node;
      const UwnState& relay = m_uwns[j];
      const Position rx = m_world.position_of(j, now);
      double incidence = 180.0;
      if (relay.relay_duty)
        incidence = angle_between_deg(unit_vector(relay.relay_duty->receiver_bearing), displacement(rx, beam.source));
      const auto forwarded = forward_beam(relay, {beam.claimed_id, incidence}, m_uwn_cfg);
      detail += forwarded ? " forwarded" : " dropped";
      if (forwarded && distance(rx, m_world.bs) > 0.0) {
        // An accessed relay keeps its own uplink aligned on the BS.
        Beam out;
        out.emitter = j;
        out.source = rx;
        const Vec3 to_bs = displacement(rx, m_world.bs);
        const double len = norm(to_bs);
        out.direction = {to_bs[0] / len, to_bs[1] / len, to_bs[2] / len};
        out.claimed_id = *forwarded;
        out.relayed = true;
        deliver_optical(out, now, m_cfg.relay_delay);
      }
    }

    if (TraceEntry* t = record(e, detail, node_name(beam.emitter))) {
      t->beam_id = beam.claimed_id;
      t->beam_relayed = beam.relayed;
      t->beam_accepted = accepted;
      t->tx_position = beam.source;
    }
  }

  void on_movement_expiry(const Event& e)
  {
    const double now = e.time;
    const std::size_t i = e.node;
    if (e.epoch != m_world.nodes[i].epoch) {
      record(e, "stale");
      return;
    }
    UwnState& uwn = m_uwns[i];
    m_world.set_vertical_velocity(i, 0.0, now);
    uwn.own_depth = m_world.position_of(i, now).depth;
    apply_movement(uwn, Movement{}, now);

    std::string detail = "depth=" + fmt(uwn.own_depth);
    if (uwn.lifecycle == Lifecycle::ConflictMoving) {
      const Movement m = draw_movement(m_rng, m_uwn_cfg.movement, uwn.own_depth, m_uwn_cfg.region_depth);
      apply_movement(uwn, m, now);
      set_motion(i, m, now);
      detail += " move=" + fmt(m.velocity);
    }
    record(e, detail);
  }

  SimReport build_report()
  {
    const double t_end = m_cfg.t_max;
    SimReport rep;
    rep.c0 = m_cfg.water.c0;
    rep.config_fingerprint = fingerprint(m_cfg);
    rep.bs = m_world.bs;
    rep.n_uwn = m_uwns.size();
    rep.acoustic_deliveries = m_deliveries;
    rep.unknown_beams = m_bs.unknown_beams;

    for (std::size_t i = 0; i < m_uwns.size(); ++i) {
      const UwnState& uwn = m_uwns[i];
      NodeResult n;
      n.index = i;
      n.initial = m_initial[i];
      n.final_position = m_world.position_of(i, t_end);
      n.lifecycle = to_string(uwn.lifecycle);
      n.decomposition_time = uwn.conflict_time;
      if (uwn.lifecycle == Lifecycle::ConflictMoving)
        n.decomposition_time += t_end - uwn.conflict_entered_at;

      const NodeRecord* rec = nullptr;
      if (auto it = m_bs.by_track.find(i); it != m_bs.by_track.end()) {
        rec = &m_bs.registry.at(it->second);
        n.network_id = rec->network_id;
        n.bs_stage = to_string(rec->stage);
      }
      const bool genuine = rec && rec->stage == HandshakeStage::Accessed && uwn.lifecycle == Lifecycle::Accessed &&
                           uwn.matched_id == rec->network_id;
      if (uwn.lifecycle == Lifecycle::Accessed && !genuine)
        ++rep.n_misidentified;

      if (genuine) {
        n.outcome = "accessed";
        n.access_time = rec->access_time;
        n.via_relay = rec->via_relay;
        if (rec->via_relay)
          n.relay_id = rec->relayed_by;
        ++rep.n_accessed;
        rep.n_dual_hop += n.via_relay;
      } else if ((rec && rec->stage == HandshakeStage::Failed) || uwn.lifecycle == Lifecycle::Failed) {
        n.outcome = "failed";
        ++rep.n_failed;
      } else if (uwn.lifecycle == Lifecycle::Dormant) {
        n.outcome = "dormant";
        ++rep.n_dormant;
      } else {
        n.outcome = "unresolved";
        ++rep.n_unresolved;
      }
      rep.max_decomp_delay = std::max(rep.max_decomp_delay, n.decomposition_time);
      rep.nodes.push_back(std::move(n));
    }

    for (const auto& n : rep.nodes) {
      if (n.outcome != "accessed")
        continue;
      if (n.via_relay && n.relay_id)
        rep.edges.push_back({*n.network_id, *n.relay_id, 2});
      else
        rep.edges.push_back({*n.network_id, kBsTopologyId, 1});
    }
    std::sort(rep.edges.begin(), rep.edges.end(),
              [](const TopologyEdge& a, const TopologyEdge& b) { return a.from < b.from; });

    if (rep.n_uwn > 0) {
      rep.access_rate = static_cast<double>(rep.n_accessed) / static_cast<double>(rep.n_uwn);
      rep.dual_hop_rate = static_cast<double>(rep.n_dual_hop) / static_cast<double>(rep.n_uwn);
    }
    rep.avg_sound_delay = m_deliveries ? m_delay_sum / static_cast<double>(m_deliveries) : 0.0;
    return rep;
  }

  const SimConfig& m_cfg;
  BsConfig m_bs_cfg;
  UwnConfig m_uwn_cfg;
  OpticalLinkBudget m_budget;
  World m_world;
  Rng m_rng;
  EventQueue m_queue;
  BsState m_bs;
  std::vector<UwnState> m_uwns;
  std::vector<Position> m_initial;
  bool m_keep_trace{false};
  std::vector<TraceEntry> m_trace;
  double m_delay_sum{0.0};
  std::size_t m_deliveries{0};
  std::shared_ptr<const std::vector<std::uint8_t>> m_decoded_bytes;
  SuperFrame m_decoded;
};

TracedRun simulate(const SimConfig& cfg, const World* world, std::uint64_t seed, bool keep_trace)
{
  cfg.validate();
  Rng rng(seed);
  World w = world ? *world : generate(cfg, rng);
  Simulation sim(cfg, std::move(w), std::move(rng), keep_trace);
  TracedRun out;
  out.report = sim.execute();
  out.report.seed = seed;
  out.trace = sim.take_trace();
  return out;
}

} // namespace

SimReport run(const SimConfig& cfg, std::uint64_t seed) { return simulate(cfg, nullptr, seed, false).report; }

SimReport run(const SimConfig& cfg, const World& world, std::uint64_t seed)
{
  return simulate(cfg, &world, seed, false).report;
}

TracedRun trace(const SimConfig& cfg, std::uint64_t seed) { return simulate(cfg, nullptr, seed, true); }

TracedRun trace(const SimConfig& cfg, const World& world, std::uint64_t seed)
{
  return simulate(cfg, &world, seed, true);
}

} // namespace uwoan
