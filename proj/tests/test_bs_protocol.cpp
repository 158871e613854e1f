#include <doctest.h>

#include <vector>

#include "oracles.hpp"
#include "uwoan/bs_protocol.hpp"

using namespace uwoan;

namespace {

const Position kBs{100, 100, 0};

std::vector<Detection> detect(const std::vector<Position>& ps)
{
  Rng rng(1);
  return sonar_scan(kBs, ps, BsConfig{}, rng);
}

BsState allocated(const std::vector<Position>& ps, double now = 0.0)
{
  BsState s;
  allocate(s, detect(ps), now, BsConfig{});
  return s;
}

} // namespace

TEST_CASE("sonar scan")
{
  Rng rng(2);
  BsConfig cfg;
  CHECK(sonar_scan(kBs, std::vector<Position>{}, cfg, rng).empty());

  std::vector<Position> fifty;
  for (int i = 0; i < 50; ++i)
    fifty.push_back({rng.uniform(0, 200), rng.uniform(0, 200), rng.uniform(0, 200)});
  const auto all = sonar_scan(kBs, fifty, cfg, rng);
  REQUIRE(all.size() == 50);
  CHECK(all[17].track == 17);
  CHECK(all[17].position == fifty[17]);

  const auto pair = sonar_scan(kBs, std::vector<Position>{{0, 0, 100.0}, {10, 0, 100.3}}, cfg, rng);
  CHECK(pair[0].depth_code.bucket == pair[1].depth_code.bucket);

  cfg.sonar_radius = 50.0;
  CHECK(sonar_scan(kBs, std::vector<Position>{{100, 100, 40}, {100, 100, 60}}, cfg, rng).size() == 1);

  cfg = {};
  cfg.p_misdetect = 1.0;
  CHECK(sonar_scan(kBs, fifty, cfg, rng).empty());
}

TEST_CASE("allocate")
{
  SUBCASE("distinct depths")
  {
    const BsState s = allocated({{0, 0, 10}, {0, 0, 50}, {0, 0, 90}});
    REQUIRE(s.registry.size() == 3);
    for (NetworkId id : {1, 2, 3})
      CHECK(s.registry.at(id).stage == HandshakeStage::Assigned);
    CHECK(s.registry.at(2).track == 1);
    CHECK(s.registry.at(1).retries_remaining == 5);
  }
  SUBCASE("shared depth code")
  {
    const BsState s = allocated({{0, 0, 100.0}, {50, 0, 50}, {0, 50, 100.3}});
    CHECK(s.registry.at(1).stage == HandshakeStage::Conflicted);
    CHECK(s.registry.at(2).stage == HandshakeStage::Assigned);
    CHECK(s.registry.at(3).stage == HandshakeStage::Conflicted);
  }
  SUBCASE("known tracks keep their ids")
  {
    BsState s = allocated({{0, 0, 10}, {0, 0, 50}});
    allocate(s, detect({{0, 0, 10}, {0, 0, 50}, {0, 0, 70}}), 1.0, BsConfig{});
    CHECK(s.registry.size() == 3);
    CHECK(s.by_track.at(2) == 3);
    CHECK_NOTHROW(check_invariants(s));
  }
  SUBCASE("id space exhaustion leaves the state untouched")
  {
    std::vector<Detection> many;
    for (std::size_t i = 0; i < 1025; ++i)
      many.push_back({i, {0, 0, 1.0 * i}, quantize_depth(1.0 * i, DepthModel{})});
    BsState s;
    CHECK_THROWS_AS(allocate(s, many, 0.0, BsConfig{}), AllocationError);
    CHECK(s.registry.empty());
    many.pop_back();
    many.pop_back();
    CHECK_NOTHROW(allocate(s, many, 0.0, BsConfig{}));
    CHECK(s.registry.size() == 1023);
  }
}

TEST_CASE("compose superframe")
{
  SUBCASE("node straight below the BS")
  {
    BsState s = allocated({{100, 100, 60}});
    const SuperFrame f = compose_superframe(s, kBs, 0.1);
    REQUIRE(f.slots.size() == 1);
    CHECK(f.slots[0].network_id == 1);
    CHECK(f.slots[0].stage == SlotStage::Assign);
    CHECK(f.slots[0].elevation_centideg == 18000);
    CHECK(f.slots[0].depth_code == quantize_depth(60, DepthModel{}).bucket);
    CHECK(s.registry.at(1).stage == HandshakeStage::AwaitingBeam);
    CHECK(s.registry.at(1).hs1_time == 0.1);
  }
  SUBCASE("frame sequence increases")
  {
    BsState s = allocated({{100, 100, 60}});
    CHECK(compose_superframe(s, kBs, 0.1).frame_seq == 0);
    CHECK(compose_superframe(s, kBs, 1.1).frame_seq == 1);
  }
  SUBCASE("confirming node gets CONFIRM")
  {
    BsState s = allocated({{120, 100, 60}});
    compose_superframe(s, kBs, 0.1);
    REQUIRE(on_optical_arrival(s, {1, false}, 0.15));
    const SuperFrame f = compose_superframe(s, kBs, 1.1);
    CHECK(f.slots[0].stage == SlotStage::Confirm);
    CHECK(s.registry.at(1).stage == HandshakeStage::Accessed);
    CHECK(s.registry.at(1).access_time == 1.1);
    CHECK_NOTHROW(check_invariants(s));
  }
  SUBCASE("relay pair bearings are reciprocal")
  {
    BsState s = allocated({{60, 100, 30}, {180, 20, 150}});
    compose_superframe(s, kBs, 0.1);
    on_optical_arrival(s, {1, false}, 0.12);
    compose_superframe(s, kBs, 1.1);
    BsConfig cfg;
    for (int k = 0; k < cfg.retries_direct; ++k)
      handle_timeouts(s, 2.1 + k, cfg);
    REQUIRE(s.registry.at(2).stage == HandshakeStage::RelayPending);
    REQUIRE(s.registry.at(2).relayed_by == 1);
    const SuperFrame f = compose_superframe(s, kBs, 7.1);
    const SlotPayload* tx = f.find(2);
    const SlotPayload* rx = f.find(1);
    REQUIRE(tx);
    REQUIRE(rx);
    CHECK(tx->stage == SlotStage::RelayTx);
    CHECK(tx->partner_id == 1);
    CHECK(rx->stage == SlotStage::RelayRx);
    CHECK(rx->partner_id == 2);
    const Bearing to_relay = bearing_from_to({180, 20, 150}, {60, 100, 30});
    CHECK(tx->bearing().azimuth == doctest::Approx(to_relay.azimuth).epsilon(1e-4));
    CHECK(tx->bearing().elevation == doctest::Approx(to_relay.elevation).epsilon(1e-4));
    const int az_diff = (static_cast<int>(tx->azimuth_centideg) - rx->azimuth_centideg + 36000) % 36000;
    CHECK(std::abs(az_diff - 18000) <= 1);
    CHECK(std::abs(static_cast<int>(tx->elevation_centideg) + rx->elevation_centideg - 18000) <= 1);
  }
  SUBCASE("failed records release their slot")
  {
    BsState s = allocated({{120, 100, 60}});
    compose_superframe(s, kBs, 0.1);
    for (int k = 0; k < 5; ++k)
      handle_timeouts(s, 1.1 + k, BsConfig{});
    CHECK(s.registry.at(1).stage == HandshakeStage::Failed);
    CHECK(compose_superframe(s, kBs, 6.1).slots.empty());
  }
}

TEST_CASE("optical arrivals")
{
  BsState s = allocated({{120, 100, 60}, {80, 100, 120}});
  compose_superframe(s, kBs, 0.1);
  CHECK(on_optical_arrival(s, {1, false}, 0.2));
  CHECK(s.registry.at(1).stage == HandshakeStage::Confirming);
  CHECK(s.registry.at(1).hs2_time == 0.2);
  CHECK_FALSE(on_optical_arrival(s, {1, false}, 0.3));

  compose_superframe(s, kBs, 1.1);
  CHECK_FALSE(on_optical_arrival(s, {1, false}, 1.2));
  CHECK(s.registry.at(1).stage == HandshakeStage::Accessed);

  CHECK_FALSE(on_optical_arrival(s, {77, false}, 1.3));
  CHECK(s.unknown_beams == 1);

  for (int k = 0; k < 5; ++k)
    handle_timeouts(s, 2.1 + k, BsConfig{});
  REQUIRE(s.registry.at(2).stage == HandshakeStage::RelayPending);
  CHECK(on_optical_arrival(s, {2, true}, 7.2));
  CHECK(s.registry.at(2).stage == HandshakeStage::Confirming);
  CHECK(s.registry.at(2).via_relay);
  CHECK(s.registry.at(1).relay_of == 2);
  CHECK_NOTHROW(check_invariants(s));
}

TEST_CASE("direct beam during relay retry releases the relay")
{
  BsState s = allocated({{120, 100, 60}, {80, 100, 120}});
  compose_superframe(s, kBs, 0.1);
  on_optical_arrival(s, {1, false}, 0.2);
  compose_superframe(s, kBs, 1.1);
  for (int k = 0; k < 5; ++k)
    handle_timeouts(s, 2.1 + k, BsConfig{});
  REQUIRE(s.registry.at(2).stage == HandshakeStage::RelayPending);
  CHECK(on_optical_arrival(s, {2, false}, 7.2));
  CHECK_FALSE(s.registry.at(2).via_relay);
  CHECK_FALSE(s.registry.at(2).relayed_by.has_value());
  CHECK_FALSE(s.registry.at(1).relay_of.has_value());
  CHECK_NOTHROW(check_invariants(s));
}

TEST_CASE("timeouts")
{
  const BsConfig cfg;
  SUBCASE("one unanswered superframe costs one retry")
  {
    BsState s = allocated({{120, 100, 60}});
    compose_superframe(s, kBs, 0.1);
    handle_timeouts(s, 1.1, cfg);
    CHECK(s.registry.at(1).retries_remaining == 4);
  }
  SUBCASE("nearest accessed node becomes the relay")
  {
    // Target at the origin; accessed candidates 80 m and 50 m away.
    BsState s = allocated({{0, 0, 100}, {80, 0, 100.0 + 40}, {0, 50, 100.0 + 80}});
    compose_superframe(s, kBs, 0.1);
    on_optical_arrival(s, {2, false}, 0.2);
    on_optical_arrival(s, {3, false}, 0.2);
    compose_superframe(s, kBs, 1.1);
    s.registry.at(2).sonar_position = {80, 0, 100};
    s.registry.at(3).sonar_position = {0, 50, 100};
    for (int k = 0; k < cfg.retries_direct; ++k)
      handle_timeouts(s, 1.1 + k, cfg);
    CHECK(s.registry.at(1).stage == HandshakeStage::RelayPending);
    CHECK(s.registry.at(1).relayed_by == 3);
    CHECK(s.registry.at(1).retries_remaining == cfg.retries_relay);
  }
  SUBCASE("no accessed nodes means failure")
  {
    BsState s = allocated({{0, 0, 100}});
    compose_superframe(s, kBs, 0.1);
    for (int k = 0; k < cfg.retries_direct; ++k)
      handle_timeouts(s, 1.1 + k, cfg);
    CHECK(s.registry.at(1).stage == HandshakeStage::Failed);
  }
  SUBCASE("relay retries exhaust")
  {
    BsState s = allocated({{0, 0, 100}, {30, 0, 30}});
    compose_superframe(s, kBs, 0.1);
    on_optical_arrival(s, {2, false}, 0.2);
    compose_superframe(s, kBs, 1.1);
    for (int k = 0; k < cfg.retries_direct + cfg.retries_relay; ++k)
      handle_timeouts(s, 1.1 + k, cfg);
    CHECK(s.registry.at(1).stage == HandshakeStage::Failed);
    CHECK_FALSE(s.registry.at(2).relay_of.has_value());
    CHECK_NOTHROW(check_invariants(s));
  }
}

TEST_CASE("decomposition")
{
  const BsConfig cfg;
  SUBCASE("one node moves past a bucket edge")
  {
    BsState s = allocated({{0, 0, 100.0}, {10, 0, 100.3}});
    REQUIRE(s.registry.at(1).stage == HandshakeStage::Conflicted);
    update_decomposition(s, detect({{0, 0, 100.0}, {10, 0, 101.5}}), 1.0, cfg);
    CHECK(s.registry.at(1).stage == HandshakeStage::Assigned);
    CHECK(s.registry.at(2).stage == HandshakeStage::Assigned);
    CHECK(s.registry.at(2).observed_motion == MovementMarker::Diving);
    CHECK(s.registry.at(1).observed_motion == MovementMarker::None);
  }
  SUBCASE("reset bit flips after one round")
  {
    BsState s = allocated({{0, 0, 100.0}, {10, 0, 100.3}});
    for (int t = 1; t < 5; ++t) {
      update_decomposition(s, detect({{0, 0, 100.0}, {10, 0, 100.3}}), t, cfg);
      CHECK_FALSE(s.registry.at(1).reset_bit);
    }
    update_decomposition(s, detect({{0, 0, 100.0}, {10, 0, 100.3}}), 5.0, cfg);
    CHECK(s.registry.at(1).reset_bit);
    CHECK(s.registry.at(2).reset_bit);
  }
  SUBCASE("accessed node leaves the group")
  {
    BsState s = allocated({{0, 0, 100.0}, {10, 0, 100.3}});
    s.registry.at(1).stage = HandshakeStage::Accessed;
    update_decomposition(s, detect({{0, 0, 100.0}, {10, 0, 100.3}}), 1.0, cfg);
    CHECK(s.registry.at(2).stage == HandshakeStage::Assigned);
  }
  SUBCASE("unanswered assignment re-enters conflict")
  {
    BsState s = allocated({{0, 0, 100.0}, {10, 0, 102.0}});
    compose_superframe(s, kBs, 0.1);
    REQUIRE(s.registry.at(2).stage == HandshakeStage::AwaitingBeam);
    update_decomposition(s, detect({{0, 0, 100.0}, {10, 0, 100.3}}), 1.0, cfg);
    CHECK(s.registry.at(1).stage == HandshakeStage::Conflicted);
    CHECK(s.registry.at(2).stage == HandshakeStage::Conflicted);
    CHECK(s.registry.at(2).observed_motion == MovementMarker::Rising);
  }
  SUBCASE("confirmed records are not reconsidered")
  {
    BsState s = allocated({{0, 0, 100.0}, {10, 0, 102.0}});
    compose_superframe(s, kBs, 0.1);
    on_optical_arrival(s, {1, false}, 0.2);
    update_decomposition(s, detect({{0, 0, 100.0}, {10, 0, 100.3}}), 1.0, cfg);
    CHECK(s.registry.at(1).stage == HandshakeStage::Confirming);
    CHECK(s.registry.at(2).stage == HandshakeStage::AwaitingBeam);
  }
}

TEST_CASE("relay selection matches the brute-force oracle")
{
  Rng rng(41);
  int with_answer = 0;
  for (int i = 0; i < 2000; ++i) {
    const BsState s = oracle::random_registry(rng);
    REQUIRE_NOTHROW(check_invariants(s));
    for (const auto& [id, r] : s.registry) {
      const auto expected = oracle::nearest_relay(s, id);
      REQUIRE(select_relay(s, id) == expected);
      with_answer += expected.has_value();
    }
  }
  CHECK(with_answer > 1000);
}

TEST_CASE("invariant checker catches broken relay links")
{
  BsState s = allocated({{0, 0, 100}, {30, 0, 30}});
  s.registry.at(1).relayed_by = 2;
  CHECK_THROWS_AS(check_invariants(s), std::logic_error);
  s.registry.at(2).relay_of = 1;
  CHECK_THROWS_AS(check_invariants(s), std::logic_error); // relay not accessed
}
