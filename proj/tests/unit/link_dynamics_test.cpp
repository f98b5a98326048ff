#include "lqm/link_dynamics.hpp"

#include <random>

#include "doctest.h"

using namespace lqm;

namespace {

LinkParams table_params(double speed, double length = 500.0) {
  LinkParams p;
  p.id = 1;
  p.kind = LinkKind::common;
  p.length = length;
  p.jam_density = 0.1;                 // 100 veh/km
  p.backward_wave_speed = 20.0 / 3.6;  // 20 km/h
  p.saturation_flow = StepSeries(0.5);
  p.speed = StepSeries(speed);
  return p;
}

LinkRecord record_with(const LinkParams& p, std::vector<double> cum_in,
                       std::vector<double> cum_out = {}) {
  LinkRecord rec;
  rec.params = &p;
  if (cum_out.empty()) cum_out.assign(cum_in.size(), 0.0);
  rec.cum_queue = cum_in;
  rec.cum_in = std::move(cum_in);
  rec.cum_out = std::move(cum_out);
  rec.queue_len.assign(rec.cum_in.size(), 0.0);
  rec.queue_dens.assign(rec.cum_in.size(), 0.0);
  return rec;
}

}  // namespace

TEST_CASE("fd point at the published road parameters") {
  static const LinkParams common = table_params(11.0);
  FdPoint fd = fd_point(common, 0);
  CHECK(fd.critical_flow == doctest::Approx(0.36913).epsilon(1e-4));
  CHECK(fd.critical_density == doctest::Approx(0.033557).epsilon(1e-4));

  static const LinkParams turn = table_params(4.0, 100.0);
  fd = fd_point(turn, 0);
  CHECK(fd.critical_flow == doctest::Approx(0.23256).epsilon(1e-4));
  CHECK(fd.critical_density == doctest::Approx(0.058140).epsilon(1e-4));
}

TEST_CASE("fd point with matching speeds halves the jam density") {
  static LinkParams p = table_params(20.0 / 3.6);
  const FdPoint fd = fd_point(p, 0);
  CHECK(fd.critical_density == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("queue density spans the congested branch") {
  static const LinkParams p = table_params(11.0);
  const FdPoint fd = fd_point(p, 0);

  CHECK(queue_density(fd, p.jam_density, 0.0) == doctest::Approx(p.jam_density));
  CHECK(queue_density(fd, p.jam_density, fd.critical_flow) == doctest::Approx(fd.critical_density));
  CHECK(queue_density(fd, p.jam_density, fd.critical_flow / 2) ==
        doctest::Approx(0.066779).epsilon(1e-4));
  // discharge above capacity clamps instead of leaving the branch
  CHECK(queue_density(fd, p.jam_density, fd.critical_flow * 1.5) ==
        doctest::Approx(fd.critical_density));
}

TEST_CASE("queue length from the cumulative gap") {
  static const LinkParams p = table_params(11.0);

  LinkRecord rec = record_with(p, {0.0, 10.0}, {0.0, 10.0});
  rec.cum_queue = {0.0, 10.0};
  rec.queue_dens = {0.1, 0.1};
  QueueLengths lengths = queue_lengths(rec, 1);
  CHECK(lengths.queued == 0.0);
  CHECK(lengths.free_flow == 500.0);

  rec.cum_queue = {0.0, 15.0};
  lengths = queue_lengths(rec, 1);  // 5 veh at 0.1 veh/m
  CHECK(lengths.queued == doctest::Approx(50.0));

  rec.cum_queue = {0.0, 10.0 + 0.1 * 500.0};
  lengths = queue_lengths(rec, 1);  // a full-link jam
  CHECK(lengths.queued == doctest::Approx(500.0));
  CHECK(lengths.free_flow == doctest::Approx(0.0));
}

TEST_CASE("fixed-speed queue inflow splits the travel time") {
  static const LinkParams p = table_params(11.0);
  LinkRecord rec = record_with(p, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10});

  SUBCASE("500 m at 11 m/s") {
    const auto r = queue_inflow_fixed(rec, 500.0, 11.0, 10.0, 9);
    CHECK(r.n_f == 5);
    CHECK(r.gamma_f == doctest::Approx(0.45455).epsilon(1e-4));
    CHECK(r.cfl_ok);
    CHECK(r.value == doctest::Approx(r.gamma_f * 5.0 + (1 - r.gamma_f) * 4.0));
  }
  SUBCASE("an exact multiple collapses the blend") {
    const auto r = queue_inflow_fixed(rec, 220.0, 11.0, 10.0, 9);
    CHECK(r.n_f == 2);
    CHECK(r.gamma_f == doctest::Approx(0.0));
    CHECK(r.value == doctest::Approx(rec.in_at(7)));
  }
  SUBCASE("100 m at 4 m/s blends evenly") {
    const auto r = queue_inflow_fixed(rec, 100.0, 4.0, 10.0, 9);
    CHECK(r.n_f == 3);
    CHECK(r.gamma_f == doctest::Approx(0.5));
    CHECK(r.value == doctest::Approx(0.5 * rec.in_at(7) + 0.5 * rec.in_at(6)));
  }
  SUBCASE("lookbacks into the zero prehistory read zero") {
    const auto r = queue_inflow_fixed(rec, 500.0, 11.0, 10.0, 2);
    CHECK(r.value == doctest::Approx(0.0));
  }
  SUBCASE("a short free-flow part flags the step-size violation") {
    const auto r = queue_inflow_fixed(rec, 100.0, 11.0, 10.0, 9);
    CHECK(r.n_f == 1);
    CHECK_FALSE(r.cfl_ok);
  }
}

TEST_CASE("travel distances accumulate the speed profile") {
  // speeds 11, 11, 3, 3, 9 m/s over the five steps ending at k = 5
  StepSeries speed(std::vector<double>{11, 11, 11, 3, 3, 9});

  SUBCASE("varying profile") {
    const auto table = travel_distance_table(speed, 3.0, 120.0, 10.0, 5);
    CHECK(table.nbar_f == 4);
    REQUIRE(table.distances.size() == 5);
    CHECK(table.distances[0] == doctest::Approx(370.0));
    CHECK(table.distances[1] == doctest::Approx(260.0));
    CHECK(table.distances[2] == doctest::Approx(150.0));
    CHECK(table.distances[3] == doctest::Approx(120.0));
    CHECK(table.distances[4] == doctest::Approx(90.0));
    for (std::size_t j = 1; j < table.distances.size(); ++j) {
      CHECK(table.distances[j] < table.distances[j - 1]);
    }
  }
  SUBCASE("constant speed gives an arithmetic sequence") {
    const auto table = travel_distance_table(StepSeries(10.0), 10.0, 480.0, 10.0, 20);
    REQUIRE(table.distances.size() == static_cast<std::size_t>(table.nbar_f) + 1);
    for (std::size_t j = 0; j < table.distances.size(); ++j) {
      CHECK(table.distances[j] ==
            doctest::Approx(100.0 * static_cast<double>(table.distances.size() - j)));
    }
  }
  SUBCASE("early steps truncate the window") {
    const auto table = travel_distance_table(StepSeries(10.0), 10.0, 480.0, 10.0, 2);
    CHECK(table.nbar_f == 5);
    CHECK(table.distances.size() == 2);  // k rows when k <= nbar_f
  }
}

TEST_CASE("time-varying queue inflow selects entrants past the tail") {
  static const LinkParams p = table_params(11.0, 120.0);
  // 2 veh per step from the start
  LinkRecord rec = record_with(p, {0, 2, 4, 6, 8, 10});
  StepSeries speed(std::vector<double>{11, 11, 11, 3, 3, 9});
  const auto table = travel_distance_table(speed, 3.0, 120.0, 10.0, 5);

  SUBCASE("partial selection lands on the matching cumulative count") {
    CHECK(queue_inflow_tvfs(rec, table, 140.0, 5) == doctest::Approx(rec.in_at(3)));
  }
  SUBCASE("nobody reached the tail") {
    CHECK(queue_inflow_tvfs(rec, table, 400.0, 5) == doctest::Approx(rec.in_at(1)));
  }
  SUBCASE("a vanished free-flow part queues every entrant") {
    CHECK(queue_inflow_tvfs(rec, table, 0.0, 5) == doctest::Approx(rec.in_at(5)));
  }
  SUBCASE("result clamps into the record ordering") {
    rec.cum_out = {0, 0, 0, 0, 0, 7};  // outflow already beyond the raw selection
    CHECK(queue_inflow_tvfs(rec, table, 400.0, 5) == doctest::Approx(7.0));
  }
}

TEST_CASE("fixed and varying branches agree under constant speed") {
  static const LinkParams p = table_params(11.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> step_veh(0.0, 3.0);
  std::vector<double> cum_in{0.0};
  for (int i = 0; i < 40; ++i) cum_in.push_back(cum_in.back() + step_veh(rng));
  LinkRecord rec = record_with(p, cum_in);
  const Step k = 30;
  const auto table = travel_distance_table(p.speed, 11.0, 500.0, 10.0, k);

  SUBCASE("no blend remainder: exact agreement") {
    const double free_len = 220.0;
    const auto fixed = queue_inflow_fixed(rec, free_len, 11.0, 10.0, k);
    REQUIRE(fixed.gamma_f == doctest::Approx(0.0));
    CHECK(queue_inflow_tvfs(rec, table, free_len, k) == doctest::Approx(fixed.value));
  }
  SUBCASE("general case: within one step's inflow") {
    for (double free_len : {150.0, 230.0, 333.0, 480.0}) {
      const auto fixed = queue_inflow_fixed(rec, free_len, 11.0, 10.0, k);
      if (!fixed.cfl_ok) continue;
      double max_increment = 0.0;
      for (Step j = k - table.nbar_f; j <= k; ++j) {
        max_increment = std::max(max_increment, rec.in_at(j) - rec.in_at(j - 1));
      }
      const double varying = queue_inflow_tvfs(rec, table, free_len, k);
      CHECK(std::abs(varying - fixed.value) <= max_increment + 1e-12);
    }
  }
}

TEST_CASE("inflow limit opens the full storage of an empty link") {
  static const LinkParams p = table_params(11.0, 100.0);
  LinkRecord rec = record_with(p, {0, 0, 0, 0});
  rec.queue_dens = {0.1, 0.1, 0.1, 0.1};
  const auto limit = inflow_limit(rec, 0.0, 100.0, 0.1, p.backward_wave_speed, 10.0, 3);
  CHECK(limit.max_cum_in == doctest::Approx(10.0));
  CHECK(limit.max_rate == doctest::Approx(1.0));
}

TEST_CASE("inflow limit of a jammed link admits nothing") {
  static const LinkParams p = table_params(11.0, 100.0);
  LinkRecord rec = record_with(p, {0, 10, 10, 10});  // 10 veh stuck, none ever left
  const auto limit = inflow_limit(rec, 100.0, 0.0, 0.1, p.backward_wave_speed, 10.0, 3);
  CHECK(limit.max_cum_in == doctest::Approx(10.0));
  CHECK(limit.max_rate == doctest::Approx(0.0));
}

TEST_CASE("inflow limit blends the outflow history at the wave lag") {
  static const LinkParams p = table_params(11.0, 500.0);
  // 50 m queue at 20 km/h: the wave crosses in 9 s, within one step
  const auto split = split_travel_time(50.0 / (20.0 / 3.6), 10.0);
  CHECK(split.steps == 1);
  CHECK(split.fraction == doctest::Approx(0.1));

  LinkRecord rec = record_with(p, {0, 6, 12, 18}, {0, 1, 2, 3});
  const auto limit = inflow_limit(rec, 50.0, 450.0, 0.08, p.backward_wave_speed, 10.0, 3);
  // both blend indices clamp to the newest committed outflow
  CHECK(limit.max_cum_in == doctest::Approx(3.0 + 0.08 * 50.0 + 0.1 * 450.0));
}

TEST_CASE("actual inflow takes the binding rate") {
  static const LinkParams p = table_params(11.0);
  LinkRecord rec = record_with(p, {0, 4});
  CHECK(actual_inflow(1.0, 0.3, rec, 10.0, 1) == doctest::Approx(4.0 + 3.0));
  CHECK(actual_inflow(0.2, 0.3, rec, 10.0, 1) == doctest::Approx(4.0 + 2.0));
  CHECK(actual_inflow(0.0, 0.3, rec, 10.0, 1) == doctest::Approx(4.0));
}

TEST_CASE("outflow bounds") {
  static const LinkParams p = table_params(11.0, 500.0);
  const auto table = travel_distance_table(p.speed, 11.0, 500.0, 10.0, 7);

  SUBCASE("red signal freezes the cumulative outflow") {
    LinkRecord rec = record_with(p, {0, 3, 5, 5, 5, 5, 5, 5});
    rec.cum_out = {0, 0, 0, 1, 2, 2, 2, 2};
    const auto ob = outflow_bounds(rec, table, 0.5, 0.0, 10.0, 7, 2.0);
    CHECK(ob.max_cum_out == doctest::Approx(rec.out_at(7)));
    CHECK(ob.max_rate == doctest::Approx(0.0));
  }
  SUBCASE("a demand pulse leaves once its travel distance covers the link") {
    // 3 veh enter during step 1 and 2 more during step 2
    LinkRecord rec = record_with(p, {0, 0, 3, 5, 5, 5, 5, 5});
    const auto at6 = travel_distance_table(p.speed, 11.0, 500.0, 10.0, 6);
    const auto first = outflow_bounds(rec, at6, 100.0, 1.0, 10.0, 6, 0.0);
    CHECK(first.desired_cum_out == doctest::Approx(3.0));
    const auto at7 = travel_distance_table(p.speed, 11.0, 500.0, 10.0, 7);
    const auto second = outflow_bounds(rec, at7, 100.0, 1.0, 10.0, 7, 3.0);
    CHECK(second.desired_cum_out == doctest::Approx(5.0));
    CHECK(second.max_cum_out == doctest::Approx(5.0));
  }
  SUBCASE("a long queue discharges exactly the saturation budget") {
    LinkRecord rec = record_with(p, {0, 10, 20, 30, 40, 50, 60, 70});
    rec.cum_out = {0, 0, 1, 2, 3, 4, 5, 6};
    const auto ob = outflow_bounds(rec, table, 0.5, 0.38, 10.0, 7, 6.0);
    CHECK(ob.max_cum_out == doctest::Approx(rec.out_at(7) + 0.5 * 0.38 * 10.0));
  }
}

TEST_CASE("outflow bounds keep the discharge chain ordered") {
  static const LinkParams p = table_params(11.0, 500.0);
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> inflow(0.0, 4.0);
  std::uniform_real_distribution<double> served(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> cum_in{0.0}, cum_out{0.0};
    for (int i = 0; i < 20; ++i) {
      cum_in.push_back(cum_in.back() + inflow(rng));
      const double gap = cum_in.back() - cum_out.back();
      cum_out.push_back(cum_out.back() + served(rng) * gap);
    }
    LinkRecord rec = record_with(p, cum_in, cum_out);
    const Step k = 19;
    const auto table = travel_distance_table(p.speed, 11.0, 500.0, 10.0, k);
    const auto ob = outflow_bounds(rec, table, 0.5, served(rng), 10.0, k, rec.out_at(k));
    CHECK(ob.max_cum_out >= rec.out_at(k) - 1e-12);
    CHECK(ob.max_cum_out <= ob.desired_cum_out + 1e-12);
    CHECK(ob.desired_cum_out <= rec.in_at(k) + 1e-12);
  }
}
