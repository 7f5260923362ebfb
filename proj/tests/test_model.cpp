#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "crvirtres/model.hpp"
#include "test_support.hpp"

namespace crvirtres {
namespace {

using testing::random_configs;
using testing::three_bands_of_four;
using testing::tiny_config;

bool is_overflow(const SystemConfig& cfg, SystemState s) { return s.su > max_su(cfg, s.pu); }

TEST(AdmitSu, BoundaryEqualityAdmits) {
  EXPECT_TRUE(admits_su(tiny_config(), {0, 0}));
  EXPECT_FALSE(admits_su(tiny_config(), {0, 1}));
  EXPECT_FALSE(admits_su(three_bands_of_four(), {1, 3}));  // 12 - 4 - 2 - 8 = -2
  EXPECT_TRUE(admits_su(three_bands_of_four(), {1, 2}));   // 12 - 4 - 2 - 6 = 0
}

TEST(PuArrival, OverflowWithoutForcedTermination) {
  EXPECT_EQ(pu_arrival_outcome(three_bands_of_four(), {0, 4}), (PuArrivalOutcome{{1, 4}, 0}));
}

TEST(PuArrival, ForcedTerminationDropsToFloor) {
  EXPECT_EQ(pu_arrival_outcome(tiny_config(), {0, 1}), (PuArrivalOutcome{{1, 0}, 1}));
  EXPECT_EQ(pu_arrival_outcome(three_bands_of_four(), {1, 4}), (PuArrivalOutcome{{2, 2}, 2}));
}

TEST(PuArrival, RejectedWhenAllBandsBusy) {
  EXPECT_THROW(pu_arrival_outcome(tiny_config(), {1, 0}), std::invalid_argument);
}

TEST(Bounds, MaxPu) {
  EXPECT_EQ(max_pu(reference_config(), 3), 2);
  EXPECT_EQ(max_pu(tiny_config(), 1), 0);
  EXPECT_EQ(max_pu(three_bands_of_four(), 4), 1);
  EXPECT_EQ(max_pu(three_bands_of_four(), 0), 3);
}

TEST(Bounds, MaxSu) {
  EXPECT_EQ(max_su(three_bands_of_four(), 1), 3);
  EXPECT_EQ(max_su(tiny_config(), 0), 1);
  EXPECT_EQ(max_su(reference_config(2), 3), 1);
  EXPECT_EQ(max_su(reference_config(18), 4), 0);  // floored at zero
}

TEST(Bounds, Monotone) {
  for (const auto& cfg : random_configs(200, 11)) {
    for (int p = 1; p <= cfg.bands; ++p) EXPECT_LE(max_su(cfg, p), max_su(cfg, p - 1));
    for (int s = 1; s <= cfg.total_channels(); ++s) EXPECT_LE(max_pu(cfg, s), max_pu(cfg, s - 1));
    if (cfg.reserved > 0) {
      const auto less = [&] { auto c = cfg; --c.reserved; return c; }();
      for (int p = 0; p <= cfg.bands; ++p) EXPECT_LE(max_su(cfg, p), max_su(less, p));
    }
  }
}

TEST(EnumerateStates, TinySystem) {
  const auto space = enumerate_states(tiny_config());
  const std::vector<SystemState> expected{{0, 0}, {0, 1}, {1, 0}};
  EXPECT_EQ(space.states(), expected);
  for (std::size_t i = 0; i < space.size(); ++i) EXPECT_EQ(space.index_of(space[i]), i);
  EXPECT_FALSE(space.index_of({1, 1}).has_value());
}

TEST(EnumerateStates, SampleSystemContainsOverflowState) {
  const auto space = enumerate_states(three_bands_of_four());
  EXPECT_TRUE(space.contains({1, 4}));
  EXPECT_FALSE(space.contains({2, 4}));
  EXPECT_TRUE(is_overflow(three_bands_of_four(), {1, 4}));
}

std::set<SystemState> feasible_rectangle(const SystemConfig& cfg) {
  std::set<SystemState> out;
  for (int p = 0; p <= cfg.bands; ++p) {
    for (int s = 0; cfg.channels_per_band * p + cfg.min_channels * s <= cfg.total_channels(); ++s) out.insert({p, s});
  }
  return out;
}

TEST(EnumerateStates, NoOverflowWithoutReservation) {
  auto configs = random_configs(100, 5);
  configs.push_back(reference_config());
  for (auto cfg : configs) {
    cfg.reserved = 0;
    const auto space = enumerate_states(cfg);
    const std::set<SystemState> got(space.begin(), space.end());
    EXPECT_EQ(got, feasible_rectangle(cfg));
  }
}

TEST(EnumerateStates, AllocationInvariantAndOverflowEntry) {
  for (const auto& cfg : random_configs(300, 7)) {
    const auto space = enumerate_states(cfg);
    ASSERT_TRUE(space.contains({0, 0}));
    for (const auto& s : space) {
      ASSERT_GE(s.pu, 0);
      ASSERT_LE(s.pu, cfg.bands);
      ASSERT_GE(s.su, 0);
      if (s.su >= 1) {
        EXPECT_GE(free_channels(cfg, s.pu), cfg.min_channels * s.su);
      }
      for (const auto& t : transition_rates(cfg, s)) {
        ASSERT_TRUE(space.contains(t.target));
        if (!is_overflow(cfg, s) && is_overflow(cfg, t.target)) {
          EXPECT_TRUE(t.kind == TransitionKind::pu_arrival || t.kind == TransitionKind::pu_arrival_forced);
          EXPECT_EQ(t.target.pu, s.pu + 1);
        }
        if (t.kind == TransitionKind::su_arrival) {
          EXPECT_FALSE(is_overflow(cfg, t.target));
        }
      }
      if (cfg.reserved == 0) {
        EXPECT_FALSE(is_overflow(cfg, s));
      }
    }
  }
}

TEST(PuArrival, DroppedCountBound) {
  for (const auto& cfg : random_configs(300, 9)) {
    const int bound = (cfg.channels_per_band + cfg.min_channels - 1) / cfg.min_channels;
    for (const auto& s : enumerate_states(cfg)) {
      if (s.pu >= cfg.bands) continue;
      const auto o = pu_arrival_outcome(cfg, s);
      EXPECT_LE(o.dropped, bound);
      EXPECT_GE(o.dropped, 0);
      EXPECT_EQ(o.next.su + o.dropped, s.su);
    }
  }
}

TEST(TransitionRates, TinySystem) {
  const auto cfg = tiny_config();
  const auto from_01 = transition_rates(cfg, {0, 1});
  ASSERT_EQ(from_01.size(), 2u);
  EXPECT_EQ(from_01[0].target, (SystemState{1, 0}));
  EXPECT_EQ(from_01[0].kind, TransitionKind::pu_arrival_forced);
  EXPECT_DOUBLE_EQ(from_01[0].rate, 1.0);
  EXPECT_EQ(from_01[1].target, (SystemState{0, 0}));
  EXPECT_EQ(from_01[1].kind, TransitionKind::su_departure);
  EXPECT_DOUBLE_EQ(from_01[1].rate, 1.0);

  const auto from_10 = transition_rates(cfg, {1, 0});
  ASSERT_EQ(from_10.size(), 1u);
  EXPECT_EQ(from_10[0].target, (SystemState{0, 0}));
  EXPECT_EQ(from_10[0].kind, TransitionKind::pu_departure);
}

TEST(TransitionRates, OverflowStateSuDeparture) {
  auto cfg = three_bands_of_four();
  cfg.su_service = 1.7;
  double su_dep = 0.0;
  for (const auto& t : transition_rates(cfg, {1, 4})) {
    EXPECT_NE(t.kind, TransitionKind::su_arrival);
    if (t.kind == TransitionKind::su_departure) su_dep = t.rate;
  }
  EXPECT_DOUBLE_EQ(su_dep, 4.0 * 1.7);
  EXPECT_DOUBLE_EQ(su_departure_rate(cfg, {1, 4}, Allocation::minimum), 4.0 * 1.7);
  EXPECT_DOUBLE_EQ(su_departure_rate(cfg, {0, 1}, Allocation::minimum), 1.7);
  EXPECT_DOUBLE_EQ(su_departure_rate(cfg, {0, 1}, Allocation::full_spectrum), 6.0 * 1.7);
  EXPECT_DOUBLE_EQ(su_departure_rate(cfg, {0, 0}, Allocation::full_spectrum), 0.0);
}

TEST(BuildGenerator, TinySystem) {
  const auto cfg = tiny_config();
  const auto q = build_generator(cfg, enumerate_states(cfg));
  const double expected[3][3] = {{-2, 1, 1}, {1, -2, 1}, {1, 0, -1}};
  ASSERT_EQ(q.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(q(i, j), expected[i][j]) << i << "," << j;
  }
}

TEST(BuildGenerator, RowsSumToZero) {
  auto configs = random_configs(200, 13);
  configs.push_back(three_bands_of_four());
  configs.push_back(reference_config(3));
  for (const auto& cfg : configs) {
    const auto space = enumerate_states(cfg);
    for (auto alloc : {Allocation::full_spectrum, Allocation::minimum}) {
      const auto q = build_generator(cfg, space, alloc);
      ASSERT_EQ(q.size(), space.size());
      for (std::size_t i = 0; i < q.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
          if (i != j) {
            EXPECT_GE(q(i, j), 0.0);
          }
          sum += q(i, j);
        }
        EXPECT_LE(std::abs(sum), 1e-12);
      }
    }
  }
}

TEST(BuildGenerator, RejectsIncompleteStateSpace) {
  const auto cfg = tiny_config();
  const StateSpace partial(std::vector<SystemState>{{0, 0}, {0, 1}});
  EXPECT_THROW(build_generator(cfg, partial), std::logic_error);
}

TEST(StateSpace, RejectsDuplicates) {
  EXPECT_THROW(StateSpace(std::vector<SystemState>{{0, 0}, {0, 0}}), std::invalid_argument);
}

}  // namespace
}  // namespace crvirtres
