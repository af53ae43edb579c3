#include <random>
#include <stdexcept>

#include "doctest.h"
#include "din/influence.hpp"

using namespace din;

namespace {

using Entries = std::vector<std::pair<RuleIndex, double>>;

}  // namespace

TEST_CASE("relative activity change") {
  SUBCASE("two to three") {
    const EventDelta d = event_delta_activity(0, std::vector{1.0, 2.0}, std::vector{1.0, 3.0});
    CHECK(d.entries == Entries{{1, 0.5}});
  }
  SUBCASE("target off before the event gets nothing") {
    const EventDelta d = event_delta_activity(0, std::vector{1.0, 0.0}, std::vector{1.0, 4.0});
    CHECK(d.entries.empty());
  }
  SUBCASE("unchanged targets are absent") {
    const EventDelta d = event_delta_activity(1, std::vector{1.0, 2.0, 3.0}, std::vector{1.0, 1.0, 3.0});
    CHECK(d.entries == Entries{{1, -0.5}});
    CHECK(d.source == 1);
  }
  SUBCASE("the candidate overload agrees with the dense one") {
    const std::vector<double> before{1, 2, 0, 4}, after{1, 3, 1, 2};
    const std::vector<RuleIndex> cand{3, 1, 2};
    CHECK(event_delta_activity(0, before, after, cand) == event_delta_activity(0, before, after));
  }
}

TEST_CASE("firing probability change") {
  SUBCASE("two rules") {
    const EventDelta d = event_delta_probability(0, std::vector{1.0, 1.0}, std::vector{3.0, 1.0});
    CHECK(d.entries == Entries{{0, 0.25}, {1, -0.25}});
  }
  SUBCASE("no change") {
    CHECK(event_delta_probability(0, std::vector{1.0, 2.0}, std::vector{1.0, 2.0}).entries.empty());
  }
  SUBCASE("indirect effect through lambda") {
    const EventDelta d = event_delta_probability(2, std::vector{1.0, 1.0, 2.0}, std::vector{1.0, 1.0, 6.0});
    REQUIRE(d.entries.size() == 3);
    CHECK(d.entries[0].second == doctest::Approx(-0.125));
    CHECK(d.entries[1].second == doctest::Approx(-0.125));
    CHECK(d.entries[2].second == doctest::Approx(0.25));
    CHECK(std::abs(d.sum()) < 1e-12);
  }
  SUBCASE("deadlock takes every probability after as zero") {
    const EventDelta d = event_delta_probability(0, std::vector{1.0, 3.0}, std::vector{0.0, 0.0});
    CHECK(d.entries == Entries{{0, -0.25}, {1, -0.75}});
  }
}

TEST_CASE("probability deltas sum to zero") {
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + g() % 20;
    std::vector<double> before(n), after(n);
    for (auto& a : before) a = g() % 3 ? u(g) : 0.0;
    for (auto& a : after) a = g() % 3 ? u(g) : 0.0;
    before[0] += 0.1;
    after[0] += 0.1;
    CHECK(std::abs(event_delta_probability(0, before, after).sum()) < 1e-9);
  }
}

TEST_CASE("accumulate and finalize") {
  WindowAccumulator acc(3, DinKind::Activity);
  acc.accumulate({0, {{1, 0.5}}});
  acc.accumulate({0, {{1, -0.1}}});
  acc.accumulate({2, {{0, 0.3}}});
  CHECK(acc.hits(0) == 2);
  const DinWindow w = acc.finalize(0.0, 1.0, false);
  CHECK(w.hits == std::vector<std::uint64_t>{2, 0, 1});
  REQUIRE(w.links.size() == 2);
  CHECK(*w.value(0, 1) == doctest::Approx(0.2));
  CHECK(*w.value(2, 0) == 0.3);  // one event: exactly its delta
  CHECK_FALSE(w.value(1, 0));    // rule 1 never fired
  CHECK(acc.hits(0) == 0);       // reset
  CHECK(acc.finalize(1.0, 2.0, false).links.empty());
}

TEST_CASE("an exactly cancelling row is dropped") {
  WindowAccumulator acc(2, DinKind::Activity);
  acc.accumulate({0, {{1, 0.25}}});
  acc.accumulate({0, {{1, -0.25}}});
  const DinWindow w = acc.finalize(0, 1, false);
  CHECK(w.hits[0] == 2);
  CHECK(w.links.empty());
}

TEST_CASE("window rows exist only for rules that fired") {
  std::mt19937_64 g(9);
  WindowAccumulator acc(6, DinKind::Probability);
  for (int i = 0; i < 200; ++i) {
    EventDelta d{static_cast<RuleIndex>(g() % 3), {}};
    for (RuleIndex t = 0; t < 6; ++t) {
      if (g() % 2) d.entries.emplace_back(t, double(int(g() % 11) - 5) / 7.0);
    }
    acc.accumulate(d);
  }
  const DinWindow w = acc.finalize(0, 1, false);
  for (const auto& l : w.links) {
    CHECK(w.hits[l.source] > 0);
    CHECK(l.value != 0.0);
  }
  CHECK(std::is_sorted(w.links.begin(), w.links.end(), [](const auto& a, const auto& b) {
    return std::pair{a.source, a.target} < std::pair{b.source, b.target};
  }));
}

TEST_CASE("window grid") {
  SUBCASE("t_end equal to tau gives one window") {
    const WindowGrid g(2.0, 2.0);
    CHECK(g.size() == 1);
    CHECK_FALSE(g.partial(0));
  }
  SUBCASE("tiling with a partial tail") {
    const WindowGrid g(0.4, 1.0);
    CHECK(g.size() == 3);
    CHECK(g.end(2) == 1.0);
    CHECK(g.partial(2));
    CHECK_FALSE(g.partial(1));
  }
  SUBCASE("exact multiples do not produce a sliver") {
    const WindowGrid g(0.1, 1.0);
    CHECK(g.size() == 10);
    CHECK_FALSE(g.partial(9));
  }
  SUBCASE("boundaries belong to the later window") {
    const WindowGrid g(0.5, 10.0);
    CHECK(g.window_of(0.0) == 0);
    CHECK(g.window_of(0.4999) == 0);
    CHECK(g.window_of(0.5) == 1);
    CHECK(g.window_of(10.0) == 19);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(g.window_of(g.start(k)) == k);
  }
}

TEST_CASE("window series") {
  const WindowGrid grid(1.0, 4.0);
  SUBCASE("completed run emits every window") {
    WindowSeries s(grid, 2, DinKind::Activity);
    s.record(0.5, {0, {{1, 1.0}}});
    s.record(2.5, {1, {{0, -1.0}}});
    const auto w = s.finish(4.0, false, false);
    REQUIRE(w.size() == 4);
    CHECK(w[0].hits[0] == 1);
    CHECK(w[1].links.empty());
    CHECK(w[2].hits[1] == 1);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(w[k].t_start == double(k));
      CHECK_FALSE(w[k].partial);
    }
  }
  SUBCASE("deadlock flags the halting window and leaves the rest empty") {
    WindowSeries s(grid, 2, DinKind::Activity);
    s.record(1.5, {0, {{1, 1.0}}});
    const auto w = s.finish(1.5, true, false);
    REQUIRE(w.size() == 4);
    CHECK(w[1].partial);
    CHECK(w[1].hits[0] == 1);
    CHECK_FALSE(w[2].partial);
    CHECK(w[3].links.empty());
  }
  SUBCASE("event cap truncates after the halting window") {
    WindowSeries s(grid, 2, DinKind::Activity);
    s.record(1.5, {0, {{1, 1.0}}});
    const auto w = s.finish(1.5, true, true);
    REQUIRE(w.size() == 2);
    CHECK(w[1].partial);
  }
}

TEST_CASE("zero-activity shielding") {
  // A target that is off before every event of a window receives no
  // influence at all, whatever the events do to it.
  std::mt19937_64 g(12);
  WindowAccumulator acc(4, DinKind::Activity);
  for (int i = 0; i < 300; ++i) {
    std::vector<double> before(4), after(4);
    for (int s = 0; s < 4; ++s) {
      before[s] = double(g() % 5);
      after[s] = double(g() % 5);
    }
    before[3] = 0.0;
    acc.accumulate(event_delta_activity(static_cast<RuleIndex>(g() % 3), before, after));
  }
  const DinWindow w = acc.finalize(0, 1, false);
  for (RuleIndex r = 0; r < 4; ++r) CHECK_FALSE(w.value(r, 3));
}

TEST_CASE("din kind names") {
  CHECK(parse_din_kind("activity") == DinKind::Activity);
  CHECK(parse_din_kind(to_string(DinKind::Probability)) == DinKind::Probability);
  CHECK_THROWS_AS(parse_din_kind("prob"), std::invalid_argument);
}
