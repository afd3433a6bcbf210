#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "apt/errors.hpp"
#include "apt/ladder.hpp"
#include "apt/rwm.hpp"

using namespace apt;

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

LadderState ladder_from_gaps(Vector gaps) {
  LadderState s;
  s.gaps = std::move(gaps);
  s.initial_levels = static_cast<int>(s.gaps.size()) + 1;
  s.recompute_temps();
  return s;
}
}  // namespace

TEST_CASE("geometric ladder spans 1 to t_max") {
  LadderState s = make_geometric_ladder(5, 100.0, 0, 1000);
  REQUIRE(s.levels() == 5);
  CHECK(s.temps[0] == 1.0);
  for (int l = 0; l < 5; ++l) {
    CHECK(s.temps[l] == doctest::Approx(std::pow(100.0, l / 4.0)).epsilon(1e-12));
    CHECK(s.betas[l] == doctest::Approx(1.0 / s.temps[l]).epsilon(1e-15));
  }
  for (std::size_t k = 0; k < s.gaps.size(); ++k) CHECK(s.gaps[k] > 0.0);

  CHECK_THROWS_AS(make_geometric_ladder(1, 100.0, 0, 1000), Error);
  CHECK_THROWS_AS(make_geometric_ladder(4, 1.0, 0, 1000), Error);
  CHECK_THROWS_AS(make_geometric_ladder(4, 100.0, 0, 0), Error);
}

TEST_CASE("single-level ladder is the degenerate scheme") {
  LadderState s = make_single_level_ladder();
  CHECK(s.levels() == 1);
  CHECK(s.temps == Vector{1.0});
  CHECK(s.betas == Vector{1.0});
  CHECK(s.gaps.empty());
}

TEST_CASE("temperatures re-accumulate from the gaps") {
  LadderState s = ladder_from_gaps({1.0, 2.0, 4.0});
  CHECK(s.temps == Vector{1.0, 2.0, 4.0, 8.0});
  s.gaps[1] = 0.5;
  s.recompute_temps();
  CHECK(s.temps == Vector{1.0, 2.0, 2.5, 6.5});
  CHECK(s.betas[2] == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("ladder rates from energies and old betas") {
  LadderState s = ladder_from_gaps({1.0, 2.0});  // temps 1,2,4 -> betas 1,0.5,0.25
  Vector energies{-1.0, -2.0, -4.0};
  Vector xi = ladder_rates(s, energies);
  REQUIRE(xi.size() == 2);
  // (beta_2 - beta_1)(E_1 - E_2) = (-0.5)(1) -> exp(-0.5)
  CHECK(xi[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  // (beta_3 - beta_2)(E_2 - E_3) = (-0.25)(2) -> exp(-0.5)
  CHECK(xi[1] == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));

  // A rate capped at one when the hotter level sits higher.
  Vector inverted{-4.0, -1.0, -1.5};
  CHECK(ladder_rates(s, inverted)[0] == 1.0);

  Vector with_dead{-1.0, -kInf, -4.0};
  Vector xj = ladder_rates(s, with_dead);
  CHECK(std::isnan(xj[0]));
  CHECK(std::isnan(xj[1]));

  CHECK_THROWS_AS(ladder_rates(s, Vector{1.0}), DimensionMismatch);
}

TEST_CASE("target-rate fixed point leaves the ladder bit-identical") {
  LadderState s = make_geometric_ladder(6, 300.0, 0, 1000);
  const Vector temps0 = s.temps;
  const Vector gaps0 = s.gaps;
  const Vector xi(5, kTargetAcceptance);
  const GapClamp clamp = default_gap_clamp();
  for (int n = 1; n <= 10000; ++n) {
    adapt_ladder_with_rates(s, xi, 0.9 * std::pow(n, -0.6), clamp);
    CHECK(s.gaps == gaps0);
    CHECK(s.temps == temps0);
  }
}

TEST_CASE("gaps move toward the acceptance target") {
  const GapClamp clamp = default_gap_clamp();
  LadderState s = ladder_from_gaps({1.0, 1.0});
  adapt_ladder_with_rates(s, Vector{0.9, 0.1}, 0.3, clamp);
  CHECK(s.gaps[0] > 1.0);   // too much acceptance: spread the levels
  CHECK(s.gaps[1] < 1.0);   // too little: pull them together
  CHECK(s.gaps[0] == doctest::Approx(std::exp(0.3 * (0.9 - 0.234))).epsilon(1e-14));
  CHECK(s.temps[0] == 1.0);
}

TEST_CASE("gap updates respect the clamp") {
  const GapClamp clamp = default_gap_clamp();
  LadderState s = ladder_from_gaps({9e5});
  adapt_ladder_with_rates(s, Vector{1.0}, 0.999, clamp);
  for (int k = 0; k < 50; ++k) adapt_ladder_with_rates(s, Vector{1.0}, 0.999, clamp);
  CHECK(s.gaps[0] == clamp.hi);

  LadderState t = ladder_from_gaps({2e-4});
  for (int k = 0; k < 50; ++k) adapt_ladder_with_rates(t, Vector{0.0}, 0.999, clamp);
  CHECK(t.gaps[0] == clamp.lo);
}

TEST_CASE("non-finite rates skip their gap only") {
  const GapClamp clamp = default_gap_clamp();
  LadderState s = ladder_from_gaps({1.0, 1.0});
  adapt_ladder_with_rates(s, Vector{kNaN, 1.0}, 0.5, clamp);
  CHECK(s.gaps[0] == 1.0);
  CHECK(s.gaps[1] == doctest::Approx(std::exp(0.5 * (1.0 - 0.234))).epsilon(1e-14));

  // The energy wrapper derives the same behaviour from a dead level.
  LadderState w = ladder_from_gaps({1.0, 1.0});
  adapt_ladder(w, Vector{-1.0, -2.0, -kInf}, 0.5, clamp);
  CHECK(w.gaps[1] == 1.0);
  CHECK(w.gaps[0] != 1.0);
}

TEST_CASE("reduction truncates at the first hot-enough level") {
  // exp(theta) = {0.1, 0.2, 1.3, 1.5}, d = 4 -> threshold 2.38/2 = 1.19.
  LadderState s = make_geometric_ladder(4, 100.0, 0, 1);
  Vector thetas{std::log(0.1), std::log(0.2), std::log(1.3), std::log(1.5)};
  ReductionPolicy strict = ReductionPolicy::parse("strict");

  CHECK(maybe_reduce_levels(s, thetas, 4, 1, strict));
  CHECK(s.levels() == 3);
  CHECK(s.temps[0] == 1.0);
  CHECK(s.gaps.size() == 2);

  // Second probe: the surviving levels no longer qualify.
  Vector remaining{std::log(0.1), std::log(0.2), std::log(1.1)};
  CHECK(!maybe_reduce_levels(s, remaining, 4, 2, strict));
  CHECK(s.levels() == 3);
}

TEST_CASE("reduction keeping every level reports no change") {
  LadderState s = make_geometric_ladder(3, 100.0, 0, 1);
  // Only the last level qualifies: keep == levels, nothing to cut.
  Vector thetas{std::log(0.1), std::log(0.2), std::log(2.0)};
  CHECK(!maybe_reduce_levels(s, thetas, 4, 1, ReductionPolicy::parse("strict")));
  CHECK(s.levels() == 3);
}

TEST_CASE("reduction honours the burn-in gate and the check interval") {
  ReductionPolicy strict = ReductionPolicy::parse("strict");
  Vector thetas{std::log(2.0), std::log(2.0), std::log(2.0)};

  LadderState s = make_geometric_ladder(3, 100.0, 500, 100);
  CHECK(!maybe_reduce_levels(s, thetas, 4, 500, strict));   // still gated (n <= N0)
  CHECK(!maybe_reduce_levels(s, thetas, 4, 550, strict));   // off the interval
  CHECK(maybe_reduce_levels(s, thetas, 4, 600, strict));    // first eligible check
  CHECK(s.levels() == 1);

  LadderState off = make_geometric_ladder(3, 100.0, 0, 1);
  CHECK(!maybe_reduce_levels(off, thetas, 4, 1, ReductionPolicy{}));  // Off mode
}

TEST_CASE("lenient reduction lowers an unreachable threshold") {
  // exp(theta) = {0.5, 0.8, 0.77}: nothing reaches 2.38/sqrt(8) = 0.841.
  Vector thetas{std::log(0.5), std::log(0.8), std::log(0.77)};
  LadderState strict_ladder = make_geometric_ladder(3, 100.0, 0, 1);
  CHECK(!maybe_reduce_levels(strict_ladder, thetas, 8, 1, ReductionPolicy::parse("strict")));

  LadderState lenient_ladder = make_geometric_ladder(3, 100.0, 0, 1);
  // Effective threshold min(0.841, 0.95 * 0.8) = 0.76: level 2 qualifies.
  CHECK(maybe_reduce_levels(lenient_ladder, thetas, 8, 1, ReductionPolicy::parse("lenient:0.05")));
  CHECK(lenient_ladder.levels() == 2);
}

TEST_CASE("reduction policy parsing") {
  CHECK(ReductionPolicy::parse("off").mode == ReductionPolicy::Mode::Off);
  CHECK(ReductionPolicy::parse("strict").mode == ReductionPolicy::Mode::Strict);
  ReductionPolicy lenient = ReductionPolicy::parse("lenient:0.05");
  CHECK(lenient.mode == ReductionPolicy::Mode::Lenient);
  CHECK(lenient.epsilon == doctest::Approx(0.05));
  CHECK(ReductionPolicy::parse(lenient.name()).epsilon == doctest::Approx(0.05));

  CHECK_THROWS_AS(ReductionPolicy::parse("lenient:1.5"), Error);
  CHECK_THROWS_AS(ReductionPolicy::parse("lenient:abc"), Error);
  CHECK_THROWS_AS(ReductionPolicy::parse("bogus"), Error);
}
