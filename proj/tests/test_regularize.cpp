#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ushape/error.hpp"
#include "ushape/estimators.hpp"
#include "ushape/regularize.hpp"

using namespace ushape;

namespace {

std::vector<double> lengths_of(const StepFunction& h) {
  std::vector<double> w;
  double lo = h.domain().a();
  for (double t : h.breakpoints()) {
    w.push_back(t - lo);
    lo = t;
  }
  w.push_back(h.domain().b() - lo);
  return w;
}

StepFunction ecdf_of(std::vector<double> x) { return ecdf(Sample(std::move(x), Interval(0, 1))); }

// Random nondecreasing step with dyadic breakpoints.
StepFunction random_cdf_like(std::mt19937_64& rng, int jumps) {
  const auto inc = oracle::random_dyadic_step(rng, 0, 1, jumps + 1, 0, 1);
  std::vector<double> v{0.0};
  for (std::size_t k = 1; k < inc.values().size(); ++k) v.push_back(v.back() + inc.values()[k]);
  return StepFunction(Interval(0, 1), {inc.breakpoints().begin(), inc.breakpoints().end()}, v);
}

}  // namespace

TEST_CASE("pava examples") {
  const std::vector<double> ones{1, 1};
  CHECK(pava(std::vector<double>{3, 1}, ones, Direction::nonincreasing) == std::vector<double>{3, 1});
  CHECK(pava(std::vector<double>{1, 3}, ones, Direction::nonincreasing) == std::vector<double>{2, 2});
  CHECK(pava(std::vector<double>{1, 4, 2}, std::vector<double>{1, 1, 1}, Direction::nonincreasing) ==
        std::vector<double>{2.5, 2.5, 2});
  CHECK(pava(std::vector<double>{3, 1}, ones, Direction::nondecreasing) == std::vector<double>{2, 2});
}

TEST_CASE("pava errors") {
  CHECK_THROWS_AS(pava(std::vector<double>{}, std::vector<double>{}, Direction::nonincreasing),
                  DomainError);
  CHECK_THROWS_AS(pava(std::vector<double>{1, 2}, std::vector<double>{1}, Direction::nonincreasing),
                  DomainError);
  CHECK_THROWS_AS(pava(std::vector<double>{1, 2}, std::vector<double>{1, 0}, Direction::nonincreasing),
                  DomainError);
}

TEST_CASE("pava matches exhaustive block search and preserves the weighted sum") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-5, 5), w(0.1, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 9;
    std::vector<double> y(n), wt(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = u(rng);
      wt[i] = w(rng);
    }
    for (auto dir : {Direction::nonincreasing, Direction::nondecreasing}) {
      const auto fit = pava(y, wt, dir);
      const auto ref = oracle::isotonic_bruteforce(y, wt, dir == Direction::nonincreasing);
      REQUIRE(ref.size() == n);
      double s0 = 0, s1 = 0;
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(fit[i] == doctest::Approx(ref[i]).epsilon(1e-12));
        s0 += wt[i] * y[i];
        s1 += wt[i] * fit[i];
      }
      CHECK(s1 == doctest::Approx(s0).epsilon(1e-12));
    }
  }
}

TEST_CASE("concave majorant examples") {
  const auto F = ecdf_of({0.5});
  const auto L = concave_majorant(F, Interval(0, 1));
  REQUIRE(L.knots().size() == 3);
  CHECK(L.knots()[1] == 0.5);
  CHECK(L(0) == 0);
  CHECK(L(0.5) == 1);
  CHECK(L(1) == 1);
  const auto s = slope(L);
  CHECK(s(0.2) == 2);
  CHECK(s(0.7) == 0);

  const auto affine = PiecewiseAffine::affine(Interval(0, 1), 1, -3);
  CHECK(sup_distance(concave_majorant(affine, Interval(0, 1)), affine) == 0);
  const PiecewiseAffine concave(Interval(0, 1), {0, 0.3, 1}, {0, 0.9, 1.2});
  CHECK(sup_distance(concave_majorant(concave, Interval(0, 1)), concave) <= 1e-15);
  CHECK_THROWS_AS(concave_majorant(F, Interval(0.5, 1.5)), DomainError);
}

TEST_CASE("convex minorant examples") {
  const StepFunction F(Interval(0, 1), {0.5, 0.8}, {0, 0.5, 1});
  const auto M = convex_minorant(F, Interval(0.5, 1));
  REQUIRE(M.knots().size() == 3);
  CHECK(M.knots()[1] == 0.8);
  CHECK(M(0.5) == 0.5);
  CHECK(M(0.8) == 0.5);
  CHECK(M(1) == 1);
  const auto s = slope(M);
  CHECK(s(0.6) == 0);
  CHECK(s(0.9) == doctest::Approx(2.5));

  const auto c = StepFunction::constant(Interval(0, 1), 3);
  CHECK(sup_distance(convex_minorant(c, Interval(0, 1)), as_affine(c)) == 0);
  const PiecewiseAffine convex(Interval(0, 1), {0, 0.5, 1}, {1, 1.1, 2});
  CHECK(sup_distance(convex_minorant(convex, Interval(0, 1)), convex) <= 1e-15);
}

TEST_CASE("hulls agree with gift wrapping on random steps and subintervals") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto F = oracle::random_dyadic_step(rng, 0, 1, 2 + trial % 25, -2, 2);
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    if (trial % 3 == 0) a = 0, b = 1;
    if (b - a < 1e-3) continue;
    const Interval J(a, b);
    for (bool upper : {true, false}) {
      const auto env = upper ? concave_majorant(F, J) : convex_minorant(F, J);
      const auto ref = oracle::hull_slope(oracle::hull(oracle::step_points(F, a, b), upper), a, b);
      CHECK(sup_distance(slope(env), ref) <= 1e-9);
      // Touches F at the left end and takes F's value at the right end.
      CHECK(env(a) == F(a));
      CHECK(env(b) == F(b));
    }
  }
}

TEST_CASE("slope of the majorant of a cumulative equals PAVA on cell lengths") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = oracle::random_dyadic_step(rng, 0, 1, 1 + trial % 30, -4, 4);
    const auto f = slope(concave_majorant(cumulative(h), h.domain()));
    const auto w = lengths_of(h);
    const auto p = pava(h.values(), w, Direction::nonincreasing);
    double lo = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double hi = k < h.breakpoints().size() ? h.breakpoints()[k] : 1.0;
      CHECK(std::abs(f(0.5 * (lo + hi)) - p[k]) <= 1e-12);
      lo = hi;
    }
  }
}

TEST_CASE("regularize_at examples") {
  SUBCASE("affine F is its own regularization") {
    const auto F = PiecewiseAffine::affine(Interval(0, 2), 1, 0.5);
    for (double m : {0.0, 0.7, 2.0})
      for (auto shape : {ShapeKind::u_shaped, ShapeKind::unimodal}) {
        const auto r = regularize_at(F, m, shape);
        CHECK(r.d <= 1e-15);
        CHECK(sup_distance(r.envelope, F) <= 1e-15);
      }
  }
  SUBCASE("two-point ECDF at the centre") {
    const auto r = regularize_at(ecdf_of({0.2, 0.8}), 0.5, ShapeKind::u_shaped);
    const auto f = slope(r.envelope);
    CHECK(f(0.1) == doctest::Approx(2.5));
    CHECK(f(0.5) == doctest::Approx(0));
    CHECK(f(0.9) == doctest::Approx(2.5));
    CHECK(f(0.2) == doctest::Approx(0));
    CHECK(f(0.8) == doctest::Approx(2.5));
  }
  SUBCASE("m = a gives the convex minorant over the whole interval") {
    const auto F = ecdf_of({0.1, 0.35, 0.4, 0.9});
    const auto r = regularize_at(F, 0.0, ShapeKind::u_shaped);
    CHECK(sup_distance(r.envelope, convex_minorant(F, Interval(0, 1))) == 0);
  }
  SUBCASE("monotone shapes pin m") {
    const auto F = ecdf_of({0.1, 0.35, 0.4, 0.9});
    CHECK(sup_distance(regularize_at(F, 0.3, ShapeKind::nonincreasing).envelope,
                       concave_majorant(F, Interval(0, 1))) == 0);
    CHECK(sup_distance(regularize_at(F, 0.3, ShapeKind::nondecreasing).envelope,
                       convex_minorant(F, Interval(0, 1))) == 0);
  }
  SUBCASE("unimodal envelope may jump at m") {
    const auto F = ecdf_of({0.5});
    const auto r = regularize_at(F, 0.5, ShapeKind::unimodal);
    CHECK(r.envelope(0.5, Side::left) == 0);
    CHECK(r.envelope(0.5) == 1);
    CHECK(r.d == 0);
  }
  CHECK_THROWS_AS(regularize_at(ecdf_of({0.5}), 1.5, ShapeKind::u_shaped), DomainError);
}

TEST_CASE("u-shaped envelope dominance and contact") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto F = random_cdf_like(rng, 3 + trial % 20);
    const double m = u(rng);
    const auto env = regularize_at(F, m, ShapeKind::u_shaped).envelope;
    const auto Fa = as_affine(F);
    CHECK(sup_difference(Fa, env, Interval(0, m)) <= 1e-12);
    CHECK(sup_difference(env, Fa, Interval(m, 1)) <= 1e-12);
    CHECK(env(0) == F(0));
    CHECK((env(m) == F(m) || env(m) == F(m, Side::left)));
    CHECK((env(1) == F(1) || env(1) == F(1, Side::left)));
    CHECK(env.discontinuities(1e-12).empty());
  }
}

TEST_CASE("select_mode special cases") {
  SUBCASE("constant F") {
    const auto F = StepFunction::constant(Interval(2, 6), 1.5);
    for (auto shape : {ShapeKind::u_shaped, ShapeKind::unimodal}) {
      const auto s = select_mode(F, shape);
      CHECK(s.m == 4);
      CHECK(s.min_value == 0);
    }
  }
  SUBCASE("F with a U-shaped slope has zero error around its valley") {
    const StepFunction g(Interval(0, 1), {0.25, 0.5, 0.75}, {3, 1, 0.5, 2});
    const auto s = select_mode(cumulative(g), ShapeKind::u_shaped);
    CHECK(s.min_value <= 1e-12);
    CHECK(s.interval_lo <= 0.5);
    CHECK(s.interval_hi >= 0.75);
    CHECK(s.m >= s.interval_lo);
    CHECK(s.m <= s.interval_hi);
  }
  SUBCASE("symmetric F selects the centre") {
    const auto s = select_mode(ecdf_of({0.2, 0.8}), ShapeKind::u_shaped);
    CHECK(s.m == doctest::Approx(0.5));
    const auto t = select_mode(ecdf_of({0.2, 0.45, 0.55, 0.8}), ShapeKind::u_shaped);
    CHECK(t.m == doctest::Approx(0.5));
  }
  SUBCASE("monotone shapes") {
    const auto F = ecdf_of({0.3});
    CHECK(select_mode(F, ShapeKind::nonincreasing).m == 1);
    CHECK(select_mode(F, ShapeKind::nondecreasing).m == 0);
  }
}

TEST_CASE("select_mode minimum matches a dense grid of candidate modes") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 6; ++trial) {
    const auto F = as_affine(random_cdf_like(rng, 20));
    const int N = 10000;
    double grid_u = INFINITY, grid_n = INFINITY;
    for (int i = 0; i <= N; ++i) {
      const double m = static_cast<double>(i) / N;
      grid_u = std::min(grid_u, regularize_at(F, m, ShapeKind::u_shaped).d);
      grid_n = std::min(grid_n, regularize_at(F, m, ShapeKind::unimodal).d);
    }
    const auto su = select_mode(F, ShapeKind::u_shaped);
    CHECK(std::abs(su.min_value - grid_u) <= 1e-9);
    CHECK(std::abs(regularize_at(F, su.m, ShapeKind::u_shaped).d - su.min_value) <= 1e-12);
    // d_N is continuous, so a grid only bounds its minimum from above.
    const auto sn = select_mode(F, ShapeKind::unimodal);
    CHECK(sn.min_value <= grid_n + 1e-9);
    CHECK(std::abs(regularize_at(F, sn.m, ShapeKind::unimodal).d - sn.min_value) <= 1e-12);
  }
}

TEST_CASE("bracketed and exhaustive mode searches agree") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 150; ++trial) {
    const auto F = random_cdf_like(rng, 1 + trial % 40);
    for (auto shape : {ShapeKind::u_shaped, ShapeKind::unimodal}) {
      const auto fast = select_mode(F, shape, ModeSearch::bracketed);
      const auto full = select_mode(F, shape, ModeSearch::exhaustive);
      CHECK(fast.m == full.m);
      CHECK(fast.min_value == full.min_value);
      CHECK(fast.profile.empty());
      REQUIRE_FALSE(full.profile.empty());
      for (const auto& p : full.profile) CHECK(fast.min_value <= p.d + 1e-12);
    }
  }
}

TEST_CASE("mode search on non-monotone input (regression case)") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const auto F = oracle::random_dyadic_step(rng, 0, 1, 2 + trial % 30, -1, 1);
    for (auto shape : {ShapeKind::u_shaped, ShapeKind::unimodal}) {
      const auto fast = select_mode(F, shape, ModeSearch::bracketed);
      const auto full = select_mode(F, shape, ModeSearch::exhaustive);
      CHECK(fast.m == full.m);
      bool monotone = true;
      for (std::size_t k = 0; k + 1 < F.values().size(); ++k) monotone &= F.values()[k + 1] >= F.values()[k];
      CHECK(shape_map(F, shape).input_nondecreasing == monotone);
    }
  }
}

TEST_CASE("shape_map examples") {
  SUBCASE("Grenander estimate of a single point") {
    const auto e = shape_map(ecdf_of({0.5}), ShapeKind::nonincreasing);
    CHECK(e.mode == 1);
    CHECK(e.f(0) == 2);
    CHECK(e.f(0.49) == 2);
    CHECK(e.f(0.5) == 0);
    CHECK(e.f(1) == 0);
    CHECK(e.input_nondecreasing);
  }
  SUBCASE("affine F gives a constant estimate for every shape") {
    const auto F = PiecewiseAffine::affine(Interval(0, 3), 0, 1.25);
    for (auto shape : {ShapeKind::u_shaped, ShapeKind::unimodal, ShapeKind::nonincreasing,
                       ShapeKind::nondecreasing}) {
      const auto e = shape_map(F, shape);
      CHECK(sup_distance(e.f, StepFunction::constant(Interval(0, 3), 1.25)) <= 1e-15);
    }
  }
  SUBCASE("known mode") {
    const auto e = shape_map(ecdf_of({0.2, 0.8}), ShapeKind::u_shaped, 0.5);
    CHECK(e.mode == 0.5);
    CHECK(e.f(0.1) == doctest::Approx(2.5));
    CHECK(e.f(0.5) == doctest::Approx(0));
    CHECK(e.f(0.9) == doctest::Approx(2.5));
  }
}

TEST_CASE("shape_map output has the requested shape and is idempotent") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 100; ++trial) {
    const auto F = random_cdf_like(rng, 2 + trial % 30);
    for (auto shape : {ShapeKind::u_shaped, ShapeKind::unimodal, ShapeKind::nonincreasing,
                       ShapeKind::nondecreasing}) {
      const auto e = shape_map(F, shape);
      const auto v = e.f.values();
      const auto bp = e.f.breakpoints();
      for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        if (bp[k] == e.mode) continue;  // either direction is allowed at the mode
        const bool before = bp[k] < e.mode;
        const bool down = (shape == ShapeKind::u_shaped && before) ||
                          (shape == ShapeKind::unimodal && !before) ||
                          shape == ShapeKind::nonincreasing;
        if (down)
          CHECK(v[k + 1] <= v[k] + 1e-9);
        else
          CHECK(v[k + 1] >= v[k] - 1e-9);
      }
      const auto again = shape_map(cumulative(e.f), shape);
      CHECK(sup_distance(again.f, e.f) <= 1e-9);
    }
  }
}

TEST_CASE("slope examples") {
  CHECK(slope(PiecewiseAffine::affine(Interval(0, 1), 0, 2))(0.3) == 2);
  const auto s = slope(PiecewiseAffine(Interval(0, 1), {0, 0.5, 1}, {0, 1, 1}));
  CHECK(s(0.25) == 2);
  CHECK(s(0.5) == 0);
  CHECK(s(1) == 0);
}

TEST_CASE("shape names") {
  CHECK(parse_shape("u_shaped") == ShapeKind::u_shaped);
  CHECK(parse_shape("unimodal") == ShapeKind::unimodal);
  CHECK(to_string(ShapeKind::nondecreasing) == "nondecreasing");
  CHECK_THROWS_AS(parse_shape("bimodal"), UsageError);
}
