#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ushape/error.hpp"
#include "ushape/estimators.hpp"
#include "ushape/histogram.hpp"

using namespace ushape;

namespace {

// max over a dense grid per cell of |Z(t) - Z(t_{k-1})|, plus both sides of
// G_hat's jumps and the kinks of G, which a grid only approaches.
double oracle_fluctuation(const StepFunction& G_hat, const PiecewiseAffine& G, const Partition& pi,
                          std::size_t per_cell) {
  double total = 0;
  for (std::size_t k = 0; k < pi.cells(); ++k) {
    const double a = pi.cell(k).a(), b = pi.cell(k).b();
    const double z0 = G_hat(a) - G(a);
    double best = 0;
    for (std::size_t i = 0; i <= per_cell; ++i) {
      const double t = i == per_cell ? b : a + (b - a) * static_cast<double>(i) / per_cell;
      best = std::max(best, std::abs(G_hat(t) - G(t) - z0));
    }
    std::vector<double> extra(G.knots().begin(), G.knots().end());
    extra.insert(extra.end(), G_hat.breakpoints().begin(), G_hat.breakpoints().end());
    for (double t : extra)
      if (t > a && t <= b) {
        best = std::max(best, std::abs(G_hat(t) - G(t) - z0));
        best = std::max(best, std::abs(G_hat(t, Side::left) - G(t) - z0));
      }
    total += best;
  }
  return total;
}

}  // namespace

TEST_CASE("histogram of an empirical distribution") {
  const auto F = ecdf(Sample({0.1, 0.2, 0.6}, Interval(0, 1)));
  const auto h = histogram_estimate(F, Partition({0, 0.5, 1}));
  CHECK(h(0.2) == doctest::Approx(4.0 / 3));
  CHECK(h(0.7) == doctest::Approx(2.0 / 3));
  CHECK(h(1) == doctest::Approx(2.0 / 3));
  CHECK(integral(h) == doctest::Approx(1));
  CHECK_THROWS_AS(histogram_estimate(F, Partition({0, 0.5})), DomainError);
}

TEST_CASE("projection takes cell means") {
  const StepFunction g(Interval(0, 1), {0.25, 0.75}, {1, 3, 5});
  const auto p = projection(g, Partition({0, 0.5, 1}));
  CHECK(p(0.1) == doctest::Approx(2));
  CHECK(p(0.9) == doctest::Approx(4));
  CHECK(integral(p) == doctest::Approx(integral(g)));
}

TEST_CASE("best step distance: median versus projection") {
  const StepFunction g(Interval(0, 1), {0.75}, {0, 4});
  const Partition one({0, 1});
  CHECK(best_step_distance(g, one) == doctest::Approx(1));
  CHECK(best_step_distance(g, one, StepDistance::projection_bound) == doctest::Approx(1.5));
  CHECK(best_step_distance(g, Partition({0, 0.75, 1})) == 0);
}

TEST_CASE("exact median distance is the minimum over constants per cell") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = oracle::random_dyadic_step(rng, 0, 1, 2 + trial % 12, 0, 5);
    const auto pi = Partition::uniform(Interval(0, 1), 1 + trial % 5);
    const double exact = best_step_distance(g, pi);
    const double proj = best_step_distance(g, pi, StepDistance::projection_bound);
    CHECK(exact <= proj + 1e-12);
    CHECK(proj <= 2 * exact + 1e-12);
    // Brute force: scan candidate levels on each cell.
    double brute = 0;
    for (std::size_t k = 0; k < pi.cells(); ++k) {
      const auto cell = pi.cell(k);
      double best = INFINITY;
      for (double c : g.values()) {
        const auto cst = StepFunction::constant(g.domain(), c);
        best = std::min(best, l1_distance(g, cst, cell));
      }
      brute += best;
    }
    CHECK(exact == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("risk bracket terms") {
  const StepFunction g(Interval(0, 1), {0.5}, {2, 0});
  const auto G = cumulative(g);
  const auto G_hat = ecdf(Sample({0.1, 0.3, 0.45, 0.9}, Interval(0, 1)));
  const Partition pi({0, 0.5, 1});
  const auto r = risk_bracket(g, G, G_hat, pi);
  CHECK(r.C == 49);
  CHECK(r.bias_term == 0);
  CHECK(r.total == doctest::Approx(r.bias_term + r.fluctuation_term));
  CHECK(r.fluctuation_term == doctest::Approx(49 * oracle_fluctuation(G_hat, G, pi, 100000)).epsilon(1e-8));
  CHECK_THROWS_AS(risk_bracket(g, G, G_hat, pi, 0.5), DomainError);
}

TEST_CASE("fluctuation term matches a dense grid") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(50);
    for (auto& v : x) v = u(rng) * u(rng);
    const auto G_hat = ecdf(Sample(x, Interval(0, 1)));
    const auto g = oracle::random_dyadic_step(rng, 0, 1, 4, 0.5, 1.5);
    const auto G = cumulative(g);
    const auto pi = Partition::uniform(Interval(0, 1), 1 + trial % 4);
    double sum = 0;
    for (const auto& c : cell_increments(G_hat, G, pi)) sum += c.sup_increment;
    CHECK(sum == doctest::Approx(oracle_fluctuation(G_hat, G, pi, 100000)).epsilon(1e-8));
    for (const auto& c : cell_increments(G_hat, G, pi)) CHECK(c.endpoint_increment <= c.sup_increment);
  }
}

TEST_CASE("condition4 ratio") {
  const Partition pi({0, 0.5, 1});
  SUBCASE("means of sup over means of endpoint increments") {
    const std::vector<std::vector<CellIncrement>> s{{{2, 1}, {1, 1}}, {{4, 1}, {1, 1}}};
    const auto c = condition4_ratio(s, pi);
    CHECK(c.ratio == doctest::Approx(3));
    CHECK(c.worst_cell == 0);
    CHECK(c.per_cell[1] == doctest::Approx(1));
    CHECK(c.std_error > 0);
  }
  SUBCASE("cells where nothing moved are skipped") {
    const std::vector<std::vector<CellIncrement>> s{{{0, 0}, {1, 1}}, {{0, 0}, {3, 1}}};
    const auto c = condition4_ratio(s, pi);
    CHECK(std::isnan(c.per_cell[0]));
    CHECK(c.ratio == doctest::Approx(2));
    CHECK(c.worst_cell == 1);
  }
  SUBCASE("a zero endpoint mean gives an infinite ratio") {
    const std::vector<std::vector<CellIncrement>> s{{{1, 0}, {1, 1}}, {{1, 0}, {1, 1}}};
    CHECK(std::isinf(condition4_ratio(s, pi).ratio));
  }
  CHECK_THROWS_AS(condition4_ratio({{{1, 1}, {1, 1}}}, pi), UsageError);
  CHECK_THROWS_AS(condition4_ratio({{{1, 1}}, {{1, 1}}}, pi), UsageError);
}
