#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "ouvar/calibration.hpp"
#include "ouvar/decomp.hpp"
#include "ouvar/localized.hpp"
#include "ouvar/sweep.hpp"
#include "ouvar/varnorm.hpp"

using namespace ouvar;
using namespace ouvar::localized;
using oukernel::Atom;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Atoms spread over the zone of x, never exactly at x.
DiscreteMeasure zone_measure(sweep::Rng& rng, double x, double zone, int n) {
  std::vector<Atom> atoms;
  while (static_cast<int>(atoms.size()) < n) {
    const double u = x + sweep::uniform(rng, -1.2 * zone, 1.2 * zone);
    if (u != x) atoms.push_back({u, sweep::uniform(rng, -1.0, 1.0)});
  }
  return DiscreteMeasure(std::move(atoms));
}

// Geometries with x > s more often than the shared sampler, so that every
// branch of the interval geometry is exercised.
LocalizedGeometry random_geometry(sweep::Rng& rng) {
  const double x = sweep::uniform(rng, 0.0, 8.0);
  const double s = sweep::log_uniform(rng, 0.02, 10.0);
  const double sigma = 0.5 + 0.5 * sweep::uniform(rng, 1e-9, 1.0 - 1e-9);
  return LocalizedGeometry(x, s, sigma);
}

}  // namespace

TEST_CASE("geometry validates its parameters") {
  CHECK_THROWS_AS(LocalizedGeometry(-0.1, 1.0, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(LocalizedGeometry(1.0, 0.0, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(LocalizedGeometry(1.0, kInf, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(LocalizedGeometry(1.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(LocalizedGeometry(1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(LocalizedGeometry(NAN, 1.0, 0.75), std::invalid_argument);
  const LocalizedGeometry g(2.0, 1.0, 0.75);
  CHECK_THROWS_AS(q_function(g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(interval_endpoints(g, g.t_cap() * 1.0001), std::invalid_argument);
  CHECK_THROWS_AS(interval_endpoints(g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(LocalizedGeometry(0.5, 1.0, 0.75).q_root(0.0), std::invalid_argument);
  CHECK_THROWS_AS(g.q_root(g.q(g.t_tilde()) - 1.0), std::invalid_argument);
}

TEST_CASE("the plotted example x = 2, s = 1") {
  const auto g = critical_times(2.0, 1.0, 0.75);
  CHECK(g.t_tilde() == doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-13));
  CHECK(g.t_zero() == doctest::Approx(std::log(5.0 / 3.0)).epsilon(1e-13));
  CHECK(std::abs(g.t_tilde() - 0.1438) <= 1e-3);
  CHECK(std::abs(g.t_zero() - 0.5108) <= 1e-3);
  CHECK(std::abs(g.q_root(0.0) - g.t_zero()) <= 1e-10);
  CHECK(g.t_tilde() < g.t_zero());
  CHECK(g.t_zero() < g.t_one());
  CHECK(g.zone() == 0.25);
  CHECK(std::abs(g.q(g.t_one()) - g.zone()) <= 1e-12);
  CHECK(g.t_cap() == g.t_one());
  CHECK(g.empty_at_cap());

  // Q has its minimum at t_tilde.
  const double h = 1e-5;
  CHECK(g.q(g.t_tilde() - h) > g.q(g.t_tilde()));
  CHECK(g.q(g.t_tilde() + h) > g.q(g.t_tilde()));
  CHECK(std::abs(q_function(g, 1e-12)) <= 1e-5);
  CHECK(q_function(g, 1e-12) < 0.0);
}

TEST_CASE("x <= s leaves every critical time infinite") {
  for (double x : {0.0, 0.3, 1.0}) {
    const LocalizedGeometry g(x, 1.0, 0.9);
    CHECK(g.t_tilde() == kInf);
    CHECK(g.t_zero() == kInf);
    CHECK(g.t_one() == kInf);
    CHECK(g.t_cap() == 1.0);
    CHECK(!g.empty_at_cap());
    for (double b : monotone_segments(g)) CHECK(b < 1.0);
  }
  const LocalizedGeometry origin(0.0, 0.7, 0.6);
  for (double t = 0.01; t <= 1.0; t += 0.01) {
    CHECK(origin.q(t) == doctest::Approx(-0.7 * std::sqrt(std::expm1(2.0 * t))));
    CHECK(origin.q(t) < 0.0);
  }
}

TEST_CASE("critical times on a random sweep") {
  sweep::Rng rng(41);
  double worst = 0.0;
  int with_roots = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto p = sweep::random_geometry(rng);
    const LocalizedGeometry g(p.x, p.s, p.sigma);
    const double ratio = p.x * p.x * g.t_cap() / (8.0 * (p.s * p.s + 1.0));
    worst = std::max(worst, ratio);
    CHECK(ratio <= 1.0);
    if (p.x <= p.s) continue;
    ++with_roots;
    CHECK(g.t_tilde() < g.t_zero());
    CHECK(g.t_zero() < g.t_one());
    const double closed = std::log((p.x * p.x + p.s * p.s) / ((p.x - p.s) * (p.x + p.s)));
    CHECK(std::abs(g.t_zero() - closed) <= 1e-10 * std::max(1.0, closed));
    if (i % 10 == 0) {
      const double root = g.q_root(0.0);
      if (std::isfinite(root)) CHECK(std::abs(root - g.t_zero()) <= 1e-10 * std::max(1.0, root));
    }
    if (std::isfinite(g.t_one())) {
      CHECK(std::abs(g.q(g.t_one()) - g.zone()) <= 1e-9 * std::max(1.0, g.zone()));
    }
  }
  MESSAGE("max x^2 T / (8 (s^2 + 1)) = " << worst << " over " << with_roots << " cases with x > s");
}

TEST_CASE("Q is monotone on each side of t_tilde") {
  sweep::Rng rng(42);
  for (int i = 0; i < 300; ++i) {
    const auto g = random_geometry(rng);
    if (g.x() <= g.s()) continue;
    const double end = std::min(g.t_one(), 5.0);
    double prev = 0.0;
    const int n = 2000;
    for (int k = 1; k <= n; ++k) {
      const double t = end * k / n;
      const double q = g.q(t);
      // Skip the cell that straddles the minimum.
      if (t - end / n > g.t_tilde() * (1.0 + 1e-9)) CHECK(q > prev);
      if (t < g.t_tilde() * (1.0 - 1e-9)) CHECK(q < prev);
      prev = q;
    }
  }
  // The elementary sandwich y <= e^y - 1 <= 4y on [0, 2].
  for (int k = 0; k <= 10000; ++k) {
    const double y = 2.0 * k / 10000;
    CHECK(y <= std::expm1(y));
    CHECK(std::expm1(y) <= 4.0 * y);
  }
}

TEST_CASE("interval endpoints") {
  const LocalizedGeometry origin(0.0, 0.4, 0.8);
  for (double t : {1e-6, 0.1, 0.5, 1.0}) {
    const auto e = interval_endpoints(origin, t);
    const double expect = std::min(0.4 * std::sqrt(std::expm1(2.0 * t)), 0.8);
    CHECK(e.k_plus == doctest::Approx(expect).epsilon(1e-14));
    CHECK(e.k_minus == -e.k_plus);
    CHECK(!e.empty);
  }

  sweep::Rng rng(43);
  for (int i = 0; i < 2000; ++i) {
    const auto g = random_geometry(rng);
    double prev_plus = 0.0;
    const int n = 400;
    for (int k = 1; k <= n; ++k) {
      const double t = k == n ? g.t_cap() : g.t_cap() * k / n;
      const auto e = interval_endpoints(g, t);
      CHECK(e.k_plus == g.x() + e.plus_length);
      CHECK(e.plus_length >= prev_plus);
      prev_plus = e.plus_length;
      const double direct_plus =
          std::min(g.x() * std::expm1(t) + g.s() * std::sqrt(std::expm1(2.0 * t)), g.zone());
      CHECK(std::abs(e.plus_length - direct_plus) <= 1e-14 * std::max(1.0, g.x()));
      if (e.empty) {
        CHECK(k == n);
        CHECK(g.empty_at_cap());
        CHECK(e.k_minus == e.k_plus);
        continue;
      }
      CHECK(std::abs(std::abs(e.minus_offset) - std::min(std::abs(g.q(t)), g.zone())) <=
            1e-14 * std::max(1.0, g.x()));
      CHECK((e.k_minus < g.x()) == (t < g.t_zero()));
      CHECK(e.k_minus < e.k_plus);
      CHECK(g.q(t) < g.zone());  // nonempty only before t_one
    }
  }
}

TEST_CASE("R operator and one-sided means") {
  const LocalizedGeometry g(1.0, 2.0, 0.9);
  const double t = 0.2;
  const auto e = interval_endpoints(g, t);
  const double root_d = std::sqrt(-std::expm1(-2.0 * t));
  const double inside = 0.5 * (e.k_minus + e.k_plus);
  CHECK(r_operator(DiscreteMeasure::point_mass(inside, 3.0), g, t) ==
        doctest::Approx(3.0 / root_d).epsilon(1e-15));
  CHECK(r_operator(DiscreteMeasure::point_mass(e.k_plus), g, t) == 0.0);
  CHECK(r_operator(DiscreteMeasure::point_mass(e.k_minus), g, t) == 0.0);
  CHECK(r_operator(DiscreteMeasure(), g, t) == 0.0);

  const LocalizedGeometry closing(2.0, 1.0, 0.75);
  CHECK(r_operator(DiscreteMeasure::point_mass(2.1), closing, closing.t_cap()) == 0.0);

  const auto atom = DiscreteMeasure::point_mass(1.3, 2.0);
  CHECK_THROWS_AS(one_sided_mean(atom, 1.0, 0.0, Side::plus), std::invalid_argument);
  CHECK(one_sided_mean(atom, 1.0, 0.2, Side::plus) == 0.0);
  CHECK(one_sided_mean(atom, 1.0, 0.6, Side::plus) == doctest::Approx(2.0 / 0.6));
  CHECK(one_sided_mean(atom, 1.0, 0.6, Side::minus) == 0.0);
  CHECK(one_sided_mean(atom, 1.6, 0.6, Side::minus) == doctest::Approx(2.0 / 0.6));

  // M_tau^+ of a point mass at distance d is 0 before d and w / tau after, so
  // the grid path 0, .., 0, a, .., b (a > b > 0) has v(rho)^rho = a^rho + (a - b)^rho.
  const double d = 0.3, w = 2.0;
  const auto pm = DiscreteMeasure::point_mass(1.0 + d, w);
  std::vector<double> taus, values;
  for (int k = 1; k <= 200; ++k) {
    taus.push_back(0.01 * k);
    values.push_back(one_sided_mean(pm, 1.0, taus.back(), Side::plus));
  }
  const double a = w / 0.31, b = w / 2.0;
  for (double rho : {1.0, 2.0, 3.0}) {
    const double v = varnorm::variation(values, varnorm::Rho(rho));
    CHECK(v == doctest::Approx(std::pow(std::pow(a, rho) + std::pow(a - b, rho), 1.0 / rho)).epsilon(1e-12));
    // The variation ignores the parametrisation: tau or tau^3 give the same value.
    std::vector<double> cubed(taus);
    for (double& c : cubed) c = c * c * c;
    CHECK(varnorm::variation(varnorm::SampledPath(taus, values), varnorm::Rho(rho)) ==
          varnorm::variation(varnorm::SampledPath(cubed, values), varnorm::Rho(rho)));
  }
}

TEST_CASE("means decomposition reproduces R") {
  sweep::Rng rng(44);
  int flipped = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto g = random_geometry(rng);
    const auto gm = zone_measure(rng, g.x(), g.zone(), 1 + static_cast<int>(rng() % 6));
    const double t = g.t_cap() * sweep::uniform(rng, 1e-6, 1.0);
    const auto m = means_decomposition(gm, g, t);
    const double r = r_operator(gm, g, t);
    const double scale = gm.norm() / std::sqrt(-std::expm1(-2.0 * t));
    CHECK(std::abs(m.value() - r) <= 1e-10 * scale);
    CHECK(m.sign == (t < g.t_zero() ? 1 : -1));
    flipped += m.sign < 0;
  }
  MESSAGE(flipped << " of 1000 configurations past t_zero");

  const auto g = critical_times(2.0, 1.0, 0.75);
  const auto on_x = DiscreteMeasure::point_mass(2.0);
  CHECK_THROWS_AS(means_decomposition(on_x, g, 0.1), std::invalid_argument);

  // Past t_zero both endpoints lie right of x; at the cap they meet.
  const auto gm = DiscreteMeasure({{2.05, 1.0}, {2.2, -0.4}, {1.9, 0.7}});
  const auto cap = means_decomposition(gm, g, g.t_cap());
  CHECK(cap.sign == -1);
  CHECK(cap.term_plus == cap.term_minus);
  CHECK(cap.value() == 0.0);
  CHECK(r_operator(gm, g, g.t_cap()) == 0.0);

  // Either side of t_zero the decomposition stays continuous.
  const double t0 = g.t_zero();
  const auto before = means_decomposition(gm, g, t0 * (1.0 - 1e-9));
  const auto after = means_decomposition(gm, g, t0 * (1.0 + 1e-9));
  CHECK(before.sign == 1);
  CHECK(after.sign == -1);
  CHECK(std::abs(before.value() - after.value()) <= 1e-6);
  CHECK(std::abs(before.term_minus) <= 1e-6);
}

TEST_CASE("F factors") {
  const LocalizedGeometry origin(0.0, 0.5, 0.7);
  for (double t : {1e-3, 0.1, 0.6, 1.0}) {
    const auto f = f_factors(origin, t);
    const double expect = std::min(0.5 * std::exp(t), 0.7 / std::sqrt(-std::expm1(-2.0 * t)));
    CHECK(f.plus == doctest::Approx(expect).epsilon(1e-14));
    CHECK(f.minus == doctest::Approx(expect).epsilon(1e-14));
  }

  sweep::Rng rng(45);
  for (int i = 0; i < 2000; ++i) {
    const auto g = random_geometry(rng);
    for (int k = 1; k <= 50; ++k) {
      const double t = k == 50 ? g.t_cap() : g.t_cap() * k / 50;
      const auto f = f_factors(g, t);
      // The definition with the lengths of J_t over sqrt(1 - e^{-2t}).
      const double root_d = std::sqrt(-std::expm1(-2.0 * t));
      const double spread = g.s() * std::sqrt(std::expm1(2.0 * t));
      const double drift = g.x() * std::expm1(t);
      const double plus = std::min(std::abs(drift + spread), g.zone()) / root_d;
      const double minus = std::min(std::abs(drift - spread), g.zone()) / root_d;
      CHECK(std::abs(f.plus - plus) <= 1e-12 * plus);
      CHECK(std::abs(f.minus - minus) <= 1e-12 * plus);
      const double chain = 4.0 * g.x() * std::exp(t) * t / std::sqrt(2.0 * t) + std::exp(1.0) * g.s();
      CHECK(f.plus <= chain);
      CHECK(f.minus <= chain);
    }
  }
}

TEST_CASE("monotone segments") {
  const auto g = critical_times(2.0, 1.0, 0.75);
  const auto bps = monotone_segments(g);
  auto has = [&](double v) {
    return std::any_of(bps.begin(), bps.end(), [&](double b) { return std::abs(b - v) <= 1e-12; });
  };
  CHECK(has(g.t_tilde()));
  CHECK(has(g.t_zero()));

  sweep::Rng rng(46);
  for (int i = 0; i < 2000; ++i) {
    const auto geo = random_geometry(rng);
    auto cuts = monotone_segments(geo);
    CHECK(std::is_sorted(cuts.begin(), cuts.end()));
    CHECK(std::adjacent_find(cuts.begin(), cuts.end()) == cuts.end());
    for (double c : cuts) {
      CHECK(c > 0.0);
      CHECK(c < geo.t_cap());
    }
    cuts.insert(cuts.begin(), 0.0);
    cuts.push_back(geo.t_cap());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      // Sample strictly inside the segment and test for one direction only.
      std::vector<double> p, m;
      const int n = 64;
      for (int q = 1; q < n; ++q) {
        const auto f = f_factors(geo, cuts[k] + (cuts[k + 1] - cuts[k]) * q / n);
        p.push_back(f.plus);
        m.push_back(f.minus);
      }
      for (const auto* path : {&p, &m}) {
        double up = 0.0, down = 0.0, top = 0.0;
        for (std::size_t q = 1; q < path->size(); ++q) {
          const double diff = (*path)[q] - (*path)[q - 1];
          (diff > 0 ? up : down) += std::abs(diff);
          top = std::max(top, std::abs((*path)[q]));
        }
        CHECK(std::min(up, down) <= 1e-10 * std::max(1.0, top));
      }
    }
  }
}

TEST_CASE("F profile against a dense grid and the frozen envelopes") {
  const varnorm::Rho rho(3.0);
  sweep::Rng rng(47);
  double sup = 0.0, var = 0.0;
  std::size_t segs = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = sweep::random_geometry(rng);
    const LocalizedGeometry g(p.x, p.s, p.sigma);
    const auto prof = f_profile(g, rho);
    sup = std::max({sup, prof.sup_plus / (p.s + 1.0), prof.sup_minus / (p.s + 1.0)});
    var = std::max({var, prof.var_plus / (p.s + 1.0), prof.var_minus / (p.s + 1.0)});
    segs = std::max(segs, prof.segments);
    CHECK(prof.segments <= static_cast<std::size_t>(calibration::kSegments));

    if (i % 20 == 0) {
      // Dense grid with the breakpoints merged in, starting from F(0+) = s.
      std::vector<double> ts;
      const int n = 4000;
      for (int k = 1; k <= n; ++k) ts.push_back(k == n ? g.t_cap() : g.t_cap() * std::pow(double(k) / n, 3.0));
      for (double b : monotone_segments(g)) ts.push_back(b);
      std::sort(ts.begin(), ts.end());
      std::vector<double> fp{p.s}, fm{p.s};
      for (double t : ts) {
        const auto f = f_factors(g, t);
        fp.push_back(f.plus);
        fm.push_back(f.minus);
      }
      const double vp = varnorm::variation(fp, rho), vm = varnorm::variation(fm, rho);
      CHECK(prof.var_plus == doctest::Approx(vp).epsilon(1e-9));
      CHECK(prof.var_minus == doctest::Approx(vm).epsilon(1e-9));
      CHECK(prof.sup_plus == doctest::Approx(*std::max_element(fp.begin(), fp.end())).epsilon(1e-12));
      CHECK(prof.sup_minus == doctest::Approx(*std::max_element(fm.begin(), fm.end())).epsilon(1e-12));
    }
  }
  CHECK(sup <= calibration::kFSup);
  CHECK(var <= calibration::kFVariation);
  MESSAGE("sup F/(s+1) " << sup << ", v(3)/(s+1) " << var << ", segments " << segs);
}

TEST_CASE("reconstruction of the local operator") {
  const auto empty = reconstruct_local(DiscreteMeasure(), 0.5, 1.0);
  CHECK(empty.value == 0.0);
  CHECK(empty.direct == 0.0);
  CHECK_THROWS_AS(reconstruct_local(DiscreteMeasure(), 1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(local_operator_direct(DiscreteMeasure(), 0.0, 1.0), std::invalid_argument);

  for (double t : {0.01, 0.3, 1.0}) {
    const auto on_x = DiscreteMeasure::point_mass(0.8, 1.5);
    const double expect = 1.5 / std::sqrt(-std::expm1(-2.0 * t)) *
                          std::exp(-0.5 * std::pow(std::exp(-t) * 0.8 - 0.8, 2) / -std::expm1(-2.0 * t));
    CHECK(local_operator_direct(on_x, t, 0.8) == doctest::Approx(expect).epsilon(1e-14));
  }

  sweep::Rng rng(48);
  for (int i = 0; i < 12; ++i) {
    const auto c = sweep::random_local_config(rng);
    double direct = 0.0;
    for (const auto& a : c.measure.atoms()) {
      const double d = -std::expm1(-2.0 * c.t);
      const double gap = std::exp(-c.t) * a.location - c.x;
      direct += a.weight * std::exp(-0.5 * gap * gap / d) *
                decomp::eta((1.0 + std::abs(c.x)) * std::abs(c.x - a.location)) / std::sqrt(d);
    }
    CHECK(local_operator_direct(c.measure, c.t, c.x) == doctest::Approx(direct).epsilon(1e-13));
    const auto r = reconstruct_local(c.measure, c.t, c.x);
    CHECK(r.converged);
    CHECK(std::abs(r.value - r.direct) <= 1e-8 * c.measure.norm());
  }

  // One atom: the s-integrand jumps at the atom's Gaussian distance, which a
  // single Gauss-Kronrod panel misreads by about 1e-3.
  const double t = 0.6359276875561235, x = 1.314094479635342;
  const auto one = reconstruct_local(DiscreteMeasure::point_mass(1.4845222086039134), t, x);
  CHECK(one.converged);
  CHECK(std::abs(one.value - one.direct) <= 1e-9);
}
