#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gwlab/gw_states.hpp"
#include "gwlab/measures.hpp"
#include "support/oracles.hpp"

using namespace gwlab;
using Catch::Approx;

namespace {

GWSpec example1() { return GWSpec::qubits({std::sqrt(0.5), 0.5, 0.4, 0.3}); }
GWSpec example2() { return GWSpec::qubits({0.75, 0.5, std::sqrt(2.0) / 4.0, 0.25}); }

PureState two_level(double l0) {
  Vector v = Vector::Zero(4);
  v(0) = std::sqrt(l0);
  v(3) = std::sqrt(1.0 - l0);
  return PureState(v, SubsystemLayout::uniform(2, 2));
}

std::vector<double> unit_grid() {
  std::vector<double> xs;
  for (int i = 0; i <= 100; ++i) xs.push_back(i / 100.0);
  return xs;
}

}  // namespace

TEST_CASE("renyi entropy of fixed spectra", "[measures]") {
  for (double a : {0.5, 0.9, 1.0, 1.0 + 5e-7, 2.0, 7.0}) {
    CHECK(renyi_entropy({0.5, 0.5}, RenyiOrder(a)) == Approx(1.0).margin(1e-12));
    CHECK(renyi_entropy({1.0}, RenyiOrder(a)) == Approx(0.0).margin(1e-15));
  }
  CHECK(renyi_entropy({0.75, 0.25}, RenyiOrder(2.0)) == Approx(-std::log2(10.0 / 16.0)).margin(1e-14));
  CHECK(renyi_entropy({0.75, 0.25}, RenyiOrder(2.0)) == Approx(0.6780719051126377).margin(1e-14));
  // Continuity across the von Neumann band.
  const double h = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
  CHECK(renyi_entropy({0.75, 0.25}, RenyiOrder(1.0)) == Approx(h).margin(1e-15));
  CHECK(renyi_entropy({0.75, 0.25}, RenyiOrder(1.0 + 2e-6)) == Approx(h).margin(1e-5));
  CHECK_THROWS_AS(RenyiOrder(0.0), InvalidArgument);
  CHECK_THROWS_AS(RenyiOrder(-1.0), InvalidArgument);
}

TEST_CASE("f_alpha and g_alpha closed forms", "[measures]") {
  for (double a : {0.83, 1.0, 1.1, 2.0, 5.0}) {
    CHECK(f_alpha(0.0, RenyiOrder(a)) == Approx(0.0).margin(1e-15));
    CHECK(f_alpha(1.0, RenyiOrder(a)) == Approx(1.0).margin(1e-12));
    CHECK(g_alpha(1.0, RenyiOrder(a)) == Approx(1.0).margin(1e-12));
    CHECK(g_alpha(0.0, RenyiOrder(a)) == Approx(0.0).margin(1e-15));
  }
  CHECK(f_alpha(0.5, RenyiOrder(2.0)) == Approx(0.4150374992788438).margin(1e-14));
  CHECK(g_alpha(std::sqrt(0.5), RenyiOrder(2.0)) == Approx(0.4150374992788438).margin(1e-14));
  for (double x : unit_grid()) CHECK(f_alpha(x, RenyiOrder(2.0)) == Approx(oracle::f2(x)).margin(1e-13));
  CHECK(f_alpha(1.0 + 5e-10, RenyiOrder(2.0)) == Approx(1.0));
  CHECK_THROWS_AS(f_alpha(1.0 + 1e-8, RenyiOrder(2.0)), DomainError);
  CHECK_THROWS_AS(f_alpha(-1e-8, RenyiOrder(2.0)), DomainError);
  // Tiny arguments keep relative accuracy: f_2(x) ~ x / (2 ln 2).
  CHECK(f_alpha(1e-12, RenyiOrder(2.0)) == Approx(1e-12 / (2.0 * std::log(2.0))).epsilon(1e-6));
}

TEST_CASE("f_alpha on Schmidt-rank-2 states matches the Renyi entropy", "[measures]") {
  for (double l0 : {0.5, 0.6, 0.75, 0.9, 0.999, 1.0})
    for (double a : {0.83, 1.0, 1.2, 3.0}) {
      auto psi = two_level(l0);
      const double c = concurrence_pure(psi, {0}, {1}).value;
      CHECK(renyi_entropy(schmidt_spectrum(psi, {0}, {1}), RenyiOrder(a)) == Approx(f_alpha(c * c, RenyiOrder(a))).margin(1e-10));
    }
}

TEST_CASE("pure and two-qubit concurrence", "[measures]") {
  auto bell = two_level(0.5);
  CHECK(concurrence_pure(bell, {0}, {1}).value == Approx(1.0).margin(1e-14));
  CHECK(concurrence_pure(two_level(1.0), {0}, {1}).value == Approx(0.0).margin(1e-15));
  CHECK(concurrence_pure(two_level(0.75), {0}, {1}).value == Approx(std::sqrt(3.0) / 2.0).margin(1e-14));

  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 20; ++rep) {
    Vector v(4);
    for (Eigen::Index i = 0; i < 4; ++i) v(i) = Complex(g(rng), g(rng));
    v.normalize();
    PureState psi(v, SubsystemLayout::uniform(2, 2));
    auto rho = DensityOperator::from_pure(psi);
    CHECK(concurrence_two_qubit(rho).value == Approx(concurrence_pure(psi, {0}, {1}).value).margin(1e-10));
    // Mixed inputs: the tau route against the eigenvalue route.
    Vector w(4);
    for (Eigen::Index i = 0; i < 4; ++i) w(i) = Complex(g(rng), g(rng));
    w.normalize();
    Matrix m = 0.6 * v * v.adjoint() + 0.4 * w * w.adjoint();
    DensityOperator mixed(m, SubsystemLayout::uniform(2, 2));
    CHECK(concurrence_two_qubit(mixed).value == Approx(oracle::wootters(mixed.matrix())).margin(1e-9));
  }
  DensityOperator mm(Matrix::Identity(4, 4) * 0.25, SubsystemLayout::uniform(2, 2));
  CHECK(concurrence_two_qubit(mm).value == Approx(0.0).margin(1e-15));
  CHECK_THROWS_AS(concurrence_two_qubit(DensityOperator(Matrix::Identity(2, 2) * 0.5, SubsystemLayout::uniform(1, 2))),
                  InvalidArgument);
}

TEST_CASE("linear entropy", "[measures]") {
  CHECK(linear_entropy(DensityOperator::from_pure(two_level(0.3))).value == Approx(0.0).margin(1e-15));
  CHECK(linear_entropy(DensityOperator(Matrix::Identity(2, 2) * 0.5, SubsystemLayout::uniform(1, 2))).value == Approx(0.5));
  auto psi = build_gw_qudit(example2());
  CHECK(linear_entropy(partial_trace(psi, {0, 1, 2})).value == Approx(15.0 / 128.0).margin(1e-14));
}

TEST_CASE("linear entropy is additive within its triangle bounds on GW reductions", "[measures][property]") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    auto spec = oracle::random_gw(rng, 5);
    auto psi = build_gw_qudit(spec);
    auto ab = partial_trace(psi, {0, 1, 2});
    const double tab = linear_entropy(ab).value;
    const double ta = linear_entropy(partial_trace(psi, {0})).value;
    const double tb = linear_entropy(partial_trace(psi, {1, 2})).value;
    CHECK(std::abs(ta - tb) <= tab + 1e-12);
    CHECK(tab <= ta + tb + 1e-12);
  }
}

TEST_CASE("negativity", "[measures]") {
  CHECK(negativity(two_level(0.5), {0}, {1}).value == Approx(1.0).margin(1e-13));
  CHECK(negativity(two_level(1.0), {0}, {1}).value == Approx(0.0).margin(1e-14));
  CHECK(negativity(two_level(0.75), {0}, {1}).value == Approx(std::sqrt(3.0) / 2.0).margin(1e-12));
  CHECK(negativity(two_level(0.75), {0}, {1}).value ==
        Approx(concurrence_pure(two_level(0.75), {0}, {1}).value).margin(1e-12));
  // Blocks of a larger state: parties outside are traced out.
  auto psi = build_gw_qudit(example1());
  const double n12 = negativity(psi, {0}, {1}).value;
  CHECK(n12 > 0);
  CHECK(n12 <= concurrence_two_qubit(partial_trace(psi, {0, 1})).value + 1e-12);
}

TEST_CASE("example 1 pairwise concurrences", "[measures][gw]") {
  auto psi = build_gw_qudit(example1());
  CHECK(concurrence_two_qubit(partial_trace(psi, {0, 1})).value == Approx(std::sqrt(2.0) / 2.0).margin(1e-10));
  CHECK(concurrence_two_qubit(partial_trace(psi, {0, 2})).value == Approx(2.0 * std::sqrt(2.0) / 5.0).margin(1e-10));
  auto pc = gw_pairwise_concurrence(psi, {0}, {1});
  CHECK(pc.concurrence.value == Approx(std::sqrt(2.0) / 2.0).margin(1e-10));
  CHECK(pc.coa.value == pc.concurrence.value);
  CHECK(pc.coa.kind == MeasureKind::coa);

  auto one = gw_one_to_rest_concurrence_sq(psi, Partition({{0}, {1}, {2}}), 0);
  CHECK(one.direct_sq == Approx(0.82).margin(1e-10));
  CHECK(one.pair_sum_sq == Approx(0.82).margin(1e-10));
  CHECK(one.consistent);

  Vector vac = Vector::Zero(8);
  vac(0) = 1.0;
  PureState vacuum(vac, SubsystemLayout::uniform(3, 2), Provenance::gw_family);
  auto v = gw_one_to_rest_concurrence_sq(vacuum, Partition::singletons(3), 0);
  CHECK(v.direct_sq == Approx(0.0).margin(1e-15));
  CHECK(v.pair_sum_sq == Approx(0.0).margin(1e-15));
}

TEST_CASE("closed forms require GW provenance and the right orders", "[measures][gw]") {
  auto psi = build_gw_qudit(example1());
  PureState generic(psi.amplitudes(), psi.layout());
  CHECK_THROWS_AS(gw_pairwise_concurrence(generic, {0}, {1}), ProvenanceError);
  const Partition p({{0}, {1}, {2}});
  CHECK_THROWS_AS(renyi_entanglement_gw(psi, p, 0, RenyiOrder(0.8)), ApplicabilityError);
  CHECK_THROWS_AS(reoa_gw(psi, p, 0, RenyiOrder(2.0)), ApplicabilityError);
  CHECK(renyi_entanglement_gw(psi, p, 0, RenyiOrder(2.0)).value == Approx(0.7612131404128832).margin(1e-12));
  CHECK(renyi_entanglement_gw(psi, p, 0, RenyiOrder(1.1)).value == reoa_gw(psi, p, 0, RenyiOrder(1.1)).value);
  auto e12 = renyi_entanglement_gw(psi, Partition({{0}, {1}}), 0, RenyiOrder(1.2));
  CHECK(e12.value == Approx(f_alpha(0.5, RenyiOrder(1.2))).margin(1e-12));

  // A non-GW state with a three-dimensional local support is rejected by the block view.
  Vector v = Vector::Zero(9);
  v(0) = v(4) = v(8) = 1.0 / std::sqrt(3.0);
  PureState ghz3(v, SubsystemLayout::uniform(2, 3), Provenance::gw_family);
  CHECK_THROWS_AS(GwBlocks(ghz3, Partition::singletons(2)), ApplicabilityError);
}

TEST_CASE("CREN equals concurrence on GW pair reductions", "[measures][gw]") {
  auto psi = build_gw_qudit(example1());
  CHECK(cren_gw(psi, {0}, {1}).concurrence.value == Approx(std::sqrt(2.0) / 2.0).margin(1e-10));
  CHECK(cren_gw(psi, {0}, {2}).concurrence.value == Approx(2.0 * std::sqrt(2.0) / 5.0).margin(1e-10));
  CHECK(cren_gw(psi, {0}, {1}).concurrence.kind == MeasureKind::cren);
}

TEST_CASE("pair concurrence matches 2p|a_S||a_K| on random GW states", "[measures][gw][property]") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 3 + rep % 4;
    const std::size_t d = rep % 3 == 0 ? 3 : 2;
    auto spec = oracle::random_gw(rng, n, d, u(rng));
    auto part = oracle::random_partition(rng, n, 3);
    for (const bool mixed : {false, true}) {
      auto check = [&](const auto& state) {
        GwBlocks blocks(state, part);
        for (std::size_t s = 0; s < part.size(); ++s)
          for (std::size_t k = s + 1; k < part.size(); ++k)
            CHECK(blocks.pair_concurrence(s, k) ==
                  Approx(oracle::gw_pair_concurrence(spec, part.block(s), part.block(k))).margin(1e-9));
      };
      if (mixed)
        check(mix_with_vacuum(spec));
      else
        check(superpose_with_vacuum(spec));
    }
  }
}

TEST_CASE("one-to-rest concurrence square equals the pair sum", "[measures][gw][property]") {
  std::mt19937_64 rng(31);
  double worst = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 3 + rep % 3;
    auto spec = oracle::random_gw(rng, n);
    auto part = oracle::random_partition(rng, n);
    GwBlocks blocks(build_gw_qudit(spec), part);
    for (std::size_t s = 0; s < part.size(); ++s) {
      auto r = gw_one_to_rest_concurrence_sq(blocks, s);
      worst = std::max(worst, std::abs(r.direct_sq - r.pair_sum_sq));
      CHECK(r.consistent);
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("grid properties of f_alpha", "[measures][property]") {
  const auto xs = unit_grid();
  std::vector<double> all_orders, window;
  for (int i = 0; 0.83 + 0.07 * i <= 5.0; ++i) all_orders.push_back(0.83 + 0.07 * i);
  for (int i = 0; 0.8229 + 0.02 * i <= 1.3027; ++i) window.push_back(0.8229 + 0.02 * i);

  // Largest violation of each property; all must stay below 1e-12.
  double sq_convex = 0, sq_monotone = 0, superadd = 0, g_convex = 0, concave = 0, monotone = 0, subadd = 0;
  for (double a : all_orders) {
    const RenyiOrder o(a);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = i; j < xs.size(); ++j) {
        const double fx = f_alpha(xs[i], o), fy = f_alpha(xs[j], o);
        const double fm = f_alpha(0.5 * (xs[i] + xs[j]), o);
        sq_convex = std::max(sq_convex, fm * fm - 0.5 * (fx * fx + fy * fy));
        sq_monotone = std::max(sq_monotone, fx * fx - fy * fy);
        if (xs[i] + xs[j] <= 1.0) superadd = std::max(superadd, fx * fx + fy * fy - std::pow(f_alpha(xs[i] + xs[j], o), 2));
        const double gm = g_alpha(0.5 * (xs[i] + xs[j]), o);
        g_convex = std::max(g_convex, gm - 0.5 * (g_alpha(xs[i], o) + g_alpha(xs[j], o)));
      }
  }
  for (double a : window) {
    const RenyiOrder o(a);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = i; j < xs.size(); ++j) {
        const double fx = f_alpha(xs[i], o), fy = f_alpha(xs[j], o);
        concave = std::max(concave, 0.5 * (fx + fy) - f_alpha(0.5 * (xs[i] + xs[j]), o));
        monotone = std::max(monotone, fx - fy);
        if (xs[i] + xs[j] <= 1.0) subadd = std::max(subadd, f_alpha(xs[i] + xs[j], o) - fx - fy);
      }
  }
  CHECK(sq_convex <= 1e-12);
  CHECK(sq_monotone <= 1e-12);
  CHECK(superadd <= 1e-12);
  CHECK(g_convex <= 1e-12);
  CHECK(concave <= 1e-12);
  CHECK(monotone <= 1e-12);
  CHECK(subadd <= 1e-12);
}
