#pragma once

// Bound arithmetic for averaged multiplayer games in which Alice shares a
// d-dimensional system with n players: the trace-distance bound for pure states,
// the monogamy cap on pairwise Renyi entanglement, and the resulting gap bound.
// Logarithms are base 2.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "gwlab/error.hpp"
#include "gwlab/inequalities.hpp"
#include "gwlab/measures.hpp"
#include "gwlab/tensor.hpp"

namespace gwlab {

/// ||psi psi^dag - |00><00| ||_1 where |00> is the product of the leading
/// Schmidt vectors. Computed as 2 sqrt(1 - l_0) and by eigensolving the
/// difference in the Schmidt basis; the two must agree within 1e-9.
inline double trace_distance_to_vacuum(const PureState& psi, const PartySet& block_a, const PartySet& block_b) {
  const auto spec = schmidt_spectrum(psi, block_a, block_b);
  const auto& l = spec.coefficients;
  double tail = 0;  // 1 - l_0 without cancellation
  for (std::size_t i = l.size(); i-- > 1;) tail += l[i];
  const double closed = 2.0 * std::sqrt(tail);

  const auto r = static_cast<Eigen::Index>(l.size());
  Eigen::MatrixXd diff(r, r);
  Eigen::VectorXd v(r);
  for (Eigen::Index i = 0; i < r; ++i) v(i) = std::sqrt(l[static_cast<std::size_t>(i)]);
  diff = v * v.transpose();
  diff(0, 0) -= 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff, Eigen::EigenvaluesOnly);
  const double eig = es.eigenvalues().cwiseAbs().sum();
  if (std::abs(eig - closed) > 1e-9)
    throw ConsistencyError("trace_distance_to_vacuum: closed form and eigensolve disagree");
  return closed;
}

/// 2 sqrt(1 - l_0) <= 2 sqrt(2 E_alpha(psi)) for alpha >= 1.
inline InequalityReport check_trace_bound_renyi(const PureState& psi, const PartySet& block_a, const PartySet& block_b,
                                                const RenyiOrder& order) {
  const double lhs = trace_distance_to_vacuum(psi, block_a, block_b);
  const double e = renyi_entropy(schmidt_spectrum(psi, block_a, block_b), order);
  auto r = make_report("trace_bound_renyi", Direction::at_most, lhs, 2.0 * std::sqrt(2.0 * e), kEigensolveTolerance,
                       order.alpha() >= 1.0 ? Applicability::applicable : Applicability::out_of_window);
  r.params = {{"alpha", order.alpha()}, {"renyi_entropy", e}};
  return r;
}

/// -2 log[l0^alpha + (1-l0)^alpha] - (1-l0)(alpha-1), for l0 in [0, 1] and alpha >= 1.
inline double game_gap_fn(double lambda0, const RenyiOrder& order) {
  const double a = order.alpha();
  if (a < 1.0) throw DomainError("game_gap_fn: alpha must be >= 1");
  if (!(lambda0 >= 0.0 && lambda0 <= 1.0)) throw DomainError("game_gap_fn: lambda0 must lie in [0, 1]");
  return -2.0 * std::log2(std::pow(lambda0, a) + std::pow(1.0 - lambda0, a)) - (1.0 - lambda0) * (a - 1.0);
}

/// game_gap_fn at l0 = 1/d: -2 log[1 + (d-1)^alpha] + 2 alpha log d - (d-1)(alpha-1)/d.
inline double game_gap_endpoint(std::size_t d, const RenyiOrder& order) {
  if (d < 2) throw DomainError("game_gap_endpoint: d must be >= 2");
  const double a = order.alpha();
  const double dd = static_cast<double>(d);
  return -2.0 * std::log2(1.0 + std::pow(dd - 1.0, a)) + 2.0 * a * std::log2(dd) - (dd - 1.0) * (a - 1.0) / dd;
}

struct GapScan {
  double min_value = 0;
  double argmin_lambda0 = 0;
  double argmin_alpha = 0;
  std::size_t points = 0;
};

/// Minimum of game_gap_fn over l0 in [1/d, 1] and alpha in [alpha_lo, alpha_hi] on integer-indexed grids.
inline GapScan scan_game_gap(std::size_t d, double lambda_step, double alpha_lo, double alpha_hi, double alpha_step) {
  if (d < 2) throw InvalidArgument("scan_game_gap: d must be >= 2");
  if (!(lambda_step > 0 && alpha_step > 0) || alpha_lo < 1.0 || alpha_hi < alpha_lo)
    throw InvalidArgument("scan_game_gap: bad grid");
  const double lo = 1.0 / static_cast<double>(d);
  const auto nl = static_cast<std::size_t>(std::floor((1.0 - lo) / lambda_step + 1e-9));
  const auto na = static_cast<std::size_t>(std::floor((alpha_hi - alpha_lo) / alpha_step + 1e-9));
  GapScan out;
  out.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= na; ++j) {
    const RenyiOrder order(alpha_lo + static_cast<double>(j) * alpha_step);
    for (std::size_t i = 0; i <= nl + 1; ++i) {
      const double l0 = i <= nl ? std::min(lo + static_cast<double>(i) * lambda_step, 1.0) : 1.0;
      const double v = game_gap_fn(l0, order);
      ++out.points;
      if (v < out.min_value) {
        out.min_value = v;
        out.argmin_lambda0 = l0;
        out.argmin_alpha = order.alpha();
      }
    }
  }
  return out;
}

struct GameBoundInput {
  std::size_t n = 1;  // players B_1..B_n
  std::size_t d = 2;  // Alice's local dimension
};

struct GapBoundResult {
  double new_bound = 0;        // 2 sqrt(2) n^{-1/4} (log d)^{1/2}
  double reference_bound = 0;  // 3.1 n^{-1/4} d (log d)^{1/4}
  bool tighter = false;
};

inline GapBoundResult gap_bound(const GameBoundInput& in) {
  if (in.n < 1) throw InvalidArgument("gap_bound: n must be >= 1");
  if (in.d < 2) throw InvalidArgument("gap_bound: d must be >= 2");
  const double n4 = std::pow(static_cast<double>(in.n), -0.25);
  const double ld = std::log2(static_cast<double>(in.d));
  GapBoundResult r;
  r.new_bound = 2.0 * std::sqrt(2.0) * n4 * std::sqrt(ld);
  r.reference_bound = 3.1 * n4 * static_cast<double>(in.d) * std::pow(ld, 0.25);
  r.tighter = r.new_bound < r.reference_bound;
  return r;
}

/// sum_i E_alpha^2(A B_i) <= E_alpha^2(A | B_1..B_n) <= (log d_A)^2, block 0 of the
/// partition being Alice. Returns the two reports in that order.
template <QuantumState State>
std::vector<InequalityReport> check_monogamy_cap(const State& state, const Partition& partition, const RenyiOrder& order) {
  GwBlocks blocks(state, partition);
  const double d_alice = static_cast<double>(state.layout().subset_dim(partition.block(0)));
  auto left = check_monogamy_sq(blocks, 0, order);
  left.name = "monogamy_cap_pairs";
  const double e = std::sqrt(std::max(left.lhs, 0.0));
  const double cap = std::pow(std::log2(d_alice), 2.0);
  auto right = make_report("monogamy_cap_dimension", Direction::at_most, e * e, cap, kEigensolveTolerance);
  right.params = {{"alpha", order.alpha()}, {"d_alice", d_alice}};
  right.partition = partition.to_string();
  // The pairwise sum is the smaller side of the cap.
  std::swap(left.lhs, left.rhs);
  left.slack = left.rhs - left.lhs;
  return {left, right};
}

}  // namespace gwlab
