#pragma once

// Entanglement quantifiers: concurrence, negativity, linear entropy, Renyi
// entropy, the map f_alpha from squared concurrence to Renyi-alpha
// entanglement, and their closed forms on reductions of GW-family states.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gwlab/error.hpp"
#include "gwlab/partition.hpp"
#include "gwlab/tensor.hpp"

namespace gwlab {

/// (sqrt(7) - 1) / 2: lower end of the order range for the monogamy results.
inline constexpr double kAlphaLow = 0.82287565553229529525;
/// (sqrt(13) - 1) / 2: upper end of the window where f_alpha is concave.
inline constexpr double kAlphaHigh = 1.30277563773199464656;
/// Orders closer than this to 1 use the von Neumann entropy.
inline constexpr double kVonNeumannBand = 1e-6;

class RenyiOrder {
 public:
  explicit RenyiOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("Renyi order must be a positive finite number");
  }
  double alpha() const noexcept { return alpha_; }
  /// alpha >= (sqrt 7 - 1)/2
  bool ge_low() const noexcept { return alpha_ >= kAlphaLow; }
  /// alpha in [(sqrt 7 - 1)/2, (sqrt 13 - 1)/2]
  bool in_window() const noexcept { return alpha_ >= kAlphaLow && alpha_ <= kAlphaHigh; }
  bool is_von_neumann() const noexcept { return std::abs(alpha_ - 1.0) < kVonNeumannBand; }

 private:
  double alpha_;
};

enum class MeasureKind { concurrence, coa, negativity, cren, renyi_ent, reoa, linear_entropy };
enum class Method { closed_form, two_qubit_formula, oracle };

inline const char* to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::concurrence: return "concurrence";
    case MeasureKind::coa: return "coa";
    case MeasureKind::negativity: return "negativity";
    case MeasureKind::cren: return "cren";
    case MeasureKind::renyi_ent: return "renyi_ent";
    case MeasureKind::reoa: return "reoa";
    case MeasureKind::linear_entropy: return "linear_entropy";
  }
  return "?";
}

inline const char* to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::two_qubit_formula: return "two_qubit_formula";
    case Method::oracle: return "oracle";
  }
  return "?";
}

struct MeasureValue {
  double value = 0;
  MeasureKind kind = MeasureKind::concurrence;
  Method method = Method::closed_form;
};

// ---------------------------------------------------------------------------
// Scalar functions

/// S_alpha of a probability vector in bits. Zero entries are skipped; the
/// vector is renormalized to unit sum.
inline double renyi_entropy(std::vector<double> probs, const RenyiOrder& order) {
  double total = 0;
  for (double& l : probs) {
    l = std::max(l, 0.0);
    total += l;
  }
  if (!(total > 0)) throw InvalidArgument("renyi_entropy: empty spectrum");
  const double a = order.alpha();
  if (order.is_von_neumann()) {
    double h = 0;
    for (double l : probs)
      if (l > 0) h -= (l / total) * std::log2(l / total);
    return std::max(h, 0.0);
  }
  // sum l^a - 1 = sum l (l^(a-1) - 1), accurate for a near 1.
  double excess = 0;
  for (double l : probs)
    if (l > 0) excess += (l / total) * std::expm1((a - 1.0) * std::log(l / total));
  return std::max(std::log1p(excess) / ((1.0 - a) * std::log(2.0)), 0.0);
}

inline double renyi_entropy(const SchmidtSpectrum& spectrum, const RenyiOrder& order) {
  return renyi_entropy(spectrum.coefficients, order);
}

inline double renyi_entropy(const DensityOperator& rho, const RenyiOrder& order) {
  return renyi_entropy(rho.eigenvalues(), order);
}

namespace detail {
inline double clamp_unit(double x, const char* what) {
  if (std::isnan(x) || x > 1.0 + 1e-9 || x < -1e-9)
    throw DomainError(std::string(what) + ": argument " + std::to_string(x) + " outside [0, 1]");
  return std::clamp(x, 0.0, 1.0);
}
}  // namespace detail

/// Renyi-alpha entropy of the two-level spectrum {(1 -+ sqrt(1-x))/2}.
inline double f_alpha(double x, const RenyiOrder& order) {
  x = detail::clamp_unit(x, "f_alpha");
  const double r = std::sqrt(1.0 - x);
  const double s = x / (2.0 * (1.0 + r));  // (1 - r)/2 without cancellation
  if (s <= 0) return 0.0;
  const double a = order.alpha();
  // Spectrum {1-s, s}, with the large eigenvalue handled through log1p(-s).
  if (order.is_von_neumann()) return std::max(0.0, -((1.0 - s) * std::log1p(-s) + s * std::log(s)) / std::log(2.0));
  const double excess = std::expm1(a * std::log1p(-s)) + std::exp(a * std::log(s));
  return std::max(std::log1p(excess) / ((1.0 - a) * std::log(2.0)), 0.0);
}

/// g_alpha(y) = f_alpha(y^2)
inline double g_alpha(double y, const RenyiOrder& order) {
  y = detail::clamp_unit(y, "g_alpha");
  return f_alpha(y * y, order);
}

// ---------------------------------------------------------------------------
// Generic measures

/// C = sqrt(2 (1 - Tr rho_A^2)) across block_a | block_b.
inline MeasureValue concurrence_pure(const PureState& psi, const PartySet& block_a, const PartySet& block_b) {
  auto spec = schmidt_spectrum(psi, block_a, block_b);
  const auto& l = spec.coefficients;  // descending
  // 2 (1 - sum l^2) = 4 sum_{i<j} l_i l_j, accumulated from the small end.
  double pairs = 0, tail = 0;
  for (std::size_t i = l.size(); i-- > 0;) {
    pairs += l[i] * tail;
    tail += l[i];
  }
  return {2.0 * std::sqrt(std::max(pairs, 0.0)), MeasureKind::concurrence, Method::closed_form};
}

/// Two-qubit concurrence max(0, s1 - s2 - s3 - s4). The s_i are the singular
/// values of tau = V^T (Y (x) Y) V with rho = V V^dag; they equal the square
/// roots of the eigenvalues of rho (Y(x)Y) rho^* (Y(x)Y).
inline MeasureValue concurrence_two_qubit(const DensityOperator& rho) {
  if (rho.layout().dims() != std::vector<std::size_t>{2, 2})
    throw InvalidArgument("concurrence_two_qubit: layout must be (2, 2)");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  Matrix v = es.eigenvectors();
  for (Eigen::Index i = 0; i < 4; ++i) v.col(i) *= std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  Matrix yy = Matrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  Matrix tau = v.transpose() * yy * v;
  Eigen::JacobiSVD<Matrix> svd(tau);
  const auto& s = svd.singularValues();  // descending
  double c = s(0) - s(1) - s(2) - s(3);
  return {std::max(c, 0.0), MeasureKind::concurrence, Method::two_qubit_formula};
}

/// T(rho) = 1 - Tr rho^2
inline MeasureValue linear_entropy(const DensityOperator& rho) {
  return {std::max(0.0, 1.0 - rho.purity()), MeasureKind::linear_entropy, Method::closed_form};
}

/// ||rho^{T_A}||_1 - 1 across block_a | block_b; parties outside both blocks are traced out.
inline MeasureValue negativity(const DensityOperator& rho, PartySet block_a, PartySet block_b) {
  block_a = detail::sorted_unique(std::move(block_a));
  block_b = detail::sorted_unique(std::move(block_b));
  PartySet keep = block_a;
  keep.insert(keep.end(), block_b.begin(), block_b.end());
  keep = detail::sorted_unique(keep);
  if (keep.size() != block_a.size() + block_b.size()) throw InvalidArgument("negativity: blocks overlap");
  detail::check_party_set(keep, rho.layout().parties(), "negativity");
  DensityOperator reduced = keep.size() == rho.layout().parties() ? rho : partial_trace(rho, keep);
  Matrix m = reduced.matrix();
  for (auto p : block_a) {
    auto pos = static_cast<std::size_t>(std::lower_bound(keep.begin(), keep.end(), p) - keep.begin());
    m = partial_transpose(m, reduced.layout(), pos);
  }
  return {std::max(trace_norm(m) - 1.0, 0.0), MeasureKind::negativity, Method::closed_form};
}

inline MeasureValue negativity(const PureState& psi, PartySet block_a, PartySet block_b) {
  return negativity(DensityOperator::from_pure(psi), std::move(block_a), std::move(block_b));
}

// ---------------------------------------------------------------------------
// GW-family closed forms

/// A GW-family state viewed through a partition: the blocks are coarse-grained
/// into single parties and each is compressed onto its local support, which is
/// two-dimensional for this family. Parties outside the partition are traced out.
class GwBlocks {
 public:
  GwBlocks(const PureState& psi, const Partition& partition) : partition_(partition) {
    require_gw(psi.provenance());
    partition.validate(psi.layout().parties(), false);
    if (partition.is_complete(psi.layout().parties())) {
      auto compressed = compress_local_support(coarse_grain(psi, partition));
      check_qubits(compressed.layout);
      rho_ = DensityOperator::from_pure(compressed.state);
      pure_ = std::move(compressed.state);
    } else {
      init_mixed(partial_trace(psi, partition.parties()), remap(partition));
    }
  }

  GwBlocks(const DensityOperator& rho, const Partition& partition) : partition_(partition) {
    require_gw(rho.provenance());
    partition.validate(rho.layout().parties(), false);
    if (partition.is_complete(rho.layout().parties()))
      init_mixed(rho, partition);
    else
      init_mixed(partial_trace(rho, partition.parties()), remap(partition));
  }

  std::size_t size() const noexcept { return rho_->layout().parties(); }
  bool is_pure() const noexcept { return pure_.has_value(); }
  const Partition& partition() const noexcept { return partition_; }
  /// The compressed state, one qubit per block.
  const DensityOperator& state() const { return *rho_; }

  /// C(rho_{P_s P_k}) from the two-qubit formula on the compressed pair.
  double pair_concurrence(std::size_t s, std::size_t k) const { return group_concurrence({s}, {k}); }

  /// Concurrence between the merged blocks `a` and the merged blocks `b` (block indices).
  double group_concurrence(PartySet a, PartySet b) const {
    a = detail::sorted_unique(std::move(a));
    b = detail::sorted_unique(std::move(b));
    PartySet keep = a;
    keep.insert(keep.end(), b.begin(), b.end());
    keep = detail::sorted_unique(keep);
    if (keep.size() != a.size() + b.size()) throw InvalidArgument("group_concurrence: block sets overlap");
    detail::check_party_set(keep, size(), "group_concurrence");
    if (keep.size() == size() && pure_) return concurrence_pure(*pure_, a, b).value;
    DensityOperator reduced = keep.size() == size() ? *rho_ : partial_trace(*rho_, keep);
    auto position = [&](std::size_t blk) {
      return static_cast<std::size_t>(std::lower_bound(keep.begin(), keep.end(), blk) - keep.begin());
    };
    PartySet pa, pb;
    for (auto x : a) pa.push_back(position(x));
    for (auto x : b) pb.push_back(position(x));
    auto pair = compress_local_support(coarse_grain(reduced, Partition({pa, pb})));
    check_qubits(pair.layout);
    return concurrence_two_qubit(pair.state).value;
  }

  /// C(rho_{P_s | union of the other blocks}).
  double one_to_rest_concurrence(std::size_t s) const {
    if (size() < 2) return 0.0;
    PartySet rest = detail::complement({s}, size());
    return group_concurrence({s}, rest);
  }

 private:
  static void require_gw(Provenance p) {
    if (p != Provenance::gw_family) throw ProvenanceError("closed form requires a GW-family state");
  }

  static void check_qubits(const SubsystemLayout& layout) {
    for (auto d : layout.dims())
      if (d != 2) throw ApplicabilityError("local support of a block exceeds two dimensions; not a GW-family reduction");
  }

  static Partition remap(const Partition& partition) {
    PartySet keep = partition.parties();
    std::vector<PartySet> blocks;
    for (const auto& b : partition.blocks()) {
      PartySet nb;
      for (auto p : b) nb.push_back(static_cast<std::size_t>(std::lower_bound(keep.begin(), keep.end(), p) - keep.begin()));
      blocks.push_back(std::move(nb));
    }
    return Partition(std::move(blocks));
  }

  void init_mixed(const DensityOperator& rho, const Partition& partition) {
    auto compressed = compress_local_support(coarse_grain(rho, partition));
    check_qubits(compressed.layout);
    rho_ = std::move(compressed.state);
    if (rho_->purity() > 1.0 - 1e-12) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(rho_->matrix());
      Vector top = es.eigenvectors().col(es.eigenvectors().cols() - 1).normalized();
      pure_ = PureState(std::move(top), rho_->layout(), Provenance::gw_family);
    }
  }

  Partition partition_;
  std::optional<DensityOperator> rho_;
  std::optional<PureState> pure_;
};

struct PairConcurrence {
  MeasureValue concurrence;
  MeasureValue coa;  // equal to the concurrence on this family
};

template <class State>
concept QuantumState = std::same_as<State, PureState> || std::same_as<State, DensityOperator>;

template <QuantumState State>
PairConcurrence gw_pairwise_concurrence(const State& state, const PartySet& block_s, const PartySet& block_k) {
  GwBlocks blocks(state, Partition({block_s, block_k}));
  const double c = blocks.pair_concurrence(0, 1);
  return {{c, MeasureKind::concurrence, Method::two_qubit_formula}, {c, MeasureKind::coa, Method::closed_form}};
}

/// Both sides of C^2_{P_s | rest} = sum_{k != s} C^2_{P_s P_k}.
struct OneToRestConcurrence {
  double direct_sq = 0;
  double pair_sum_sq = 0;
  std::vector<double> pair_sq;  // indexed by block; entry s is 0
  bool consistent = true;       // |direct - sum| <= tolerance; false is a finding
  static constexpr double tolerance = 1e-9;
};

inline OneToRestConcurrence gw_one_to_rest_concurrence_sq(const GwBlocks& blocks, std::size_t s) {
  if (s >= blocks.size()) throw InvalidArgument("one_to_rest: block index out of range");
  OneToRestConcurrence out;
  const double c = blocks.one_to_rest_concurrence(s);
  out.direct_sq = c * c;
  out.pair_sq.assign(blocks.size(), 0.0);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (k == s) continue;
    const double ck = blocks.pair_concurrence(s, k);
    out.pair_sq[k] = ck * ck;
    out.pair_sum_sq += ck * ck;
  }
  out.consistent = std::abs(out.direct_sq - out.pair_sum_sq) <= OneToRestConcurrence::tolerance;
  return out;
}

template <QuantumState State>
OneToRestConcurrence gw_one_to_rest_concurrence_sq(const State& state, const Partition& partition, std::size_t s) {
  return gw_one_to_rest_concurrence_sq(GwBlocks(state, partition), s);
}

/// E_alpha(rho_{P_s | rest}) = f_alpha(C^2) for alpha >= (sqrt 7 - 1)/2.
inline MeasureValue renyi_entanglement_gw(const GwBlocks& blocks, std::size_t s, const RenyiOrder& order) {
  if (!order.ge_low())
    throw ApplicabilityError("renyi_entanglement_gw: alpha = " + std::to_string(order.alpha()) + " below (sqrt 7 - 1)/2");
  const double c = blocks.one_to_rest_concurrence(s);
  return {f_alpha(c * c, order), MeasureKind::renyi_ent, Method::closed_form};
}

template <QuantumState State>
MeasureValue renyi_entanglement_gw(const State& state, const Partition& partition, std::size_t s, const RenyiOrder& order) {
  return renyi_entanglement_gw(GwBlocks(state, partition), s, order);
}

/// E^a_alpha(rho_{P_s | rest}) by the same formula, for alpha in the concave window.
inline MeasureValue reoa_gw(const GwBlocks& blocks, std::size_t s, const RenyiOrder& order) {
  if (!order.in_window())
    throw ApplicabilityError("reoa_gw: alpha = " + std::to_string(order.alpha()) + " outside [(sqrt 7 - 1)/2, (sqrt 13 - 1)/2]");
  const double c = blocks.one_to_rest_concurrence(s);
  return {f_alpha(c * c, order), MeasureKind::reoa, Method::closed_form};
}

template <QuantumState State>
MeasureValue reoa_gw(const State& state, const Partition& partition, std::size_t s, const RenyiOrder& order) {
  return reoa_gw(GwBlocks(state, partition), s, order);
}

/// CREN of a GW pair reduction; equals the concurrence because every pure
/// component has Schmidt rank at most two.
template <QuantumState State>
PairConcurrence cren_gw(const State& state, const PartySet& block_a, const PartySet& block_b) {
  GwBlocks blocks(state, Partition({block_a, block_b}));
  auto ev = blocks.state().eigenvalues();
  const auto rank = std::count_if(ev.begin(), ev.end(), [](double l) { return l > 1e-10; });
  if (rank > 2) throw ApplicabilityError("cren_gw: compressed pair reduction has rank > 2");
  const double c = blocks.pair_concurrence(0, 1);
  return {{c, MeasureKind::cren, Method::closed_form}, {c, MeasureKind::cren, Method::closed_form}};
}

}  // namespace gwlab
