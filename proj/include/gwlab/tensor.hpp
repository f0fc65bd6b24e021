#pragma once

// Dense linear algebra over multipartite tensor-product spaces.
//
// Index convention: the composite index of |i_0 i_1 ... i_{n-1}> is
// sum_k i_k * prod_{j>k} d_j, i.e. party 0 is the most significant digit.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gwlab/error.hpp"
#include "gwlab/partition.hpp"

namespace gwlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr std::size_t kDefaultDimensionCap = std::size_t{1} << 20;
inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
/// Eigenvalues in [-kEigenClamp, 0) are float noise and read as 0.
inline constexpr double kEigenClamp = 1e-10;
/// Eigenvalues above this count towards the support of a local marginal.
inline constexpr double kSupportTolerance = 1e-13;

/// Ordered list of local dimensions.
class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  explicit SubsystemLayout(std::vector<std::size_t> dims, std::size_t cap = kDefaultDimensionCap)
      : dims_(std::move(dims)) {
    if (dims_.empty()) throw InvalidArgument("layout: no parties");
    std::size_t total = 1;
    for (auto d : dims_) {
      if (d < 2) throw InvalidArgument("layout: local dimension " + std::to_string(d) + " < 2");
      if (total > cap / d) throw InvalidArgument("layout: total dimension exceeds cap " + std::to_string(cap));
      total *= d;
    }
    total_ = total;
  }

  static SubsystemLayout uniform(std::size_t n, std::size_t d) { return SubsystemLayout(std::vector<std::size_t>(n, d)); }

  std::size_t parties() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t k) const { return dims_.at(k); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t total_dim() const noexcept { return total_; }

  /// prod_{j>k} d_j
  std::size_t stride(std::size_t k) const {
    std::size_t s = 1;
    for (std::size_t j = k + 1; j < dims_.size(); ++j) s *= dims_[j];
    return s;
  }

  std::size_t subset_dim(const PartySet& parties) const {
    std::size_t s = 1;
    for (auto p : parties) s *= dim(p);
    return s;
  }

  SubsystemLayout restrict_to(const PartySet& parties) const {
    std::vector<std::size_t> d;
    for (auto p : parties) d.push_back(dim(p));
    return SubsystemLayout(std::move(d));
  }

  friend bool operator==(const SubsystemLayout& a, const SubsystemLayout& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 0;
};

/// Whether a state is known to belong to the generalized W-class family
/// (GW state, optionally with vacuum, or a reduction / coarse-graining of one).
enum class Provenance { generic, gw_family };

class PureState {
 public:
  PureState(Vector amplitudes, SubsystemLayout layout, Provenance provenance = Provenance::generic)
      : amplitudes_(std::move(amplitudes)), layout_(std::move(layout)), provenance_(provenance) {
    if (static_cast<std::size_t>(amplitudes_.size()) != layout_.total_dim())
      throw InvalidArgument("pure state: amplitude count does not match layout");
    if (std::abs(amplitudes_.norm() - 1.0) > kNormTolerance)
      throw InvalidArgument("pure state: norm deviates from 1 by " + std::to_string(std::abs(amplitudes_.norm() - 1.0)));
  }

  const Vector& amplitudes() const noexcept { return amplitudes_; }
  const SubsystemLayout& layout() const noexcept { return layout_; }
  Provenance provenance() const noexcept { return provenance_; }
  bool is_gw() const noexcept { return provenance_ == Provenance::gw_family; }

 private:
  Vector amplitudes_;
  SubsystemLayout layout_;
  Provenance provenance_;
};

/// Returns eigenvalues (ascending) of a Hermitian matrix with the noise clamp applied.
inline std::vector<double> clamped_eigenvalues(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  std::vector<double> out(static_cast<std::size_t>(es.eigenvalues().size()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = es.eigenvalues()(static_cast<Eigen::Index>(i));
    if (v < -kEigenClamp) throw ConsistencyError("negative eigenvalue " + std::to_string(v) + " in a density operator");
    out[i] = std::max(v, 0.0);
  }
  return out;
}

class DensityOperator {
 public:
  DensityOperator(Matrix matrix, SubsystemLayout layout, Provenance provenance = Provenance::generic)
      : layout_(std::move(layout)), provenance_(provenance) {
    const auto D = static_cast<Eigen::Index>(layout_.total_dim());
    if (matrix.rows() != D || matrix.cols() != D) throw InvalidArgument("density operator: shape does not match layout");
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance)
      throw InvalidArgument("density operator: not Hermitian");
    if (std::abs(matrix.trace() - Complex(1.0)) > kTraceTolerance)
      throw InvalidArgument("density operator: trace deviates from 1");
    matrix_ = (matrix + matrix.adjoint()) * 0.5;
  }

  static DensityOperator from_pure(const PureState& psi) {
    const Vector& a = psi.amplitudes();
    return DensityOperator(a * a.adjoint(), psi.layout(), psi.provenance());
  }

  const Matrix& matrix() const noexcept { return matrix_; }
  const SubsystemLayout& layout() const noexcept { return layout_; }
  Provenance provenance() const noexcept { return provenance_; }
  bool is_gw() const noexcept { return provenance_ == Provenance::gw_family; }

  /// Eigenvalues in ascending order, clamped; throws on eigenvalues below -1e-10.
  std::vector<double> eigenvalues() const { return clamped_eigenvalues(matrix_); }

  double purity() const { return (matrix_ * matrix_).trace().real(); }

 private:
  Matrix matrix_;
  SubsystemLayout layout_;
  Provenance provenance_;
};

/// Descending nonnegative Schmidt coefficients (squared singular values).
struct SchmidtSpectrum {
  std::vector<double> coefficients;

  /// Number of coefficients above `tol`.
  std::size_t rank(double tol = 1e-14) const {
    return static_cast<std::size_t>(std::count_if(coefficients.begin(), coefficients.end(), [tol](double l) { return l > tol; }));
  }
};

namespace detail {

inline void check_party_set(const PartySet& set, std::size_t n, const char* what) {
  if (set.empty()) throw InvalidArgument(std::string(what) + ": empty party set");
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i] >= n) throw InvalidArgument(std::string(what) + ": party " + std::to_string(set[i]) + " out of range");
    if (i && set[i] <= set[i - 1]) throw InvalidArgument(std::string(what) + ": party set must be sorted and unique");
  }
}

inline PartySet sorted_unique(PartySet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline PartySet complement(const PartySet& set, std::size_t n) {
  PartySet out;
  for (std::size_t k = 0; k < n; ++k)
    if (!std::binary_search(set.begin(), set.end(), k)) out.push_back(k);
  return out;
}

/// index_map[old_index] = new_index when new party j is old party order[j].
inline std::vector<std::size_t> permutation_map(const SubsystemLayout& layout, std::span<const std::size_t> order) {
  const std::size_t n = layout.parties();
  if (order.size() != n) throw InvalidArgument("permutation: order length mismatch");
  std::vector<std::size_t> new_stride_of_old(n);
  {
    std::size_t s = 1;
    for (std::size_t j = n; j-- > 0;) {
      new_stride_of_old.at(order[j]) = s;
      s *= layout.dim(order[j]);
    }
  }
  const std::size_t D = layout.total_dim();
  std::vector<std::size_t> map(D);
  std::vector<std::size_t> digit(n, 0);
  for (std::size_t i = 0; i < D; ++i) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < n; ++k) idx += digit[k] * new_stride_of_old[k];
    map[i] = idx;
    for (std::size_t k = n; k-- > 0;) {  // increment big-endian counter
      if (++digit[k] < layout.dim(k)) break;
      digit[k] = 0;
    }
  }
  return map;
}

}  // namespace detail

/// Reorders parties: new party j is old party order[j].
inline Vector permute_parties(const Vector& v, const SubsystemLayout& layout, std::span<const std::size_t> order) {
  auto map = detail::permutation_map(layout, order);
  Vector out(v.size());
  for (std::size_t i = 0; i < map.size(); ++i) out(static_cast<Eigen::Index>(map[i])) = v(static_cast<Eigen::Index>(i));
  return out;
}

inline Matrix permute_parties(const Matrix& m, const SubsystemLayout& layout, std::span<const std::size_t> order) {
  auto map = detail::permutation_map(layout, order);
  const auto D = static_cast<Eigen::Index>(map.size());
  Matrix out(D, D);
  for (Eigen::Index j = 0; j < D; ++j)
    for (Eigen::Index i = 0; i < D; ++i)
      out(static_cast<Eigen::Index>(map[static_cast<std::size_t>(i)]), static_cast<Eigen::Index>(map[static_cast<std::size_t>(j)])) = m(i, j);
  return out;
}

inline SubsystemLayout permuted_layout(const SubsystemLayout& layout, std::span<const std::size_t> order) {
  std::vector<std::size_t> d;
  for (auto p : order) d.push_back(layout.dim(p));
  return SubsystemLayout(std::move(d));
}

/// Coefficient matrix C with psi = sum C(a, b) |a>|b>, `block` parties (sorted)
/// as the row index and the complement as the column index.
inline Matrix coefficient_matrix(const PureState& psi, const PartySet& block) {
  const auto& layout = psi.layout();
  detail::check_party_set(block, layout.parties(), "coefficient_matrix");
  PartySet order = block;
  PartySet rest = detail::complement(block, layout.parties());
  order.insert(order.end(), rest.begin(), rest.end());
  Vector v = permute_parties(psi.amplitudes(), layout, order);
  const auto rows = static_cast<Eigen::Index>(layout.subset_dim(block));
  const auto cols = static_cast<Eigen::Index>(layout.total_dim()) / rows;
  // composite index = row * cols + col; Eigen maps are column-major.
  Eigen::Map<const Matrix> transposed(v.data(), cols, rows);
  return transposed.transpose();
}

inline DensityOperator partial_trace(const PureState& psi, PartySet keep) {
  keep = detail::sorted_unique(std::move(keep));
  detail::check_party_set(keep, psi.layout().parties(), "partial_trace");
  Matrix c = coefficient_matrix(psi, keep);
  Matrix rho = c * c.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(std::move(rho), psi.layout().restrict_to(keep), psi.provenance());
}

inline DensityOperator partial_trace(const DensityOperator& rho, PartySet keep) {
  keep = detail::sorted_unique(std::move(keep));
  const auto& layout = rho.layout();
  detail::check_party_set(keep, layout.parties(), "partial_trace");
  PartySet order = keep;
  PartySet rest = detail::complement(keep, layout.parties());
  order.insert(order.end(), rest.begin(), rest.end());
  Matrix m = permute_parties(rho.matrix(), layout, order);
  const auto dk = static_cast<Eigen::Index>(layout.subset_dim(keep));
  const auto dr = static_cast<Eigen::Index>(layout.total_dim()) / dk;
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index j = 0; j < dk; ++j)
    for (Eigen::Index i = 0; i < dk; ++i) {
      Complex s = 0;
      for (Eigen::Index r = 0; r < dr; ++r) s += m(i * dr + r, j * dr + r);
      out(i, j) = s;
    }
  out /= out.trace().real();
  return DensityOperator(std::move(out), layout.restrict_to(keep), rho.provenance());
}

/// Partial transpose of `m` with respect to one party.
inline Matrix partial_transpose(const Matrix& m, const SubsystemLayout& layout, std::size_t party) {
  if (party >= layout.parties()) throw InvalidArgument("partial_transpose: party out of range");
  const auto D = static_cast<Eigen::Index>(layout.total_dim());
  if (m.rows() != D || m.cols() != D) throw InvalidArgument("partial_transpose: shape mismatch");
  const auto stride = static_cast<Eigen::Index>(layout.stride(party));
  const auto d = static_cast<Eigen::Index>(layout.dim(party));
  Matrix out(D, D);
  for (Eigen::Index j = 0; j < D; ++j) {
    const Eigen::Index dj = (j / stride) % d;
    for (Eigen::Index i = 0; i < D; ++i) {
      const Eigen::Index di = (i / stride) % d;
      out(i + (dj - di) * stride, j + (di - dj) * stride) = m(i, j);
    }
  }
  return out;
}

inline Matrix partial_transpose(const DensityOperator& rho, std::size_t party) {
  return partial_transpose(rho.matrix(), rho.layout(), party);
}

/// Sum of singular values; Hermitian input takes the eigenvalue route.
inline double trace_norm(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("trace_norm: matrix is not square");
  if (m.size() == 0) return 0.0;
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() <= kHermitianTolerance) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

/// Schmidt coefficients across block_a | block_b (which must partition all parties).
inline SchmidtSpectrum schmidt_spectrum(const PureState& psi, PartySet block_a, PartySet block_b) {
  const std::size_t n = psi.layout().parties();
  block_a = detail::sorted_unique(std::move(block_a));
  block_b = detail::sorted_unique(std::move(block_b));
  detail::check_party_set(block_a, n, "schmidt_spectrum");
  detail::check_party_set(block_b, n, "schmidt_spectrum");
  if (block_b != detail::complement(block_a, n))
    throw InvalidArgument("schmidt_spectrum: blocks overlap or do not cover all parties");
  Matrix c = coefficient_matrix(psi, block_a);
  Eigen::BDCSVD<Matrix> svd(c);
  const auto& s = svd.singularValues();
  SchmidtSpectrum out;
  double total = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    out.coefficients.push_back(s(i) * s(i));
    total += s(i) * s(i);
  }
  for (auto& l : out.coefficients) l /= total;
  std::sort(out.coefficients.begin(), out.coefficients.end(), std::greater<>());
  return out;
}

/// Result of grouping parties into blocks: `order` lists the old parties
/// block-contiguously, `layout` has one party per block.
struct CoarseGraining {
  SubsystemLayout layout;
  std::vector<std::size_t> order;
};

inline CoarseGraining coarse_grain(const SubsystemLayout& layout, const Partition& partition) {
  partition.validate(layout.parties(), /*require_complete=*/true);
  CoarseGraining cg;
  std::vector<std::size_t> dims;
  for (const auto& b : partition.blocks()) {
    cg.order.insert(cg.order.end(), b.begin(), b.end());
    dims.push_back(layout.subset_dim(b));
  }
  cg.layout = SubsystemLayout(std::move(dims));
  return cg;
}

inline PureState coarse_grain(const PureState& psi, const Partition& partition) {
  auto cg = coarse_grain(psi.layout(), partition);
  return PureState(permute_parties(psi.amplitudes(), psi.layout(), cg.order), cg.layout, psi.provenance());
}

inline DensityOperator coarse_grain(const DensityOperator& rho, const Partition& partition) {
  auto cg = coarse_grain(rho.layout(), partition);
  return DensityOperator(permute_parties(rho.matrix(), rho.layout(), cg.order), cg.layout, rho.provenance());
}

namespace detail {

/// Applies `op` (rows x d_party) to one party of every column of `m`.
inline Matrix apply_local(const Matrix& m, const SubsystemLayout& layout, std::size_t party, const Matrix& op) {
  const auto d = static_cast<Eigen::Index>(layout.dim(party));
  if (op.cols() != d) throw InvalidArgument("apply_local: operator shape mismatch");
  const auto right = static_cast<Eigen::Index>(layout.stride(party));
  const auto left = static_cast<Eigen::Index>(layout.total_dim()) / (d * right);
  const Eigen::Index d_new = op.rows();
  Matrix out = Matrix::Zero(left * d_new * right, m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index l = 0; l < left; ++l)
      for (Eigen::Index r = 0; r < right; ++r)
        for (Eigen::Index a = 0; a < d_new; ++a) {
          Complex s = 0;
          for (Eigen::Index b = 0; b < d; ++b) s += op(a, b) * m((l * d + b) * right + r, c);
          out((l * d_new + a) * right + r, c) = s;
        }
  return out;
}

/// Orthonormal basis (columns) of the support of a local marginal, at least two
/// columns wide. The first column is the projection of |0> onto the support when
/// that projection is nonzero.
inline Matrix local_support_isometry(const Matrix& marginal) {
  const Eigen::Index d = marginal.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> es(marginal);
  std::vector<Vector> support;
  for (Eigen::Index i = d; i-- > 0;)
    if (es.eigenvalues()(i) > kSupportTolerance) support.push_back(es.eigenvectors().col(i));
  if (static_cast<Eigen::Index>(support.size()) >= d) return Matrix::Identity(d, d);

  auto orthonormalize_against = [](Vector v, const std::vector<Vector>& basis) {
    for (const auto& b : basis) v -= b * b.dot(v);
    return v;
  };

  std::vector<Vector> basis;
  Vector vac = Vector::Zero(d);
  vac(0) = 1.0;
  Vector proj = Vector::Zero(d);
  for (const auto& s : support) proj += s * s.dot(vac);
  if (proj.norm() > 1e-8) basis.push_back(proj.normalized());
  for (const auto& s : support) {
    if (basis.size() == support.size()) break;
    Vector r = orthonormalize_against(s, basis);
    if (r.norm() > 1e-8) basis.push_back(r.normalized());
  }
  // Pad to two dimensions, preferring the vacuum direction.
  for (Eigen::Index k = 0; basis.size() < 2 && k < d; ++k) {
    Vector e = Vector::Zero(d);
    e(k) = 1.0;
    Vector r = orthonormalize_against(e, basis);
    if (r.norm() > 0.5) basis.push_back(r.normalized());
  }
  if (static_cast<Eigen::Index>(basis.size()) >= d) return Matrix::Identity(d, d);
  Matrix v(d, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) v.col(static_cast<Eigen::Index>(i)) = basis[i];
  return v;
}

inline Matrix local_marginal(const Matrix& rho, const SubsystemLayout& layout, std::size_t party) {
  return partial_trace(DensityOperator(rho, layout), {party}).matrix();
}

}  // namespace detail

/// A state mapped onto the local supports of its parties, together with the
/// isometries V_k (columns span the support of party k) that were used.
template <class State>
struct Compressed {
  State state;
  SubsystemLayout layout;
  std::vector<Matrix> isometries;
};

inline Compressed<PureState> compress_local_support(const PureState& psi) {
  SubsystemLayout layout = psi.layout();
  Matrix amps = psi.amplitudes();
  std::vector<Matrix> isos;
  for (std::size_t k = 0; k < layout.parties(); ++k) {
    Matrix marginal = partial_trace(PureState(amps.col(0), layout), {k}).matrix();
    Matrix v = detail::local_support_isometry(marginal);
    isos.push_back(v);
    if (v.cols() == v.rows()) continue;
    amps = detail::apply_local(amps, layout, k, v.adjoint());
    auto dims = layout.dims();
    dims[k] = static_cast<std::size_t>(v.cols());
    layout = SubsystemLayout(dims);
  }
  Vector out = amps.col(0);
  out.normalize();
  PureState state(std::move(out), layout, psi.provenance());
  return {std::move(state), std::move(layout), std::move(isos)};
}

inline Compressed<DensityOperator> compress_local_support(const DensityOperator& rho) {
  SubsystemLayout layout = rho.layout();
  Matrix m = rho.matrix();
  std::vector<Matrix> isos;
  for (std::size_t k = 0; k < layout.parties(); ++k) {
    Matrix v = detail::local_support_isometry(detail::local_marginal(m, layout, k));
    isos.push_back(v);
    if (v.cols() == v.rows()) continue;
    Matrix half = detail::apply_local(m, layout, k, v.adjoint());            // V^dag rho
    Matrix full = detail::apply_local(Matrix(half.adjoint()), layout, k, v.adjoint());  // V^dag (V^dag rho)^dag
    auto dims = layout.dims();
    dims[k] = static_cast<std::size_t>(v.cols());
    layout = SubsystemLayout(dims);
    m = full.adjoint();
    m = (m + m.adjoint()) * 0.5;
    m /= m.trace().real();
  }
  DensityOperator state(std::move(m), layout, rho.provenance());
  return {std::move(state), std::move(layout), std::move(isos)};
}

}  // namespace gwlab
