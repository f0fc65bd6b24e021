#pragma once

// Constructors for generalized W-class (GW) states: the pure qudit family,
// its superposition and mixture with the vacuum |0...0>, and the purification
// of the mixture, which is again a GW state on one more party.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gwlab/error.hpp"
#include "gwlab/tensor.hpp"

namespace gwlab {

/// Input amplitudes are renormalized when their norm is within this of 1, rejected otherwise.
inline constexpr double kInputNormTolerance = 1e-10;

/// Amplitude table a_{si} (s = party, i = 1..d-1) plus the weight p that
/// multiplies |W> when the state is combined with the vacuum:
///   sqrt(p)|W> + sqrt(1-p)|0...0>   or   p|W><W| + (1-p)|0...0><0...0|.
/// p = 1 is the bare GW state. (The wire format calls p "vacuum_weight".)
class GWSpec {
 public:
  GWSpec(std::size_t n, std::size_t d, std::vector<Complex> amplitudes, double p = 1.0)
      : n_(n), d_(d), amplitudes_(std::move(amplitudes)), p_(p) {
    if (n_ < 1) throw InvalidArgument("GW spec: n must be >= 1");
    if (d_ < 2) throw InvalidArgument("GW spec: d must be >= 2");
    if (amplitudes_.size() != n_ * (d_ - 1))
      throw InvalidArgument("GW spec: expected " + std::to_string(n_ * (d_ - 1)) + " amplitudes, got " +
                            std::to_string(amplitudes_.size()));
    if (!(p_ >= 0.0 && p_ <= 1.0)) throw InvalidArgument("GW spec: weight p must lie in [0, 1]");
    double norm2 = 0;
    for (const auto& a : amplitudes_) norm2 += std::norm(a);
    const double norm = std::sqrt(norm2);
    if (!(std::abs(norm - 1.0) <= kInputNormTolerance))
      throw InvalidArgument("GW spec: amplitudes not normalized (norm " + std::to_string(norm) + ")");
    for (auto& a : amplitudes_) a /= norm;
  }

  /// Qubit convenience: one amplitude per party.
  static GWSpec qubits(std::vector<Complex> a, double p = 1.0) {
    const std::size_t n = a.size();
    return GWSpec(n, 2, std::move(a), p);
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }
  double p() const noexcept { return p_; }
  const std::vector<Complex>& amplitudes() const noexcept { return amplitudes_; }
  /// a_{s i} with party s in [0, n) and excitation i in [1, d).
  Complex amplitude(std::size_t s, std::size_t i) const { return amplitudes_.at(s * (d_ - 1) + (i - 1)); }

  SubsystemLayout layout() const { return SubsystemLayout::uniform(n_, d_); }

  GWSpec with_weight(double p) const { return GWSpec(n_, d_, amplitudes_, p); }

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<Complex> amplitudes_;
  double p_;
};

namespace detail {

inline Vector w_vector(const GWSpec& spec) {
  const auto layout = spec.layout();
  Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  for (std::size_t s = 0; s < spec.n(); ++s)
    for (std::size_t i = 1; i < spec.d(); ++i)
      v(static_cast<Eigen::Index>(i * layout.stride(s))) += spec.amplitude(s, i);
  return v;
}

}  // namespace detail

/// sum_j a_j |0..1_j..0> on n qubits.
inline PureState build_w_qubit(std::span<const Complex> a) {
  return PureState(detail::w_vector(GWSpec::qubits({a.begin(), a.end()})), SubsystemLayout::uniform(a.size(), 2),
                   Provenance::gw_family);
}

/// sum_{s,i} a_{si} |0..i_s..0>; the weight p of the spec is ignored.
inline PureState build_gw_qudit(const GWSpec& spec) {
  return PureState(detail::w_vector(spec), spec.layout(), Provenance::gw_family);
}

/// sqrt(p)|W> + sqrt(1-p)|0...0>
inline PureState superpose_with_vacuum(const GWSpec& spec) {
  Vector v = std::sqrt(spec.p()) * detail::w_vector(spec);
  v(0) += std::sqrt(1.0 - spec.p());
  return PureState(std::move(v), spec.layout(), Provenance::gw_family);
}

/// p|W><W| + (1-p)|0...0><0...0|
inline DensityOperator mix_with_vacuum(const GWSpec& spec) {
  Vector w = detail::w_vector(spec);
  Matrix rho = spec.p() * (w * w.adjoint());
  rho(0, 0) += 1.0 - spec.p();
  return DensityOperator(std::move(rho), spec.layout(), Provenance::gw_family);
}

/// Purification of mix_with_vacuum(base) on an extra party A_{n+1} in state |x> = sum_i x_i |i>.
class PurificationSpec {
 public:
  PurificationSpec(GWSpec base, std::vector<Complex> ancilla) : base_(std::move(base)), ancilla_(std::move(ancilla)) {
    if (ancilla_.size() != base_.d() - 1)
      throw InvalidArgument("purification: ancilla needs d-1 = " + std::to_string(base_.d() - 1) + " amplitudes");
    double norm2 = 0;
    for (const auto& a : ancilla_) norm2 += std::norm(a);
    if (!(std::abs(std::sqrt(norm2) - 1.0) <= kNormTolerance))
      throw InvalidArgument("purification: ancilla amplitudes not normalized");
  }

  /// Ancilla |1>.
  static PurificationSpec with_default_ancilla(GWSpec base) {
    std::vector<Complex> x(base.d() - 1, 0.0);
    x[0] = 1.0;
    return PurificationSpec(std::move(base), std::move(x));
  }

  const GWSpec& base() const noexcept { return base_; }
  const std::vector<Complex>& ancilla() const noexcept { return ancilla_; }

  /// The (n+1)-party amplitude table: rows sqrt(p) a_{si}, then sqrt(1-p) x_i.
  GWSpec induced_spec() const {
    std::vector<Complex> a;
    const double sp = std::sqrt(base_.p());
    const double sq = std::sqrt(1.0 - base_.p());
    for (const auto& v : base_.amplitudes()) a.push_back(sp * v);
    for (const auto& v : ancilla_) a.push_back(sq * v);
    return GWSpec(base_.n() + 1, base_.d(), std::move(a), 1.0);
  }

 private:
  GWSpec base_;
  std::vector<Complex> ancilla_;
};

/// sqrt(p)|W>|0> + sqrt(1-p)|0...0>|x>, built directly from the two branches.
inline PureState purify_mixture(const PurificationSpec& pspec) {
  const GWSpec& base = pspec.base();
  const std::size_t d = base.d();
  const auto layout = SubsystemLayout::uniform(base.n() + 1, d);
  Vector w = detail::w_vector(base);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
  const double sp = std::sqrt(base.p());
  const double sq = std::sqrt(1.0 - base.p());
  for (Eigen::Index k = 0; k < w.size(); ++k) v(k * static_cast<Eigen::Index>(d)) += sp * w(k);  // ancilla |0>
  for (std::size_t i = 1; i < d; ++i) v(static_cast<Eigen::Index>(i)) += sq * pspec.ancilla()[i - 1];
  return PureState(std::move(v), layout, Provenance::gw_family);
}

/// Reduced state on `subset`; GW provenance is carried over from the input.
inline DensityOperator reduce_to_parties(const PureState& psi, PartySet subset) {
  return partial_trace(psi, std::move(subset));
}

/// Split of a state into the span{vacuum, weight-one kets} part and the rest.
struct GwFormDecomposition {
  double w_weight = 0;              // p': squared norm of the weight-one part
  std::vector<Complex> amplitudes;  // normalized weight-one amplitudes, (s, i) row-major
  double residual = 0;              // norm of the component outside span{vacuum, weight-one}
};

/// Projects a pure state onto span{|0...0>, weight-one kets}. A state of the form
/// sqrt(p)|W> + e^{i phi} sqrt(1-p)|0...0> has residual 0.
inline GwFormDecomposition decompose_gw_form(const PureState& psi) {
  const auto& layout = psi.layout();
  const auto& a = psi.amplitudes();
  GwFormDecomposition out;
  std::vector<bool> inside(static_cast<std::size_t>(a.size()), false);
  inside[0] = true;
  for (std::size_t s = 0; s < layout.parties(); ++s)
    for (std::size_t i = 1; i < layout.dim(s); ++i) {
      const std::size_t idx = i * layout.stride(s);
      Complex c = a(static_cast<Eigen::Index>(idx));
      inside[idx] = true;
      out.amplitudes.push_back(c);
      out.w_weight += std::norm(c);
    }
  double outside = 0;
  for (std::size_t k = 0; k < inside.size(); ++k)
    if (!inside[k]) outside += std::norm(a(static_cast<Eigen::Index>(k)));
  out.residual = std::sqrt(outside);
  if (out.w_weight > 0)
    for (auto& c : out.amplitudes) c /= std::sqrt(out.w_weight);
  return out;
}

}  // namespace gwlab
