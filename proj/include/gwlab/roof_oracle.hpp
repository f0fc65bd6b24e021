#pragma once

// Stochastic estimates of convex-roof (min) and assisted (max) values by search
// over pure-state decompositions. Every m-element decomposition of a rank-r state
// rho = sum_j l_j |e_j><e_j| is |psi_k> = sum_j U_kj sqrt(l_j) |e_j> for an m x r
// isometry U, so the search runs over isometries: Haar samples first, then a
// local refinement by random Cayley rotations around the best sample.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "gwlab/error.hpp"
#include "gwlab/inequalities.hpp"
#include "gwlab/measures.hpp"
#include "gwlab/tensor.hpp"

namespace gwlab {

inline constexpr std::uint64_t kDefaultSeed = 0x6757'6c61'6220'0001ULL;
inline constexpr std::size_t kDefaultTrials = 20000;
inline constexpr double kOracleAgreement = 5e-3;
/// Fewer evaluations than this never count as converged.
inline constexpr std::size_t kMinTrialsForConvergence = 100;

/// GWLAB_SEED (decimal) if set and valid, else `fallback`.
inline std::uint64_t seed_from_env(std::uint64_t fallback = kDefaultSeed) {
  const char* env = std::getenv("GWLAB_SEED");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw InvalidArgument("GWLAB_SEED is not a decimal 64-bit integer");
  return static_cast<std::uint64_t>(v);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of trial `index` under run seed `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(splitmix64(seed) ^ index); }

struct DecompositionSample {
  std::vector<double> weights;
  std::vector<PureState> states;
  std::size_t cardinality() const noexcept { return weights.size(); }
};

struct RoofEstimate {
  double min_estimate = 0;
  double max_estimate = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool converged = false;  // both sides plateaued
  bool min_converged = false;
  bool max_converged = false;
};

enum class RoofMeasure { concurrence, negativity, renyi_ent };

inline const char* to_string(RoofMeasure m) {
  switch (m) {
    case RoofMeasure::concurrence: return "concurrence";
    case RoofMeasure::negativity: return "negativity";
    case RoofMeasure::renyi_ent: return "renyi_ent";
  }
  return "?";
}

struct RoofOptions {
  std::size_t cardinality = 0;  // 0: rank + 2
  std::size_t trials = kDefaultTrials;
  std::uint64_t seed = kDefaultSeed;
  /// Refinement steps for each of the min and max searches; npos picks trials / 4.
  std::size_t refine_steps = static_cast<std::size_t>(-1);
  std::size_t threads = 0;  // 0: hardware concurrency
};

namespace detail {

struct EigenEnsemble {
  Matrix scaled;  // columns sqrt(l_j) |e_j>
  std::size_t rank = 0;
};

inline EigenEnsemble eigen_ensemble(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = es.eigenvalues().size(); i-- > 0;)
    if (es.eigenvalues()(i) > 1e-12) keep.push_back(i);
  EigenEnsemble out;
  out.rank = keep.size();
  out.scaled = Matrix(rho.matrix().rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    out.scaled.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]) * std::sqrt(es.eigenvalues()(keep[j]));
  return out;
}

inline Matrix haar_isometry(std::size_t m, std::size_t r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix z(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(r));
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(z.rows(), z.cols());
  // Fix the phases of R's diagonal so the distribution is Haar.
  Matrix rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Complex dj = rmat(j, j);
    if (std::abs(dj) > 0) q.col(j) *= dj / std::abs(dj);
  }
  return q;
}

/// Pure-state value from the singular values of the d_a x d_b coefficient matrix.
inline double pure_value(const Matrix& coeff, RoofMeasure measure, const std::optional<RenyiOrder>& order) {
  std::vector<double> l;
  if (coeff.rows() == 2 && coeff.cols() == 2) {
    const double n2 = coeff.squaredNorm();
    if (n2 <= 0) return 0.0;
    const double det = std::abs(coeff(0, 0) * coeff(1, 1) - coeff(0, 1) * coeff(1, 0)) / n2;  // sqrt(l0 l1)
    switch (measure) {
      case RoofMeasure::concurrence: return 2.0 * det;
      case RoofMeasure::negativity: return 2.0 * det;
      case RoofMeasure::renyi_ent: return f_alpha(std::min(4.0 * det * det, 1.0), *order);
    }
  }
  Eigen::JacobiSVD<Matrix> svd(coeff);
  const auto& s = svd.singularValues();
  double total = s.squaredNorm();
  if (total <= 0) return 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) l.push_back(s(i) * s(i) / total);
  switch (measure) {
    case RoofMeasure::concurrence: {
      double purity = 0;
      for (double x : l) purity += x * x;
      return std::sqrt(std::max(0.0, 2.0 * (1.0 - purity)));
    }
    case RoofMeasure::negativity: {
      double root = 0;
      for (double x : l) root += std::sqrt(x);
      return std::max(root * root - 1.0, 0.0);
    }
    case RoofMeasure::renyi_ent: return renyi_entropy(l, *order);
  }
  return 0.0;
}

class RoofObjective {
 public:
  RoofObjective(const DensityOperator& rho, RoofMeasure measure, std::optional<RenyiOrder> order)
      : ensemble_(eigen_ensemble(rho)), measure_(measure), order_(order),
        da_(static_cast<Eigen::Index>(rho.layout().dim(0))), db_(static_cast<Eigen::Index>(rho.layout().dim(1))) {
    if (rho.layout().parties() != 2) throw InvalidArgument("convex roof: state must be bipartite (coarse-grain first)");
    if (measure == RoofMeasure::renyi_ent && !order) throw InvalidArgument("convex roof: renyi_ent needs an order");
  }

  std::size_t rank() const noexcept { return ensemble_.rank; }

  /// Unnormalized components: row k of U applied to the scaled eigenvectors.
  Matrix components(const Matrix& u) const { return ensemble_.scaled * u.transpose(); }

  double average(const Matrix& u) const {
    Matrix comps = components(u);
    double avg = 0;
    for (Eigen::Index k = 0; k < comps.cols(); ++k) {
      const double q = comps.col(k).squaredNorm();
      if (q <= 1e-300) continue;
      // Big-endian: row index is the party-0 digit.
      Matrix coeff = Eigen::Map<const Matrix>(comps.col(k).data(), db_, da_).transpose();
      avg += q * pure_value(coeff, measure_, order_);
    }
    return avg;
  }

 private:
  EigenEnsemble ensemble_;
  RoofMeasure measure_;
  std::optional<RenyiOrder> order_;
  Eigen::Index da_, db_;
};

/// Exp of i*eps*H for a random Hermitian H via the Cayley map, applied on the left.
/// With `plane` set, H only couples two randomly chosen components.
inline Matrix cayley_step(const Matrix& u, double eps, std::mt19937_64& rng, bool plane = false) {
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::Index m = u.rows();
  Matrix h = Matrix::Zero(m, m);
  if (plane && m >= 2) {
    std::uniform_int_distribution<Eigen::Index> pick(0, m - 1);
    const Eigen::Index i = pick(rng);
    Eigen::Index j = pick(rng);
    while (j == i) j = pick(rng);
    h(i, i) = g(rng);
    h(j, j) = g(rng);
    h(i, j) = Complex(g(rng), g(rng)) / std::sqrt(2.0);
    h(j, i) = std::conj(h(i, j));
  } else {
    for (Eigen::Index i = 0; i < m; ++i) {
      h(i, i) = g(rng);
      for (Eigen::Index j = i + 1; j < m; ++j) {
        h(i, j) = Complex(g(rng), g(rng)) / std::sqrt(2.0);
        h(j, i) = std::conj(h(i, j));
      }
    }
  }
  const Complex ie(0.0, 0.5 * eps);
  Matrix id = Matrix::Identity(m, m);
  Matrix w = (id - ie * h).partialPivLu().solve(id + ie * h);
  Matrix out = w * u;
  // Re-orthonormalize to keep drift at machine precision.
  Eigen::HouseholderQR<Matrix> qr(out);
  Matrix q = qr.householderQ() * Matrix::Identity(out.rows(), out.cols());
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j)
    if (std::abs(r(j, j)) > 0) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

/// Stochastic hill climb from `start`; `sign` = +1 minimizes, -1 maximizes. Appends each step's best.
inline void refine(const RoofObjective& obj, Matrix start, double start_value, int sign, std::size_t steps,
                   std::uint64_t seed, std::vector<double>& trace) {
  std::mt19937_64 rng(seed);
  double best = start_value;
  double eps = 0.3;
  for (std::size_t t = 0; t < steps; ++t) {
    Matrix cand = cayley_step(start, eps, rng, t % 2 == 1);
    const double v = obj.average(cand);
    if (sign * v < sign * best) {
      best = v;
      start = std::move(cand);
      eps = std::min(eps * 1.5, 1.0);
    } else {
      eps *= 0.8;
      if (eps < 1e-6) eps = 0.3;  // stuck on a kink: widen the search again
    }
    trace.push_back(best);
  }
}

/// No improvement beyond 1e-6 over the last quarter of the search phase that
/// starts at `phase_begin` (the refinement, when there is one).
inline bool plateaued(const std::vector<double>& best_so_far, int sign, std::size_t phase_begin = 0) {
  if (best_so_far.size() < kMinTrialsForConvergence) return false;
  const std::size_t phase = best_so_far.size() - phase_begin;
  const std::size_t cut = best_so_far.size() - phase / 4 - 1;
  return sign * (best_so_far[cut] - best_so_far.back()) <= 1e-6;
}

inline std::size_t worker_count(std::size_t requested, std::size_t work) {
  std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, work / 256 + 1));
}

}  // namespace detail

/// `trials` decompositions of cardinality m from Haar-random m x r isometries.
inline std::vector<DecompositionSample> sample_decompositions(const DensityOperator& rho, std::size_t m, std::size_t trials,
                                                              std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("sample_decompositions: trials must be >= 1");
  auto ens = detail::eigen_ensemble(rho);
  if (m < ens.rank) throw InvalidArgument("sample_decompositions: cardinality below the rank");
  std::vector<DecompositionSample> out;
  out.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Matrix comps = ens.scaled * detail::haar_isometry(m, ens.rank, derive_seed(seed, t)).transpose();
    DecompositionSample s;
    for (Eigen::Index k = 0; k < comps.cols(); ++k) {
      const double q = comps.col(k).squaredNorm();
      if (q <= 1e-300) continue;
      s.weights.push_back(q);
      s.states.emplace_back(Vector(comps.col(k) / std::sqrt(q)), rho.layout(), rho.provenance());
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// min (upper estimate of the roof) and max (lower estimate of the assisted value)
/// of the average pure-state measure over sampled decompositions.
inline RoofEstimate convex_roof_bounds(const DensityOperator& rho, RoofMeasure measure, const RoofOptions& opts,
                                       std::optional<RenyiOrder> order = std::nullopt) {
  if (opts.trials < 1) throw InvalidArgument("convex_roof_bounds: trials must be >= 1");
  detail::RoofObjective obj(rho, measure, order);
  const std::size_t r = obj.rank();
  const std::size_t m = opts.cardinality ? opts.cardinality : r + 2;
  if (m < r) throw InvalidArgument("convex_roof_bounds: cardinality below the rank");

  RoofEstimate est;
  est.trials = opts.trials;
  est.seed = opts.seed;
  if (r <= 1) {
    Matrix u = Matrix::Identity(1, 1);
    est.min_estimate = est.max_estimate = obj.average(u);
    est.converged = est.min_converged = est.max_converged = true;
    return est;
  }

  std::vector<double> values(opts.trials);
  const std::size_t workers = detail::worker_count(opts.threads, opts.trials);
  auto run = [&](std::size_t w) {
    for (std::size_t t = w; t < opts.trials; t += workers)
      values[t] = obj.average(detail::haar_isometry(m, r, derive_seed(opts.seed, t)));
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }

  std::vector<double> lo(opts.trials), hi(opts.trials);
  std::size_t arg_lo = 0, arg_hi = 0;
  for (std::size_t t = 0; t < opts.trials; ++t) {
    if (values[t] < values[arg_lo]) arg_lo = t;
    if (values[t] > values[arg_hi]) arg_hi = t;
    lo[t] = values[arg_lo];
    hi[t] = values[arg_hi];
  }

  const std::size_t steps = opts.refine_steps == static_cast<std::size_t>(-1) ? opts.trials / 4 : opts.refine_steps;
  if (steps > 0) {
    detail::refine(obj, detail::haar_isometry(m, r, derive_seed(opts.seed, arg_lo)), values[arg_lo], +1, steps,
                   derive_seed(~opts.seed, 1), lo);
    detail::refine(obj, detail::haar_isometry(m, r, derive_seed(opts.seed, arg_hi)), values[arg_hi], -1, steps,
                   derive_seed(~opts.seed, 2), hi);
  }
  est.min_estimate = lo.back();
  est.max_estimate = hi.back();
  const std::size_t phase = steps > 0 ? opts.trials : 0;
  est.min_converged = detail::plateaued(lo, +1, phase);
  est.max_converged = detail::plateaued(hi, -1, phase);
  est.converged = est.min_converged && est.max_converged;
  return est;
}

namespace detail {

/// Two-party view of a GW-tagged state on the blocks a | b.
inline DensityOperator pair_view(const DensityOperator& rho, const PartySet& a, const PartySet& b) {
  PartySet keep = a;
  keep.insert(keep.end(), b.begin(), b.end());
  keep = sorted_unique(keep);
  DensityOperator reduced = keep.size() == rho.layout().parties() ? rho : partial_trace(rho, keep);
  auto pos = [&](std::size_t p) { return static_cast<std::size_t>(std::lower_bound(keep.begin(), keep.end(), p) - keep.begin()); };
  PartySet pa, pb;
  for (auto p : a) pa.push_back(pos(p));
  for (auto p : b) pb.push_back(pos(p));
  return coarse_grain(reduced, Partition({pa, pb}));
}

inline InequalityReport agreement_report(std::string name, const RoofEstimate& est, double closed, bool check_max,
                                         Applicability applicability) {
  double dev = std::abs(est.min_estimate - closed);
  if (check_max) dev = std::max({dev, std::abs(est.max_estimate - closed), std::abs(est.min_estimate - est.max_estimate)});
  auto r = make_report(std::move(name), Direction::at_most, dev, kOracleAgreement, 0.0, applicability);
  r.params = {{"closed_form", closed}, {"roof_min", est.min_estimate}, {"roof_max", est.max_estimate},
              {"trials", static_cast<double>(est.trials)}, {"converged", est.converged ? 1.0 : 0.0}};
  const bool settled = check_max ? est.converged : est.min_converged;
  // A sampled decomposition below the closed form (or above it, for the assisted
  // side) disproves the equality whether or not the search has settled.
  const bool witnessed = closed - est.min_estimate > kOracleAgreement ||
                         (check_max && est.max_estimate - closed > kOracleAgreement);
  if (!settled && witnessed && r.applicability == Applicability::applicable) r.note = "witnessed by a sampled decomposition";
  if (!settled && !witnessed && r.applicability == Applicability::applicable) {
    r.applicability = Applicability::condition_unmet;
    r.note = "oracle did not converge";
  }
  return r;
}

}  // namespace detail

/// Oracle min and max of the average concurrence against the closed form
/// C = C_a on a GW pair reduction (blocks a | b of `rho`).
inline InequalityReport verify_c_equals_ca(const DensityOperator& rho, const PartySet& a, const PartySet& b,
                                           const RoofOptions& opts, RoofEstimate* estimate_out = nullptr) {
  if (!rho.is_gw()) throw ProvenanceError("verify_c_equals_ca: requires a GW-family state");
  DensityOperator pair = detail::pair_view(rho, a, b);
  const double closed = gw_pairwise_concurrence(pair, {0}, {1}).concurrence.value;
  auto est = convex_roof_bounds(pair, RoofMeasure::concurrence, opts);
  if (estimate_out) *estimate_out = est;
  auto r = detail::agreement_report("c_equals_ca", est, closed, true, Applicability::applicable);
  r.seed = opts.seed;
  return r;
}

/// Oracle min and max of the average E_alpha against f_alpha(C^2) for blocks a | b.
/// Below the window only the min side is compared.
inline InequalityReport verify_e_alpha_formula(const DensityOperator& rho, const PartySet& a, const PartySet& b,
                                               const RenyiOrder& order, const RoofOptions& opts,
                                               RoofEstimate* estimate_out = nullptr) {
  if (!rho.is_gw()) throw ProvenanceError("verify_e_alpha_formula: requires a GW-family state");
  DensityOperator pair = detail::pair_view(rho, a, b);
  const double c = gw_pairwise_concurrence(pair, {0}, {1}).concurrence.value;
  const double closed = f_alpha(c * c, order);
  auto est = convex_roof_bounds(pair, RoofMeasure::renyi_ent, opts, order);
  if (estimate_out) *estimate_out = est;
  auto r = detail::agreement_report("e_alpha_formula", est, closed, order.in_window(),
                                    order.ge_low() ? Applicability::applicable : Applicability::out_of_window);
  r.params["alpha"] = order.alpha();
  r.seed = opts.seed;
  return r;
}

}  // namespace gwlab
