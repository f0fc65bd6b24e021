#pragma once

// Executable checkers for the monogamy, polygamy, upper-bound and tighter
// monogamy inequalities on GW-family states. Every checker returns an
// InequalityReport; inapplicable parameter points are reported, not thrown.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gwlab/error.hpp"
#include "gwlab/gw_states.hpp"
#include "gwlab/measures.hpp"

namespace gwlab {

inline constexpr double kClosedFormTolerance = 1e-9;
inline constexpr double kEigensolveTolerance = 1e-7;
/// Conditions of the tighter bounds must hold with at least this margin.
inline constexpr double kConditionMargin = 1e-12;

enum class Applicability { applicable, out_of_window, condition_unmet, domain_skipped };

inline const char* to_string(Applicability a) {
  switch (a) {
    case Applicability::applicable: return "APPLICABLE";
    case Applicability::out_of_window: return "OUT_OF_WINDOW";
    case Applicability::condition_unmet: return "CONDITION_UNMET";
    case Applicability::domain_skipped: return "DOMAIN_SKIPPED";
  }
  return "?";
}

enum class Direction { at_least, at_most };

struct InequalityReport {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  /// lhs - rhs for ">=" inequalities, rhs - lhs for "<=" ones.
  double slack = 0;
  bool satisfied = false;
  Applicability applicability = Applicability::applicable;
  double tolerance = kClosedFormTolerance;
  std::map<std::string, double> params;
  std::string partition;
  std::string note;
  std::optional<std::uint64_t> seed;  // oracle-backed reports only

  bool applicable() const noexcept { return applicability == Applicability::applicable; }
  /// An applicable instance that violates the inequality beyond tolerance.
  bool failed() const noexcept { return applicable() && !satisfied; }
};

inline InequalityReport make_report(std::string name, Direction dir, double lhs, double rhs, double tolerance,
                                    Applicability applicability = Applicability::applicable) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = dir == Direction::at_least ? lhs - rhs : rhs - lhs;
  r.tolerance = tolerance;
  r.satisfied = r.slack >= -tolerance;
  r.applicability = applicability;
  return r;
}

/// Exponents of the tighter monogamy bounds: c_pow (>= 2) in the condition,
/// b_pow in [0, c_pow] in the bound, and k >= 1 with h = ((1+k)^t - 1)/k^t, t = b_pow/c_pow.
class TighterParams {
 public:
  TighterParams(double c_pow, double b_pow, double k) : c_pow_(c_pow), b_pow_(b_pow), k_(k) {
    if (!(c_pow >= 2.0)) throw InvalidArgument("tighter bound: c_pow must be >= 2");
    if (!(b_pow >= 0.0 && b_pow <= c_pow)) throw InvalidArgument("tighter bound: b_pow must lie in [0, c_pow]");
    if (!(k >= 1.0)) throw InvalidArgument("tighter bound: k must be >= 1");
  }
  double c_pow() const noexcept { return c_pow_; }
  double b_pow() const noexcept { return b_pow_; }
  double k() const noexcept { return k_; }
  double h() const;

 private:
  double c_pow_, b_pow_, k_;
};

/// ((1+k)^t - 1) / k^t
inline double h_coefficient(double k, double t) {
  if (!(k >= 1.0)) throw DomainError("h_coefficient: k must be >= 1");
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("h_coefficient: t must lie in [0, 1]");
  return (std::pow(1.0 + k, t) - 1.0) / std::pow(k, t);
}

inline double TighterParams::h() const { return h_coefficient(k_, b_pow_ / c_pow_); }

/// (1+x)^t >= 1 + h(k, t) x^t for x >= k >= 1, t in [0, 1].
inline InequalityReport check_lemma7(double x, double k, double t) {
  const bool pre = x >= k && k >= 1.0 && t >= 0.0 && t <= 1.0;
  const double h = pre ? h_coefficient(k, t) : 0.0;
  auto r = make_report("lemma7", Direction::at_least, std::pow(1.0 + x, t), 1.0 + h * std::pow(x, t), kClosedFormTolerance,
                       pre ? Applicability::applicable : Applicability::condition_unmet);
  r.params = {{"x", x}, {"k", k}, {"t", t}};
  return r;
}

namespace detail {

inline Applicability window_state(bool ok) { return ok ? Applicability::applicable : Applicability::out_of_window; }

inline std::vector<double> pair_renyi(const GwBlocks& blocks, std::size_t s, const RenyiOrder& order) {
  std::vector<double> e;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (k == s) continue;
    const double c = blocks.pair_concurrence(s, k);
    e.push_back(f_alpha(c * c, order));
  }
  return e;
}

inline double one_to_rest_renyi(const GwBlocks& blocks, std::size_t s, const RenyiOrder& order) {
  const double c = blocks.one_to_rest_concurrence(s);
  return f_alpha(c * c, order);
}

inline double sum_pow(const std::vector<double>& v, double mu) {
  double s = 0;
  for (double x : v) s += std::pow(x, mu);
  return s;
}

}  // namespace detail

/// E_alpha^mu(P_s | rest) >= sum_k E_alpha^mu(P_s P_k), mu >= 2, alpha >= (sqrt 7 - 1)/2.
inline InequalityReport check_monogamy_power(const GwBlocks& blocks, std::size_t s, const RenyiOrder& order, double mu) {
  if (!(mu >= 2.0)) throw InvalidArgument("check_monogamy_power: mu must be >= 2");
  const double lhs = std::pow(detail::one_to_rest_renyi(blocks, s, order), mu);
  const double rhs = detail::sum_pow(detail::pair_renyi(blocks, s, order), mu);
  auto r = make_report(mu == 2.0 ? "monogamy_sq" : "monogamy_power", Direction::at_least, lhs, rhs, kEigensolveTolerance,
                       detail::window_state(order.ge_low()));
  r.params = {{"alpha", order.alpha()}, {"mu", mu}, {"s", static_cast<double>(s)}};
  r.partition = blocks.partition().to_string();
  return r;
}

/// E_alpha^2(P_s | rest) >= sum_k E_alpha^2(P_s P_k).
inline InequalityReport check_monogamy_sq(const GwBlocks& blocks, std::size_t s, const RenyiOrder& order) {
  return check_monogamy_power(blocks, s, order, 2.0);
}

/// (E^a_alpha)^mu(P_s | rest) <= sum_k E_alpha^mu(P_s P_k), 0 < mu <= 1, alpha in the concave window.
inline InequalityReport check_polygamy_power(const GwBlocks& blocks, std::size_t s, const RenyiOrder& order, double mu) {
  if (!(mu > 0.0 && mu <= 1.0)) throw InvalidArgument("check_polygamy_power: mu must lie in (0, 1]");
  const double lhs = std::pow(detail::one_to_rest_renyi(blocks, s, order), mu);
  const double rhs = detail::sum_pow(detail::pair_renyi(blocks, s, order), mu);
  auto r = make_report(mu == 1.0 ? "polygamy" : "polygamy_power", Direction::at_most, lhs, rhs, kEigensolveTolerance,
                       detail::window_state(order.in_window()));
  r.params = {{"alpha", order.alpha()}, {"mu", mu}, {"s", static_cast<double>(s)}};
  r.partition = blocks.partition().to_string();
  return r;
}

inline InequalityReport check_polygamy(const GwBlocks& blocks, std::size_t s, const RenyiOrder& order) {
  return check_polygamy_power(blocks, s, order, 1.0);
}

/// E_alpha(psi_{PQ|R}) <= 2 E_alpha(rho_PQ) + sum_i E_alpha(rho_{P R_i}) + sum_i E_alpha(rho_{Q R_i})
/// for a pure GW state; blocks are P = 0, Q = 1, R_i = 2.. of a complete partition.
inline InequalityReport check_upper_bound_t3(const PureState& psi, const Partition& partition, const RenyiOrder& order) {
  if (partition.size() < 3) throw InvalidArgument("check_upper_bound_t3: need blocks P, Q and at least one R");
  partition.validate(psi.layout().parties(), true);
  GwBlocks blocks(psi, partition);
  const std::size_t m = blocks.size();
  PartySet pq{0, 1};
  PartySet rest = detail::complement(pq, m);
  const double c_pq_r = blocks.group_concurrence(pq, rest);
  const double c_pq = blocks.pair_concurrence(0, 1);

  // Pure state across PQ | R: Schmidt rank <= 2 gives f_alpha(C^2), else the marginal entropy.
  PureState coarse = coarse_grain(psi, Partition({
                                               [&] {
                                                 PartySet b = partition.block(0);
                                                 b.insert(b.end(), partition.block(1).begin(), partition.block(1).end());
                                                 return detail::sorted_unique(b);
                                               }(),
                                               [&] {
                                                 PartySet b;
                                                 for (std::size_t i = 2; i < m; ++i)
                                                   b.insert(b.end(), partition.block(i).begin(), partition.block(i).end());
                                                 return detail::sorted_unique(b);
                                               }(),
                                           }));
  auto spectrum = schmidt_spectrum(coarse, {0}, {1});
  const double lhs = spectrum.rank(1e-13) <= 2 ? f_alpha(c_pq_r * c_pq_r, order) : renyi_entropy(spectrum, order);

  double rhs = 2.0 * f_alpha(c_pq * c_pq, order);
  double max_arg = c_pq * c_pq;
  for (std::size_t i = 2; i < m; ++i) {
    const double cp = blocks.pair_concurrence(0, i);
    const double cq = blocks.pair_concurrence(1, i);
    max_arg = std::max({max_arg, cp * cp, cq * cq});
    rhs += f_alpha(cp * cp, order) + f_alpha(cq * cq, order);
  }
  const bool domain_ok = max_arg <= 1.0 + 1e-9 && c_pq_r * c_pq_r <= 1.0 + 1e-9;
  auto r = make_report("upper_bound_t3", Direction::at_most, lhs, rhs, kEigensolveTolerance,
                       !order.in_window() ? Applicability::out_of_window
                                          : (domain_ok ? Applicability::applicable : Applicability::domain_skipped));
  const double cp_rest = blocks.one_to_rest_concurrence(0);
  const double cq_rest = blocks.one_to_rest_concurrence(1);
  const double intermediate = cp_rest * cp_rest + cq_rest * cq_rest;
  r.params = {{"alpha", order.alpha()}, {"c2_pq_r", c_pq_r * c_pq_r}, {"c2_pq", c_pq * c_pq},
              {"proof_intermediate_c2_sum", intermediate}};
  if (intermediate > 1.0)
    r.note = "C^2(P|QR) + C^2(Q|PR) exceeds 1; the bound is evaluated directly from its two sides";
  r.partition = partition.to_string();
  return r;
}

/// E^a_alpha(P_1|P_2P_3) <= E^a_alpha(P_2|P_1P_3) + E^a_alpha(P_3|P_1P_2), and the same for E_alpha.
/// Returns the assisted version first.
inline std::vector<InequalityReport> check_reoa_triangle(const GwBlocks& blocks, const RenyiOrder& order) {
  if (blocks.size() != 3) throw InvalidArgument("check_reoa_triangle: need exactly three blocks");
  const double e1 = detail::one_to_rest_renyi(blocks, 0, order);
  const double e2 = detail::one_to_rest_renyi(blocks, 1, order);
  const double e3 = detail::one_to_rest_renyi(blocks, 2, order);
  std::vector<InequalityReport> out;
  for (const char* name : {"reoa_triangle", "renyi_triangle"}) {
    auto r = make_report(name, Direction::at_most, e1, e2 + e3, kEigensolveTolerance, detail::window_state(order.in_window()));
    r.params = {{"alpha", order.alpha()}};
    r.partition = blocks.partition().to_string();
    out.push_back(std::move(r));
  }
  return out;
}

/// E_alpha(P_1P_2 | Q_1..Q_k) <= 2 E_alpha(P_1P_2) + sum_i E_alpha(P_1Q_i) + sum_i E_alpha(P_2Q_i);
/// blocks are P_1 = 0, P_2 = 1, Q_i = 2...
inline InequalityReport check_upper_bound_bipartition(const GwBlocks& blocks, const RenyiOrder& order) {
  const std::size_t m = blocks.size();
  if (m < 3) throw InvalidArgument("check_upper_bound_bipartition: need P_1, P_2 and at least one Q");
  PartySet pq{0, 1};
  const double c_lhs = blocks.group_concurrence(pq, detail::complement(pq, m));
  const double c12 = blocks.pair_concurrence(0, 1);
  double rhs = 2.0 * f_alpha(c12 * c12, order);
  for (std::size_t i = 2; i < m; ++i) {
    const double a = blocks.pair_concurrence(0, i);
    const double b = blocks.pair_concurrence(1, i);
    rhs += f_alpha(a * a, order) + f_alpha(b * b, order);
  }
  auto r = make_report("upper_bound_bipartition", Direction::at_most, f_alpha(c_lhs * c_lhs, order), rhs, kEigensolveTolerance,
                       detail::window_state(order.in_window()));
  r.params = {{"alpha", order.alpha()}};
  r.partition = blocks.partition().to_string();
  return r;
}

enum class TighterKind { concurrence, cren, renyi };

inline const char* to_string(TighterKind k) {
  switch (k) {
    case TighterKind::concurrence: return "concurrence";
    case TighterKind::cren: return "cren";
    case TighterKind::renyi: return "renyi";
  }
  return "?";
}

namespace detail {

/// Maps a concurrence value to the measure compared by a tighter bound.
inline double tighter_measure(double c, TighterKind kind, const std::optional<RenyiOrder>& order) {
  return kind == TighterKind::renyi ? f_alpha(c * c, *order) : c;
}

inline Applicability tighter_window(TighterKind kind, const std::optional<RenyiOrder>& order) {
  if (kind != TighterKind::renyi) return Applicability::applicable;
  if (!order) throw InvalidArgument("tighter bound: renyi kind needs an order");
  return window_state(order->ge_low());
}

}  // namespace detail

/// M^b(P_1|P_2P_3) >= M^b(P_1P_2) + h M^b(P_1P_3) when C^c(P_1P_3) >= k C^c(P_1P_2).
/// M is the concurrence (= CoA), CREN (= concurrence here) or E_alpha = f_alpha(C^2).
inline InequalityReport check_tighter_three(const GwBlocks& blocks, const TighterParams& params, TighterKind kind,
                                            const std::optional<RenyiOrder>& order = std::nullopt) {
  if (blocks.size() != 3) throw InvalidArgument("check_tighter_three: need exactly three blocks");
  auto applicability = detail::tighter_window(kind, order);
  const double c12 = blocks.pair_concurrence(0, 1);
  const double c13 = blocks.pair_concurrence(0, 2);
  const double c1 = blocks.one_to_rest_concurrence(0);
  const double cond_lhs = std::pow(c13, params.c_pow());
  const double cond_rhs = params.k() * std::pow(c12, params.c_pow());
  const bool condition = cond_lhs - cond_rhs >= kConditionMargin;
  if (applicability == Applicability::applicable && !condition) applicability = Applicability::condition_unmet;

  const double b = params.b_pow();
  const double h = params.h();
  const double lhs = std::pow(detail::tighter_measure(c1, kind, order), b);
  const double rhs = std::pow(detail::tighter_measure(c12, kind, order), b) + h * std::pow(detail::tighter_measure(c13, kind, order), b);
  auto r = make_report(std::string("tighter_three_") + to_string(kind), Direction::at_least, lhs, rhs, kEigensolveTolerance,
                       applicability);
  r.params = {{"c_pow", params.c_pow()}, {"b_pow", b}, {"k", params.k()}, {"h", h},
              {"condition_lhs", cond_lhs}, {"condition_rhs", cond_rhs}};
  if (order) r.params["alpha"] = order->alpha();
  r.partition = blocks.partition().to_string();
  return r;
}

/// Multi-block tighter bound with split index n in [1, m-1] (P_1 is block 0, P_i is block i-1):
///   M^b(P_1|P_2..P_m) >= sum_{i=2}^{n} h^{i-2} M^b(P_1P_i) + h^n sum_{i=n+1}^{m-1} M^b(P_1P_i) + h^{n-1} M^b(P_1P_m)
/// under k C^c(P_1P_i) <= C^c(P_1|P_{i+1}..P_m) for i <= n and C^c(P_1P_j) >= k C^c(P_1|P_{j+1}..P_m) for n < j < m.
inline InequalityReport check_tighter_multi(const GwBlocks& blocks, std::size_t split, const TighterParams& params,
                                            TighterKind kind, const std::optional<RenyiOrder>& order = std::nullopt) {
  const std::size_t m = blocks.size();
  if (m < 3) throw InvalidArgument("check_tighter_multi: need at least three blocks");
  if (split < 1 || split > m - 1) throw InvalidArgument("check_tighter_multi: split index must lie in [1, m-1]");
  auto applicability = detail::tighter_window(kind, order);
  const double c = params.c_pow();
  const double k = params.k();

  // 1-based block labels: P_i <-> block i-1.
  auto pair = [&](std::size_t i) { return blocks.pair_concurrence(0, i - 1); };
  auto tail = [&](std::size_t from) {  // C(P_1 | P_from .. P_m)
    PartySet rest;
    for (std::size_t i = from; i <= m; ++i) rest.push_back(i - 1);
    return blocks.group_concurrence({0}, rest);
  };

  std::string failed;
  for (std::size_t i = 2; i <= split && failed.empty(); ++i)
    if (!(std::pow(tail(i + 1), c) - k * std::pow(pair(i), c) >= kConditionMargin)) failed = "first chain, i = " + std::to_string(i);
  for (std::size_t j = split + 1; j <= m - 1 && failed.empty(); ++j)
    if (!(std::pow(pair(j), c) - k * std::pow(tail(j + 1), c) >= kConditionMargin)) failed = "second chain, j = " + std::to_string(j);
  if (applicability == Applicability::applicable && !failed.empty()) applicability = Applicability::condition_unmet;

  const double b = params.b_pow();
  const double h = params.h();
  auto mb = [&](double conc) { return std::pow(detail::tighter_measure(conc, kind, order), b); };
  double rhs = 0;
  for (std::size_t i = 2; i <= split; ++i) rhs += std::pow(h, static_cast<double>(i - 2)) * mb(pair(i));
  double middle = 0;
  for (std::size_t i = split + 1; i <= m - 1; ++i) middle += mb(pair(i));
  rhs += std::pow(h, static_cast<double>(split)) * middle;
  rhs += std::pow(h, static_cast<double>(split - 1)) * mb(pair(m));
  const double lhs = mb(blocks.one_to_rest_concurrence(0));

  auto r = make_report(std::string("tighter_multi_") + to_string(kind), Direction::at_least, lhs, rhs, kEigensolveTolerance,
                       applicability);
  r.params = {{"c_pow", c}, {"b_pow", b}, {"k", k}, {"h", h}, {"split", static_cast<double>(split)}};
  if (order) r.params["alpha"] = order->alpha();
  if (!failed.empty()) r.note = "condition fails: " + failed;
  r.partition = blocks.partition().to_string();
  return r;
}

namespace detail {

/// Orders the two partner blocks for a three-block tighter check so that the
/// larger pair concurrence sits on P_3.
inline Partition oriented_three(const GwBlocks& probe, const Partition& p) {
  if (probe.pair_concurrence(0, 1) > probe.pair_concurrence(0, 2)) return Partition({p.block(0), p.block(2), p.block(1)});
  return p;
}

inline std::vector<InequalityReport> suite_on(const GwBlocks& singles, const Partition& three, const RenyiOrder& order,
                                              const TighterParams& params, const std::string& tag) {
  std::vector<InequalityReport> out;
  auto mono = check_monogamy_sq(singles, 0, order);
  mono.note = tag;
  out.push_back(std::move(mono));
  if (three.size() == 3) {
    for (auto kind : {TighterKind::concurrence, TighterKind::cren, TighterKind::renyi}) {
      auto r = check_tighter_three(GwBlocks(singles.state(), three), params, kind, order);
      r.note = r.note.empty() ? tag : tag + "; " + r.note;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace detail

/// Runs the monogamy and three-block tighter checks on the purification of
/// p|W><W| + (1-p)|0><0| (ancilla |1>) and on the mixture itself.
inline std::vector<InequalityReport> run_mixture_suite(const GWSpec& spec, const RenyiOrder& order, const TighterParams& params) {
  std::vector<InequalityReport> out;
  const auto pspec = PurificationSpec::with_default_ancilla(spec);
  const PureState purified = purify_mixture(pspec);
  const DensityOperator mixture = mix_with_vacuum(spec);
  const std::size_t n = spec.n();

  auto three_blocks = [](std::size_t parties) {
    if (parties < 3) return Partition::singletons(std::max<std::size_t>(parties, 1));
    PartySet rest;
    for (std::size_t k = 2; k < parties; ++k) rest.push_back(k);
    return Partition({{0}, {1}, rest});
  };

  if (n + 1 >= 2) {
    GwBlocks singles(purified, Partition::singletons(n + 1));
    Partition three = three_blocks(n + 1);
    if (three.size() == 3) three = detail::oriented_three(GwBlocks(singles.state(), three), three);
    auto part = detail::suite_on(singles, three, order, params, "purification");
    out.insert(out.end(), part.begin(), part.end());
  }
  if (n >= 2) {
    GwBlocks singles(mixture, Partition::singletons(n));
    Partition three = three_blocks(n);
    if (three.size() == 3) three = detail::oriented_three(GwBlocks(singles.state(), three), three);
    auto part = detail::suite_on(singles, three, order, params, "mixture");
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace gwlab
