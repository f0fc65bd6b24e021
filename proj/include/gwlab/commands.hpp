#pragma once

// Subcommand implementations shared by the gwlab tool and the tests. Each
// writes to `out`, diagnostics to `err`, and returns the process exit code:
// 0 ok, 1 an applicable check failed, 2 malformed input.

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gwlab/error.hpp"
#include "gwlab/game_bounds.hpp"
#include "gwlab/gw_states.hpp"
#include "gwlab/inequalities.hpp"
#include "gwlab/io.hpp"
#include "gwlab/measures.hpp"
#include "gwlab/roof_oracle.hpp"

namespace gwlab {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitBadInput = 2 };

/// start:stop:step, evaluated as start + i*step for integer i.
struct AlphaGrid {
  double start = 0.83;
  double stop = 1.30;
  double step = 0.01;
  bool exclude_one = false;

  static AlphaGrid parse(const std::string& text, bool exclude_one) {
    AlphaGrid g;
    g.exclude_one = exclude_one;
    std::vector<double> parts;
    std::stringstream ss(text);
    ss.imbue(std::locale::classic());
    std::string item;
    while (std::getline(ss, item, ':')) {
      try {
        std::size_t used = 0;
        parts.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw InvalidArgument("alpha grid: bad number '" + item + "'");
      }
    }
    if (parts.size() == 1) parts = {parts[0], parts[0], 1.0};
    if (parts.size() != 3) throw InvalidArgument("alpha grid: expected start:stop:step");
    g.start = parts[0];
    g.stop = parts[1];
    g.step = parts[2];
    if (!(g.step > 0)) throw InvalidArgument("alpha grid: step must be > 0");
    if (!(g.start > 0) || g.stop < g.start) throw InvalidArgument("alpha grid: need 0 < start <= stop");
    return g;
  }

  std::vector<double> values() const {
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t i = 0; i <= count; ++i) {
      const double a = start + static_cast<double>(i) * step;
      if (exclude_one && std::abs(a - 1.0) < 1e-12) continue;
      out.push_back(a);
    }
    return out;
  }
};

enum class OutputFormat { jsonl, csv };

struct RunConfig {
  std::string spec;
  std::optional<std::string> partition;
  AlphaGrid alpha;
  std::vector<double> mu{1.0, 2.0};
  std::optional<double> c_pow, b_pow, k;
  std::size_t trials = kDefaultTrials;
  std::uint64_t seed = kDefaultSeed;
  OutputFormat format = OutputFormat::jsonl;
};

namespace detail {

inline GWSpec example1() { return GWSpec::qubits({std::sqrt(0.5), 0.5, 0.4, 0.3}); }
inline GWSpec example2() { return GWSpec::qubits({0.75, 0.5, std::sqrt(2.0) / 4.0, 0.25}); }
inline GWSpec example3() {
  const double s = 1.0 / std::sqrt(6.0);
  return GWSpec::qubits({s, s, 2.0 * s});
}

/// Integer-indexed grid over [lo, hi] with the given step.
inline std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

inline std::optional<TighterParams> tighter_from(const RunConfig& cfg) {
  if (!cfg.c_pow && !cfg.b_pow && !cfg.k) return std::nullopt;
  const double c = cfg.c_pow.value_or(2.0);
  return TighterParams(c, cfg.b_pow.value_or(c / 2.0), cfg.k.value_or(1.0));
}

class ReportSink {
 public:
  ReportSink(std::ostream& out, OutputFormat fmt) : out_(out), fmt_(fmt) {
    if (fmt_ == OutputFormat::csv) io::write_csv_header(out_);
  }
  void operator()(const InequalityReport& r) {
    if (fmt_ == OutputFormat::csv)
      io::write_csv_row(out_, r);
    else
      io::write_jsonl(out_, io::to_json(r));
    failed_ = failed_ || r.failed();
  }
  bool failed() const noexcept { return failed_; }

 private:
  std::ostream& out_;
  OutputFormat fmt_;
  bool failed_ = false;
};

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const InvalidArgument& e) {
    err << "gwlab: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const DomainError& e) {
    err << "gwlab: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "gwlab: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

inline void figure1(std::ostream& out) {
  const PureState psi = build_gw_qudit(example1());
  const GwBlocks blocks(psi, Partition({{0}, {1}, {2}}));
  const double c12 = blocks.pair_concurrence(0, 1);
  const double c13 = blocks.pair_concurrence(0, 2);
  const double c1 = blocks.one_to_rest_concurrence(0);
  out << "alpha,lower,e_mid,upper\n";
  for (double a : grid(0.8229, 1.3027, 0.005)) {
    if (std::abs(a - 1.0) < 1e-12) continue;
    const RenyiOrder order(a);
    const double e12 = f_alpha(c12 * c12, order);
    const double e13 = f_alpha(c13 * c13, order);
    out << io::fmt(a) << ',' << io::fmt(std::sqrt(e12 * e12 + e13 * e13)) << ',' << io::fmt(f_alpha(c1 * c1, order)) << ','
        << io::fmt(e12 + e13) << '\n';
  }
}

inline void figure2(std::ostream& out) {
  const PureState psi = build_gw_qudit(example2());
  const Partition p({{0}, {1, 2}, {3}});
  out << "alpha,lhs,upper_bound\n";
  for (double a : grid(0.8229, 1.3027, 0.005)) {
    if (std::abs(a - 1.0) < 1e-12) continue;
    auto r = check_upper_bound_t3(psi, p, RenyiOrder(a));
    out << io::fmt(a) << ',' << io::fmt(r.lhs) << ',' << io::fmt(r.rhs) << '\n';
  }
}

inline void figure3(std::ostream& out) {
  const PureState psi = build_gw_qudit(example3());
  const GwBlocks blocks(psi, Partition::singletons(3));
  out << "b_pow,exact,bound_k1,bound_k2\n";
  for (double b : grid(0.0, 2.0, 0.02)) {
    b = std::min(b, 2.0);
    auto k1 = check_tighter_three(blocks, TighterParams(2.0, b, 1.0), TighterKind::concurrence);
    auto k2 = check_tighter_three(blocks, TighterParams(2.0, b, 2.0), TighterKind::concurrence);
    out << io::fmt(b) << ',' << io::fmt(k2.lhs) << ',' << io::fmt(k1.rhs) << ',' << io::fmt(k2.rhs) << '\n';
  }
}

}  // namespace detail

/// Figure data as CSV: 1 (lower, E, upper vs alpha on example 1), 2 (the
/// upper bound on example 2), 3 (tighter bounds vs b_pow on example 3).
inline int cmd_figure(int fig, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    switch (fig) {
      case 1: detail::figure1(out); break;
      case 2: detail::figure2(out); break;
      case 3: detail::figure3(out); break;
      default: throw InvalidArgument("figure: id must be 1, 2 or 3");
    }
    return static_cast<int>(kExitOk);
  });
}

/// Runs every applicable checker on the spec's state for each alpha in the grid.
/// With vacuum weight p < 1 the checks run on sqrt(p)|W> + sqrt(1-p)|0>, followed by
/// the mixture suite on p|W><W| + (1-p)|0><0|.
inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const GWSpec spec = io::load_spec(cfg.spec);
    const Partition partition = cfg.partition ? Partition::parse(*cfg.partition) : Partition::singletons(spec.n());
    partition.validate(spec.n(), false);
    for (double mu : cfg.mu)
      if (!((mu > 0 && mu <= 1) || mu >= 2)) throw InvalidArgument("verify: mu must lie in (0, 1] or be >= 2");
    const auto tighter = detail::tighter_from(cfg);
    const auto alphas = cfg.alpha.values();

    const PureState psi = superpose_with_vacuum(spec);
    const GwBlocks blocks(psi, partition);
    const std::size_t m = blocks.size();
    const bool complete = partition.is_complete(spec.n());
    detail::ReportSink sink(out, cfg.format);

    if (tighter && m >= 3) {
      for (auto kind : {TighterKind::concurrence, TighterKind::cren}) {
        if (m == 3) sink(check_tighter_three(blocks, *tighter, kind));
        for (std::size_t n = 1; m > 3 && n < m; ++n) sink(check_tighter_multi(blocks, n, *tighter, kind));
      }
    }
    for (double a : alphas) {
      const RenyiOrder order(a);
      for (std::size_t s = 0; s < m && m >= 2; ++s)
        for (double mu : cfg.mu)
          sink(mu >= 2 ? check_monogamy_power(blocks, s, order, mu) : check_polygamy_power(blocks, s, order, mu));
      if (m == 3)
        for (const auto& r : check_reoa_triangle(blocks, order)) sink(r);
      if (m >= 3) {
        sink(check_upper_bound_bipartition(blocks, order));
        if (complete) sink(check_upper_bound_t3(psi, partition, order));
      }
      if (tighter && m >= 3) {
        if (m == 3) sink(check_tighter_three(blocks, *tighter, TighterKind::renyi, order));
        for (std::size_t n = 1; m > 3 && n < m; ++n) sink(check_tighter_multi(blocks, n, *tighter, TighterKind::renyi, order));
      }
      if (spec.p() < 1.0)
        for (const auto& r : run_mixture_suite(spec, order, tighter.value_or(TighterParams(2.0, 1.0, 1.0)))) sink(r);
    }
    return static_cast<int>(sink.failed() ? kExitCheckFailed : kExitOk);
  });
}

/// Oracle estimates for every pair of blocks: the concurrence roof against
/// C = C_a and the Renyi roof against f_alpha(C^2) for each alpha in the grid.
/// The state is the bare GW state for p = 1 and the vacuum mixture otherwise.
inline int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const GWSpec spec = io::load_spec(cfg.spec);
    const Partition partition = cfg.partition ? Partition::parse(*cfg.partition) : Partition::singletons(spec.n());
    partition.validate(spec.n(), false);
    if (cfg.trials < 1) throw InvalidArgument("oracle: trials must be >= 1");
    const DensityOperator rho =
        spec.p() < 1.0 ? mix_with_vacuum(spec) : DensityOperator::from_pure(build_gw_qudit(spec));
    RoofOptions opts;
    opts.trials = cfg.trials;
    opts.seed = cfg.seed;
    bool failed = false;
    auto emit = [&](const io::Json& j) { io::write_jsonl(out, j); };
    for (std::size_t s = 0; s < partition.size(); ++s)
      for (std::size_t k = s + 1; k < partition.size(); ++k) {
        const std::string pair = partition.block_string(s) + "|" + partition.block_string(k);
        RoofEstimate est;
        auto c = verify_c_equals_ca(rho, partition.block(s), partition.block(k), opts, &est);
        c.partition = pair;
        failed = failed || c.failed();
        emit(io::Json{{"type", "roof_estimate"}, {"blocks", pair}, {"measure", "concurrence"}, {"estimate", io::to_json(est)}});
        emit(io::Json{{"type", "report"}, {"report", io::to_json(c)}});
        for (double a : cfg.alpha.values()) {
          auto e = verify_e_alpha_formula(rho, partition.block(s), partition.block(k), RenyiOrder(a), opts, &est);
          e.partition = pair;
          failed = failed || e.failed();
          emit(io::Json{{"type", "roof_estimate"}, {"blocks", pair}, {"measure", "renyi_ent"}, {"alpha", a},
                        {"estimate", io::to_json(est)}});
          emit(io::Json{{"type", "report"}, {"report", io::to_json(e)}});
        }
      }
    return static_cast<int>(failed ? kExitCheckFailed : kExitOk);
  });
}

/// CSV table of gap_bound over the grid n_list x d_list.
inline int cmd_gamebounds(const std::vector<std::size_t>& n_list, const std::vector<std::size_t>& d_list, std::ostream& out,
                          std::ostream& err) {
  return detail::guarded(err, [&] {
    out << "n,d,new_bound,reference_bound,tighter,log_base\n";
    for (auto n : n_list)
      for (auto d : d_list) {
        const auto r = gap_bound({n, d});
        out << n << ',' << d << ',' << io::fmt(r.new_bound) << ',' << io::fmt(r.reference_bound) << ','
            << (r.tighter ? "true" : "false") << ",2\n";
      }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace gwlab
