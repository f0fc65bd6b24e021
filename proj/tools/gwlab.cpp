// gwlab: figures, inequality verification, oracle runs and game-bound tables.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gwlab/gwlab.hpp"

namespace {

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  ss.imbue(std::locale::classic());
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::stringstream is(item);
    is.imbue(std::locale::classic());
    T v{};
    if (!(is >> v) || !is.eof()) throw gwlab::InvalidArgument(std::string(what) + ": bad list entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw gwlab::InvalidArgument(std::string(what) + ": empty list");
  return out;
}

// Buffers the command output and writes it in one piece, to a file or stdout.
int emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return 0;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "gwlab: cannot write '" << path << "'\n";
    return gwlab::kExitBadInput;
  }
  f << text;
  return f ? 0 : gwlab::kExitBadInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gwlab: entanglement monogamy toolkit for generalized W-class states"};
  app.require_subcommand(1);

  std::string out_path;
  int fig = 0;
  auto* figure = app.add_subcommand("figure", "regenerate figure data as CSV");
  figure->add_option("id", fig, "figure id (1, 2 or 3)")->required();
  figure->add_option("--out", out_path, "output file (default stdout)");

  std::string spec, partition, alpha = "0.83:1.30:0.01", mu = "1,2", format = "jsonl";
  double c_pow = 0, b_pow = 0, k = 0;
  bool exclude_one = false;
  std::size_t trials = gwlab::kDefaultTrials;
  std::uint64_t seed = 0;

  auto* verify = app.add_subcommand("verify", "run the inequality checkers on a spec");
  verify->add_option("--spec", spec, "spec file or inline JSON")->required();
  verify->add_option("--partition", partition, "blocks separated by '|', members by ','");
  verify->add_option("--alpha", alpha, "alpha grid start:stop:step")->capture_default_str();
  verify->add_flag("--exclude-one", exclude_one, "drop alpha = 1 from the grid");
  verify->add_option("--mu", mu, "comma-separated powers")->capture_default_str();
  auto* c_opt = verify->add_option("--c-pow", c_pow, "tighter-bound condition power (>= 2)");
  auto* b_opt = verify->add_option("--b-pow", b_pow, "tighter-bound power in [0, c_pow]");
  auto* k_opt = verify->add_option("--k", k, "tighter-bound ratio (>= 1)");
  verify->add_option("--format", format, "jsonl or csv")->check(CLI::IsMember({"jsonl", "csv"}))->capture_default_str();
  verify->add_option("--out", out_path, "output file (default stdout)");

  std::string oracle_alpha = "1.1";
  auto* oracle = app.add_subcommand("oracle", "oracle estimates of convex-roof and assisted values");
  oracle->add_option("--spec", spec, "spec file or inline JSON")->required();
  oracle->add_option("--partition", partition, "blocks separated by '|', members by ','");
  oracle->add_option("--alpha", oracle_alpha, "alpha grid start:stop:step")->capture_default_str();
  oracle->add_option("--trials", trials, "random decompositions per estimate")->capture_default_str();
  auto* seed_opt = oracle->add_option("--seed", seed, "64-bit seed (default GWLAB_SEED or built-in)");
  oracle->add_option("--out", out_path, "output file (default stdout)");

  std::string n_list = "1,16", d_list = "2,4";
  auto* games = app.add_subcommand("gamebounds", "gap-bound table as CSV");
  games->add_option("--n", n_list, "comma-separated player counts")->capture_default_str();
  games->add_option("--d", d_list, "comma-separated local dimensions")->capture_default_str();
  games->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gwlab::kExitBadInput;
  }

  std::ostringstream out;
  out.imbue(std::locale::classic());
  int code = 0;
  try {
    if (*figure) {
      code = gwlab::cmd_figure(fig, out, std::cerr);
    } else if (*games) {
      code = gwlab::cmd_gamebounds(parse_list<std::size_t>(n_list, "--n"), parse_list<std::size_t>(d_list, "--d"), out,
                                   std::cerr);
    } else {
      gwlab::RunConfig cfg;
      cfg.spec = spec;
      if (!partition.empty()) cfg.partition = partition;
      if (*verify) {
        cfg.alpha = gwlab::AlphaGrid::parse(alpha, exclude_one);
        cfg.mu = parse_list<double>(mu, "--mu");
        if (*c_opt) cfg.c_pow = c_pow;
        if (*b_opt) cfg.b_pow = b_pow;
        if (*k_opt) cfg.k = k;
        cfg.format = format == "csv" ? gwlab::OutputFormat::csv : gwlab::OutputFormat::jsonl;
        code = gwlab::cmd_verify(cfg, out, std::cerr);
      } else {
        cfg.alpha = gwlab::AlphaGrid::parse(oracle_alpha, false);
        cfg.trials = trials;
        cfg.seed = *seed_opt ? seed : gwlab::seed_from_env();
        code = gwlab::cmd_oracle(cfg, out, std::cerr);
      }
    }
  } catch (const gwlab::Error& e) {
    std::cerr << "gwlab: " << e.what() << '\n';
    return gwlab::kExitBadInput;
  }
  if (code == gwlab::kExitBadInput) return code;
  const int written = emit(out_path, out.str());
  return written ? written : code;
}
