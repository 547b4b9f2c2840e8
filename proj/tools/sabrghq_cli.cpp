// sabrghq: tables for the uncorrelated SABR model as CSV.
//
// Exit codes: 0 success, 2 invalid parameters, 3 numerical failure (no
// implied volatility at a grid point, or an arbitrageable price grid).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sabrghq/sabrghq.hpp"

namespace {

using namespace sabrghq;
using repro::format_cell;
using repro::format_double;

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

struct Preset {
  double x0, y0, nu, beta, maturity;
};

// Published parameter sets. "curve" is the mass-versus-maturity case; its
// maturity is only a placeholder because the command sweeps a grid.
const std::map<std::string, Preset> kPresets = {
    {"curve", {0.03, 0.6, 1.0, 0.5, 1.0}},
    {"smile-a", {0.5, 0.5, 0.4, 0.5, 2.0}},
    {"smile-b", {0.05, 0.4, 0.6, 0.3, 1.0}},
};

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  std::string text() const { return format_double(lo) + ":" + format_double(hi) + ":" + std::to_string(count); }
};

Grid parse_grid(const std::string& s, const char* flag) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  for (std::string piece; std::getline(in, piece, ':');) parts.push_back(piece);
  if (parts.size() != 3) throw DomainError(std::string(flag) + ": expected lo:hi:count");
  try {
    std::size_t used = 0;
    Grid g;
    g.lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
    g.hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    g.count = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    return g;
  } catch (const std::logic_error&) {
    throw DomainError(std::string(flag) + ": cannot parse '" + s + "'");
  }
}

struct Options {
  std::string preset;
  std::optional<double> x0, y0, nu, beta, maturity;
  int n = kDefaultQuadratureOrder;
  std::string grid;
  std::optional<double> strike;
  bool put = false;
  std::size_t paths = 100000;
  std::size_t steps = 256;
  std::uint64_t seed = McConfig{}.seed;
  unsigned threads = 0;
  std::string out;
};

void add_common(CLI::App& cmd, Options& o, const std::string& default_preset) {
  o.preset = default_preset;
  cmd.add_option("--preset", o.preset, "Published parameter set supplying defaults")
      ->check(CLI::IsMember({"curve", "smile-a", "smile-b"}))
      ->capture_default_str();
  cmd.add_option("--x0", o.x0, "Initial forward (overrides the preset)");
  cmd.add_option("--y0", o.y0, "Initial volatility (overrides the preset)");
  cmd.add_option("--nu", o.nu, "Volatility of volatility (overrides the preset)");
  cmd.add_option("--beta", o.beta, "CEV exponent in [0, 1] (overrides the preset)");
  cmd.add_option("--n", o.n, "Gauss-Hermite order")->capture_default_str();
  cmd.add_option("--threads", o.threads, "Worker threads, 0 = all cores; output does not depend on it")
      ->capture_default_str();
  cmd.add_option("--out", o.out, "Output CSV path (default: standard output)");
}

void add_mc(CLI::App& cmd, Options& o, bool optional_mc) {
  cmd.add_option("--paths", o.paths,
                 optional_mc ? "Monte Carlo paths, 0 skips the simulation columns" : "Monte Carlo paths")
      ->capture_default_str();
  cmd.add_option("--steps", o.steps, "Simpson intervals per path (even)")->capture_default_str();
  cmd.add_option("--seed", o.seed, "SplitMix64 seed")->capture_default_str();
}

SabrParams params_of(const Options& o) {
  const Preset& p = kPresets.at(o.preset);
  return SabrParams(o.x0.value_or(p.x0), o.y0.value_or(p.y0), o.nu.value_or(p.nu), o.beta.value_or(p.beta));
}

double maturity_of(const Options& o) { return o.maturity.value_or(kPresets.at(o.preset).maturity); }

std::optional<McConfig> mc_of(const Options& o, bool optional_mc) {
  if (optional_mc && o.paths == 0) return std::nullopt;
  McConfig cfg;
  cfg.paths = o.paths;
  cfg.steps = o.steps;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.validate();
  return cfg;
}

std::string echo(const std::string& command, const SabrParams& p) {
  return "sabrghq " + command + " x0=" + format_double(p.x0()) + " y0=" + format_double(p.y0()) +
         " nu=" + format_double(p.nu()) + " beta=" + format_double(p.beta());
}

std::string echo_mc(const std::optional<McConfig>& cfg) {
  if (!cfg) return " paths=0";
  return " paths=" + std::to_string(cfg->paths) + " steps=" + std::to_string(cfg->steps) +
         " seed=" + std::to_string(cfg->seed);
}

std::optional<double> mc_estimate(const std::optional<McResult>& r) {
  return r ? std::optional<double>(r->estimate) : std::nullopt;
}

std::optional<double> mc_error(const std::optional<McResult>& r) {
  return r ? std::optional<double>(r->std_error) : std::nullopt;
}

class NumericalFailure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

void run_mass_curve(const Options& o, std::ostream& out) {
  const SabrParams p = params_of(o);
  const Grid g = parse_grid(o.grid, "--t-grid");
  const auto cfg = mc_of(o, true);
  const auto ts = repro::linspace(g.lo, g.hi, g.count);
  const auto rows = repro::mass_curve_rows(p, ts, o.n, cfg);
  repro::CsvWriter csv(out);
  csv.comment(echo("mass-curve", p) + " n=" + std::to_string(o.n) + " t_grid=" + g.text() + echo_mc(cfg));
  csv.row({"T", "mass_ghq", "mass_mc", "mc_std_error"});
  for (const auto& r : rows)
    csv.row({format_double(r.maturity), format_double(r.mass_ghq), format_cell(mc_estimate(r.mc)),
             format_cell(mc_error(r.mc))});
}

void run_smile(const Options& o, std::ostream& out) {
  const SabrParams p = params_of(o);
  const double t = maturity_of(o);
  const Grid g = parse_grid(o.grid, "--strikes");
  const auto cfg = mc_of(o, true);
  const auto ks = repro::linspace(g.lo, g.hi, g.count);
  const auto table = repro::smile_rows(p, t, ks, o.n, cfg, o.threads);

  std::vector<double> strikes;
  std::vector<double> prices;
  for (const auto& r : table.rows) {
    strikes.push_back(r.strike);
    prices.push_back(r.price_ghq);
  }
  if (!repro::arbitrage_free(strikes, prices, 1e-10 * p.x0()))
    throw NumericalFailure("smile: call prices are not non-increasing and convex in strike");

  repro::CsvWriter csv(out);
  std::string head = echo("smile", p) + " maturity=" + format_double(t) + " n=" + std::to_string(o.n) +
                     " strikes=" + g.text() + echo_mc(cfg);
  if (!std::isnan(table.mass_ghq)) head += " mass_ghq=" + format_double(table.mass_ghq);
  csv.comment(head);
  csv.row({"K", "log_moneyness", "price_ghq", "iv_ghq", "iv_hklw", "iv_dmhj", "price_mc", "mc_std_error"});
  for (const auto& r : table.rows)
    csv.row({format_double(r.strike), format_double(r.log_moneyness), format_double(r.price_ghq),
             format_double(r.iv_ghq), format_cell(r.iv_hklw), format_cell(r.iv_dmhj), format_cell(mc_estimate(r.mc)),
             format_cell(mc_error(r.mc))});
}

void run_price(const Options& o, std::ostream& out) {
  const SabrParams p = params_of(o);
  const double t = maturity_of(o);
  const OptionSpec spec{o.strike.value_or(p.x0()), t, o.put ? OptionKind::put : OptionKind::call};
  spec.validate();
  const auto cfg = mc_of(o, true);
  const double price = price_ghq(p, spec, o.n);
  const double call = o.put ? price + p.x0() - spec.strike : price;
  const double iv = implied_vol_bs(call, p.x0(), spec.strike, t);
  std::optional<McResult> mc;
  if (cfg) mc = price_mc(p, spec, *cfg);

  repro::CsvWriter csv(out);
  csv.comment(echo("price", p) + " maturity=" + format_double(t) + " n=" + std::to_string(o.n) + echo_mc(cfg));
  csv.row({"K", "kind", "price_ghq", "iv_ghq", "price_mc", "mc_std_error"});
  csv.row({format_double(spec.strike), o.put ? "put" : "call", format_double(price), format_double(iv),
           format_cell(mc_estimate(mc)), format_cell(mc_error(mc))});
}

void run_mc_check(const Options& o, std::ostream& out) {
  const SabrParams p = params_of(o);
  const double t = maturity_of(o);
  const Grid g = parse_grid(o.grid, "--strikes");
  const auto cfg = *mc_of(o, false);
  std::vector<double> strikes;
  for (double k : repro::linspace(g.lo, g.hi, g.count)) strikes.push_back(p.x0() * std::exp(k));
  const auto rows = repro::mc_check_rows(p, t, strikes, o.n, cfg);

  repro::CsvWriter csv(out);
  csv.comment(echo("mc-check", p) + " maturity=" + format_double(t) + " n=" + std::to_string(o.n) +
              " strikes=" + g.text() + echo_mc(cfg));
  csv.row({"quantity", "K", "ghq", "mc", "mc_std_error", "abs_diff", "budget", "agrees"});
  for (const auto& r : rows)
    csv.row({r.quantity, format_cell(r.strike), format_double(r.ghq), format_double(r.mc.estimate),
             format_double(r.mc.std_error), format_double(std::fabs(r.mc.estimate - r.ghq)), format_double(r.budget),
             r.agrees() ? "1" : "0"});
}

void run_converge(const Options& o, std::ostream& out) {
  const SabrParams p = params_of(o);
  const double t = o.maturity.value_or(0.05);
  const auto rows = repro::converge_rows(p, t);
  repro::CsvWriter csv(out);
  csv.comment(echo("converge", p) + " maturity=" + format_double(t) + " reference_n=100");
  csv.row({"n", "mass", "abs_error"});
  for (const auto& r : rows) csv.row({std::to_string(r.order), format_double(r.mass), format_double(r.error)});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mass at zero, prices and implied volatilities for the uncorrelated SABR model, as CSV."};
  app.require_subcommand(1);

  Options mass_opts, smile_opts, price_opts, check_opts, conv_opts;

  auto* mass = app.add_subcommand("mass-curve", "Mass at zero against maturity, quadrature and Monte Carlo");
  add_common(*mass, mass_opts, "curve");
  add_mc(*mass, mass_opts, true);
  mass_opts.grid = "0.25:10:40";
  mass->add_option("--t-grid", mass_opts.grid, "Maturities lo:hi:count, evenly spaced (default is a choice)")
      ->capture_default_str();

  auto* smile = app.add_subcommand("smile", "Implied volatility smile with reference approximations");
  add_common(*smile, smile_opts, "smile-a");
  add_mc(*smile, smile_opts, true);
  smile->add_option("--maturity", smile_opts.maturity, "Maturity (overrides the preset)");
  smile_opts.grid = "-4:1:41";
  smile->add_option("--strikes", smile_opts.grid,
                    "Log-moneyness lo:hi:count, strikes x0 exp(k) (default is a choice; write --strikes=-4:1:41)")
      ->capture_default_str();

  auto* price = app.add_subcommand("price", "Single option price and implied volatility");
  add_common(*price, price_opts, "smile-a");
  add_mc(*price, price_opts, true);
  price->add_option("--maturity", price_opts.maturity, "Maturity (overrides the preset)");
  price->add_option("--strike", price_opts.strike, "Strike (default: at the money)");
  price->add_flag("--put", price_opts.put, "Price a put instead of a call");

  auto* check = app.add_subcommand("mc-check", "Quadrature against conditional Monte Carlo");
  add_common(*check, check_opts, "smile-a");
  add_mc(*check, check_opts, false);
  check->add_option("--maturity", check_opts.maturity, "Maturity (overrides the preset)");
  check_opts.grid = "-1:0.5:5";
  check->add_option("--strikes", check_opts.grid, "Log-moneyness lo:hi:count (default is a choice)")
      ->capture_default_str();

  auto* conv = app.add_subcommand("converge", "Mass at zero against quadrature order, n = 2..20 and 100");
  add_common(*conv, conv_opts, "curve");
  conv->add_option("--maturity", conv_opts.maturity, "Maturity (default 0.05 is a choice)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  std::ostringstream buffer;
  buffer.precision(17);
  try {
    if (*mass) run_mass_curve(mass_opts, buffer);
    else if (*smile) run_smile(smile_opts, buffer);
    else if (*price) run_price(price_opts, buffer);
    else if (*check) run_mc_check(check_opts, buffer);
    else run_converge(conv_opts, buffer);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const BandError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }

  std::string out_path;
  for (const Options* o : {&mass_opts, &smile_opts, &price_opts, &check_opts, &conv_opts})
    if (!o->out.empty()) out_path = o->out;
  if (out_path.empty()) {
    std::cout << buffer.str();
    return 0;
  }
  std::ofstream file(out_path, std::ios::binary);
  file << buffer.str();
  if (!file) {
    std::cerr << "error: cannot write " << out_path << '\n';
    return kExitInvalid;
  }
  return 0;
}
