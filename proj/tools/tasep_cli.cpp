// Command-line front end: exact and numerical evaluators for the
// backward-sequential discrete-time exclusion process.  Every subcommand
// writes a CSV table (header row naming every column) plus a JSON sidecar
// that echoes the full resolved configuration, so each output file can be
// regenerated byte-for-byte from its sidecar.
//
// Exit codes: 0 success, 2 invalid parameters, 3 numerical non-convergence.

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tasep/asymptotics.hpp"
#include "tasep/boundary.hpp"
#include "tasep/fredholm.hpp"
#include "tasep/green.hpp"
#include "tasep/mc.hpp"

using nlohmann::json;
using namespace tasep;
namespace bd = tasep::boundary;
namespace fh = tasep::fredholm;
namespace as_ = tasep::asymptotics;

namespace {

// ---------------------------------------------------------------------------
// parsing helpers

Rational parse_rational(const std::string& s) {
  try {
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
      const Rational r(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
      return r;
    }
    const auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(BigInt(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    BigInt den = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return Rational(BigInt(digits), den);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse '" + s + "' as a rational number");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

long long parse_ll(const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse '" + s + "' as an integer");
  }
}

std::vector<long long> parse_ll_list(const std::string& s) {
  std::vector<long long> out;
  for (const auto& tok : split(s, ',')) out.push_back(parse_ll(tok));
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse '" + tok + "' as a number");
    }
  }
  return out;
}

/// "x:t,x:t,..." -> space-time configuration
SpaceTimeConfig parse_stc(const std::string& s) {
  SpaceTimeConfig c;
  for (const auto& tok : split(s, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("expected 'position:time' but got '" + tok + "'");
    c.pts.push_back({parse_ll(tok.substr(0, colon)), parse_ll(tok.substr(colon + 1))});
  }
  return c;
}

// ---------------------------------------------------------------------------
// formatting helpers

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

std::string join_ll(const std::vector<long long>& v, char sep = ';') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_stc(const SpaceTimeConfig& c) {
  std::string out;
  for (std::size_t i = 0; i < c.pts.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(c.pts[i].x) + ":" + std::to_string(c.pts[i].t);
  }
  return out;
}

struct Column {
  std::string name;
  std::string description;
};

struct Table {
  std::vector<Column> columns;
  std::string body;

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body += ',';
      body += cells[i];
    }
    body += '\n';
  }

  std::string render() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out += ',';
      out += columns[i].name;
    }
    out += '\n';
    out += body;
    return out;
  }
};

void print_schema(const std::string& name, const std::vector<Column>& columns) {
  std::printf("%s CSV columns:\n", name.c_str());
  for (const auto& c : columns) std::printf("  %-14s %s\n", c.name.c_str(), c.description.c_str());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file '" + path + "'");
  f << content;
  if (!f) throw std::invalid_argument("cannot write output file '" + path + "'");
}

void write_outputs(const std::string& out, const Table& table, const std::string& subcommand,
                   const json& options, const json& extra = json::object()) {
  json side;
  side["tool"] = "tasep_cli";
  side["subcommand"] = subcommand;
  side["csv"] = out;
  side["options"] = options;
  json cols = json::array();
  for (const auto& c : table.columns) cols.push_back({{"name", c.name}, {"description", c.description}});
  side["columns"] = cols;
  if (!extra.empty()) side["results"] = extra;
  write_file(out, table.render());
  write_file(out + ".json", side.dump(2) + "\n");
  std::printf("wrote %s and %s.json\n", out.c_str(), out.c_str());
}

// ---------------------------------------------------------------------------
// subcommand option bags

struct GreenOpts {
  std::string init = "0,-1,-2";
  long long t = 1;
  std::string p = "1/2";
  std::string mode = "exact";
  std::string out = "green.csv";
  bool schema = false;
};

struct GgfOpts {
  std::string init = "0:0,-1:0";
  std::string fin = "1:2,0:2";
  std::string p = "1/2";
  std::string mode = "exact";
  std::string out = "ggf.csv";
  bool schema = false;
};

struct BoundaryOpts {
  std::string kind = "fixed-space";
  long long anchor = 2;
  std::string init = "0:0";
  std::string at;
  std::string p = "1/2";
  double tail_tol = 1e-10;
  std::string out = "boundary.csv";
  bool schema = false;
};

struct CurrentOpts {
  std::string labels = "1";
  std::string thresholds;
  long long a_from = -1, a_to = -1;
  long long x = 0, N = 1;
  std::string p = "1/2";
  double tol = 1e-8;
  int max_doublings = 10;
  double conjugation = 1.0;
  long long horizon = 0;
  std::string out = "current.csv";
  bool schema = false;
};

struct SimulateOpts {
  long long N = 3, x = 0;
  std::string p = "1/2";
  long long t_cap = 200;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  long long sweeps = -1;
  std::string init;
  std::string out = "simulate.csv";
  bool schema = false;
};

struct AiryOpts {
  std::string p = "1/2";
  double gamma = 1.0;
  std::string u = "-0.6,-0.3,0";
  std::string s = "-0.5,0,0.5";
  std::string L = "50,100";
  double tol = 1e-8;
  std::string out = "airy.csv";
  bool schema = false;
};

// ---------------------------------------------------------------------------
// subcommand runners

int run_green(const GreenOpts& o) {
  const std::vector<Column> columns = {
      {"row", "0-based row index"},
      {"final", "final positions, rightmost first, ';'-separated"},
      {"weight", "transition probability from the initial configuration ('num/den' in exact mode)"}};
  if (o.schema) {
    print_schema("green", columns);
    return 0;
  }
  const auto mp = make_params(parse_rational(o.p));
  const ParticleConfig from{parse_ll_list(o.init)};
  Table table;
  table.columns = columns;
  long long row = 0;
  for (const auto& cfg : green::reachable_configs(from, o.t)) {
    const Rational w = green::green_det(cfg, from, o.t, mp);
    table.row({std::to_string(row++), join_ll(cfg.x),
               o.mode == "float" ? num(to_double(w)) : format_scalar(w)});
  }
  const json options = {{"init", o.init}, {"t", o.t},     {"p", o.p},
                        {"mode", o.mode}, {"out", o.out}};
  write_outputs(o.out, table, "green", options);
  return 0;
}

int run_ggf(const GgfOpts& o) {
  const std::vector<Column> columns = {
      {"final", "final space-time points 'x:t', ';'-separated"},
      {"init", "initial space-time points 'x:t', ';'-separated"},
      {"value", "space-time transition weight ('num/den' in exact mode)"}};
  if (o.schema) {
    print_schema("ggf", columns);
    return 0;
  }
  const auto mp = make_params(parse_rational(o.p));
  const SpaceTimeConfig init = parse_stc(o.init);
  const SpaceTimeConfig fin = parse_stc(o.fin);
  const Rational v = green::ggf_det(fin, init, mp);
  Table table;
  table.columns = columns;
  table.row({join_stc(fin), join_stc(init),
             o.mode == "float" ? num(to_double(v)) : format_scalar(v)});
  const json options = {{"init", o.init}, {"final", o.fin}, {"p", o.p},
                        {"mode", o.mode}, {"out", o.out}};
  write_outputs(o.out, table, "ggf", options);
  return 0;
}

int run_boundary(const BoundaryOpts& o) {
  const std::vector<Column> columns = {
      {"quantity", "'measure' for one crossing configuration, 'normalization' for the total mass"},
      {"kind", "boundary family: fixed-space (vertical column) or fixed-time (horizontal line)"},
      {"anchor", "column position (fixed-space) or time (fixed-time) of the base staircase"},
      {"copies", "number of left-shifted staircase copies (= particle count)"},
      {"init", "initial space-time points 'x:t', ';'-separated"},
      {"at", "crossing configuration for 'measure' rows, '-' otherwise"},
      {"value", "exact value as 'num/den'"}};
  if (o.schema) {
    print_schema("boundary", columns);
    return 0;
  }
  const auto mp = make_params(parse_rational(o.p));
  const SpaceTimeConfig init = parse_stc(o.init);
  bd::Staircase base = o.kind == "fixed-time" ? bd::Staircase::fixed_time(o.anchor)
                                              : bd::Staircase::fixed_space(o.anchor);
  if (o.kind != "fixed-space" && o.kind != "fixed-time")
    throw std::invalid_argument("kind must be fixed-space or fixed-time");
  const bd::NBoundary nb{base, init.pts.size()};
  Table table;
  table.columns = columns;
  if (!o.at.empty()) {
    const SpaceTimeConfig at = parse_stc(o.at);
    const Rational v = bd::boundary_measure(at, nb, init, mp);
    table.row({"measure", o.kind, std::to_string(o.anchor), std::to_string(nb.n), join_stc(init),
               join_stc(at), format_scalar(v)});
  } else {
    const Rational v = bd::boundary_normalization(nb, init, mp, o.tail_tol);
    table.row({"normalization", o.kind, std::to_string(o.anchor), std::to_string(nb.n),
               join_stc(init), "-", format_scalar(v)});
  }
  const json options = {{"kind", o.kind}, {"anchor", o.anchor},     {"init", o.init},
                        {"at", o.at},     {"p", o.p},               {"tail-tol", o.tail_tol},
                        {"out", o.out}};
  write_outputs(o.out, table, "boundary", options);
  return 0;
}

int run_current(const CurrentOpts& o) {
  const std::vector<Column> columns = {
      {"labels", "queried particle labels, ';'-separated"},
      {"thresholds", "time thresholds per label, ';'-separated"},
      {"probability", "P(jump-off time of each label <= its threshold)"},
      {"error_estimate", "change of the value under the final horizon doubling"},
      {"horizon", "time cutoff at which the value stabilized"},
      {"window", "matrix size at that cutoff"}};
  if (o.schema) {
    print_schema("current", columns);
    return 0;
  }
  const auto mp = make_params(parse_rational(o.p));
  const std::vector<long long> labels = parse_ll_list(o.labels);
  fh::TruncationPolicy pol;
  pol.horizon = o.horizon;
  pol.tolerance = o.tol;
  pol.max_doublings = o.max_doublings;
  pol.conjugation = o.conjugation;
  Table table;
  table.columns = columns;
  std::vector<std::vector<long long>> grid;
  if (o.a_from >= 0 || o.a_to >= 0) {
    if (labels.size() != 1)
      throw std::invalid_argument("threshold sweeps need exactly one label");
    if (o.a_from < 0 || o.a_to < o.a_from)
      throw std::invalid_argument("sweep range must satisfy 0 <= a-from <= a-to");
    for (long long a = o.a_from; a <= o.a_to; ++a) grid.push_back({a});
  } else {
    if (o.thresholds.empty())
      throw std::invalid_argument("need --thresholds or a sweep range --a-from/--a-to");
    grid.push_back(parse_ll_list(o.thresholds));
  }
  for (const auto& thr : grid) {
    const auto res =
        fh::joint_current_prob(fh::CurrentQuery<Rational>{labels, thr, o.x, o.N, mp}, pol);
    table.row({join_ll(labels), join_ll(thr), num(res.probability), num(res.error_estimate),
               std::to_string(res.horizon), std::to_string(res.window)});
  }
  const json options = {{"labels", o.labels},
                        {"thresholds", o.thresholds},
                        {"a-from", o.a_from},
                        {"a-to", o.a_to},
                        {"x", o.x},
                        {"N", o.N},
                        {"p", o.p},
                        {"tol", o.tol},
                        {"max-doublings", o.max_doublings},
                        {"conjugation", o.conjugation},
                        {"horizon", o.horizon},
                        {"out", o.out}};
  write_outputs(o.out, table, "current", options);
  return 0;
}

int run_simulate(const SimulateOpts& o, int threads) {
  const bool transition = o.sweeps >= 0;
  const std::vector<Column> jump_columns = {
      {"times", "observed jump-off time vector t_1..t_N, ';'-separated"},
      {"count", "number of uncensored trials with exactly this vector"}};
  const std::vector<Column> final_columns = {
      {"final", "final positions after the requested sweeps, ';'-separated"},
      {"count", "number of trials ending in this configuration"}};
  if (o.schema) {
    print_schema("simulate (jump-off mode)", jump_columns);
    print_schema("simulate (transition mode, --sweeps given)", final_columns);
    return 0;
  }
  const auto mpd = make_params<double>(to_double(parse_rational(o.p)));
  Table table;
  json extra;
  if (transition) {
    if (o.init.empty()) throw std::invalid_argument("transition mode needs --init");
    table.columns = final_columns;
    const auto counts = mc::run_transition(parse_ll_list(o.init), mpd, o.sweeps, o.trials, o.seed);
    for (const auto& [cfg, c] : counts) table.row({join_ll(cfg), std::to_string(c)});
    extra = {{"trials", o.trials}};
  } else {
    table.columns = jump_columns;
    const auto sample = mc::run_jump_off(o.N, o.x, mpd, o.t_cap, o.trials, o.seed,
                                         static_cast<unsigned>(threads));
    for (const auto& [vec, c] : sample.counts) table.row({join_ll(vec), std::to_string(c)});
    extra = {{"trials", sample.trials},
             {"censored", sample.censored},
             {"kept", sample.kept()}};
  }
  const json options = {{"N", o.N},           {"x", o.x},
                        {"p", o.p},           {"t-cap", o.t_cap},
                        {"trials", o.trials}, {"seed", o.seed},
                        {"sweeps", o.sweeps}, {"init", o.init},
                        {"threads", threads}, {"out", o.out}};
  write_outputs(o.out, table, "simulate", options, extra);
  return 0;
}

int run_airy(const AiryOpts& o) {
  const std::vector<Column> columns = {
      {"L", "lattice scale (particle count)"},
      {"u", "requested particle-label offset"},
      {"s", "requested time offset"},
      {"n", "lattice particle label"},
      {"tau", "lattice time"},
      {"x", "jump-off anchor column"},
      {"u_eff", "label offset of the floored lattice point"},
      {"s_eff", "time offset of the floored lattice point"},
      {"value", "rescaled one-point kernel at (n, tau)"},
      {"target", "scaled Airy-2 kernel at the effective offsets"},
      {"deviation", "absolute difference value - target"}};
  if (o.schema) {
    print_schema("airy", columns);
    return 0;
  }
  const Rational pr = parse_rational(o.p);
  const auto mp = make_params(pr);
  const as_::ScalingContext c = as_::make_context(to_double(pr), o.gamma);
  Table table;
  table.columns = columns;
  for (double Ld : parse_double_list(o.L)) {
    const long long L = static_cast<long long>(Ld);
    for (double u : parse_double_list(o.u))
      for (double s : parse_double_list(o.s)) {
        const as_::ScaledIndices ix = as_::scaled_indices(L, u, s, u, s, c);
        const as_::EffectiveOffsets e = as_::effective_offsets(ix, L, c);
        const double target = as_::airy2_target(e.u1, e.s1, e.u2, e.s2, c, o.tol);
        const double value = as_::rescaled_kernel(L, u, s, u, s, mp, o.gamma);
        table.row({std::to_string(L), num(u), num(s), std::to_string(ix.n1),
                   std::to_string(ix.t1), std::to_string(ix.x), num(e.u1), num(e.s1), num(value),
                   num(target), num(std::abs(value - target))});
      }
  }
  const json options = {{"p", o.p}, {"gamma", o.gamma}, {"u", o.u},     {"s", o.s},
                        {"L", o.L}, {"tol", o.tol},     {"out", o.out}};
  write_outputs(o.out, table, "airy", options);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Exact and numerical evaluators for a discrete-time totally asymmetric exclusion "
      "process with backward sequential update"};
  app.require_subcommand(1);
  app.set_config("--config", "", "plain-text key=value configuration file; flags override it");
  int threads = 1;
  app.add_option("--threads", threads,
                 "worker thread bound (every result is independent of the thread count)")
      ->capture_default_str();

  GreenOpts g;
  auto* cg = app.add_subcommand("green", "transition-probability table from one start");
  cg->add_option("--init", g.init, "initial positions, comma-separated, strictly decreasing")
      ->capture_default_str();
  cg->add_option("--t", g.t, "number of update sweeps")->capture_default_str();
  cg->add_option("--p", g.p, "hop probability (rational 'a/b', decimal, or integer)")
      ->capture_default_str();
  cg->add_option("--mode", g.mode, "arithmetic mode: exact | float")->capture_default_str();
  cg->add_option("--out", g.out, "output CSV path (sidecar at <out>.json)")->capture_default_str();
  cg->add_flag("--schema", g.schema, "print the CSV column documentation and exit");

  GgfOpts f;
  auto* cf = app.add_subcommand("ggf", "space-time transition weight for one admissible pair");
  cf->add_option("--init", f.init, "initial points 'x:t', comma-separated")->capture_default_str();
  cf->add_option("--final", f.fin, "final points 'x:t', comma-separated")->capture_default_str();
  cf->add_option("--p", f.p, "hop probability")->capture_default_str();
  cf->add_option("--mode", f.mode, "arithmetic mode: exact | float")->capture_default_str();
  cf->add_option("--out", f.out, "output CSV path (sidecar at <out>.json)")->capture_default_str();
  cf->add_flag("--schema", f.schema, "print the CSV column documentation and exit");

  BoundaryOpts b;
  auto* cb = app.add_subcommand("boundary", "staircase crossing measures and normalization");
  cb->add_option("--kind", b.kind, "boundary family: fixed-space | fixed-time")
      ->capture_default_str();
  cb->add_option("--anchor", b.anchor, "column (fixed-space) or time (fixed-time) of the base")
      ->capture_default_str();
  cb->add_option("--init", b.init, "initial points 'x:t', comma-separated")->capture_default_str();
  cb->add_option("--at", b.at, "crossing configuration 'x:t,...'; omit for the normalization");
  cb->add_option("--p", b.p, "hop probability")->capture_default_str();
  cb->add_option("--tail-tol", b.tail_tol, "tail bound for the normalization sweep")
      ->capture_default_str();
  cb->add_option("--out", b.out, "output CSV path (sidecar at <out>.json)")->capture_default_str();
  cb->add_flag("--schema", b.schema, "print the CSV column documentation and exit");

  CurrentOpts u;
  auto* cu = app.add_subcommand("current", "joint jump-off time distribution (Fredholm route)");
  cu->add_option("--labels", u.labels, "queried particle labels, comma-separated, increasing")
      ->capture_default_str();
  cu->add_option("--thresholds", u.thresholds, "time thresholds per label, comma-separated");
  cu->add_option("--a-from", u.a_from, "sweep start threshold (single label only)");
  cu->add_option("--a-to", u.a_to, "sweep end threshold (single label only)");
  cu->add_option("--x", u.x, "jump-off anchor column")->capture_default_str();
  cu->add_option("--N", u.N, "total particle count")->capture_default_str();
  cu->add_option("--p", u.p, "hop probability")->capture_default_str();
  cu->add_option("--tol", u.tol, "horizon-doubling stop tolerance")->capture_default_str();
  cu->add_option("--max-doublings", u.max_doublings, "horizon doubling budget")
      ->capture_default_str();
  cu->add_option("--conjugation", u.conjugation,
                 "base of the determinant-invariant diagonal rescaling (>= 1 recommended)")
      ->capture_default_str();
  cu->add_option("--horizon", u.horizon, "starting time cutoff; 0 derives it from the query")
      ->capture_default_str();
  cu->add_option("--out", u.out, "output CSV path (sidecar at <out>.json)")->capture_default_str();
  cu->add_flag("--schema", u.schema, "print the CSV column documentation and exit");

  SimulateOpts m;
  auto* cm = app.add_subcommand("simulate", "seeded Monte Carlo histograms");
  cm->add_option("--N", m.N, "particle count (jump-off mode)")->capture_default_str();
  cm->add_option("--x", m.x, "jump-off anchor column")->capture_default_str();
  cm->add_option("--p", m.p, "hop probability")->capture_default_str();
  cm->add_option("--t-cap", m.t_cap, "step cap per trial; slower trials count as censored")
      ->capture_default_str();
  cm->add_option("--trials", m.trials, "number of independent trials")->capture_default_str();
  cm->add_option("--seed", m.seed, "base seed; trial k uses an independent substream")
      ->capture_default_str();
  cm->add_option("--sweeps", m.sweeps,
                 "transition mode: record final configurations after this many sweeps");
  cm->add_option("--init", m.init, "initial positions for transition mode, comma-separated");
  cm->add_option("--out", m.out, "output CSV path (sidecar at <out>.json)")->capture_default_str();
  cm->add_flag("--schema", m.schema, "print the CSV column documentation and exit");

  AiryOpts a;
  auto* ca = app.add_subcommand("airy", "rescaled-kernel convergence tables");
  ca->add_option("--p", a.p, "hop probability")->capture_default_str();
  ca->add_option("--gamma", a.gamma, "column scale: anchor column = floor(L*(gamma-1))")
      ->capture_default_str();
  ca->add_option("--u", a.u, "label offsets, comma-separated")->capture_default_str();
  ca->add_option("--s", a.s, "time offsets, comma-separated")->capture_default_str();
  ca->add_option("--L", a.L, "lattice scales, comma-separated")->capture_default_str();
  ca->add_option("--tol", a.tol, "quadrature tolerance for the limit kernel")
      ->capture_default_str();
  ca->add_option("--out", a.out, "output CSV path (sidecar at <out>.json)")->capture_default_str();
  ca->add_flag("--schema", a.schema, "print the CSV column documentation and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cg) return run_green(g);
    if (*cf) return run_ggf(f);
    if (*cb) return run_boundary(b);
    if (*cu) return run_current(u);
    if (*cm) return run_simulate(m, threads);
    if (*ca) return run_airy(a);
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "non-convergence: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "invalid parameters: %s\n", e.what());
    return 2;
  }
  return 0;
}
