#include "fbsde/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fbsde/error.hpp"

namespace fbsde {

int CliConfig::effective_ni() const { return ni.value_or(std::max(5, k + 2)); }
int CliConfig::effective_r() const { return r.value_or(effective_ni()); }
Real CliConfig::effective_epsilon0() const { return epsilon0.value_or(kDefaultEpsilon0); }

bool CliConfig::operator==(const CliConfig& o) const {
  const auto same_params = [](const ProblemParams& a, const ProblemParams& b) {
    return a.c == b.c && a.rate == b.rate && a.m == b.m && a.beta == b.beta &&
           a.sigma == b.sigma && a.p == b.p && a.q == b.q && a.control_c == b.control_c &&
           a.horizon == b.horizon;
  };
  return problem == o.problem && k == o.k && ng == o.ng && ni == o.ni && r == o.r &&
         lo == o.lo && hi == o.hi && t0 == o.t0 && x0 == o.x0 && horizon == o.horizon &&
         ns == o.ns && y_solver == o.y_solver && epsilon0 == o.epsilon0 &&
         max_iters == o.max_iters && boundary == o.boundary && output == o.output &&
         format == o.format && strict == o.strict && same_params(params, o.params);
}

namespace {

struct FlagSpec {
  std::string_view name;
  int arity;
};

constexpr FlagSpec kFlags[] = {
    {"problem", 1}, {"k", 1},       {"ng", 1},      {"ni", 1},        {"r", 1},
    {"mg", 2},      {"t0", 1},      {"x0", 1},      {"T", 1},         {"ns", 1},
    {"solver", 1},  {"eps", 1},     {"max-iters", 1}, {"boundary", 1}, {"out", 1},
    {"format", 1},  {"strict", 0},  {"config", 1},  {"c", 1},         {"rate", 1},
    {"M", 1},       {"beta", 1},    {"sigma", 1},   {"p", 1},         {"q", 1},
    {"e", 1},       {"sh", 1},
};

const FlagSpec* find_flag(std::string_view name) {
  for (const auto& f : kFlags)
    if (f.name == name) return &f;
  return nullptr;
}

bool looks_like_flag(std::string_view tok) {
  return tok.size() >= 2 && tok[0] == '-' &&
         (std::isalpha(static_cast<unsigned char>(tok[1])) || tok[1] == '-');
}

std::string_view strip_dashes(std::string_view tok) {
  tok.remove_prefix(tok.starts_with("--") ? 2 : 1);
  return tok;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::string_view where, std::string_view value) {
  fail(ErrorCode::Usage,
       "invalid value '" + std::string(value) + "' for " + std::string(where));
}

int to_int(std::string_view where, std::string_view v) {
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad_value(where, v);
  return out;
}

Real to_real(std::string_view where, std::string_view v) {
  Real out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !is_finite(out))
    bad_value(where, v);
  return out;
}

std::vector<int> to_int_list(std::string_view where, std::string_view v) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = v.find(',', pos);
    const auto piece = trim(v.substr(pos, comma == std::string_view::npos ? v.npos : comma - pos));
    if (piece.empty()) bad_value(where, v);
    out.push_back(to_int(where, piece));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

bool to_bool(std::string_view where, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(where, v);
}

std::string fmt(Real v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string_view solver_name(YSolver s) { return s == YSolver::Newton ? "newton" : "picard"; }

std::string_view boundary_name(BoundaryPolicy b) {
  switch (b) {
    case BoundaryPolicy::Extrapolate: return "extrapolate";
    case BoundaryPolicy::Clamp: return "clamp";
    case BoundaryPolicy::Strict: return "strict";
  }
  return "extrapolate";
}

// values.size() equals the flag's arity.
void apply(CliConfig& cfg, std::string_view name, const std::vector<std::string>& values,
           std::string_view where) {
  const std::string_view v = values.empty() ? std::string_view() : std::string_view(values[0]);
  if (name == "problem") cfg.problem = std::string(v);
  else if (name == "k") cfg.k = to_int(where, v);
  else if (name == "ng") cfg.ng = to_int(where, v);
  else if (name == "ni") cfg.ni = to_int(where, v);
  else if (name == "r") cfg.r = to_int(where, v);
  else if (name == "mg") {
    cfg.lo = to_real(where, values[0]);
    cfg.hi = to_real(where, values[1]);
  } else if (name == "t0") cfg.t0 = to_real(where, v);
  else if (name == "x0") cfg.x0 = to_real(where, v);
  else if (name == "T") cfg.horizon = to_real(where, v);
  else if (name == "ns") cfg.ns = to_int_list(where, v);
  else if (name == "solver") {
    if (v == "picard") cfg.y_solver = YSolver::Picard;
    else if (v == "newton") cfg.y_solver = YSolver::Newton;
    else bad_value(where, v);
  } else if (name == "eps") cfg.epsilon0 = to_real(where, v);
  else if (name == "max-iters") cfg.max_iters = to_int(where, v);
  else if (name == "boundary") {
    if (v == "extrapolate") cfg.boundary = BoundaryPolicy::Extrapolate;
    else if (v == "clamp") cfg.boundary = BoundaryPolicy::Clamp;
    else if (v == "strict") cfg.boundary = BoundaryPolicy::Strict;
    else bad_value(where, v);
  } else if (name == "out") cfg.output = std::string(v);
  else if (name == "format") {
    if (v == "csv") cfg.format = ReportFormat::Csv;
    else if (v == "md" || v == "markdown") cfg.format = ReportFormat::Markdown;
    else bad_value(where, v);
  } else if (name == "strict") cfg.strict = values.empty() ? true : to_bool(where, v);
  else if (name == "c") cfg.params.c = to_real(where, v);
  else if (name == "rate") cfg.params.rate = to_real(where, v);
  else if (name == "M") cfg.params.m = to_real(where, v);
  else if (name == "beta") cfg.params.beta = to_real(where, v);
  else if (name == "sigma") cfg.params.sigma = to_real(where, v);
  else if (name == "p") cfg.params.p = to_real(where, v);
  else if (name == "q") cfg.params.q = to_real(where, v);
  else if (name == "e" || name == "sh")
    cfg.warnings.push_back("ignoring -" + std::string(name) + " " + std::string(v) +
                           " (flag has no defined meaning)");
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

void apply_config_text(CliConfig& cfg, std::string_view text) {
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no);
    const auto eq = content.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Usage, where + ": expected key = value");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    const FlagSpec* spec = find_flag(key);
    if (!spec || key == "config") fail(ErrorCode::Usage, where + ": unknown key '" + key + "'");
    std::vector<std::string> values;
    if (spec->arity == 2) {
      values = split_ws(value);
      if (values.size() != 2) bad_value(where + " (" + key + ")", value);
    } else if (spec->arity == 1 || !value.empty()) {
      values.push_back(value);
    }
    apply(cfg, key, values, where + " (" + key + ")");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

[[noreturn]] void usage_error(const std::string& msg) { fail(ErrorCode::Usage, msg); }

}  // namespace

CliConfig parse_config_text(std::string_view text) {
  CliConfig cfg;
  apply_config_text(cfg, text);
  return cfg;
}

CliConfig parse_args(std::span<const std::string> args) {
  CliConfig cfg;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (looks_like_flag(args[i]) && strip_dashes(args[i]) == "config") {
      if (i + 1 >= args.size()) usage_error("missing value for " + args[i]);
      apply_config_text(cfg, read_file(args[i + 1]));
    }
  }
  for (std::size_t i = 0; i < args.size();) {
    const std::string& tok = args[i];
    if (!looks_like_flag(tok)) usage_error("unexpected argument '" + tok + "'");
    const std::string_view name = strip_dashes(tok);
    const FlagSpec* spec = find_flag(name);
    if (!spec) usage_error("unknown flag '" + tok + "'");
    if (i + static_cast<std::size_t>(spec->arity) >= args.size() && spec->arity > 0)
      usage_error("missing value for " + tok);
    std::vector<std::string> values(args.begin() + static_cast<long>(i) + 1,
                                    args.begin() + static_cast<long>(i) + 1 + spec->arity);
    if (name != "config") apply(cfg, name, values, tok);
    i += 1 + static_cast<std::size_t>(spec->arity);
  }
  validate(cfg);
  return cfg;
}

void validate(const CliConfig& cfg) {
  if (!is_registered_problem(cfg.problem)) {
    std::string known;
    for (const auto& n : problem_names()) known += (known.empty() ? "" : ", ") + n;
    usage_error("--problem: unknown problem '" + cfg.problem + "' (known: " + known + ")");
  }
  if (cfg.k < kMinSteps || cfg.k > kMaxSteps)
    usage_error("-k must lie in [1, 8], got " + std::to_string(cfg.k));
  if (cfg.ng < 2 || cfg.ng > kMaxQuadratureNodes)
    usage_error("-ng must lie in [2, 64], got " + std::to_string(cfg.ng));
  if (cfg.effective_ni() < 1 || cfg.effective_ni() > kMaxInterpolationDegree)
    usage_error("-ni must lie in [1, 32], got " + std::to_string(cfg.effective_ni()));
  if (cfg.effective_r() < cfg.k)
    usage_error("-r must be at least k, got " + std::to_string(cfg.effective_r()));
  if (!(cfg.lo < cfg.hi)) usage_error("--mg needs LO < HI");
  if (cfg.ns.empty()) usage_error("--ns needs at least one value");
  for (std::size_t i = 0; i < cfg.ns.size(); ++i) {
    if (cfg.ns[i] < cfg.k + 1)
      usage_error("--ns values must be at least k+1, got " + std::to_string(cfg.ns[i]));
    if (i > 0 && cfg.ns[i] <= cfg.ns[i - 1]) usage_error("--ns values must be strictly ascending");
  }
  if (!(cfg.effective_epsilon0() > 0)) usage_error("--eps must be positive");
  if (cfg.max_iters < 1) usage_error("--max-iters must be at least 1");
  if (cfg.horizon && !(*cfg.horizon > 0)) usage_error("-T must be positive");
  if (cfg.output && cfg.output->empty()) usage_error("--out needs a path");
}

std::string serialize(const CliConfig& cfg) {
  std::ostringstream os;
  os << "problem = " << cfg.problem << '\n'
     << "k = " << cfg.k << '\n'
     << "ng = " << cfg.ng << '\n';
  if (cfg.ni) os << "ni = " << *cfg.ni << '\n';
  if (cfg.r) os << "r = " << *cfg.r << '\n';
  os << "mg = " << fmt(cfg.lo) << ' ' << fmt(cfg.hi) << '\n';
  if (cfg.t0) os << "t0 = " << fmt(*cfg.t0) << '\n';
  if (cfg.x0) os << "x0 = " << fmt(*cfg.x0) << '\n';
  if (cfg.horizon) os << "T = " << fmt(*cfg.horizon) << '\n';
  os << "ns = ";
  for (std::size_t i = 0; i < cfg.ns.size(); ++i) os << (i ? "," : "") << cfg.ns[i];
  os << '\n'
     << "solver = " << solver_name(cfg.y_solver) << '\n';
  if (cfg.epsilon0) os << "eps = " << fmt(*cfg.epsilon0) << '\n';
  os << "max-iters = " << cfg.max_iters << '\n'
     << "boundary = " << boundary_name(cfg.boundary) << '\n';
  if (cfg.output) os << "out = " << *cfg.output << '\n';
  os << "format = " << (cfg.format == ReportFormat::Csv ? "csv" : "md") << '\n'
     << "strict = " << (cfg.strict ? "true" : "false") << '\n';
  const auto opt = [&os](std::string_view key, const std::optional<Real>& v) {
    if (v) os << key << " = " << fmt(*v) << '\n';
  };
  opt("c", cfg.params.c);
  opt("rate", cfg.params.rate);
  opt("M", cfg.params.m);
  opt("beta", cfg.params.beta);
  opt("sigma", cfg.params.sigma);
  opt("p", cfg.params.p);
  opt("q", cfg.params.q);
  return os.str();
}

SolverConfig solver_config(const CliConfig& cfg) {
  SolverConfig s;
  s.k = cfg.k;
  s.ng = cfg.ng;
  s.ni = cfg.effective_ni();
  s.r = cfg.effective_r();
  s.epsilon0 = cfg.effective_epsilon0();
  s.max_iters = cfg.max_iters;
  s.y_solver = cfg.y_solver;
  s.boundary = cfg.boundary;
  return s;
}

ProblemSpec problem_for(const CliConfig& cfg) {
  ProblemParams params = cfg.params;
  params.horizon = cfg.horizon;
  if (cfg.problem == "control" && params.c) params.control_c = params.c;
  ProblemSpec spec = make_problem(cfg.problem, params);
  if (cfg.t0) spec.t0 = *cfg.t0;
  if (cfg.x0) spec.x0 = *cfg.x0;
  require(spec.t0 < spec.horizon, "t0 must lie before the horizon T");
  return spec;
}

std::string usage() {
  return "usage: fbsde [options]\n"
         "  --problem NAME     ex1 | ex2 | ex3 | ex4 | control (default ex1)\n"
         "  -k K               multistep order, 1..8 (default 1)\n"
         "  -ng NG             Gauss-Hermite nodes (default 10)\n"
         "  -ni NI             interpolation degree (default max(5, k+2))\n"
         "  -r R               degree balancing h = dt^((k+1)/(r+1)) (default NI)\n"
         "  --mg LO HI         space box (default -20 20)\n"
         "  --t0 T0  --x0 X0  -T T\n"
         "  --ns N1,N2,...     time step counts (default 32,64,128,256,512)\n"
         "  --solver picard|newton\n"
         "  --eps EPS          iteration tolerance\n"
         "  --max-iters N      iteration cap (default 200)\n"
         "  --boundary extrapolate|clamp|strict\n"
         "  --out PATH  --format md|csv  --strict\n"
         "  --config FILE      key = value lines; flags override\n"
         "  --c --rate --M --beta --sigma --p --q   problem parameters\n"
         "  -e, -sh            accepted and ignored\n"
         "Worker threads: FBSDE_THREADS.\n";
}

int run_main(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  validate(cfg);
  for (const auto& w : cfg.warnings) err << "warning: " << w << '\n';
  const ProblemSpec spec = problem_for(cfg);
  const RunReport report = sweep(spec, solver_config(cfg), cfg.ns, Box{cfg.lo, cfg.hi});
  out << render(report, cfg.format);
  for (const auto& row : report.rows)
    if (row.status != RowStatus::Ok) err << "N=" << row.n_steps << ": " << row.message << '\n';
  if (cfg.output) write_report(report, *cfg.output, cfg.format);
  return cfg.strict && !report.all_ok() ? 1 : 0;
}

int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  for (const auto& a : args) {
    if (a == "-h" || a == "--help") {
      out << usage();
      return 0;
    }
  }
  try {
    return run_main(parse_args(args), out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::Usage:
        err << "run with --help for the flag list\n";
        return 2;
      case ErrorCode::InvalidArgument: return 2;
      case ErrorCode::Io: return 3;
      default: return 4;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace fbsde
