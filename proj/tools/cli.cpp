#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "hadamard/errors.hpp"
#include "hadamard/expansion.hpp"
#include "hadamard/hadamard.hpp"
#include "hadamard/oracle.hpp"
#include "hadamard/riesz.hpp"
#include "hadamard/suites.hpp"
#include "json.hpp"

namespace hadamard::cli {

namespace {

using json = nlohmann::json;

// ------------------------------------------------------------------ config

const std::set<std::string> kTopKeys = {"spacetime", "operator", "task", "output"};
const std::set<std::string> kSpacetimeKeys = {"dim", "half_width"};
const std::set<std::string> kOperatorKeys = {"potential", "z"};
const std::set<std::string> kOutputKeys = {"csv", "json", "svg"};

std::set<std::string> task_keys(const std::string& cmd) {
  if (cmd == "riesz") {
    return {"alpha", "alpha_im", "sign", "x", "y", "probe", "route", "box_power", "rel_tol"};
  }
  if (cmd == "coeffs") return {"K", "x", "y", "numeric"};
  if (cmd == "expand") return {"m", "N", "N_m", "kind", "sign", "x", "y"};
  if (cmd == "verify") return {"suites", "seed"};
  if (cmd == "compare") {
    return {"m", "N_max", "h", "lambda", "domain", "probes", "rel_tol", "sign"};
  }
  if (cmd == "report") return {"only", "seed"};
  return {};
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

json load_config(const std::string& path, const std::string& cmd) {
  if (path.empty()) return json::object();
  json cfg;
  try {
    if (path == "-") {
      cfg = json::parse(std::cin);
    } else {
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open config file " + path);
      cfg = json::parse(in);
    }
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(cfg, kTopKeys, "config");
  if (cfg.contains("spacetime")) check_keys(cfg["spacetime"], kSpacetimeKeys, "spacetime");
  if (cfg.contains("operator")) check_keys(cfg["operator"], kOperatorKeys, "operator");
  if (cfg.contains("task")) check_keys(cfg["task"], task_keys(cmd), "task (" + cmd + ")");
  if (cfg.contains("output")) check_keys(cfg["output"], kOutputKeys, "output");
  return cfg;
}

const json* lookup(const json& cfg, const char* block, const char* key) {
  if (!cfg.contains(block)) return nullptr;
  const json& b = cfg[block];
  if (!b.contains(key)) return nullptr;
  return &b[key];
}

template <class T>
T get_as(const json& v, const std::string& what) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config value for '" + what + "' has the wrong type");
  }
}

// Flag if given, else config, else default.
template <class T>
T resolve(const CLI::Option* flag, const T& flag_value, const json& cfg,
          const char* block, const char* key, const T& fallback) {
  if (flag && flag->count() > 0) return flag_value;
  if (const json* v = lookup(cfg, block, key)) return get_as<T>(*v, key);
  return fallback;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError("cannot parse '" + s + "' as a comma-separated list for " + what);
    }
  }
  return out;
}

Event to_event(const std::vector<double>& v, int d, const std::string& what) {
  if (static_cast<int>(v.size()) != d) {
    throw ConfigError(what + " needs " + std::to_string(d) + " coordinates");
  }
  return Event(v);
}

Event json_event(const json& v, int d, const std::string& what) {
  if (v.is_string()) return to_event(parse_list(v.get<std::string>(), what), d, what);
  return to_event(get_as<std::vector<double>>(v, what), d, what);
}

cplx json_complex(const json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
  if (v.is_object()) {
    check_keys(v, {"re", "im"}, what);
    return {v.value("re", 0.0), v.value("im", 0.0)};
  }
  throw ConfigError(what + " must be a number, [re, im] or {re, im}");
}

TestFunction json_bump(const json& v, int d, const std::string& what) {
  check_keys(v, {"center", "widths", "amplitude"}, what);
  if (!v.contains("center") || !v.contains("widths")) {
    throw ConfigError(what + " needs center and widths");
  }
  return TestFunction(json_event(v["center"], d, what + ".center"),
                      json_event(v["widths"], d, what + ".widths"),
                      v.value("amplitude", 1.0));
}

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15e", v + 0.0);  // no "-0"
  return buf;
}

std::string fmt_point(const Event& e) {
  std::ostringstream os;
  for (int i = 0; i < e.dim(); ++i) {
    if (i) os << ';';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", e[i]);
    os << buf;
  }
  return os.str();
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

// ------------------------------------------------------------------ options

// Options shared by the subcommands that build an operator.
struct OperatorFlags {
  int dim = 2;
  double half = 4.0;
  std::string potential = "0";
  double z = 0.0, z_re = 0.0, z_im = 0.0;
  CLI::Option *dim_o = nullptr, *pot_o = nullptr, *z_o = nullptr, *zr_o = nullptr,
              *zi_o = nullptr, *half_o = nullptr;

  void attach(CLI::App* app, bool with_potential) {
    dim_o = app->add_option("--dim", dim, "spacetime dimension d (2..6)");
    half_o = app->add_option("--half-width", half, "half side of the model cube");
    if (!with_potential) return;
    pot_o = app->add_option("--potential", potential,
                            "potential b: 0, a constant, bump(c...,width,height) or a polynomial");
    z_o = app->add_option("--z", z, "real spectral parameter z");
    zr_o = app->add_option("--z-re", z_re, "real part of z");
    zi_o = app->add_option("--z-im", z_im, "imaginary part of z");
  }

  int resolve_dim(const json& cfg) const {
    int d = resolve(dim_o, dim, cfg, "spacetime", "dim", 2);
    if (d < 2 || d > kMaxDim) throw ConfigError("dimension must be in 2..6");
    return d;
  }

  ModelPtr model(const json& cfg) const {
    double h = resolve(half_o, half, cfg, "spacetime", "half_width", 4.0);
    if (!(h > 0.0)) throw ConfigError("half width must be positive");
    return MinkowskiModel::cube(resolve_dim(cfg), h);
  }

  cplx resolve_z(const json& cfg) const {
    cplx zz = 0.0;
    if (const json* v = lookup(cfg, "operator", "z")) zz = json_complex(*v, "operator.z");
    if (z_o && z_o->count()) zz = z;
    if (zr_o && zr_o->count()) zz.real(z_re);
    if (zi_o && zi_o->count()) zz.imag(z_im);
    return zz;
  }

  OperatorSpec op(const json& cfg) const {
    ModelPtr m = model(cfg);
    std::string p = resolve(pot_o, potential, cfg, "operator", "potential", std::string("0"));
    return OperatorSpec(m, Potential::parse(p, m->dimension()), resolve_z(cfg));
  }
};

struct Context {
  std::string config_path;
  int jobs = 1;
  unsigned seed = 7;
  CLI::Option *jobs_o = nullptr, *seed_o = nullptr;
};

// ------------------------------------------------------------------ commands

int cmd_riesz(const Context&, const json& cfg, const OperatorFlags& of,
              double alpha, const CLI::Option* alpha_o, double alpha_im,
              const CLI::Option* alpha_im_o, int sign, const CLI::Option* sign_o,
              const std::string& x_s, const CLI::Option* x_o,
              const std::vector<std::string>& ys, const std::string& pc,
              const std::string& pw, double pa,
              const std::string& route_s, const CLI::Option* route_o, int box_power,
              const CLI::Option* bp_o, double rel_tol, const CLI::Option* tol_o,
              const std::string& csv, std::ostream& out) {
  ModelPtr model = of.model(cfg);
  const int d = model->dimension();
  if ((!alpha_o || !alpha_o->count()) && !lookup(cfg, "task", "alpha")) {
    throw ConfigError("riesz needs --alpha");
  }
  cplx a(resolve(alpha_o, alpha, cfg, "task", "alpha", 0.0),
         resolve(alpha_im_o, alpha_im, cfg, "task", "alpha_im", 0.0));
  int sg = resolve(sign_o, sign, cfg, "task", "sign", 1);
  if (sg != 1 && sg != -1) throw ConfigError("sign must be +1 or -1");
  Event x(d);
  if (x_o->count()) {
    x = to_event(parse_list(x_s, "--x"), d, "--x");
  } else if (const json* v = lookup(cfg, "task", "x")) {
    x = json_event(*v, d, "task.x");
  }
  std::vector<Event> points;
  for (const auto& y : ys) points.push_back(to_event(parse_list(y, "--y"), d, "--y"));
  if (ys.empty()) {
    if (const json* v = lookup(cfg, "task", "y")) {
      for (const auto& p : *v) points.push_back(json_event(p, d, "task.y"));
    }
  }
  std::optional<TestFunction> probe;
  if (!pc.empty() || !pw.empty()) {
    if (pc.empty() || pw.empty()) throw ConfigError("--probe-center and --probe-widths go together");
    probe = TestFunction(to_event(parse_list(pc, "--probe-center"), d, "--probe-center"),
                         to_event(parse_list(pw, "--probe-widths"), d, "--probe-widths"),
                         pa);
  } else if (const json* v = lookup(cfg, "task", "probe")) {
    probe = json_bump(*v, d, "task.probe");
  }
  if (points.empty() && !probe) throw ConfigError("riesz needs --y points or a probe");
  std::string route = resolve(route_o, route_s, cfg, "task", "route", std::string("continuation"));
  if (route != "continuation" && route != "direct") {
    throw ConfigError("route must be 'continuation' or 'direct'");
  }
  QuadratureSpec q;
  q.rel_tol = resolve(tol_o, rel_tol, cfg, "task", "rel_tol", 1e-9);
  int bp = resolve(bp_o, box_power, cfg, "task", "box_power", 0);

  RieszDistribution R{sg, a, model};
  std::ostringstream os;
  os << "kind,point,value_re,value_im\n";
  for (const Event& y : points) {
    cplx v = riesz_eval(R, y, x);
    os << "eval," << fmt_point(y) << ',' << fmt_num(v.real()) << ',' << fmt_num(v.imag()) << '\n';
  }
  if (probe) {
    cplx v = riesz_pair(R, *probe, x, q,
                        route == "direct" ? PairingRoute::Direct : PairingRoute::Continuation, bp);
    os << "pair," << fmt_point(x) << ',' << fmt_num(v.real()) << ',' << fmt_num(v.imag()) << '\n';
  }
  std::string path = csv;
  if (path.empty()) {
    if (const json* v = lookup(cfg, "output", "csv")) path = get_as<std::string>(*v, "csv");
  }
  write_text(path, os.str(), out);
  return kExitOk;
}

std::vector<Event> collect_points(const std::vector<std::string>& flags, const json& cfg,
                                  int d, const char* what) {
  std::vector<Event> pts;
  for (const auto& y : flags) pts.push_back(to_event(parse_list(y, what), d, what));
  if (flags.empty()) {
    if (const json* v = lookup(cfg, "task", "y")) {
      for (const auto& p : *v) pts.push_back(json_event(p, d, "task.y"));
    }
  }
  return pts;
}

std::string output_path(const std::string& flag, const json& cfg, const char* key) {
  if (!flag.empty()) return flag;
  if (const json* v = lookup(cfg, "output", key)) return get_as<std::string>(*v, key);
  return {};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hadamard expansions of Green's operators: evaluation and verification"};
  app.require_subcommand(1);
  Context ctx;
  app.add_option("--config", ctx.config_path, "JSON run config (path, or - for stdin)");
  ctx.jobs_o = app.add_option("--jobs", ctx.jobs, "concurrent suites")->check(CLI::PositiveNumber);
  ctx.seed_o = app.add_option("--seed", ctx.seed, "seed for randomized sample points");

  // riesz
  CLI::App* riesz = app.add_subcommand("riesz", "evaluate or pair a Riesz distribution");
  OperatorFlags r_of;
  r_of.attach(riesz, false);
  double r_alpha = 0.0, r_alpha_im = 0.0, r_pa = 1.0, r_tol = 1e-9;
  int r_sign = 1, r_bp = 0;
  std::string r_x, r_pc, r_pw, r_route = "continuation", r_csv;
  std::vector<std::string> r_y;
  auto* r_alpha_o = riesz->add_option("--alpha", r_alpha, "order alpha (real part)");
  auto* r_alpha_im_o = riesz->add_option("--alpha-im", r_alpha_im, "imaginary part of alpha");
  auto* r_sign_o = riesz->add_option("--sign", r_sign, "+1 retarded (J+), -1 advanced (J-)");
  auto* r_x_o = riesz->add_option("--x", r_x, "base point t,x1,...");
  riesz->add_option("--y", r_y, "evaluation point t,x1,... (repeatable)");
  riesz->add_option("--probe-center", r_pc, "test-function center t,x1,...");
  riesz->add_option("--probe-widths", r_pw, "test-function half widths");
  riesz->add_option("--probe-amp", r_pa, "test-function amplitude");
  auto* r_route_o = riesz->add_option("--route", r_route, "continuation | direct");
  auto* r_bp_o = riesz->add_option("--box-power", r_bp, "pair against box^k phi");
  auto* r_tol_o = riesz->add_option("--rel-tol", r_tol, "quadrature tolerance");
  riesz->add_option("--csv", r_csv, "output CSV path (default stdout)");

  // coeffs
  CLI::App* coeffs = app.add_subcommand("coeffs", "Hadamard coefficients V^k(y, x)");
  OperatorFlags c_of;
  c_of.attach(coeffs, true);
  int c_K = 3;
  std::string c_x, c_csv;
  std::vector<std::string> c_y;
  bool c_numeric = false;
  auto* c_K_o = coeffs->add_option("--K", c_K, "highest index k");
  auto* c_x_o = coeffs->add_option("--x", c_x, "base point");
  coeffs->add_option("--y", c_y, "evaluation point (repeatable)");
  auto* c_num_o = coeffs->add_flag("--numeric", c_numeric, "solve transport numerically even for constant b");
  coeffs->add_option("--csv", c_csv, "output CSV path (default stdout)");

  // expand
  CLI::App* expand = app.add_subcommand("expand", "term table of a truncated expansion");
  OperatorFlags e_of;
  e_of.attach(expand, true);
  int e_m = 1, e_N = 2, e_Nm = 2, e_sign = 1;
  std::string e_kind = "power", e_x, e_csv;
  std::vector<std::string> e_y;
  auto* e_m_o = expand->add_option("--m", e_m, "power m of the Green's operator");
  auto* e_N_o = expand->add_option("--N", e_N, "truncation index N");
  auto* e_Nm_o = expand->add_option("--N-m", e_Nm, "second truncation of the double expansion");
  auto* e_kind_o = expand->add_option("--kind", e_kind, "power | double | resolvent");
  auto* e_sign_o = expand->add_option("--sign", e_sign, "+1 retarded, -1 advanced");
  auto* e_x_o = expand->add_option("--x", e_x, "base point for evaluations");
  expand->add_option("--y", e_y, "evaluation point (repeatable)");
  expand->add_option("--csv", e_csv, "evaluation CSV path (default stdout)");

  // verify
  CLI::App* verify = app.add_subcommand("verify", "run invariant suites");
  std::vector<std::string> v_suites;
  int v_dim = 0;
  verify->add_option("--suite", v_suites, "suite name (repeatable; default all)");
  verify->add_option("--dim", v_dim, "restrict dimension sweeps to one d");
  verify->add_flag("--list", "list suites and exit");

  // compare
  CLI::App* compare = app.add_subcommand("compare", "truncated expansion against FD powers");
  compare->set_help_flag("--help", "print this help message and exit");  // frees --h
  OperatorFlags k_of;
  k_of.attach(compare, true);
  int k_m = 1, k_N = 3, k_sign = 1;
  double k_h = 1.0 / 128.0, k_lambda = 0.5, k_tol = 1e-7;
  std::string k_csv, k_svg;
  auto* k_m_o = compare->add_option("--m", k_m, "power m >= 1");
  auto* k_N_o = compare->add_option("--N-max", k_N, "largest truncation index");
  auto* k_h_o = compare->add_option("--h", k_h, "grid spacing");
  auto* k_lambda_o = compare->add_option("--lambda", k_lambda, "dt/dx");
  auto* k_tol_o = compare->add_option("--rel-tol", k_tol, "quadrature tolerance");
  auto* k_sign_o = compare->add_option("--sign", k_sign, "+1 retarded, -1 advanced");
  compare->add_option("--csv", k_csv, "CSV path (default stdout)");
  compare->add_option("--svg", k_svg, "optional SVG error plot");

  // report
  CLI::App* report = app.add_subcommand("report", "run acceptance suites and summarize");
  std::vector<std::string> p_only;
  std::string p_json;
  report->add_option("--only", p_only, "suite name or group (repeatable)");
  report->add_option("--json", p_json, "JSON summary path (- for stdout instead of the table)");

  for (CLI::App* sub : {riesz, coeffs, expand, verify, compare, report}) sub->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* active = &app;
    for (CLI::App* sub : app.get_subcommands()) active = sub;
    err << active->help();
    return kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();
    json cfg = load_config(ctx.config_path, cmd);

    if (cmd == "riesz") {
      return cmd_riesz(ctx, cfg, r_of, r_alpha, r_alpha_o, r_alpha_im, r_alpha_im_o, r_sign,
                       r_sign_o, r_x, r_x_o, r_y, r_pc, r_pw, r_pa, r_route,
                       r_route_o, r_bp, r_bp_o, r_tol, r_tol_o, r_csv, out);
    }

    if (cmd == "coeffs") {
      OperatorSpec op = c_of.op(cfg);
      const int d = op.dim();
      int K = resolve(c_K_o, c_K, cfg, "task", "K", 3);
      if (K < 0 || K > 12) throw ConfigError("K must be in 0..12");
      FamilyOptions fo;
      fo.force_numeric = resolve(c_num_o, c_numeric, cfg, "task", "numeric", false);
      HadamardFamily fam = hadamard_family(op, K, fo);
      Event x(d);
      if (c_x_o->count()) x = to_event(parse_list(c_x, "--x"), d, "--x");
      else if (const json* v = lookup(cfg, "task", "x")) x = json_event(*v, d, "task.x");
      std::vector<Event> pts = collect_points(c_y, cfg, d, "--y");
      if (pts.empty()) throw ConfigError("coeffs needs at least one --y point");
      std::ostringstream os;
      os << "k,y,x,value_re,value_im\n";
      for (const Event& y : pts) {
        std::vector<cplx> v = fam.values(y, x, K);
        for (int k = 0; k <= K; ++k) {
          os << k << ',' << fmt_point(y) << ',' << fmt_point(x) << ','
             << fmt_num(v[static_cast<std::size_t>(k)].real()) << ','
             << fmt_num(v[static_cast<std::size_t>(k)].imag()) << '\n';
        }
      }
      write_text(output_path(c_csv, cfg, "csv"), os.str(), out);
      return kExitOk;
    }

    if (cmd == "expand") {
      OperatorSpec op = e_of.op(cfg);
      const int d = op.dim();
      int m = resolve(e_m_o, e_m, cfg, "task", "m", 1);
      int N = resolve(e_N_o, e_N, cfg, "task", "N", 2);
      int Nm = resolve(e_Nm_o, e_Nm, cfg, "task", "N_m", 2);
      int sg = resolve(e_sign_o, e_sign, cfg, "task", "sign", 1);
      std::string kind = resolve(e_kind_o, e_kind, cfg, "task", "kind", std::string("power"));
      if (N < 0 || N > 40 || Nm < 0 || Nm > 40) throw ConfigError("truncation out of range 0..40");
      if (sg != 1 && sg != -1) throw ConfigError("sign must be +1 or -1");
      TruncatedExpansion T;
      if (kind == "power") {
        T = power_expansion(op, m, N, sg);
      } else if (kind == "double" || kind == "resolvent") {
        // These expand the family of op itself around the spectral parameter.
        OperatorSpec base = op;
        cplx z = base.z;
        base.z = 0.0;
        T = kind == "double" ? double_expansion(base, z, N, Nm, sg)
                             : resolvent_expansion(base, z, m, N, sg);
      } else {
        throw ConfigError("kind must be power, double or resolvent");
      }
      out << format_terms(T) << "\n";
      out << "k,j,coefficient,z_power,order,kind\n";
      for (const TermRow& r : term_table(T)) {
        out << r.k << ',' << r.j << ',' << r.coefficient << ',' << r.z_power << ','
            << r.order << ',' << r.kind << '\n';
      }
      std::vector<Event> pts = collect_points(e_y, cfg, d, "--y");
      if (!pts.empty()) {
        Event x(d);
        if (e_x_o->count()) x = to_event(parse_list(e_x, "--x"), d, "--x");
        else if (const json* v = lookup(cfg, "task", "x")) x = json_event(*v, d, "task.x");
        std::ostringstream os;
        os << "y,x,value_re,value_im\n";
        for (const Event& y : pts) {
          cplx v = expansion_eval(T, y, x);
          os << fmt_point(y) << ',' << fmt_point(x) << ',' << fmt_num(v.real()) << ','
             << fmt_num(v.imag()) << '\n';
        }
        std::string path = output_path(e_csv, cfg, "csv");
        if (path.empty()) out << '\n';
        write_text(path, os.str(), out);
      }
      return kExitOk;
    }

    SuiteOptions so;
    so.seed = ctx.seed_o->count() ? ctx.seed
                                  : resolve<unsigned>(nullptr, 0u, cfg, "task", "seed", 7u);
    int jobs = ctx.jobs;

    if (cmd == "verify") {
      if (verify->get_option("--list")->count()) {
        for (const Suite& s : suite_registry()) {
          out << s.name << "  [" << s.group << "]  " << s.summary << "\n";
        }
        return kExitOk;
      }
      so.dim = v_dim;
      std::vector<std::string> names = v_suites;
      if (names.empty()) {
        if (const json* v = lookup(cfg, "task", "suites")) {
          names = get_as<std::vector<std::string>>(*v, "suites");
        }
      }
      std::vector<const Suite*> sel;
      if (names.empty()) {
        for (const Suite& s : suite_registry()) sel.push_back(&s);
      }
      for (const auto& n : names) {
        const Suite* s = find_suite(n);
        if (!s) throw ConfigError("unknown suite '" + n + "' (see verify --list)");
        sel.push_back(s);
      }
      std::vector<SuiteResult> res = run_suites(sel, so, jobs);
      bool all = true;
      for (const SuiteResult& r : res) {
        out << "== " << r.name << "\n";
        for (const auto& line : r.details) out << "  " << line << "\n";
        if (!r.error.empty()) out << "  error: " << r.error << "\n";
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s %s max_residual=%.3e tolerance=%.1e runtime_ms=%.0f\n",
                      r.pass ? "PASS" : "FAIL", r.name.c_str(), r.max_residual, r.tolerance,
                      r.runtime_ms);
        out << buf;
        all = all && r.pass;
      }
      return all ? kExitOk : kExitVerificationFailed;
    }

    if (cmd == "compare") {
      OperatorSpec op = k_of.op(cfg);
      if (op.dim() != 2) throw ConfigError("compare runs in d = 2");
      int m = resolve(k_m_o, k_m, cfg, "task", "m", 1);
      int N = resolve(k_N_o, k_N, cfg, "task", "N_max", 3);
      int sg = resolve(k_sign_o, k_sign, cfg, "task", "sign", 1);
      if (m < 1) throw ConfigError("compare needs m >= 1");
      if (N < 0 || N > 12) throw ConfigError("N-max must be in 0..12");
      GridSpec g;
      g.h = resolve(k_h_o, k_h, cfg, "task", "h", 1.0 / 128.0);
      g.lambda = resolve(k_lambda_o, k_lambda, cfg, "task", "lambda", 0.5);
      g.domain = Box(Event{0.0, -2.5}, Event{2.0, 2.5});
      if (const json* v = lookup(cfg, "task", "domain")) {
        check_keys(*v, {"lo", "hi"}, "task.domain");
        g.domain = Box(json_event((*v)["lo"], 2, "domain.lo"), json_event((*v)["hi"], 2, "domain.hi"));
      }
      std::vector<ProbePair> probes;
      if (const json* v = lookup(cfg, "task", "probes")) {
        int i = 0;
        for (const auto& p : *v) {
          check_keys(p, {"id", "phi", "psi"}, "task.probes[]");
          if (!p.contains("phi") || !p.contains("psi")) throw ConfigError("probe needs phi and psi");
          probes.push_back({p.value("id", "p" + std::to_string(i)), json_bump(p["phi"], 2, "phi"),
                            json_bump(p["psi"], 2, "psi")});
          ++i;
        }
      } else {
        probes.push_back({"p0", TestFunction(Event{1.4, 0.1}, Event{0.3, 0.3}),
                          TestFunction(Event{0.4, 0.0}, Event{0.15, 0.15})});
      }
      QuadratureSpec q;
      q.rel_tol = resolve(k_tol_o, k_tol, cfg, "task", "rel_tol", 1e-7);
      auto rows = compare_expansion_fd(op, m, N, probes, g, q, sg);
      write_text(output_path(k_csv, cfg, "csv"), compare_csv(rows), out);
      std::string svg = output_path(k_svg, cfg, "svg");
      if (!svg.empty()) write_text(svg, compare_svg(rows), out);
      return kExitOk;
    }

    if (cmd == "report") {
      std::vector<std::string> only = p_only;
      if (only.empty()) {
        if (const json* v = lookup(cfg, "task", "only")) {
          only = get_as<std::vector<std::string>>(*v, "only");
        }
      }
      std::vector<const Suite*> sel;
      for (const Suite& s : suite_registry()) {
        bool take = only.empty();
        for (const auto& o : only) take = take || o == s.name || o == s.group;
        if (take) sel.push_back(&s);
      }
      if (sel.empty()) throw ConfigError("--only matched no suite");
      std::vector<SuiteResult> res = run_suites(sel, so, jobs);
      bool all = true;
      json doc;
      doc["schema"] = "1";
      doc["suites"] = json::array();
      std::ostringstream table;
      table << std::left << std::setw(24) << "suite" << std::setw(8) << "status"
            << std::setw(14) << "max_residual" << std::setw(12) << "tolerance"
            << "runtime_ms\n";
      for (std::size_t i = 0; i < res.size(); ++i) {
        const SuiteResult& r = res[i];
        all = all && r.pass;
        json row;
        row["suite"] = r.name;
        row["criterion"] = sel[i]->criterion;
        row["group"] = sel[i]->group;
        row["status"] = r.pass ? "pass" : "fail";
        row["max_residual"] = r.max_residual;
        row["tolerance"] = r.tolerance;
        row["runtime_ms"] = std::round(r.runtime_ms);
        if (!r.error.empty()) row["error"] = r.error;
        doc["suites"].push_back(row);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-24s%-8s%-14.3e%-12.1e%.0f\n", r.name.c_str(),
                      r.pass ? "pass" : "FAIL", r.max_residual, r.tolerance, r.runtime_ms);
        table << buf;
      }
      doc["status"] = all ? "pass" : "fail";
      std::string jpath = output_path(p_json, cfg, "json");
      if (jpath == "-") {
        out << doc.dump(2) << "\n";
      } else {
        out << table.str();
        for (const SuiteResult& r : res) {
          if (!r.pass) out << "failing suite: " << r.name << "\n";
        }
        if (!jpath.empty()) write_text(jpath, doc.dump(2) + "\n", out);
      }
      return all ? kExitOk : kExitVerificationFailed;
    }
    throw ConfigError("unknown subcommand " + cmd);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RegimeError& e) {
    err << "unsupported request: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitVerificationFailed;
  }
}

}  // namespace hadamard::cli
