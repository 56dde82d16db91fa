// mbloch: command-line front end.
//
//   mbloch simulate  --k=-1 --x0=0,0.5,0.5 --t=0,40 --tol=1e-10 --out traj.csv
//   mbloch classify  --k=-1 --equilibrium=E2 --M=1
//   mbloch classify  --k=-1 --ec=0,2
//   mbloch fiber     --k=-1 --ec=-1,2 --n=500 --out fib/ --svg
//   mbloch periodic  --k=-1 --M=1 --eps=0.05
//   mbloch verify    --k=-1 --seed=42
//
// Exit codes: 0 ok, 1 usage, 2 blow-up, 3 residual failure, 4 no return,
// 5 verification failure.

#include <CLI11.hpp>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mbloch/mbloch.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mbloch;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kBlowUp = 2,
  kResidual = 3,
  kNoReturn = 4,
  kVerifyFailed = 5,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path out_dir_default() {
  const char* env = std::getenv("MBLOCH_OUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

// Relative paths land under MBLOCH_OUT_DIR when it is set.
fs::path resolve_out(const std::string& given, const std::string& fallback) {
  if (given.empty()) return out_dir_default() / fallback;
  fs::path p(given);
  const char* env = std::getenv("MBLOCH_OUT_DIR");
  if (p.is_relative() && env && *env) return fs::path(env) / p;
  return p;
}

std::string pick_format(const std::string& requested, const std::string& out) {
  if (!requested.empty()) return requested;
  const std::string ext = fs::path(out).extension().string();
  if (ext == ".json") return "json";
  if (ext == ".svg") return "svg";
  return "csv";
}

std::string fmt(double v) { return io::format_double(v); }

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json state_json(const State3& s) { return json::array({s.x(), s.y(), s.z()}); }

json table_json(const io::CsvTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::array();
    for (const auto& cell : r) row.push_back(io::parse_double(cell));
    rows.push_back(std::move(row));
  }
  return {{"columns", t.header}, {"rows", std::move(rows)}};
}

ECValue parse_ec(const std::vector<double>& v) {
  if (v.size() != 2) throw UsageError("--ec expects two values h,c");
  return {v[0], v[1]};
}

// "0, ±i" style listing of a spectrum {0, +l, -l}.
std::string spectrum_text(const Spectrum& s) {
  auto mag = [](double v) {
    return std::abs(v - 1.0) < 1e-15 ? std::string() : short_num(v);
  };
  std::string out = "0";
  const std::complex<double> l = s[1];
  if (l == std::complex<double>(0.0, 0.0)) return "0, 0, 0";
  if (l.imag() == 0.0) {
    out += ", ±" + short_num(std::abs(l.real()));
  } else {
    out += ", ±" + mag(std::abs(l.imag())) + "i";
  }
  return out;
}

void emit_json(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    const fs::path p = resolve_out(out, "");
    io::write_file_atomic(p, j.dump(2) + "\n");
    std::cout << "wrote " << p.string() << "\n";
  }
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  double k = 0.0;
  std::vector<double> x0;
  std::vector<double> span;
  double tol = 1e-10;
  std::string out;
  std::string format;
};

int cmd_simulate(const SimulateArgs& a) {
  const SystemParams params(a.k);
  if (a.x0.size() != 3 && a.x0.size() != 4) throw UsageError("--x0 expects 3 or 4 values");
  if (a.span.size() != 2) throw UsageError("--t expects two values t0,t1");
  const std::string format = pick_format(a.format, a.out);
  if (format != "csv" && format != "json" && format != "svg") {
    throw UsageError("--format must be csv, json or svg");
  }
  const fs::path path = resolve_out(a.out, "trajectory." + format);

  io::CsvTable table;
  IntegrationStatus status;
  std::vector<State3> points;
  if (a.x0.size() == 3) {
    const Trajectory3 tr =
        integrate(params, State3(a.x0[0], a.x0[1], a.x0[2]), {a.span[0], a.span[1]}, a.tol);
    table = io::trajectory_table(params, tr);
    status = tr.status();
    for (std::size_t i = 0; i < tr.size(); ++i) points.push_back(tr.state(i));
  } else {
    const Trajectory4 tr = integrate4(params, State4(a.x0[0], a.x0[1], a.x0[2], a.x0[3]),
                                      {a.span[0], a.span[1]}, a.tol);
    table = io::trajectory4_table(params, tr);
    status = tr.status();
    for (std::size_t i = 0; i < tr.size(); ++i) points.push_back(realization_map(tr.state(i)));
  }

  if (format == "csv") {
    io::write_file_atomic(path, io::to_csv(table));
  } else if (format == "json") {
    json j = {{"command", "simulate"}, {"k", a.k},       {"tol", a.tol},
              {"status", to_string(status)}, {"dimension", a.x0.size()}};
    j.update(table_json(table));
    io::write_file_atomic(path, j.dump(2) + "\n");
  } else {
    io::write_file_atomic(path, io::phase_portrait_svg("trajectory, k = " + short_num(a.k),
                                                       {{"trajectory", points, false}}));
  }

  double max_dH = 0.0, max_dC = 0.0;
  for (double v : table.numeric_column("dH")) max_dH = std::max(max_dH, std::abs(v));
  for (double v : table.numeric_column("dC")) max_dC = std::max(max_dC, std::abs(v));
  const State3 last = points.back();
  std::cout << "status " << to_string(status) << ", " << table.rows.size() << " samples\n"
            << "final t " << table.rows.back()[0] << " state (" << fmt(last.x()) << ", "
            << fmt(last.y()) << ", " << fmt(last.z()) << ")\n"
            << "max |dH| " << short_num(max_dH) << ", max |dC| " << short_num(max_dC) << "\n"
            << "wrote " << path.string() << "\n";
  if (status == IntegrationStatus::BlowUp) {
    std::cerr << "blow-up at t = " << table.rows.back()[0] << " (partial output kept)\n";
    return kBlowUp;
  }
  if (status == IntegrationStatus::MaxSteps) {
    std::cerr << "step limit reached at t = " << table.rows.back()[0] << "\n";
    return kBlowUp;
  }
  return kOk;
}

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
  double k = 0.0;
  std::string equilibrium;
  std::optional<double> M;
  std::vector<double> ec;
  double tol = 1e-12;
  std::string format;
  std::string out;
};

int cmd_classify(const ClassifyArgs& a) {
  const SystemParams params(a.k);
  const bool json_mode = a.format == "json";
  if (!a.format.empty() && a.format != "json" && a.format != "text") {
    throw UsageError("--format must be text or json");
  }
  if (!a.equilibrium.empty() == !a.ec.empty()) {
    throw UsageError("give exactly one of --equilibrium or --ec");
  }

  if (!a.equilibrium.empty()) {
    EquilibriumFamily fam;
    if (a.equilibrium == "E1") {
      fam = EquilibriumFamily::E1;
    } else if (a.equilibrium == "E2") {
      fam = EquilibriumFamily::E2;
    } else {
      throw UsageError("--equilibrium must be E1 or E2");
    }
    if (!a.M) throw UsageError("--equilibrium needs --M");
    const Equilibrium e(fam, *a.M);
    const StabilityVerdict v = classify_equilibrium(params, e);
    if (json_mode) {
      json eig = json::array();
      for (const auto& l : v.eigenvalues) eig.push_back({{"re", l.real()}, {"im", l.imag()}});
      json j = {{"command", "classify"},
                {"k", a.k},
                {"mode", "equilibrium"},
                {"family", to_string(fam)},
                {"M", *a.M},
                {"point", state_json(e.point())},
                {"verdict", to_string(v.verdict)},
                {"eigenvalues", eig},
                {"stratum", to_string(stratum_of_equilibrium(params, fam, *a.M))}};
      if (v.arnold_multiplier) {
        j["arnold"] = {{"multiplier", *v.arnold_multiplier},
                       {"diagonal", {v.arnold_form_diagonal->first, v.arnold_form_diagonal->second}},
                       {"positive_definite", v.verdict == Verdict::NonlinearStable}};
      }
      emit_json(j, a.out);
      return kOk;
    }
    const State3 p = e.point();
    std::cout << to_string(fam) << " M=" << short_num(*a.M) << " at (" << short_num(p.x()) << ", "
              << short_num(p.y()) << ", " << short_num(p.z()) << ")\n"
              << to_string(v.verdict) << ", eigenvalues " << spectrum_text(v.eigenvalues) << "\n";
    if (v.arnold_multiplier) {
      std::cout << "Arnold multiplier " << short_num(*v.arnold_multiplier) << ", form diag("
                << short_num(v.arnold_form_diagonal->first) << ", "
                << short_num(v.arnold_form_diagonal->second) << ") "
                << (v.verdict == Verdict::NonlinearStable ? "positive definite"
                                                          : "not positive definite")
                << "\n";
    }
    return kOk;
  }

  const ECValue v = parse_ec(a.ec);
  if (!(a.tol >= 0.0)) throw UsageError("--tol must be non-negative");
  const Stratum s = classify_ec_point(params, v, a.tol);
  const std::optional<double> M = recovered_M(s, v);
  if (json_mode) {
    json j = {{"command", "classify"}, {"k", a.k}, {"mode", "ec"},
              {"h", v.h},              {"c", v.c}, {"stratum", to_string(s)}};
    if (M) j["M"] = *M;
    emit_json(j, a.out);
    return kOk;
  }
  std::cout << to_string(s);
  if (M && s != Stratum::Origin) std::cout << ", M=" << short_num(*M);
  std::cout << "\n";
  return kOk;
}

// ---------------------------------------------------------------- fiber

struct FiberArgs {
  double k = 0.0;
  std::vector<double> ec;
  std::size_t n = 200;
  std::string out;
  bool svg = false;
  double tol = 1e-12;
  double max_residual = 1e-8;
  std::string format;
};

int cmd_fiber(const FiberArgs& a) {
  const SystemParams params(a.k);
  const ECValue v = parse_ec(a.ec);
  if (a.n < 2) throw UsageError("--n must be at least 2");
  if (!a.format.empty() && a.format != "csv" && a.format != "json") {
    throw UsageError("--format must be csv or json");
  }
  const Fiber f = build_fiber(params, v, a.tol);
  const fs::path dir = resolve_out(a.out, "fiber");
  fs::create_directories(dir);

  std::cout << "stratum " << to_string(f.stratum);
  if (f.M && f.stratum != Stratum::Origin) std::cout << ", M=" << short_num(*f.M);
  std::cout << ", " << f.components.size() << " components\n";
  if (!f.note.empty()) std::cout << "note: " << f.note << "\n";

  bool residual_ok = true;
  std::vector<io::PlotSeries> series;
  json comps = json::array();
  for (std::size_t i = 0; i < f.components.size(); ++i) {
    const FiberComponent& c = f.components[i];
    const std::size_t n = c.kind == ComponentKind::EquilibriumPoint ? 1 : a.n;
    io::CsvTable table{{"t", "x", "y", "z", "kind", "sign_variant"}, {}};
    io::PlotSeries ps{std::string(to_string(c.kind)) + " " + c.sign_variant, {},
                      c.kind == ComponentKind::EquilibriumPoint};
    double worst = 0.0;
    json samples = json::array();
    for (double t : c.sample_times(n)) {
      const State3 s = c.parametrize(t);
      worst = std::max({worst, std::abs(hamiltonian(params, s) - v.h), std::abs(casimir(s) - v.c)});
      table.rows.push_back(
          {fmt(t), fmt(s.x()), fmt(s.y()), fmt(s.z()), to_string(c.kind), c.sign_variant});
      samples.push_back({t, s.x(), s.y(), s.z()});
      ps.points.push_back(s);
    }
    const bool ok = worst <= a.max_residual;
    residual_ok = residual_ok && ok;
    char name[96];
    std::snprintf(name, sizeof name, "component_%zu_%s.csv", i, to_string(c.kind));
    if (a.format != "json") io::write_file_atomic(dir / name, io::to_csv(table));
    std::cout << "  [" << i << "] " << to_string(c.kind) << " " << c.sign_variant << "  t in ["
              << short_num(c.window.lo) << ", " << short_num(c.window.hi) << "]  residual "
              << short_num(worst) << (ok ? "" : "  FAILED") << "\n";
    comps.push_back({{"kind", to_string(c.kind)},
                     {"sign_variant", c.sign_variant},
                     {"closed_form", c.closed_form},
                     {"window", {c.window.lo, c.window.hi}},
                     {"residual", worst},
                     {"samples", samples}});
    series.push_back(std::move(ps));
  }

  if (a.format == "json") {
    json j = {{"command", "fiber"},      {"k", a.k},
              {"h", v.h},                {"c", v.c},
              {"stratum", to_string(f.stratum)}, {"components", comps},
              {"residual_ok", residual_ok}};
    if (f.M) j["M"] = *f.M;
    if (!f.note.empty()) j["note"] = f.note;
    io::write_file_atomic(dir / "fiber.json", j.dump(2) + "\n");
  }
  if (a.svg) {
    io::write_file_atomic(dir / "fiber.svg",
                          io::phase_portrait_svg("fiber over (h, c) = (" + short_num(v.h) + ", " +
                                                     short_num(v.c) + "), " + to_string(f.stratum),
                                                 series));
  }
  std::cout << "wrote " << dir.string() << "\n";
  if (!residual_ok) {
    std::cerr << "fiber residual check failed (limit " << short_num(a.max_residual) << ")\n";
    return kResidual;
  }
  return kOk;
}

// ---------------------------------------------------------------- periodic

struct PeriodicArgs {
  double k = 0.0;
  double M = 0.0;
  std::optional<double> eps;
  double tol = 1e-10;
  double max_periods = 20.0;
  std::string out;
  std::string format;
};

int cmd_periodic(const PeriodicArgs& a) {
  const SystemParams params(a.k);
  require_positive_M(a.M);
  const double eps = a.eps ? *a.eps : 0.05 * std::sqrt(-a.k * a.M) * a.M;
  const PeriodicOrbit o = find_periodic(params, a.M, eps, a.tol, a.max_periods);
  const double lin = linearized_period(params, a.M);
  const double gap = std::abs(o.period - lin) / lin;

  if (!a.out.empty()) {
    const fs::path path = resolve_out(a.out, "");
    io::CsvTable t{{"t", "x", "y", "z"}, {}};
    const Trajectory3& tr = *o.trajectory;
    for (std::size_t i = 0; i < tr.size() && tr.time(i) < o.period; ++i) {
      const State3 s = tr.state(i);
      t.rows.push_back({fmt(tr.time(i)), fmt(s.x()), fmt(s.y()), fmt(s.z())});
    }
    const State3 end = tr.interpolate(o.period);
    t.rows.push_back({fmt(o.period), fmt(end.x()), fmt(end.y()), fmt(end.z())});
    io::write_file_atomic(path, io::to_csv(t));
    if (a.format != "json") std::cout << "wrote " << path.string() << "\n";
  }
  if (a.format == "json") {
    std::cout << json{{"command", "periodic"},
                      {"k", a.k},
                      {"M", a.M},
                      {"eps", eps},
                      {"period", o.period},
                      {"linearized_period", lin},
                      {"relative_gap", gap},
                      {"closure_error", o.closure_error},
                      {"initial_state", state_json(o.initial_state)}}
                     .dump(2)
              << "\n";
    return kOk;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "period %.10g\nlinearized period %.10g\nrelative gap %.3e\nclosure error %.3e\n",
                o.period, lin, gap, o.closure_error);
  std::cout << buf;
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  double k = 0.0;
  std::uint64_t seed = 42;
  std::string format;
};

int cmd_verify(const VerifyArgs& a) {
  const SystemParams params(a.k);
  VerifyOptions opt;
  opt.seed = a.seed;
#ifdef MBLOCH_MUTANT_FIELD
  opt.vector_field_override = [](double k, const Vec3& s) {
    return Vec3{s[1], -k * s[0] * s[2], -s[0] * s[1]};
  };
#endif
  const auto results = run_verification(params, opt);
  const bool ok = all_passed(results);
  if (a.format == "json") {
    json checks = json::array();
    for (const auto& r : results) {
      checks.push_back({{"name", r.name},
                        {"residual", r.residual},
                        {"threshold", r.threshold},
                        {"passed", r.passed}});
    }
    std::cout << json{{"command", "verify"}, {"k", a.k}, {"seed", a.seed},
                      {"passed", ok},        {"checks", checks}}
                     .dump(2)
              << "\n";
  } else {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-40s %12s %12s  %s\n", "check", "residual", "threshold",
                  "result");
    std::cout << buf;
    for (const auto& r : results) {
      std::snprintf(buf, sizeof buf, "%-40s %12.3e %12.3e  %s\n", r.name.c_str(), r.residual,
                    r.threshold, r.passed ? "pass" : "FAIL");
      std::cout << buf;
    }
  }
  if (!ok) {
    std::cerr << "failed checks:\n";
    for (const auto& r : results) {
      if (!r.passed) std::cerr << "  " << r.name << "\n";
    }
    return kVerifyFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-Casimir analysis of x' = y, y' = kxz, z' = -xy"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "integrate a trajectory");
  s->add_option("--k", sim.k, "parameter k < 0")->required();
  s->add_option("--x0", sim.x0, "initial state x,y,z or q1,q2,p1,p2")->delimiter(',')->required();
  s->add_option("--t", sim.span, "time span t0,t1")->delimiter(',')->required();
  s->add_option("--tol", sim.tol, "integration tolerance");
  s->add_option("--out", sim.out, "output file");
  s->add_option("--format", sim.format, "csv, json or svg");

  ClassifyArgs cls;
  auto* c = app.add_subcommand("classify", "classify an equilibrium or an (h,c) point");
  c->add_option("--k", cls.k, "parameter k < 0")->required();
  c->add_option("--equilibrium", cls.equilibrium, "E1 or E2");
  c->add_option("--M", cls.M, "equilibrium parameter");
  c->add_option("--ec", cls.ec, "energy-Casimir value h,c")->delimiter(',');
  c->add_option("--tol", cls.tol, "classification tolerance");
  c->add_option("--format", cls.format, "text or json");
  c->add_option("--out", cls.out, "write JSON to this file");

  FiberArgs fib;
  auto* f = app.add_subcommand("fiber", "build and sample the fiber over (h,c)");
  f->add_option("--k", fib.k, "parameter k < 0")->required();
  f->add_option("--ec", fib.ec, "energy-Casimir value h,c")->delimiter(',')->required();
  f->add_option("--n", fib.n, "samples per component");
  f->add_option("--out", fib.out, "output directory");
  f->add_flag("--svg", fib.svg, "also write a two-panel SVG");
  f->add_option("--tol", fib.tol, "classification tolerance");
  f->add_option("--max-residual", fib.max_residual, "largest accepted |H-h|, |C-c|");
  f->add_option("--format", fib.format, "csv (one file per component) or json");

  PeriodicArgs per;
  auto* p = app.add_subcommand("periodic", "find the periodic orbit on an integral surface");
  p->add_option("--k", per.k, "parameter k < 0")->required();
  p->add_option("--M", per.M, "equilibrium parameter M > 0")->required();
  p->add_option("--eps", per.eps, "surface parameter");
  p->add_option("--tol", per.tol, "integration tolerance");
  p->add_option("--max-periods", per.max_periods, "search limit in linearized periods");
  p->add_option("--out", per.out, "CSV of one full cycle");
  p->add_option("--format", per.format, "text or json");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "run the invariant suite");
  v->add_option("--k", ver.k, "parameter k < 0")->required();
  v->add_option("--seed", ver.seed, "random seed");
  v->add_option("--format", ver.format, "text or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*c) return cmd_classify(cls);
    if (*f) return cmd_fiber(fib);
    if (*p) return cmd_periodic(per);
    if (*v) return cmd_verify(ver);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::NoReturn: return kNoReturn;
      default: return kUsage;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
