#include "lobosc/cli.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "lobosc/checks.hpp"
#include "lobosc/eigenfunctions.hpp"
#include "lobosc/eigensolver.hpp"
#include "lobosc/errors.hpp"
#include "lobosc/geometry.hpp"
#include "lobosc/io.hpp"
#include "lobosc/oracle.hpp"
#include "lobosc/version.hpp"

namespace lobosc::cli {

namespace {

using io::fp;
using io::MetaLine;

// ---- shared option bundles ---------------------------------------------

struct ParamArgs {
  double q = 0.0;
  double a2 = 0.0;
  double omega = 1.0;
  bool flat = false;
};

struct CommonArgs {
  double tol = 1e-10;
  double rtol = 1e-10;
  std::string out;
  bool force = false;
};

bool option_given(const CLI::App& sub, const std::string& name) {
  const auto* opt = sub.get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

geometry::ModelParams make_params(const CLI::App& sub, const ParamArgs& pa) {
  const bool has_q = option_given(sub, "--q");
  const bool has_a2 = option_given(sub, "--a2");
  if (has_q == has_a2) {
    throw CLI::ValidationError("exactly one of --q / --a2 is required");
  }
  return has_q ? geometry::params_from_q(pa.q, pa.omega)
               : geometry::params_from_a2(pa.a2, pa.omega);
}

eigensolver::SolverConfig solver_config(const CommonArgs& ca) {
  eigensolver::SolverConfig cfg;
  cfg.shoot.rtol = ca.rtol;
  return cfg;
}

std::vector<MetaLine> base_meta(const std::string& verb) {
  return {{"tool", std::string("lobosc ") + kVersion}, {"verb", verb}};
}

// ---- spectrum ------------------------------------------------------------

struct SpectrumArgs {
  ParamArgs pa;
  CommonArgs ca;
  int m = 0;
  int n_max = 2;
  bool oracle_only = false;
  int grid_n = 40960;
  double xi_factor = 80.0;
  std::string format = "csv";
};

struct SpectrumValue {
  int n;
  double E_tilde;
  double E;
  double lambda;
  double err;
};

std::string spectrum_csv(const std::vector<MetaLine>& meta,
                         const std::vector<SpectrumValue>& vals, double omega) {
  std::string s = io::comment_block(meta);
  s += "n,E_tilde,E,E_over_omega,lambda,err\n";
  for (const auto& v : vals) {
    s += std::to_string(v.n) + "," + fp(v.E_tilde) + "," + fp(v.E) + "," +
         fp(v.E / omega) + "," + fp(v.lambda) + "," + fp(v.err) + "\n";
  }
  return s;
}

std::string spectrum_json(const std::vector<MetaLine>& meta,
                          const std::vector<SpectrumValue>& vals, double omega) {
  std::ostringstream os;
  os << "{\n";
  for (const auto& m : meta) {
    os << "  \"" << io::json_escape(m.key) << "\": ";
    // numeric metadata stays numeric in JSON
    char* end = nullptr;
    const double num = std::strtod(m.value.c_str(), &end);
    if (end && *end == '\0' && !m.value.empty()) {
      os << fp(num);
    } else {
      os << '"' << io::json_escape(m.value) << '"';
    }
    os << ",\n";
  }
  os << "  \"values\": [\n";
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const auto& v = vals[i];
    os << "    {\"n\": " << v.n << ", \"E_tilde\": " << fp(v.E_tilde)
       << ", \"E\": " << fp(v.E) << ", \"E_over_omega\": " << fp(v.E / omega)
       << ", \"lambda\": " << fp(v.lambda) << ", \"err\": " << fp(v.err) << "}"
       << (i + 1 < vals.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

int cmd_spectrum(const CLI::App& sub, const SpectrumArgs& a, std::ostream& out) {
  if (a.m != 0 && !a.oracle_only) {
    throw CLI::ValidationError("--m != 0 requires --oracle-only (the shooting "
                               "path covers m = 0)");
  }
  const auto p = make_params(sub, a.pa);
  auto meta = base_meta("spectrum");
  meta.push_back({"q", fp(p.q)});
  meta.push_back({"a2", fp(p.a2)});
  meta.push_back({"omega", fp(p.omega)});
  meta.push_back({"m", std::to_string(a.m)});
  meta.push_back({"n_max", std::to_string(a.n_max)});

  std::vector<SpectrumValue> vals;
  if (a.oracle_only) {
    meta.push_back({"method", "oracle"});
    meta.push_back({"grid_n", std::to_string(a.grid_n)});
    meta.push_back({"xi_factor", fp(a.xi_factor)});
    if (a.m != 0) meta.push_back({"quality", "qualitative"});
    oracle::OracleConfig ocfg;
    ocfg.N = a.grid_n;
    ocfg.xi_factor = a.xi_factor;
    const auto ev = oracle::eigenvalues(p, a.m, a.n_max + 1, ocfg);
    for (int n = 0; n <= a.n_max; ++n) {
      const double Et = ev[n].value;
      vals.push_back(SpectrumValue{n, Et, eigensolver::physical_energy(Et, p),
                                   -(Et + 0.25), ev[n].error_estimate});
    }
  } else {
    meta.push_back({"method", "shooting"});
    meta.push_back({"tol", fp(a.ca.tol)});
    meta.push_back({"rtol", fp(a.ca.rtol)});
    const auto sp =
        eigensolver::eigenvalues(p, a.n_max, a.ca.tol, solver_config(a.ca));
    for (const auto& ep : sp) {
      vals.push_back(SpectrumValue{ep.n, ep.E_tilde, ep.E, ep.lambda, ep.err});
    }
  }
  const std::string body = (a.format == "json")
                               ? spectrum_json(meta, vals, p.omega)
                               : spectrum_csv(meta, vals, p.omega);
  io::write_output(a.ca.out, body, a.ca.force, out);
  return 0;
}

// ---- sweep ---------------------------------------------------------------

struct SweepArgs {
  CommonArgs ca;
  double q_min = 0.25;
  double q_max = 50.0;
  int points = 40;
  std::string spacing = "log";
  double omega = 1.0;
  int n_max = 2;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.q_min > 0.0) || !(a.q_max > a.q_min)) {
    throw CLI::ValidationError("need 0 < --q-min < --q-max");
  }
  if (a.points < 1) throw CLI::ValidationError("--points must be >= 1");
  std::vector<double> qs(a.points);
  if (a.points == 1) {
    qs[0] = a.q_min;
  } else if (a.spacing == "log") {
    const double r = std::log(a.q_max / a.q_min) / (a.points - 1);
    for (int i = 0; i < a.points; ++i) qs[i] = a.q_min * std::exp(r * i);
    qs.back() = a.q_max;
  } else {
    const double d = (a.q_max - a.q_min) / (a.points - 1);
    for (int i = 0; i < a.points; ++i) qs[i] = a.q_min + d * i;
    qs.back() = a.q_max;
  }

  auto meta = base_meta("sweep");
  meta.push_back({"omega", fp(a.omega)});
  meta.push_back({"m", "0"});
  meta.push_back({"n_max", std::to_string(a.n_max)});
  meta.push_back({"tol", fp(a.ca.tol)});
  meta.push_back({"rtol", fp(a.ca.rtol)});
  meta.push_back({"points", std::to_string(a.points)});
  meta.push_back({"spacing", a.spacing});

  std::string body = io::comment_block(meta);
  body += "q,n,E_tilde,E_over_omega\n";
  const auto scfg = solver_config(a.ca);
  bool failed = false;
  std::string failure;
  for (double q : qs) {
    try {
      const auto p = geometry::params_from_q(q, a.omega);
      const auto sp = eigensolver::eigenvalues(p, a.n_max, a.ca.tol, scfg);
      for (const auto& ep : sp) {
        body += fp(q) + "," + std::to_string(ep.n) + "," + fp(ep.E_tilde) +
                "," + fp(ep.E / a.omega) + "\n";
      }
    } catch (const std::exception& e) {
      failed = true;
      std::ostringstream os;
      os << "sweep failed at q = " << fp(q) << ": " << e.what();
      failure = os.str();
      break;
    }
  }
  if (failed) body += "# incomplete\n";
  io::write_output(a.ca.out, body, a.ca.force, out);
  if (failed) {
    err << failure << "\n";
    return 2;
  }
  return 0;
}

// ---- eigenfunction -------------------------------------------------------

struct EigenfunctionArgs {
  ParamArgs pa;
  CommonArgs ca;
  int n = 0;
  double rho_max = 0.0;
  int samples = 2000;
  bool figure_set = false;
};

std::string sidecar_json(const std::vector<MetaLine>& meta) {
  std::ostringstream os;
  os << "{\n";
  for (std::size_t i = 0; i < meta.size(); ++i) {
    os << "  \"" << io::json_escape(meta[i].key) << "\": ";
    char* end = nullptr;
    const double num = std::strtod(meta[i].value.c_str(), &end);
    if (end && *end == '\0' && !meta[i].value.empty()) {
      os << fp(num);
    } else {
      os << '"' << io::json_escape(meta[i].value) << '"';
    }
    os << (i + 1 < meta.size() ? "," : "") << "\n";
  }
  os << "}\n";
  return os.str();
}

std::string function_csv(const std::vector<MetaLine>& meta,
                         const eigenfunctions::RadialFunction& f) {
  std::string s = io::comment_block(meta);
  s += "rho,psi\n";
  for (std::size_t j = 0; j < f.rho.size(); ++j) {
    s += fp(f.rho[j]) + "," + fp(f.values[j]) + "\n";
  }
  return s;
}

void emit_function(const eigenfunctions::RadialFunction& f,
                   const std::vector<MetaLine>& meta, const std::string& path,
                   bool force, std::ostream& out) {
  io::write_output(path, function_csv(meta, f), force, out);
  if (!path.empty() && path != "-") {
    std::filesystem::path side(path);
    side.replace_extension(".json");
    io::write_output(side.string(), sidecar_json(meta), force, out);
  }
}

eigenfunctions::RadialFunction curved_state(const geometry::ModelParams& p,
                                            int n, const CommonArgs& ca,
                                            double rho_max, int samples,
                                            double* E_tilde_out) {
  const auto sp = eigensolver::eigenvalues(p, n, ca.tol, solver_config(ca));
  eigenfunctions::SampleConfig cfg;
  cfg.rho_max = rho_max;
  cfg.n_samples = samples;
  cfg.shoot.rtol = ca.rtol;
  if (E_tilde_out != nullptr) *E_tilde_out = sp[n].E_tilde;
  return eigenfunctions::sample_radial(sp[n], p, cfg);
}

std::vector<MetaLine> function_meta(const eigenfunctions::RadialFunction& f,
                                    double E_tilde, double E,
                                    const CommonArgs& ca) {
  auto meta = base_meta("eigenfunction");
  if (f.tag.flat) {
    meta.push_back({"params", "flat"});
    meta.push_back({"omega", fp(f.tag.omega)});
  } else {
    meta.push_back({"params", "curved"});
    meta.push_back({"a2", fp(f.tag.a2)});
    meta.push_back({"omega", fp(f.tag.omega)});
    meta.push_back({"q", fp(f.tag.a2 * f.tag.omega / 2.0)});
    meta.push_back({"E_tilde", fp(E_tilde)});
    meta.push_back({"tol", fp(ca.tol)});
    meta.push_back({"rtol", fp(ca.rtol)});
  }
  meta.push_back({"n", std::to_string(f.n)});
  meta.push_back({"E", fp(E)});
  meta.push_back({"rho_max", fp(f.rho.back())});
  meta.push_back({"samples", std::to_string(f.rho.size())});
  meta.push_back({"nodes", std::to_string(f.n)});
  meta.push_back({"norm_residual", fp(f.norm_residual)});
  return meta;
}

int cmd_eigenfunction(const CLI::App& sub, const EigenfunctionArgs& a,
                      std::ostream& out) {
  if (a.figure_set) {
    if (a.ca.out.empty()) {
      throw CLI::ValidationError("--figure-set needs --out DIR");
    }
    std::filesystem::create_directories(a.ca.out);
    const std::filesystem::path dir(a.ca.out);
    for (double a2 : {1.0, 10.0}) {
      const auto p = geometry::params_from_a2(a2, 1.0);
      const auto sp = eigensolver::eigenvalues(p, 2, a.ca.tol, solver_config(a.ca));
      for (int n = 0; n <= 2; ++n) {
        eigenfunctions::SampleConfig cfg;
        cfg.n_samples = a.samples;
        cfg.shoot.rtol = a.ca.rtol;
        const auto f = eigenfunctions::sample_radial(sp[n], p, cfg);
        const auto meta = function_meta(f, sp[n].E_tilde, sp[n].E, a.ca);
        std::ostringstream name;
        name << "eigenfunction_a2_" << static_cast<int>(a2) << "_n" << n << ".csv";
        emit_function(f, meta, (dir / name.str()).string(), a.ca.force, out);
      }
    }
    for (int n = 0; n <= 2; ++n) {
      const auto f = eigenfunctions::flat_eigenfunction(n, 1.0, 0.0, a.samples);
      const auto meta = function_meta(f, 0.0, 2.0 * n + 1.0, a.ca);
      std::ostringstream name;
      name << "eigenfunction_flat_n" << n << ".csv";
      emit_function(f, meta, (dir / name.str()).string(), a.ca.force, out);
    }
    return 0;
  }

  const bool has_q = option_given(sub, "--q");
  const bool has_a2 = option_given(sub, "--a2");
  const int route_count = (has_q ? 1 : 0) + (has_a2 ? 1 : 0) + (a.pa.flat ? 1 : 0);
  if (route_count != 1) {
    throw CLI::ValidationError("exactly one of --q / --a2 / --flat is required");
  }
  if (a.pa.flat) {
    const auto f =
        eigenfunctions::flat_eigenfunction(a.n, a.pa.omega, a.rho_max, a.samples);
    const auto meta =
        function_meta(f, 0.0, (2.0 * a.n + 1.0) * a.pa.omega, a.ca);
    emit_function(f, meta, a.ca.out, a.ca.force, out);
    return 0;
  }
  const auto p = make_params(sub, a.pa);
  double E_tilde = 0.0;
  const auto f = curved_state(p, a.n, a.ca, a.rho_max, a.samples, &E_tilde);
  const auto meta =
      function_meta(f, E_tilde, eigensolver::physical_energy(E_tilde, p), a.ca);
  emit_function(f, meta, a.ca.out, a.ca.force, out);
  return 0;
}

// ---- golden / verify -----------------------------------------------------

struct GoldenArgs {
  CommonArgs ca;
  double q = 0.5;
  double omega = 1.0;
  int m = 0;
  int n_max = 2;
  int grid_n = 40960;
  double xi_factor = 80.0;
};

int cmd_golden(const GoldenArgs& a, std::ostream& out) {
  const auto p = geometry::params_from_q(a.q, a.omega);
  oracle::OracleConfig cfg;
  cfg.N = a.grid_n;
  cfg.xi_factor = a.xi_factor;
  const auto g = oracle::make_golden(p, a.m, a.n_max + 1, cfg);
  io::write_output(a.ca.out, oracle::golden_to_json(g), a.ca.force, out);
  return 0;
}

struct VerifyArgs {
  CommonArgs ca;
  int oracle_n = 16384;
  bool inject_lambda_sign_bug = false;
};

std::string report_json(const checks::VerifyReport& rep) {
  std::ostringstream os;
  os << "{\n  \"tool\": \"lobosc " << kVersion << "\",\n";
  os << "  \"verb\": \"verify\",\n";
  os << "  \"all_passed\": " << (rep.all_passed() ? "true" : "false") << ",\n";
  os << "  \"checks\": [\n";
  for (std::size_t i = 0; i < rep.checks.size(); ++i) {
    const auto& c = rep.checks[i];
    os << "    {\"name\": \"" << io::json_escape(c.name) << "\", \"passed\": "
       << (c.passed ? "true" : "false") << ", \"measured\": " << fp(c.measured)
       << ", \"threshold\": " << fp(c.threshold) << ", \"detail\": \""
       << io::json_escape(c.detail) << "\"}"
       << (i + 1 < rep.checks.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  checks::VerifyOptions opt;
  opt.tol = a.ca.tol;
  opt.rtol = a.ca.rtol;
  opt.oracle_N = a.oracle_n;
  opt.inject_lambda_sign_bug = a.inject_lambda_sign_bug;
  const auto rep = checks::run_verification(opt);
  for (const auto& c : rep.checks) {
    out << (c.passed ? "PASS" : "FAIL") << "  " << c.name
        << "  measured=" << fp(c.measured) << "  threshold=" << fp(c.threshold);
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << "\n";
  }
  if (!a.ca.out.empty()) {
    io::write_output(a.ca.out, report_json(rep), a.ca.force, out);
  }
  return rep.all_passed() ? 0 : 3;
}

// ---- wiring ----------------------------------------------------------------

void add_common(CLI::App* sub, CommonArgs& ca) {
  sub->add_option("--tol", ca.tol, "eigenvalue tolerance");
  sub->add_option("--rtol", ca.rtol, "integrator relative tolerance");
  sub->add_option("--out", ca.out, "output path (default: stdout)");
  sub->add_flag("--force", ca.force, "overwrite existing output files");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"discrete spectrum of the constant-curvature radial "
               "oscillator via spheroidal shooting"};
  app.name("lobosc");
  app.require_subcommand(1);

  SpectrumArgs sa;
  auto* sp = app.add_subcommand("spectrum", "lowest eigenvalues at one q");
  sp->add_option("--q", sa.pa.q, "spheroidal parameter q = a^2 omega / 2");
  sp->add_option("--a2", sa.pa.a2, "squared curvature radius");
  sp->add_option("--omega", sa.pa.omega, "frequency (default 1)");
  sp->add_option("--m", sa.m, "angular index (oracle-only path)");
  sp->add_option("--n-max", sa.n_max, "highest level (default 2)");
  sp->add_flag("--oracle-only", sa.oracle_only, "matrix method only");
  sp->add_option("--grid-n", sa.grid_n, "oracle mesh cells");
  sp->add_option("--xi-factor", sa.xi_factor, "oracle box: Xi = 1 + factor/q");
  sp->add_option("--format", sa.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  add_common(sp, sa.ca);

  SweepArgs wa;
  auto* sw = app.add_subcommand("sweep", "levels across a q range");
  sw->add_option("--q-min", wa.q_min, "lowest q");
  sw->add_option("--q-max", wa.q_max, "highest q");
  sw->add_option("--points", wa.points, "number of q values (default 40)");
  sw->add_option("--spacing", wa.spacing, "log|linear")
      ->check(CLI::IsMember({"log", "linear"}));
  sw->add_option("--omega", wa.omega, "frequency (default 1)");
  sw->add_option("--n-max", wa.n_max, "highest level (default 2)");
  add_common(sw, wa.ca);

  EigenfunctionArgs ea;
  auto* ef = app.add_subcommand("eigenfunction", "radial wavefunction samples");
  ef->add_option("--q", ea.pa.q, "spheroidal parameter");
  ef->add_option("--a2", ea.pa.a2, "squared curvature radius");
  ef->add_flag("--flat", ea.pa.flat, "flat-space reference state");
  ef->add_option("--omega", ea.pa.omega, "frequency (default 1)");
  ef->add_option("--n", ea.n, "state index (default 0)");
  ef->add_option("--rho-max", ea.rho_max, "grid radius (default: auto)");
  ef->add_option("--samples", ea.samples, "grid points (default 2000)");
  ef->add_flag("--figure-set", ea.figure_set,
               "emit the standard comparison set (a2 = 1, 10, flat; n <= 2) "
               "into --out DIR");
  add_common(ef, ea.ca);

  EigenfunctionArgs fa;
  fa.pa.flat = true;
  auto* fl = app.add_subcommand("flat", "flat-space reference state");
  fl->add_option("--omega", fa.pa.omega, "frequency (default 1)");
  fl->add_option("--n", fa.n, "state index (default 0)");
  fl->add_option("--rho-max", fa.rho_max, "grid radius (default: auto)");
  fl->add_option("--samples", fa.samples, "grid points (default 2000)");
  add_common(fl, fa.ca);

  GoldenArgs ga;
  auto* go = app.add_subcommand("golden",
                                "regenerate a matrix-method reference file");
  go->add_option("--q", ga.q, "spheroidal parameter")->required();
  go->add_option("--omega", ga.omega, "frequency (default 1)");
  go->add_option("--m", ga.m, "angular index");
  go->add_option("--n-max", ga.n_max, "highest level (default 2)");
  go->add_option("--grid-n", ga.grid_n, "fine mesh cells (default 40960)");
  go->add_option("--xi-factor", ga.xi_factor, "box size factor (default 80)");
  add_common(go, ga.ca);

  VerifyArgs va;
  auto* ve = app.add_subcommand("verify", "run the self-check suite");
  ve->add_option("--oracle-n", va.oracle_n, "desk oracle mesh cells");
  ve->add_flag("--inject-lambda-sign-bug", va.inject_lambda_sign_bug,
               "harness hook: corrupt the integration and expect FAIL")
      ->group("");
  add_common(ve, va.ca);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "lobosc: " << e.what() << "\n";
    return 1;
  }

  try {
    if (sp->parsed()) return cmd_spectrum(*sp, sa, out);
    if (sw->parsed()) return cmd_sweep(wa, out, err);
    if (ef->parsed()) return cmd_eigenfunction(*ef, ea, out);
    if (fl->parsed()) {
      // `flat` is eigenfunction --flat under a shorter name.
      return cmd_eigenfunction(*fl, fa, out);
    }
    if (go->parsed()) return cmd_golden(ga, out);
    if (ve->parsed()) return cmd_verify(va, out);
    err << "lobosc: no subcommand\n";
    return 1;
  } catch (const CLI::ValidationError& e) {
    err << "lobosc: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    err << "lobosc: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    err << "lobosc: " << e.what() << "\n";
    return 1;
  } catch (const std::range_error& e) {
    err << "lobosc: " << e.what() << "\n";
    return 1;
  } catch (const IntegrationError& e) {
    err << "lobosc: " << e.what() << "\n";
    return 2;
  } catch (const DefectNotConverged& e) {
    err << "lobosc: " << e.what() << "\n";
    return 2;
  } catch (const RefinementError& e) {
    err << "lobosc: " << e.what() << "\n";
    return 2;
  } catch (const SpectralConsistencyError& e) {
    err << "lobosc: " << e.what() << "\n";
    return 2;
  } catch (const IndexingConsistencyError& e) {
    err << "lobosc: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    err << "lobosc: " << e.what() << "\n";
    return 1;  // I/O and overwrite refusals
  } catch (const std::exception& e) {
    err << "lobosc: internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace lobosc::cli
