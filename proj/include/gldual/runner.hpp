#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gldual/complex_gl.hpp"
#include "gldual/config.hpp"
#include "gldual/dual.hpp"
#include "gldual/primal.hpp"
#include "gldual/report.hpp"

namespace gldual {

// Exit-code contract of the experiment runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverError = 3;

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

inline LogLevel log_level() {
  const char* env = std::getenv("GLDUAL_LOG");
  if (!env) return LogLevel::Info;
  const std::string v = env;
  if (v == "quiet") return LogLevel::Quiet;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

inline void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cerr << "[gldual] " << msg << "\n";
}

struct SweepSpec {
  std::string param;  // beta | alpha | gamma | k_margin | n
  double from = 0.0;
  double to = 0.0;
  int steps = 1;
};

namespace runner_detail {

inline FieldReal bump_field(const Grid& g, double scale) {
  FieldReal u(g);
  for (int j = 0; j < (g.dim == 2 ? g.n[1] : 1); ++j) {
    for (int i = 0; i < g.n[0]; ++i) {
      const double x = (i + 1) * g.h[0] / g.extent[0];
      double v = std::sin(std::numbers::pi * x);
      if (g.dim == 2) {
        const double y = (j + 1) * g.h[1] / g.extent[1];
        v *= std::sin(std::numbers::pi * y);
      }
      u[g.index(i, j)] = scale * v;
    }
  }
  return u;
}

inline FieldReal manufactured_target(const ExperimentConfig& e, const Grid& g) {
  if (e.source.u0_kind == "constant") return FieldReal(g, e.source.u0_scale);
  if (e.source.u0_kind == "values") {
    if (static_cast<int>(e.source.u0_values.size()) != g.size())
      throw ConfigError("source.u0.values: expected " + std::to_string(g.size()) + " entries");
    return FieldReal(g, e.source.u0_values);
  }
  return bump_field(g, e.source.u0_scale);
}

inline FieldReal build_source(const ExperimentConfig& e, const Grid& g) {
  switch (e.source.kind) {
    case SourceSpec::Kind::Zero:
      return FieldReal(g, 0.0);
    case SourceSpec::Kind::Constant:
      return FieldReal(g, e.source.value);
    case SourceSpec::Kind::Random: {
      std::mt19937_64 rng(e.seed ^ 0xF00DULL);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      FieldReal f(g);
      for (int i = 0; i < f.size(); ++i) f[i] = e.source.amplitude * unif(rng);
      return f;
    }
    case SourceSpec::Kind::Manufactured:
      return manufactured_source(g, e.gamma, e.alpha, e.beta, manufactured_target(e, g));
  }
  return FieldReal(g, 0.0);
}

inline FieldReal build_start(const ExperimentConfig& e, const Grid& g, const std::string& which) {
  if (which == "zero") return FieldReal(g, 0.0);
  if (which == "bump_pos") return bump_field(g, std::sqrt(e.beta));
  if (which == "bump_neg") return bump_field(g, -std::sqrt(e.beta));
  if (which == "manufactured") {
    if (e.source.kind != SourceSpec::Kind::Manufactured)
      throw ConfigError("start \"manufactured\" needs source.kind = manufactured");
    return manufactured_target(e, g);
  }
  std::mt19937_64 rng(e.seed ^ 0xBEEFULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  FieldReal u(g);
  for (int i = 0; i < u.size(); ++i) u[i] = 1.2 * std::sqrt(e.beta) * unif(rng);
  return u;
}

inline json gap_values(const ExperimentConfig& e, const Grid& g, const GapReport& r) {
  json v;
  v["J_primal"] = r.J_primal;
  v["J_dual"] = r.J_dual;
  v["gap"] = r.gap;
  v["rel_gap"] = r.rel_gap;
  v["n"] = g.size();
  v["h"] = g.h[0];
  v["beta"] = e.beta;
  v["alpha"] = e.alpha;
  v["gamma"] = e.gamma;
  return v;
}

inline void run_scalar_experiment(const ExperimentConfig& e, VerificationReport& rep,
                                  const std::string& label) {
  const Grid grid = e.dim == 1 ? make_grid_1d(e.n[0], e.extent[0])
                               : make_grid_2d(e.n[0], e.n[1], e.extent[0], e.extent[1]);
  const double K = choose_K(grid, e.gamma, e.k_margin);
  const GLProblem p = GLProblem::make(grid, e.gamma, e.alpha, e.beta, build_source(e, grid), K);
  const bool single_start = e.starts.size() == 1;

  for (const std::string& start : e.starts) {
    const std::string tag = single_start ? label : label + "[" + start + "]";
    const FieldReal u_init = build_start(e, grid, start);
    NewtonOptions nopts;
    nopts.max_iters = e.max_iters;
    const CriticalPoint cp = find_critical_point(p, u_init, e.newton_tol, nopts);
    const DualPoint dp = build_dual_point(p, cp.u0);

    {
      CheckRecord r;
      r.name = tag + "/critical_point";
      r.case_label = start;
      r.values = {{"residual", cp.residual_norm},
                  {"iterations", cp.iterations},
                  {"hessian_class", to_string(cp.hessian_class)},
                  {"lambda_min_J2", cp.lambda_min_J2},
                  {"lambda_max_J2", cp.lambda_max_J2},
                  {"in_Astar", dp.in_Astar},
                  {"in_Bstar", dp.in_Bstar},
                  {"K", p.K}};
      r.tolerances = {{"newton_tol", e.newton_tol}};
      r.passed = cp.residual_norm <= e.newton_tol;
      rep.checks.push_back(std::move(r));
    }

    for (const std::string& check : e.checks) {
      CheckRecord r;
      r.name = tag + "/" + check;
      r.case_label = check;
      try {
        if (check == "analytic_f0") {
          if (norm2(p.f) != 0.0) throw HypothesisError("analytic_f0 requires f = 0", "source");
          const double j0 = eval_J(p, FieldReal(grid, 0.0));
          const double closed = 0.5 * e.alpha * e.beta * e.beta * grid.weight * grid.size();
          FieldReal v1(grid), v0(grid, -e.alpha * e.beta);
          for (int i = 0; i < v1.size(); ++i) v1[i] = -p.f[i];
          const double jstar = eval_Jstar(p, v1, v0);
          r.values = {{"J_zero", j0}, {"closed_form", closed}, {"J_star", jstar},
                      {"defect", std::abs(jstar - j0)}};
          r.tolerances = {{"abs_tol", 1e-12}};
          r.passed = std::abs(jstar - j0) <= 1e-12 * std::max(1.0, std::abs(j0)) &&
                     std::abs(closed - j0) <= 1e-12 * std::max(1.0, std::abs(j0));
        } else if (check.rfind("gap_", 0) == 0) {
          std::optional<TheoremCase> which;
          if (check == "gap_auto") {
            which = suggest_theorem_case(cp, dp);
            if (!which) throw HypothesisError("gap_auto: no theorem case applies", "flags");
          } else {
            which = theorem_case_from_string(check.substr(4));
            if (!which) throw ConfigError("unknown check \"" + check + "\"");
          }
          const GapReport gr = verify_gap(p, cp, *which, e.gap_tol);
          r.case_label = to_string(*which);
          r.values = gap_values(e, grid, gr);
          r.tolerances = {{"gap_tol", e.gap_tol}};
          r.passed = gr.passed;
        } else if (check == "second_derivative") {
          const SecondDerivativeReport sd =
              verify_second_derivative_correspondence(p, cp, e.probe_eps);
          r.values = {{"primal_class", to_string(sd.primal_class)},
                      {"curvature_class", to_string(sd.curvature_class)},
                      {"t1_checked", sd.t1_checked},
                      {"t1_ok", sd.t1_ok},
                      {"t2_checked", sd.t2_checked},
                      {"t2_ok", sd.t2_ok},
                      {"beta", e.beta}};
          if (sd.tilde.built) {
            r.values["tilde_class"] = to_string(sd.tilde.cls);
            r.values["tilde_symmetry_defect"] = sd.tilde.symmetry_defect;
          }
          if (sd.reduced.built) {
            r.values["reduced_functional"] = sd.reduced.functional;
            r.values["reduced_class"] = to_string(sd.reduced.cls);
            r.values["reduced_symmetry_defect"] = sd.reduced.symmetry_defect;
          }
          r.tolerances = {{"symmetry_defect", 1e-6}, {"probe_eps", e.probe_eps}};
          r.passed = sd.passed;
        } else if (check == "weak_duality") {
          const WeakDualityReport wd = weak_duality_sample(p, e.samples, e.seed);
          r.values = {{"n_samples", wd.n_samples},
                      {"min_slack", wd.min_slack},
                      {"slacks", wd.slacks}};
          r.tolerances = {{"min_slack", -1e-10}};
          r.passed = wd.min_slack >= -1e-10;
        } else if (check == "global_criterion") {
          if (!dp.in_Astar) throw HypothesisError("global_criterion: v0^ not in A*", "Astar");
          if (!dp.in_Bstar) throw HypothesisError("global_criterion: v0^ not in B*", "Bstar");
          const double j0 = eval_J(p, cp.u0);
          std::mt19937_64 rng(e.seed ^ 0x61C8864680B583EBULL);
          std::uniform_real_distribution<double> unif(-1.0, 1.0);
          double min_margin = std::numeric_limits<double>::infinity();
          for (int k = 0; k < e.samples; ++k) {
            FieldReal u(grid);
            for (int i = 0; i < u.size(); ++i) u[i] = 2.0 * std::sqrt(e.beta) * unif(rng);
            min_margin = std::min(min_margin, eval_J(p, u) - j0);
          }
          r.values = {{"J_u0", j0}, {"n_samples", e.samples}, {"min_margin", min_margin}};
          r.tolerances = {{"min_margin", -1e-8}};
          r.passed = min_margin >= -1e-8;
        } else {
          throw ConfigError("unknown scalar check \"" + check + "\"");
        }
      } catch (const HypothesisError& err) {
        r.values["error"] = err.what();
        r.passed = false;
      } catch (const FeasibilityError& err) {
        r.values["error"] = err.what();
        r.passed = false;
      }
      rep.checks.push_back(std::move(r));
    }
  }
}

inline std::vector<double> smooth_node_scalar(const StaggeredGrid& g, double scale, int mode) {
  std::vector<double> chi(static_cast<size_t>(g.n_nodes()));
  const double lx = (g.mx - 1) * g.hx, ly = (g.my - 1) * g.hy;
  for (int j = 0; j < g.my; ++j)
    for (int i = 0; i < g.mx; ++i) {
      const double x = g.node_x(i) / lx, y = g.node_y(j) / ly;
      chi[static_cast<size_t>(g.node(i, j))] =
          scale * (std::sin((1 + mode) * std::numbers::pi * x) *
                       std::cos((1 + mode * mode) * std::numbers::pi * y) +
                   0.3 * x * y);
    }
  return chi;
}

struct SmoothComplexData {
  FieldComplex phi;
  VectorField A;
};

inline SmoothComplexData smooth_complex_fields(const ComplexGLProblem& p) {
  const StaggeredGrid& g = p.grid;
  SmoothComplexData d{FieldComplex(g), VectorField(g)};
  const double lx = (g.mx - 1) * g.hx, ly = (g.my - 1) * g.hy;
  for (int j = g.j0; j < g.j0 + g.mh; ++j)
    for (int i = g.i0; i < g.i0 + g.mw; ++i) {
      const double x = g.node_x(i) / lx, y = g.node_y(j) / ly;
      d.phi[g.mask_index(i, j)] =
          Complex(std::sin(std::numbers::pi * x) * std::cos(std::numbers::pi * y),
                  0.5 * std::sin(2 * std::numbers::pi * x * y));
    }
  for (int e = 0; e < g.n_edges(); ++e) {
    const auto ee = stagger::edge_ends(g, e);
    const double x = 0.5 * (g.node_x(ee.bi) + g.node_x(ee.ti)) / lx;
    const double y = 0.5 * (g.node_y(ee.bj) + g.node_y(ee.tj)) / ly;
    d.A[e] = ee.is_x ? std::sin(std::numbers::pi * y) + 0.2 * x
                     : std::cos(std::numbers::pi * x) - 0.1 * y;
  }
  return d;
}

inline double gauge_defect(const ComplexGLProblem& p) {
  const SmoothComplexData d = smooth_complex_fields(p);
  const std::vector<double> chi = smooth_node_scalar(p.grid, 0.8, 1);
  const auto [phi2, a2] = gauge_transform(p, d.phi, d.A, chi);
  return std::abs(eval_J_complex(p, phi2, a2) - eval_J_complex(p, d.phi, d.A));
}

inline void run_complex_experiment(const ExperimentConfig& e, VerificationReport& rep,
                                   const std::string& label) {
  double gamma = e.gamma, alpha = e.alpha, beta = e.beta;
  if (e.t) {
    const TParams tp = t_parameterization(*e.t);
    gamma = tp.gamma;
    alpha = tp.alpha;
    beta = tp.beta;
  }
  auto make_problem = [&](int mask_w, int mask_h, double hx, double hy) {
    StaggeredGrid g = make_staggered_grid(mask_w, mask_h, hx, hy, e.margin);
    FieldComplex f(g);
    if (e.source.kind == SourceSpec::Kind::Constant)
      for (auto& z : f.v) z = Complex(e.source.value, e.source.value_im);
    else if (e.source.kind == SourceSpec::Kind::Random) {
      std::mt19937_64 rng(e.seed ^ 0xF00DULL);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      for (auto& z : f.v) z = e.source.amplitude * Complex(unif(rng), unif(rng));
    }
    return ComplexGLProblem::make(std::move(g), gamma, alpha, beta, e.rho, std::move(f),
                                  e.magnetic_weight, e.b0);
  };
  const ComplexGLProblem p = make_problem(e.mask_w, e.mask_h, e.hx, e.hy);

  for (const std::string& check : e.checks) {
    CheckRecord r;
    r.name = label + "/" + check;
    r.case_label = check;
    try {
      if (check == "complex_invariants") {
        const SmoothComplexData d = smooth_complex_fields(p);
        const std::vector<double> chi = smooth_node_scalar(p.grid, 0.8, 1);
        const auto [phi2, a2] = gauge_transform(p, d.phi, d.A, chi);
        double mod_defect = 0.0;
        for (int m = 0; m < p.grid.n_mask(); ++m)
          mod_defect = std::max(mod_defect, std::abs(std::abs(phi2[m]) - std::abs(d.phi[m])));
        const auto c1 = stagger::curl2d(p.grid, d.A);
        const auto c2 = stagger::curl2d(p.grid, a2);
        double curl_defect = 0.0, curl_scale = 1.0;
        for (size_t k = 0; k < c1.size(); ++k) {
          curl_defect = std::max(curl_defect, std::abs(c1[k] - c2[k]));
          curl_scale = std::max(curl_scale, std::abs(c1[k]));
        }
        // gauge-defect convergence under mesh halving
        std::vector<double> defects;
        for (int level = 0; level < 4; ++level) {
          const int s = 1 << level;
          defects.push_back(gauge_defect(
              make_problem(e.mask_w * s, e.mask_h * s, e.hx / s, e.hy / s)));
        }
        double worst_ratio = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k + 1 < defects.size(); ++k)
          worst_ratio = std::min(worst_ratio, defects[k] / defects[k + 1]);
        // coulomb projection on a rough seeded field
        std::mt19937_64 rng(e.seed ^ 0xC001ULL);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        VectorField araw(p.grid);
        for (int edge = 0; edge < p.grid.n_edges(); ++edge) araw[edge] = unif(rng);
        const VectorField ap = coulomb_project(p.grid, araw);
        double a_norm = 0.0, div_norm = 0.0, idem = 0.0;
        for (double x : araw.v) a_norm += x * x;
        a_norm = std::sqrt(a_norm);
        for (double x : stagger::grad_adjoint(p.grid, ap)) div_norm += x * x;
        div_norm = std::sqrt(div_norm);
        const VectorField ap2 = coulomb_project(p.grid, ap);
        for (int edge = 0; edge < p.grid.n_edges(); ++edge)
          idem = std::max(idem, std::abs(ap2[edge] - ap[edge]));

        r.values = {{"modulus_defect", mod_defect},
                    {"curl_defect", curl_defect},
                    {"gauge_defects", defects},
                    {"gauge_worst_ratio", worst_ratio},
                    {"coulomb_div_residual", div_norm},
                    {"coulomb_div_rel", div_norm / a_norm},
                    {"coulomb_idempotency", idem}};
        r.tolerances = {{"modulus_defect", 1e-13},
                        {"curl_defect_rel", 1e-12},
                        {"gauge_ratio_min", 1.8},
                        {"coulomb_div_rel", 1e-8},
                        {"coulomb_idempotency", 1e-10}};
        r.passed = mod_defect <= 1e-13 && curl_defect <= 1e-12 * curl_scale &&
                   worst_ratio >= 1.8 && div_norm <= 1e-8 * a_norm && idem <= 1e-10;
      } else if (check == "complex_weak_duality") {
        const ComplexWeakDualityReport wd = weak_duality_complex(p, e.samples, e.seed);
        r.values = {{"n_samples", wd.n_samples},
                    {"min_slack", wd.min_slack},
                    {"b2_probes", wd.b2_probes},
                    {"b2_sampled_ok", wd.b2_sampled_ok},
                    {"slacks", wd.slacks}};
        r.tolerances = {{"min_slack", -1e-10}};
        r.passed = wd.min_slack >= -1e-10;
      } else {
        throw ConfigError("unknown complex check \"" + check + "\"");
      }
    } catch (const HypothesisError& err) {
      r.values["error"] = err.what();
      r.passed = false;
    } catch (const FeasibilityError& err) {
      r.values["error"] = err.what();
      r.passed = false;
    }
    rep.checks.push_back(std::move(r));
  }
}

inline void apply_sweep_value(ExperimentConfig& e, const std::string& param, double value) {
  if (param == "beta") e.beta = value;
  else if (param == "alpha") e.alpha = value;
  else if (param == "gamma") e.gamma = value;
  else if (param == "k_margin") e.k_margin = value;
  else if (param == "n") {
    const int n = std::max(1, static_cast<int>(std::lround(value)));
    e.n = {n, e.dim == 2 ? n : 1};
    e.mask_w = e.mask_h = n;
  } else {
    throw ConfigError("sweep: unknown parameter \"" + param + "\" (use beta|alpha|gamma|k_margin|n)");
  }
}

}  // namespace runner_detail

/// Executes every experiment in the config (optionally expanded over a
/// parameter sweep) and assembles the verification report.
inline VerificationReport run_experiments(const Config& cfg,
                                          const SweepSpec* sweep = nullptr) {
  VerificationReport rep;
  rep.config_echo = cfg.echo;
  if (sweep) {
    rep.config_echo["sweep"] = {{"param", sweep->param},
                                {"from", sweep->from},
                                {"to", sweep->to},
                                {"steps", sweep->steps}};
  }
  for (const ExperimentConfig& base : cfg.experiments) {
    const int steps = sweep ? std::max(1, sweep->steps) : 1;
    for (int k = 0; k < steps; ++k) {
      ExperimentConfig e = base;
      std::string label = e.name;
      if (sweep) {
        const double value =
            steps == 1 ? sweep->from
                       : sweep->from + k * (sweep->to - sweep->from) / (steps - 1);
        runner_detail::apply_sweep_value(e, sweep->param, value);
        label += "@" + format_double(value);
      }
      log_info("running experiment " + label);
      if (e.is_complex) runner_detail::run_complex_experiment(e, rep, label);
      else runner_detail::run_scalar_experiment(e, rep, label);
    }
  }
  return rep;
}

/// Writes the CSV plot series derived from a report. One file per check name
/// with the scalar fields as columns ("name,case,<sorted keys>,passed"), plus
/// one single-column file per record holding a "slacks" histogram array.
/// Returns the list of files written. Deterministic for a fixed report.
inline std::vector<std::string> emit_plot_data(const VerificationReport& rep,
                                               const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  auto sanitize = [](std::string s) {
    for (char& c : s)
      if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    return s;
  };

  // group record indices by the check part of the name (after the label)
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<size_t>> groups;
  for (size_t i = 0; i < rep.checks.size(); ++i) {
    const std::string& name = rep.checks[i].name;
    const size_t slash = name.rfind('/');
    const std::string group = slash == std::string::npos ? name : name.substr(slash + 1);
    if (!groups.count(group)) group_order.push_back(group);
    groups[group].push_back(i);
  }

  for (const std::string& group : group_order) {
    const auto& idx = groups[group];
    // union of scalar keys across the group
    std::set<std::string> keys;
    for (size_t i : idx)
      for (auto it = rep.checks[i].values.begin(); it != rep.checks[i].values.end(); ++it)
        if (it->is_number() || it->is_boolean() || it->is_string()) keys.insert(it.key());

    const std::string path = out_dir + "/" + sanitize(group) + ".csv";
    std::ofstream out(path);
    out << "name,case";
    for (const auto& k : keys) out << "," << k;
    out << ",passed\n";
    for (size_t i : idx) {
      const CheckRecord& c = rep.checks[i];
      out << c.name << "," << c.case_label;
      for (const auto& k : keys) {
        out << ",";
        if (!c.values.contains(k)) continue;
        const json& v = c.values.at(k);
        if (v.is_number_float()) out << format_double(v.get<double>());
        else if (v.is_number()) out << v.dump();
        else if (v.is_boolean()) out << (v.get<bool>() ? 1 : 0);
        else out << v.get<std::string>();
      }
      out << "," << (c.passed ? 1 : 0) << "\n";
    }
    written.push_back(path);

    for (size_t i : idx) {
      const CheckRecord& c = rep.checks[i];
      if (c.values.contains("slacks") && c.values.at("slacks").is_array()) {
        const std::string hpath =
            out_dir + "/" + sanitize(c.name) + "_slacks.csv";
        std::ofstream hout(hpath);
        hout << "slack\n";
        for (const auto& s : c.values.at("slacks")) hout << format_double(s.get<double>()) << "\n";
        written.push_back(hpath);
      }
    }
  }
  return written;
}

/// Full `verify`/`sweep` pipeline with the documented exit-code contract:
/// 0 all checks pass, 1 a check failed, 2 config rejected, 3 solver failure.
inline int run_config(const std::string& config_path, const SweepSpec* sweep = nullptr,
                      const std::string& report_override = "") {
  Config cfg;
  try {
    cfg = load_config_file(config_path);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfigError;
  }
  VerificationReport rep;
  try {
    rep = run_experiments(cfg, sweep);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& err) {
    std::cerr << "solver failure: " << err.what() << "\n";
    return kExitSolverError;
  }
  const std::string out = report_override.empty() ? cfg.report_path : report_override;
  write_report(rep, out);
  int failed = 0;
  for (const auto& c : rep.checks)
    if (!c.passed) ++failed;
  log_info("wrote " + out + " (" + std::to_string(rep.checks.size()) + " checks, " +
           std::to_string(failed) + " failed)");
  return rep.all_passed() ? kExitOk : kExitCheckFailed;
}

}  // namespace gldual
