#pragma once

#include <json.hpp>

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gldual/report.hpp"

namespace gldual {

/// Config rejection with a config-file location when one is known.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SourceSpec {
  enum class Kind { Zero, Constant, Random, Manufactured };
  Kind kind = Kind::Zero;
  double value = 0.0;      // constant (real part for complex problems)
  double value_im = 0.0;   // constant, imaginary part
  double amplitude = 1.0;  // random
  // manufactured critical point target (scalar problems)
  std::string u0_kind = "bump";  // "bump" | "constant" | "values"
  double u0_scale = 1.0;
  std::vector<double> u0_values;
};

struct ExperimentConfig {
  std::string name;
  bool is_complex = false;

  // scalar grid
  int dim = 1;
  std::array<int, 2> n = {8, 1};
  std::array<double, 2> extent = {1.0, 1.0};
  // complex (staggered) grid
  int mask_w = 8, mask_h = 8;
  double hx = 0.1, hy = 0.1;
  int margin = 2;

  double gamma = 1.0, alpha = 1.0, beta = 1.0;
  double rho = 1.0, magnetic_weight = 0.0397887357729738339;  // 1/(8 pi)
  double b0 = 0.0;
  std::optional<double> t;  // t-parameterization overrides gamma/alpha/beta

  SourceSpec source;
  double k_margin = 0.25;
  double newton_tol = 1e-10;
  int max_iters = 100;
  double gap_tol = 1e-8;
  double probe_eps = 1e-4;

  std::vector<std::string> starts = {"zero"};
  std::vector<std::string> checks;
  std::uint64_t seed = 1;
  int samples = 1000;
  int sampler_budget = 32;
};

struct Config {
  std::vector<ExperimentConfig> experiments;
  std::string report_path = "report.json";
  json echo;  // parsed document, for the report
};

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed,
                       const std::string& ctx) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key \"" + it.key() + "\" in " + ctx);
  }
}

inline SourceSpec parse_source(const json& j) {
  check_keys(j, {"kind", "value", "value_im", "amplitude", "u0"}, "source");
  SourceSpec s;
  const std::string kind = j.value("kind", "zero");
  if (kind == "zero") s.kind = SourceSpec::Kind::Zero;
  else if (kind == "constant") s.kind = SourceSpec::Kind::Constant;
  else if (kind == "random") s.kind = SourceSpec::Kind::Random;
  else if (kind == "manufactured") s.kind = SourceSpec::Kind::Manufactured;
  else throw ConfigError("source.kind must be zero|constant|random|manufactured, got \"" + kind + "\"");
  s.value = j.value("value", 0.0);
  s.value_im = j.value("value_im", 0.0);
  s.amplitude = j.value("amplitude", 1.0);
  if (j.contains("u0")) {
    const json& u = j.at("u0");
    check_keys(u, {"kind", "scale", "values"}, "source.u0");
    s.u0_kind = u.value("kind", "bump");
    if (s.u0_kind != "bump" && s.u0_kind != "constant" && s.u0_kind != "values")
      throw ConfigError("source.u0.kind must be bump|constant|values");
    s.u0_scale = u.value("scale", 1.0);
    if (u.contains("values")) s.u0_values = u.at("values").get<std::vector<double>>();
  }
  return s;
}

inline ExperimentConfig parse_experiment(const json& j, int index) {
  const std::string ctx = "experiments[" + std::to_string(index) + "]";
  check_keys(j,
             {"name", "problem", "grid", "parameters", "source", "k_margin", "solver", "starts",
              "checks", "seed", "samples", "sampler_budget"},
             ctx);
  ExperimentConfig e;
  e.name = j.value("name", "experiment_" + std::to_string(index));
  const std::string problem = j.value("problem", "scalar");
  if (problem == "scalar") e.is_complex = false;
  else if (problem == "complex") e.is_complex = true;
  else throw ConfigError(ctx + ".problem must be scalar|complex");

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (!e.is_complex) {
      check_keys(g, {"dim", "n", "extent"}, ctx + ".grid");
      e.dim = g.value("dim", 1);
      if (e.dim != 1 && e.dim != 2) throw ConfigError(ctx + ".grid.dim must be 1 or 2");
      if (g.contains("n")) {
        auto v = g.at("n").get<std::vector<int>>();
        if (static_cast<int>(v.size()) != e.dim)
          throw ConfigError(ctx + ".grid.n must list one entry per axis");
        e.n = {v[0], e.dim == 2 ? v[1] : 1};
      }
      if (g.contains("extent")) {
        auto v = g.at("extent").get<std::vector<double>>();
        if (static_cast<int>(v.size()) != e.dim)
          throw ConfigError(ctx + ".grid.extent must list one entry per axis");
        e.extent = {v[0], e.dim == 2 ? v[1] : 1.0};
      }
    } else {
      check_keys(g, {"mask", "h", "margin"}, ctx + ".grid");
      if (g.contains("mask")) {
        auto v = g.at("mask").get<std::vector<int>>();
        if (v.size() != 2) throw ConfigError(ctx + ".grid.mask must be [w, h]");
        e.mask_w = v[0];
        e.mask_h = v[1];
      }
      if (g.contains("h")) {
        auto v = g.at("h").get<std::vector<double>>();
        if (v.size() != 2) throw ConfigError(ctx + ".grid.h must be [hx, hy]");
        e.hx = v[0];
        e.hy = v[1];
      }
      e.margin = g.value("margin", 2);
    }
  }

  if (j.contains("parameters")) {
    const json& p = j.at("parameters");
    check_keys(p, {"gamma", "alpha", "beta", "rho", "magnetic_weight", "b0", "t"},
               ctx + ".parameters");
    e.gamma = p.value("gamma", 1.0);
    e.alpha = p.value("alpha", 1.0);
    e.beta = p.value("beta", 1.0);
    e.rho = p.value("rho", 1.0);
    e.magnetic_weight = p.value("magnetic_weight", e.magnetic_weight);
    e.b0 = p.value("b0", 0.0);
    if (p.contains("t")) e.t = p.at("t").get<double>();
  }

  if (j.contains("source")) e.source = parse_source(j.at("source"));
  e.k_margin = j.value("k_margin", 0.25);

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, {"newton_tol", "max_iters", "gap_tol", "probe_eps"}, ctx + ".solver");
    e.newton_tol = s.value("newton_tol", 1e-10);
    e.max_iters = s.value("max_iters", 100);
    e.gap_tol = s.value("gap_tol", 1e-8);
    e.probe_eps = s.value("probe_eps", 1e-4);
  }

  if (j.contains("starts")) e.starts = j.at("starts").get<std::vector<std::string>>();
  for (const auto& s : e.starts)
    if (s != "zero" && s != "bump_pos" && s != "bump_neg" && s != "random" && s != "manufactured")
      throw ConfigError(ctx + ".starts: unknown start \"" + s + "\"");
  if (!j.contains("checks")) throw ConfigError(ctx + " must list \"checks\"");
  e.checks = j.at("checks").get<std::vector<std::string>>();
  e.seed = j.value("seed", 1ULL);
  e.samples = j.value("samples", 1000);
  e.sampler_budget = j.value("sampler_budget", 32);
  return e;
}

}  // namespace detail

inline Config parse_config(const std::string& text, const std::string& origin = "<config>") {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    // recover line/column from the byte offset for a usable diagnostic
    size_t line = 1, col = 1;
    for (size_t i = 0; i < err.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                      err.what());
  }
  try {
    detail::check_keys(doc, {"schema_version", "experiments", "output"}, "config");
    if (!doc.contains("schema_version") || doc.at("schema_version") != 1)
      throw ConfigError("config.schema_version must be 1");
    Config cfg;
    cfg.echo = doc;
    if (doc.contains("output")) {
      detail::check_keys(doc.at("output"), {"report"}, "output");
      cfg.report_path = doc.at("output").value("report", cfg.report_path);
    }
    if (!doc.contains("experiments") || !doc.at("experiments").is_array() ||
        doc.at("experiments").empty())
      throw ConfigError("config.experiments must be a non-empty array");
    int idx = 0;
    for (const auto& e : doc.at("experiments"))
      cfg.experiments.push_back(detail::parse_experiment(e, idx++));
    return cfg;
  } catch (const nlohmann::json::exception& err) {
    throw ConfigError(origin + ": " + err.what());
  }
}

inline Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace gldual
