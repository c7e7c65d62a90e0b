#include "lifespan/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lifespan/error.hpp"

namespace lifespan {
namespace {

using json = nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument("config: '" + where + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw InvalidArgument("config: unknown key '" + where + "." + key + "'");
  }
}

double num(const json& j, const std::string& where) {
  if (!j.is_number()) throw InvalidArgument("config: '" + where + "' must be a number");
  return j.get<double>();
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  const std::string path = where + "." + key;
  if constexpr (std::is_same_v<T, double>) {
    out = num(v, path);
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw InvalidArgument("config: '" + path + "' must be a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw InvalidArgument("config: '" + path + "' must be a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    if (!v.is_array()) throw InvalidArgument("config: '" + path + "' must be an array of numbers");
    out.clear();
    for (const auto& x : v) out.push_back(num(x, path));
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw InvalidArgument("config: '" + path + "' must be a non-negative integer");
    }
    out = v.get<T>();
  }
}

void read_opt(const json& obj, const char* key, std::optional<double>& out, const std::string& where) {
  if (!obj.contains(key)) return;
  if (obj.at(key).is_null()) {
    out.reset();
  } else {
    out = num(obj.at(key), where + "." + key);
  }
}

InitialProfile parse_profile(const json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw InvalidArgument("config: 'model.profile' needs a 'kind'");
  }
  InitialProfile p;
  p.kind = profile_kind_from_string(j.at("kind").get<std::string>());
  if (p.kind == ProfileKind::sampled) {
    check_keys(j, {"kind", "half_width", "re", "im"}, "model.profile");
    std::vector<double> re, im;
    read(j, "half_width", p.sample_half_width, "model.profile");
    read(j, "re", re, "model.profile");
    read(j, "im", im, "model.profile");
    if (im.empty()) im.assign(re.size(), 0.0);
    if (re.size() != im.size()) throw InvalidArgument("config: 'model.profile' re/im lengths differ");
    for (std::size_t i = 0; i < re.size(); ++i) p.samples.emplace_back(re[i], im[i]);
  } else {
    check_keys(j, {"kind", "amplitude", "width", "center", "wavenumber"}, "model.profile");
    read(j, "amplitude", p.amplitude, "model.profile");
    read(j, "width", p.width, "model.profile");
    read(j, "center", p.center, "model.profile");
    read(j, "wavenumber", p.wavenumber, "model.profile");
  }
  p.validate();
  return p;
}

json dump_profile(const InitialProfile& p) {
  json j;
  j["kind"] = to_string(p.kind);
  if (p.kind == ProfileKind::sampled) {
    std::vector<double> re, im;
    for (const auto& z : p.samples) {
      re.push_back(z.real());
      im.push_back(z.imag());
    }
    j["half_width"] = p.sample_half_width;
    j["re"] = re;
    j["im"] = im;
  } else {
    j["amplitude"] = p.amplitude;
    j["width"] = p.width;
    j["center"] = p.center;
    j["wavenumber"] = p.wavenumber;
  }
  return j;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(root, {"model", "solver", "simulate", "sweep", "residual", "props", "output", "seed", "threads"},
             "config");
  RunConfig c;

  if (root.contains("model")) {
    const json& m = root.at("model");
    check_keys(m, {"p", "lambda", "epsilon", "delta", "B_over_A", "B", "profile"}, "model");
    read(m, "p", c.model.p, "model");
    if (m.contains("lambda")) {
      const json& l = m.at("lambda");
      if (!l.is_array() || l.size() != 2) throw InvalidArgument("config: 'model.lambda' must be [re, im]");
      c.model.lambda = cplx(num(l[0], "model.lambda"), num(l[1], "model.lambda"));
    }
    read(m, "epsilon", c.model.epsilon, "model");
    read_opt(m, "delta", c.model.delta, "model");
    read(m, "B_over_A", c.model.B_over_A, "model");
    read_opt(m, "B", c.model.B, "model");
    if (m.contains("profile")) c.model.profile = parse_profile(m.at("profile"));
  }
  if (root.contains("solver")) {
    const json& s = root.at("solver");
    check_keys(s, {"dt_initial", "dt_floor", "K_b", "tau_scale", "boundary_tol", "bisection_rel_width",
                   "horizon_factor", "k_max_factor", "nonlinear_reach", "t_end", "grid"},
               "solver");
    read(s, "dt_initial", c.solver.dt_initial, "solver");
    read(s, "dt_floor", c.solver.dt_floor, "solver");
    read(s, "K_b", c.solver.K_b, "solver");
    read(s, "tau_scale", c.solver.tau_scale, "solver");
    read(s, "boundary_tol", c.solver.boundary_tol, "solver");
    read(s, "bisection_rel_width", c.solver.bisection_rel_width, "solver");
    read(s, "horizon_factor", c.solver.horizon_factor, "solver");
    read(s, "k_max_factor", c.solver.k_max_factor, "solver");
    read(s, "nonlinear_reach", c.solver.nonlinear_reach, "solver");
    read_opt(s, "t_end", c.solver.t_end, "solver");
    if (s.contains("grid") && !s.at("grid").is_null()) {
      const json& g = s.at("grid");
      check_keys(g, {"half_width", "n_points"}, "solver.grid");
      double L = 32.0;
      std::size_t n = 2048;
      read(g, "half_width", L, "solver.grid");
      read(g, "n_points", n, "solver.grid");
      c.solver.grid = Grid1D(L, n);
    }
  }
  if (root.contains("simulate")) {
    const json& s = root.at("simulate");
    check_keys(s, {"t_end", "record_times"}, "simulate");
    read(s, "t_end", c.t_end, "simulate");
    read(s, "record_times", c.record_times, "simulate");
  }
  if (root.contains("sweep")) {
    const json& s = root.at("sweep");
    check_keys(s, {"eps"}, "sweep");
    read(s, "eps", c.sweep_eps, "sweep");
  }
  if (root.contains("residual")) {
    const json& r = root.at("residual");
    check_keys(r, {"eps", "nodes", "rel_tol", "max_doublings", "t_min", "xi_spacing", "xi_rel", "mollified"},
               "residual");
    read(r, "eps", c.residual_eps, "residual");
    read(r, "nodes", c.budget.nodes, "residual");
    read(r, "rel_tol", c.budget.rel_tol, "residual");
    read(r, "max_doublings", c.budget.max_doublings, "residual");
    read(r, "t_min", c.budget.t_min, "residual");
    read(r, "xi_spacing", c.approx.xi_spacing, "residual");
    read(r, "xi_rel", c.approx.xi_rel, "residual");
    read(r, "mollified", c.approx.mollified, "residual");
  }
  if (root.contains("props")) {
    const json& p = root.at("props");
    check_keys(p, {"lemma_pairs", "lemma_scale"}, "props");
    read(p, "lemma_pairs", c.props.lemma_pairs, "props");
    read(p, "lemma_scale", c.props.lemma_scale, "props");
  }
  if (root.contains("output")) {
    const json& o = root.at("output");
    check_keys(o, {"dir"}, "output");
    read(o, "dir", c.output_dir, "output");
  }
  read(root, "seed", c.seed, "config");
  read(root, "threads", c.threads, "config");

  c.model.validate();
  for (double e : c.sweep_eps) {
    if (!(e > 0.0)) throw InvalidArgument("config: 'sweep.eps' entries must be positive");
  }
  for (double e : c.residual_eps) {
    if (!(e > 0.0 && e < 1.0)) throw InvalidArgument("config: 'residual.eps' entries must lie in (0, 1)");
  }
  if (!(c.t_end > 0.0)) throw InvalidArgument("config: 'simulate.t_end' must be positive");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string dump_run_config(const RunConfig& c) {
  json root;
  root["model"] = {{"p", c.model.p},
                   {"lambda", {c.model.lambda.real(), c.model.lambda.imag()}},
                   {"epsilon", c.model.epsilon},
                   {"delta", opt_json(c.model.delta)},
                   {"B_over_A", c.model.B_over_A},
                   {"B", opt_json(c.model.B)},
                   {"profile", dump_profile(c.model.profile)}};
  json solver = {{"dt_initial", c.solver.dt_initial},
                 {"dt_floor", c.solver.dt_floor},
                 {"K_b", c.solver.K_b},
                 {"tau_scale", c.solver.tau_scale},
                 {"boundary_tol", c.solver.boundary_tol},
                 {"bisection_rel_width", c.solver.bisection_rel_width},
                 {"horizon_factor", c.solver.horizon_factor},
                 {"k_max_factor", c.solver.k_max_factor},
                 {"nonlinear_reach", c.solver.nonlinear_reach},
                 {"t_end", opt_json(c.solver.t_end)}};
  solver["grid"] = c.solver.grid ? json{{"half_width", c.solver.grid->half_width()},
                                        {"n_points", c.solver.grid->size()}}
                                 : json(nullptr);
  root["solver"] = solver;
  root["simulate"] = {{"t_end", c.t_end}, {"record_times", c.record_times}};
  root["sweep"] = {{"eps", c.sweep_eps}};
  root["residual"] = {{"eps", c.residual_eps},         {"nodes", c.budget.nodes},
                      {"rel_tol", c.budget.rel_tol},   {"max_doublings", c.budget.max_doublings},
                      {"t_min", c.budget.t_min},       {"xi_spacing", c.approx.xi_spacing},
                      {"xi_rel", c.approx.xi_rel},     {"mollified", c.approx.mollified}};
  root["props"] = {{"lemma_pairs", c.props.lemma_pairs}, {"lemma_scale", c.props.lemma_scale}};
  root["output"] = {{"dir", c.output_dir}};
  root["seed"] = c.seed;
  root["threads"] = c.threads;
  return root.dump(2);
}

}  // namespace lifespan
