#include "config.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace porehom::app {

using nlohmann::json;

namespace {

/// Reads one JSON object, remembering which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!j_.contains(key)) return;
    used_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where(key) + " has the wrong type");
    }
  }

  double number(const std::string& key, double fallback) {
    double v = fallback;
    if (j_.contains(key) && !j_.at(key).is_number()) throw ConfigError(where(key) + " must be a number");
    get(key, v);
    return v;
  }

  int integer(const std::string& key, int fallback) {
    if (j_.contains(key) && !j_.at(key).is_number_integer()) throw ConfigError(where(key) + " must be an integer");
    int v = fallback;
    get(key, v);
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (j_.contains(key) && !j_.at(key).is_string()) throw ConfigError(where(key) + " must be a string");
    std::string v = fallback;
    get(key, v);
    return v;
  }

  Section child(const std::string& key) {
    used_.insert(key);
    static const json empty = json::object();
    return Section(j_.contains(key) ? j_.at(key) : empty, path_.empty() ? key : path_ + "." + key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError("unknown key " + where(it.key()));
  }

  std::string where(const std::string& key = "") const {
    const std::string p = key.empty() ? path_ : (path_.empty() ? key : path_ + "." + key);
    return "'" + (p.empty() ? std::string("<root>") : p) + "'";
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Eigen::Vector3d vec3(Section& s, const std::string& key, const Eigen::Vector3d& fallback) {
  std::vector<double> v;
  s.get(key, v);
  if (v.empty()) return fallback;
  if (v.size() > 3) throw ConfigError(s.where(key) + " takes at most three components");
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<long>(k)) = v[k];
  return out;
}

json to_json(const RunConfig& c) {
  json j;
  j["version"] = c.version;
  j["geometry"] = {{"dim", c.geometry.dim},
                   {"shape", c.geometry.shape},
                   {"radius", c.geometry.radius},
                   {"n_y", c.geometry.n_y},
                   {"m", c.geometry.m}};
  const auto& p = c.physics;
  json visc = {{"kind", p.viscosity.kind}};
  if (p.viscosity.kind == "isotropic") visc["nu"] = p.viscosity.nu;
  if (p.viscosity.kind == "constant") {
    json rows = json::array();
    for (long i = 0; i < p.viscosity.mandel.rows(); ++i) {
      std::vector<double> r(static_cast<std::size_t>(p.viscosity.mandel.cols()));
      for (long k = 0; k < p.viscosity.mandel.cols(); ++k) r[static_cast<std::size_t>(k)] = p.viscosity.mandel(i, k);
      rows.push_back(r);
    }
    visc["mandel"] = rows;
  }
  if (p.viscosity.kind == "oscillating") {
    visc["nu0"] = p.viscosity.nu0;
    visc["amplitude"] = p.viscosity.amplitude;
    visc["rate"] = p.viscosity.rate;
  }
  const char* force_kinds[] = {"zero", "uniform", "sinusoidal"};
  j["physics"] = {
      {"lambda", p.lambda},
      {"viscosity", visc},
      {"source", {{"c1", p.c1}, {"c2", p.c2}}},
      {"force",
       {{"kind", force_kinds[static_cast<int>(p.force.kind)]},
        {"amplitude", {p.force.amplitude(0), p.force.amplitude(1), p.force.amplitude(2)}}}},
      {"u0", {{"kind", p.u0.kind == VelocityInit::Kind::zero ? "zero" : "vortex"}, {"amplitude", p.u0.amplitude}}},
      {"phi0",
       {{"kind", p.phi0.kind == PhaseInit::Kind::uniform ? "uniform" : "random_fourier"},
        {"mean", p.phi0.mean},
        {"amplitude", p.phi0.amplitude},
        {"modes", p.phi0.modes}}},
      {"seed", p.seed}};
  if (p.lambda_eps) j["physics"]["lambda_eps"] = *p.lambda_eps;
  const auto& n = c.numerics;
  j["numerics"] = {{"dt", n.dt},
                   {"t_end", n.t_end},
                   {"s0", n.s0},
                   {"phi_cap", n.phi_cap},
                   {"solver", n.solver.kind == SolverKind::direct ? "direct" : "iterative"},
                   {"tol", n.solver.tol},
                   {"max_iter", n.solver.max_iter},
                   {"cell_tol", n.cell_tol},
                   {"cell_max_iter", n.cell_max_iter},
                   {"snapshot_every", n.snapshot_every},
                   {"macro_n", n.macro_n}};
  j["study"] = {{"m_list", c.study.m_list},
                {"slack", c.study.slack},
                {"phi_floor", c.study.phi_floor},
                {"well_prepared", c.study.well_prepared},
                {"compare_every", c.study.compare_every}};
  j["unfold"] = {{"field", c.unfold.field}, {"extend", to_string(c.unfold.extend)}};
  j["output"] = {{"dir", c.output_dir}};
  return j;
}

}  // namespace

ViscosityModel ViscosityConfig::build(int dim) const {
  if (kind == "isotropic") return ViscosityModel::isotropic(dim, nu);
  if (kind == "constant") return ViscosityModel::constant(dim, mandel);
  if (kind == "oscillating") return ViscosityModel::oscillating(dim, nu0, amplitude, rate);
  throw ConfigError("unknown viscosity kind '" + kind + "'");
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  Section root(j, "");
  if (!root.has("version")) throw ConfigError("missing 'version'");
  c.version = root.integer("version", 0);
  if (c.version != kConfigVersion) throw ConfigError("unsupported config version " + std::to_string(c.version));

  {
    Section g = root.child("geometry");
    c.geometry.dim = g.integer("dim", c.geometry.dim);
    c.geometry.shape = g.text("shape", c.geometry.shape);
    c.geometry.radius = g.number("radius", c.geometry.radius);
    c.geometry.n_y = g.integer("n_y", c.geometry.n_y);
    c.geometry.m = g.integer("m", c.geometry.m);
    g.finish();
  }
  {
    Section p = root.child("physics");
    auto& ph = c.physics;
    ph.lambda = p.number("lambda", ph.lambda);
    if (p.has("lambda_eps")) ph.lambda_eps = p.number("lambda_eps", 0.0);
    auto seed = static_cast<std::int64_t>(ph.seed);
    if (p.has("seed")) {
      p.get("seed", seed);
      if (seed < 0) throw ConfigError("'physics.seed' must be non-negative");
    }
    ph.seed = static_cast<std::uint64_t>(seed);
    {
      Section v = p.child("viscosity");
      auto& vc = ph.viscosity;
      vc.kind = v.text("kind", vc.kind);
      vc.nu = v.number("nu", vc.nu);
      vc.nu0 = v.number("nu0", vc.nu0);
      vc.amplitude = v.number("amplitude", vc.amplitude);
      vc.rate = v.number("rate", vc.rate);
      std::vector<std::vector<double>> rows;
      v.get("mandel", rows);
      if (!rows.empty()) {
        vc.mandel.resize(static_cast<long>(rows.size()), static_cast<long>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].size() != rows.size()) throw ConfigError("'physics.viscosity.mandel' must be square");
          for (std::size_t k = 0; k < rows.size(); ++k)
            vc.mandel(static_cast<long>(i), static_cast<long>(k)) = rows[i][k];
        }
      }
      v.finish();
    }
    {
      Section s = p.child("source");
      ph.c1 = s.number("c1", ph.c1);
      ph.c2 = s.number("c2", ph.c2);
      s.finish();
    }
    {
      Section f = p.child("force");
      const std::string kind = f.text("kind", "zero");
      if (kind == "zero")
        ph.force.kind = ForceModel::Kind::zero;
      else if (kind == "uniform")
        ph.force.kind = ForceModel::Kind::uniform;
      else if (kind == "sinusoidal")
        ph.force.kind = ForceModel::Kind::sinusoidal;
      else
        throw ConfigError("unknown force kind '" + kind + "'");
      ph.force.amplitude = vec3(f, "amplitude", ph.force.amplitude);
      f.finish();
    }
    {
      Section u = p.child("u0");
      const std::string kind = u.text("kind", "zero");
      if (kind != "zero" && kind != "vortex") throw ConfigError("unknown u0 kind '" + kind + "'");
      ph.u0.kind = kind == "zero" ? VelocityInit::Kind::zero : VelocityInit::Kind::vortex;
      ph.u0.amplitude = u.number("amplitude", ph.u0.amplitude);
      u.finish();
    }
    {
      Section f = p.child("phi0");
      const std::string kind =
          f.text("kind", ph.phi0.kind == PhaseInit::Kind::uniform ? "uniform" : "random_fourier");
      if (kind != "uniform" && kind != "random_fourier") throw ConfigError("unknown phi0 kind '" + kind + "'");
      ph.phi0.kind = kind == "uniform" ? PhaseInit::Kind::uniform : PhaseInit::Kind::random_fourier;
      ph.phi0.mean = f.number("mean", ph.phi0.mean);
      ph.phi0.amplitude = f.number("amplitude", ph.phi0.amplitude);
      ph.phi0.modes = f.integer("modes", ph.phi0.modes);
      f.finish();
    }
    ph.phi0.seed = ph.seed;
    p.finish();
  }
  {
    Section n = root.child("numerics");
    auto& nc = c.numerics;
    nc.dt = n.number("dt", nc.dt);
    nc.t_end = n.number("t_end", nc.t_end);
    nc.s0 = n.number("s0", nc.s0);
    nc.phi_cap = n.number("phi_cap", nc.phi_cap);
    const std::string solver = n.text("solver", "direct");
    try {
      nc.solver.kind = parse_solver_kind(solver);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    nc.solver.tol = n.number("tol", nc.solver.tol);
    nc.solver.max_iter = n.integer("max_iter", nc.solver.max_iter);
    nc.cell_tol = n.number("cell_tol", nc.cell_tol);
    nc.cell_max_iter = n.integer("cell_max_iter", nc.cell_max_iter);
    nc.snapshot_every = n.integer("snapshot_every", nc.snapshot_every);
    nc.macro_n = n.integer("macro_n", nc.macro_n);
    n.finish();
  }
  {
    Section s = root.child("study");
    s.get("m_list", c.study.m_list);
    c.study.slack = s.number("slack", c.study.slack);
    c.study.phi_floor = s.number("phi_floor", c.study.phi_floor);
    s.get("well_prepared", c.study.well_prepared);
    c.study.compare_every = s.integer("compare_every", c.study.compare_every);
    s.finish();
  }
  {
    Section u = root.child("unfold");
    c.unfold.field = u.text("field", c.unfold.field);
    try {
      c.unfold.extend = parse_extend_mode(u.text("extend", to_string(c.unfold.extend)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    u.finish();
  }
  {
    Section o = root.child("output");
    c.output_dir = o.text("dir", c.output_dir);
    o.finish();
  }
  root.finish();
  c.canonical = to_json(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

void override_seed(RunConfig& c, std::uint64_t seed) {
  c.physics.seed = seed;
  c.physics.phi0.seed = seed;
  c.canonical = to_json(c);
}

SourceModel RunConfig::source() const {
  try {
    if (physics.c1 == physics.c2) return SourceModel::linear(physics.c1);
    return SourceModel::tanh_blend(physics.c1, physics.c2);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("physics.source: ") + e.what());
  }
}

UnitCell RunConfig::cell() const {
  if (geometry.shape != "disk") throw ConfigError("unknown inclusion shape '" + geometry.shape + "'");
  try {
    return build_unit_cell(geometry.dim, InclusionShape::disk, geometry.radius, geometry.n_y);
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
}

PerforatedDomain RunConfig::domain() const {
  try {
    return tile_domain(cell(), geometry.m);
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
}

CellSolveOptions RunConfig::cell_options() const {
  CellSolveOptions o;
  o.solver = numerics.solver;
  o.tol = numerics.cell_tol;
  o.max_iter = numerics.cell_max_iter;
  return o;
}

MicroParams RunConfig::micro_params() const {
  MicroParams p;
  p.lambda_eps = micro_lambda();
  p.viscosity = physics.viscosity.build(geometry.dim);
  p.source = source();
  p.force = physics.force;
  p.dt = numerics.dt;
  p.t_end = numerics.t_end;
  p.s0 = numerics.s0;
  p.phi_cap = numerics.phi_cap;
  p.u0 = physics.u0;
  p.phi0 = physics.phi0;
  p.solver = numerics.solver;
  return p;
}

MacroParams RunConfig::macro_params(const EffectiveTensors& tensors) const {
  MacroParams p;
  p.lambda = physics.lambda;
  p.tensors = tensors;
  p.source = source();
  p.force = physics.force;
  p.dt = numerics.dt;
  p.t_end = numerics.t_end;
  p.s0 = numerics.s0;
  p.phi_cap = numerics.phi_cap;
  p.u0 = physics.u0;
  p.phi0 = physics.phi0;
  p.solver = numerics.solver;
  p.n = numerics.macro_n;
  p.dim = geometry.dim;
  return p;
}

StudyConfig RunConfig::study_config(int threads) const {
  StudyConfig s;
  s.dim = geometry.dim;
  s.radius = geometry.radius;
  s.n_y = geometry.n_y;
  s.m_list = study.m_list;
  s.lambda = physics.lambda;
  s.source = source();
  s.force = physics.force;
  s.u0 = physics.u0;
  s.phi0 = physics.phi0;
  s.well_prepared = study.well_prepared;
  s.dt = numerics.dt;
  s.t_end = numerics.t_end;
  s.s0 = numerics.s0;
  s.phi_cap = numerics.phi_cap;
  s.macro_n = numerics.macro_n;
  s.slack = study.slack;
  s.phi_floor = study.phi_floor;
  s.compare_every = study.compare_every;
  s.solver = numerics.solver;
  s.cell = cell_options();
  s.threads = threads;
  return s;
}

void RunConfig::validate() const {
  if (physics.viscosity.kind != "isotropic" && physics.viscosity.kind != "constant" &&
      physics.viscosity.kind != "oscillating")
    throw ConfigError("unknown viscosity kind '" + physics.viscosity.kind + "'");
  if (physics.viscosity.kind == "constant" && physics.viscosity.mandel.rows() != sym_size(geometry.dim))
    throw ConfigError("'physics.viscosity.mandel' must be a " + std::to_string(sym_size(geometry.dim)) +
                      "x" + std::to_string(sym_size(geometry.dim)) + " matrix");
  if (unfold.field != "phi" && unfold.field != "mu" && unfold.field != "p")
    throw ConfigError("'unfold.field' must be phi, mu or p");
  if (numerics.snapshot_every < 0) throw ConfigError("'numerics.snapshot_every' must be non-negative");
  if (numerics.solver.tol <= 0.0 || numerics.solver.max_iter < 1)
    throw ConfigError("solver tolerance and iteration limit must be positive");
  if (numerics.cell_tol <= 0.0 || numerics.cell_max_iter < 1)
    throw ConfigError("cell solver tolerance and iteration limit must be positive");
  if (physics.phi0.modes < 1) throw ConfigError("'physics.phi0.modes' must be at least 1");
  try {
    domain();
    physics.viscosity.build(geometry.dim);
    const MicroParams mp = micro_params();
    mp.validate();
    macro_params(EffectiveTensors::identity(geometry.dim, Eigen::MatrixXd::Identity(sym_size(geometry.dim),
                                                                                    sym_size(geometry.dim))))
        .validate();
    study_config(1).validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(buf, sizeof buf, "%02x", digest[k]);
    hex += buf;
  }
  return hex;
}

std::string config_hash(const RunConfig& c) {
  json j = c.canonical;
  j.erase("output");  // where results go does not change them
  return sha256_hex(j.dump());
}

}  // namespace porehom::app
