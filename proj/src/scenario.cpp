#include "tve/scenario.hpp"

#include <set>

#include <json.hpp>

#include "tve/io.hpp"

namespace tve {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ValidationError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

TimeFactor time_from(const json& j) {
  check_keys(j, {"a", "b", "c", "omega", "phi"}, "time");
  TimeFactor t;
  read(j, "a", t.a);
  read(j, "b", t.b);
  read(j, "c", t.c);
  read(j, "omega", t.omega);
  read(j, "phi", t.phi);
  return t;
}

json time_to(const TimeFactor& t) { return {{"a", t.a}, {"b", t.b}, {"c", t.c}, {"omega", t.omega}, {"phi", t.phi}}; }

VectorTerm term_from(const json& j) {
  check_keys(j, {"constant", "linear", "time"}, "vector term");
  VectorTerm t;
  read(j, "constant", t.constant);
  read(j, "linear", t.linear);
  if (j.contains("time")) t.time = time_from(j.at("time"));
  return t;
}

json term_to(const VectorTerm& t) { return {{"constant", t.constant}, {"linear", t.linear}, {"time", time_to(t.time)}}; }

FluxTerm flux_from(const json& j) {
  check_keys(j, {"per_side", "time"}, "flux term");
  FluxTerm f;
  read(j, "per_side", f.per_side);
  if (j.contains("time")) f.time = time_from(j.at("time"));
  return f;
}

json flux_to(const FluxTerm& f) { return {{"per_side", f.per_side}, {"time", time_to(f.time)}}; }

ScalarField field_from(const json& j) {
  check_keys(j, {"kind", "offset", "amplitude", "modes", "center", "width"}, "scalar field");
  ScalarField f;
  const std::string kind = j.value("kind", std::string("constant"));
  if (kind == "constant")
    f.kind = ScalarField::Kind::Constant;
  else if (kind == "cosine")
    f.kind = ScalarField::Kind::Cosine;
  else if (kind == "gaussian")
    f.kind = ScalarField::Kind::Gaussian;
  else
    throw ValidationError("scalar field: unknown kind '" + kind + "'");
  read(j, "offset", f.offset);
  read(j, "amplitude", f.amplitude);
  read(j, "modes", f.modes);
  read(j, "center", f.center);
  read(j, "width", f.width);
  return f;
}

json field_to(const ScalarField& f) {
  const char* kind = f.kind == ScalarField::Kind::Constant ? "constant"
                     : f.kind == ScalarField::Kind::Cosine ? "cosine"
                                                           : "gaussian";
  return {{"kind", kind},   {"offset", f.offset}, {"amplitude", f.amplitude}, {"modes", f.modes},
          {"center", f.center}, {"width", f.width}};
}

PlasticField plastic_from(const json& j) {
  check_keys(j, {"kind", "tensor", "amplitude", "modes", "seed"}, "plastic field");
  PlasticField p;
  const std::string kind = j.value("kind", std::string("zero"));
  if (kind == "zero")
    p.kind = PlasticField::Kind::Zero;
  else if (kind == "uniform")
    p.kind = PlasticField::Kind::Uniform;
  else if (kind == "random_smooth")
    p.kind = PlasticField::Kind::RandomSmooth;
  else
    throw ValidationError("plastic field: unknown kind '" + kind + "'");
  read(j, "tensor", p.tensor);
  read(j, "amplitude", p.amplitude);
  read(j, "modes", p.modes);
  read(j, "seed", p.seed);
  return p;
}

json plastic_to(const PlasticField& p) {
  const char* kind = p.kind == PlasticField::Kind::Zero      ? "zero"
                     : p.kind == PlasticField::Kind::Uniform ? "uniform"
                                                             : "random_smooth";
  return {{"kind", kind}, {"tensor", p.tensor}, {"amplitude", p.amplitude}, {"modes", p.modes}, {"seed", p.seed}};
}

}  // namespace

void Scenario::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(mesh.extents[i] > 0.0)) throw ValidationError("mesh extents must be positive");
    if (mesh.cells[i] < 2) throw ValidationError("mesh needs at least 2 cells per axis");
  }
  if (!(material.p >= 2.0)) throw ValidationError("flow-rule exponent p must satisfy p >= 2");
  if (material.law != "norton_hoff" && material.law != "zero")
    throw ValidationError("unknown law '" + material.law + "' (expected norton_hoff or zero)");
  if (!(material.kappa.width > 0.0)) throw ValidationError("kappa width must be positive");
  if (!(material.kappa.lower() > 0.0)) throw ValidationError("kappa must be bounded away from zero");
  if (!make_elasticity(material).is_positive_definite()) throw ValidationError("elasticity tensor is not positive definite");
  if (!(material.expansion * material.theta_ref > 0.0))
    throw ValidationError("linearized expansion constant expansion * theta_ref must be positive");
  if (k < 0) throw ValidationError("k must be non-negative");
  if (l < 1) throw ValidationError("l must be at least 1");
  if (!(t_end > 0.0)) throw ValidationError("t_end must be positive");
  if (samples < 2) throw ValidationError("need at least 2 sample intervals");
  if (!(lift_dt > 0.0)) throw ValidationError("lift_dt must be positive");
  if (output.field_dumps < 0) throw ValidationError("field_dumps must be non-negative");
  if (data.plastic0.kind == PlasticField::Kind::RandomSmooth && data.plastic0.modes < 1)
    throw ValidationError("random_smooth plastic field needs modes >= 1");
  integrator.validate();
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
  }
  Scenario s;
  try {
    check_keys(j, {"name", "mesh", "material", "variant", "broken_gamma", "data", "galerkin", "integrator", "output"},
               "scenario");
    read(j, "name", s.name);
    if (j.contains("mesh")) {
      const json& m = j.at("mesh");
      check_keys(m, {"extents", "cells"}, "mesh");
      read(m, "extents", s.mesh.extents);
      read(m, "cells", s.mesh.cells);
    }
    if (j.contains("material")) {
      const json& m = j.at("material");
      check_keys(m, {"lame_lambda", "lame_mu", "p", "kappa", "law", "expansion", "theta_ref", "theta_R"}, "material");
      read(m, "lame_lambda", s.material.lame_lambda);
      read(m, "lame_mu", s.material.lame_mu);
      read(m, "p", s.material.p);
      read(m, "law", s.material.law);
      read(m, "expansion", s.material.expansion);
      read(m, "theta_ref", s.material.theta_ref);
      read(m, "theta_R", s.material.theta_R);
      if (m.contains("kappa")) {
        const json& kp = m.at("kappa");
        check_keys(kp, {"base", "amplitude", "center", "width"}, "kappa");
        read(kp, "base", s.material.kappa.base);
        read(kp, "amplitude", s.material.kappa.amplitude);
        read(kp, "center", s.material.kappa.center);
        read(kp, "width", s.material.kappa.width);
      }
    }
    if (j.contains("variant")) s.variant = parse_variant(j.at("variant").get<std::string>());
    if (j.contains("broken_gamma")) {
      const json& g = j.at("broken_gamma");
      if (g.is_string()) {
        if (g.get<std::string>() != "auto") throw ValidationError("broken_gamma must be a number or \"auto\"");
      } else {
        s.broken_gamma = g.get<double>();
      }
    }
    if (j.contains("data")) {
      const json& d = j.at("data");
      check_keys(d, {"displacement_bc", "body_force", "heat_flux", "theta0", "theta_lift0", "plastic0"}, "data");
      if (d.contains("displacement_bc"))
        for (const auto& t : d.at("displacement_bc")) s.data.displacement_bc.push_back(term_from(t));
      if (d.contains("body_force"))
        for (const auto& t : d.at("body_force")) s.data.body_force.push_back(term_from(t));
      if (d.contains("heat_flux"))
        for (const auto& t : d.at("heat_flux")) s.data.heat_flux.push_back(flux_from(t));
      if (d.contains("theta0")) s.data.theta0 = field_from(d.at("theta0"));
      if (d.contains("theta_lift0")) s.data.theta_lift0 = field_from(d.at("theta_lift0"));
      if (d.contains("plastic0")) s.data.plastic0 = plastic_from(d.at("plastic0"));
    }
    if (j.contains("galerkin")) {
      const json& g = j.at("galerkin");
      check_keys(g, {"k", "l", "k_trunc"}, "galerkin");
      read(g, "k", s.k);
      read(g, "l", s.l);
      read(g, "k_trunc", s.integrator.k_trunc);
    }
    if (j.contains("integrator")) {
      const json& in = j.at("integrator");
      check_keys(in, {"method", "abs_tol", "rel_tol", "dt", "min_step", "max_step", "t_end", "samples", "lift_dt"},
                 "integrator");
      if (in.contains("method")) {
        const std::string m = in.at("method").get<std::string>();
        if (m == "adaptive")
          s.integrator.method = IntegratorConfig::Method::Adaptive;
        else if (m == "rk4")
          s.integrator.method = IntegratorConfig::Method::RK4;
        else
          throw ValidationError("unknown integrator method '" + m + "'");
      }
      read(in, "abs_tol", s.integrator.abs_tol);
      read(in, "rel_tol", s.integrator.rel_tol);
      read(in, "dt", s.integrator.dt);
      read(in, "min_step", s.integrator.min_step);
      read(in, "max_step", s.integrator.max_step);
      read(in, "t_end", s.t_end);
      read(in, "samples", s.samples);
      read(in, "lift_dt", s.lift_dt);
    }
    if (j.contains("output")) {
      const json& o = j.at("output");
      check_keys(o, {"directory", "field_dumps"}, "output");
      read(o, "directory", s.output.directory);
      read(o, "field_dumps", s.output.field_dumps);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario has a malformed value: ") + e.what());
  }
  s.validate();
  return s;
}

std::string to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["mesh"] = {{"extents", s.mesh.extents}, {"cells", s.mesh.cells}};
  const auto& m = s.material;
  j["material"] = {{"lame_lambda", m.lame_lambda},
                   {"lame_mu", m.lame_mu},
                   {"p", m.p},
                   {"law", m.law},
                   {"expansion", m.expansion},
                   {"theta_ref", m.theta_ref},
                   {"theta_R", m.theta_R},
                   {"kappa",
                    {{"base", m.kappa.base},
                     {"amplitude", m.kappa.amplitude},
                     {"center", m.kappa.center},
                     {"width", m.kappa.width}}}};
  j["variant"] = variant_name(s.variant);
  if (s.broken_gamma)
    j["broken_gamma"] = *s.broken_gamma;
  else
    j["broken_gamma"] = "auto";
  json d;
  d["displacement_bc"] = json::array();
  for (const auto& t : s.data.displacement_bc) d["displacement_bc"].push_back(term_to(t));
  d["body_force"] = json::array();
  for (const auto& t : s.data.body_force) d["body_force"].push_back(term_to(t));
  d["heat_flux"] = json::array();
  for (const auto& f : s.data.heat_flux) d["heat_flux"].push_back(flux_to(f));
  d["theta0"] = field_to(s.data.theta0);
  d["theta_lift0"] = field_to(s.data.theta_lift0);
  d["plastic0"] = plastic_to(s.data.plastic0);
  j["data"] = d;
  j["galerkin"] = {{"k", s.k}, {"l", s.l}, {"k_trunc", s.integrator.k_trunc}};
  const auto& in = s.integrator;
  j["integrator"] = {{"method", in.method == IntegratorConfig::Method::RK4 ? "rk4" : "adaptive"},
                     {"abs_tol", in.abs_tol},
                     {"rel_tol", in.rel_tol},
                     {"dt", in.dt},
                     {"min_step", in.min_step},
                     {"max_step", in.max_step},
                     {"t_end", s.t_end},
                     {"samples", s.samples},
                     {"lift_dt", s.lift_dt}};
  j["output"] = {{"directory", s.output.directory}, {"field_dumps", s.output.field_dumps}};
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  return parse_scenario(text);
}

ElasticityTensor make_elasticity(const MaterialSpec& m) { return ElasticityTensor::isotropic(m.lame_lambda, m.lame_mu); }

ConstitutiveLaw make_law(const MaterialSpec& m) {
  if (m.law == "zero") return ConstitutiveLaw::zero(m.p);
  return ConstitutiveLaw::norton_hoff(m.p, m.kappa);
}

double automatic_broken_gamma(const Scenario& s, const FEAssembly& as) {
  const Vector th = evaluate_qp(as, s.data.theta0);
  const double alpha = s.material.expansion * s.material.theta_ref;
  return s.material.expansion * (th.maxCoeff() - s.material.theta_R) + 0.5 * alpha;
}

Simulation::Simulation(Scenario scenario, const EigenOptions& eig) : scenario_(std::move(scenario)) {
  scenario_.validate();
  const auto& ms = scenario_.mesh;
  BoxMesh mesh(Vec3(ms.extents[0], ms.extents[1], ms.extents[2]), ms.cells);
  assembly_ = std::make_unique<FEAssembly>(assemble(mesh, make_elasticity(scenario_.material)));
  bases_ = std::make_unique<BasisSet>(build_bases(*assembly_, scenario_.k, scenario_.l, eig));
  CouplingParams cp;
  cp.variant = scenario_.variant;
  cp.expansion = scenario_.material.expansion;
  cp.theta_ref = scenario_.material.theta_ref;
  cp.theta_R = scenario_.material.theta_R;
  cp.broken_gamma = scenario_.broken_gamma ? *scenario_.broken_gamma : automatic_broken_gamma(scenario_, *assembly_);
  lifting_ = std::make_unique<Lifting>(*assembly_, scenario_.data, cp.alpha(), scenario_.t_end, scenario_.lift_dt);
  model_ = std::make_unique<GalerkinModel>(*assembly_, *bases_, make_law(scenario_.material), cp, *lifting_,
                                           scenario_.integrator.k_trunc);
}

Vector Simulation::initial_temperature_qp() const { return evaluate_qp(*assembly_, scenario_.data.theta0); }

Vector Simulation::initial_state() const {
  const Vector theta0 = initial_temperature_qp() - lifting_->temperature_qp(0.0);
  return model_->initial_state(theta0, scenario_.data.plastic0.evaluate(*assembly_));
}

std::vector<double> Simulation::sample_times() const { return uniform_times(scenario_.t_end, scenario_.samples); }

Trajectory Simulation::run() const { return integrate(*model_, initial_state(), sample_times(), scenario_.integrator); }

}  // namespace tve
