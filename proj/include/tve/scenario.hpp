#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "tve/galerkin.hpp"

namespace tve {

struct MeshSpec {
  std::array<double, 3> extents{1.0, 1.0, 1.0};
  std::array<int, 3> cells{4, 4, 4};
  bool operator==(const MeshSpec&) const = default;
};

struct MaterialSpec {
  double lame_lambda = 1.0;
  double lame_mu = 1.0;
  double p = 2.0;
  KappaParams kappa{};
  std::string law = "norton_hoff";  // norton_hoff | zero
  double expansion = 1.0;
  double theta_ref = 0.1;
  double theta_R = 0.0;
  bool operator==(const MaterialSpec&) const = default;
};

struct OutputSpec {
  std::string directory = "out";
  int field_dumps = 2;  // evenly spaced over the run, first and last included
  bool operator==(const OutputSpec&) const = default;
};

/**
 * A complete problem description, stored as JSON:
 *
 *   { "name": "...",
 *     "mesh": {"extents": [L1,L2,L3], "cells": [n1,n2,n3]},
 *     "material": {"lame_lambda", "lame_mu", "p", "law", "expansion", "theta_ref", "theta_R",
 *                  "kappa": {"base", "amplitude", "center", "width"}},
 *     "variant": "symmetric" | "broken" | "nonlinear",
 *     "broken_gamma": number | "auto",
 *     "data": {"displacement_bc": [term], "body_force": [term], "heat_flux": [flux],
 *              "theta0": field, "theta_lift0": field, "plastic0": plastic},
 *     "galerkin": {"k", "l", "k_trunc"},
 *     "integrator": {"method": "adaptive" | "rk4", "abs_tol", "rel_tol", "dt", "min_step", "max_step",
 *                    "t_end", "samples", "lift_dt"},
 *     "output": {"directory", "field_dumps"} }
 *
 *   term:    {"constant": [3], "linear": [9, row-major], "time": time}
 *   flux:    {"per_side": [x-, x+, y-, y+, z-, z+], "time": time}
 *   time:    {"a", "b", "c", "omega", "phi"}          tau = a + b t + c sin(omega t + phi)
 *   field:   {"kind": "constant" | "cosine" | "gaussian", "offset", "amplitude", "modes": [3],
 *             "center": [3], "width"}
 *   plastic: {"kind": "zero" | "uniform" | "random_smooth", "tensor": [6], "amplitude", "modes", "seed"}
 *
 * Every key is optional and falls back to the defaults below; unknown keys are rejected.
 */
struct Scenario {
  std::string name = "scenario";
  MeshSpec mesh{};
  MaterialSpec material{};
  Variant variant = Variant::Symmetric;
  std::optional<double> broken_gamma;  // empty: automatic
  ProblemData data{};
  int k = 8;
  int l = 8;
  IntegratorConfig integrator{};
  double t_end = 1.0;
  int samples = 100;
  double lift_dt = 1e-3;
  OutputSpec output{};

  void validate() const;
  bool operator==(const Scenario&) const = default;
};

Scenario parse_scenario(const std::string& json_text);
std::string to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

ElasticityTensor make_elasticity(const MaterialSpec& m);
ConstitutiveLaw make_law(const MaterialSpec& m);

/// All objects of one run, built from a scenario in dependency order.
class Simulation {
public:
  explicit Simulation(Scenario scenario, const EigenOptions& eig = {});

  const Scenario& scenario() const { return scenario_; }
  const FEAssembly& assembly() const { return *assembly_; }
  const BasisSet& bases() const { return *bases_; }
  const Lifting& lifting() const { return *lifting_; }
  const GalerkinModel& model() const { return *model_; }
  const CouplingParams& coupling() const { return model_->coupling(); }

  /// Full initial temperature theta^_0 at quadrature points.
  Vector initial_temperature_qp() const;
  Vector initial_state() const;
  std::vector<double> sample_times() const;
  Trajectory run() const;

private:
  Scenario scenario_;
  std::unique_ptr<FEAssembly> assembly_;
  std::unique_ptr<BasisSet> bases_;
  std::unique_ptr<Lifting> lifting_;
  std::unique_ptr<GalerkinModel> model_;
};

/// Heat coupling constant for the broken variant: expansion * (max theta^_0 - theta_R) + alpha / 2.
double automatic_broken_gamma(const Scenario& s, const FEAssembly& as);

}  // namespace tve
