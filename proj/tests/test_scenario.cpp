#include <gtest/gtest.h>

#include "tve/scenario.hpp"

using namespace tve;

TEST(Scenario, DefaultsAreValid) {
  const Scenario s = parse_scenario("{}");
  EXPECT_EQ(s, Scenario{});
  EXPECT_NO_THROW(s.validate());
}

TEST(Scenario, JsonRoundTrip) {
  Scenario s;
  s.name = "round";
  s.mesh.extents = {1.0, 0.5, 0.25};
  s.mesh.cells = {3, 2, 5};
  s.material.p = 3.5;
  s.material.kappa.amplitude = 0.3;
  s.variant = Variant::Broken;
  s.broken_gamma = 0.125;
  VectorTerm g;
  g.constant = {0.1, 0.0, -0.2};
  g.linear[4] = 0.3;
  g.time = TimeFactor{0.5, 1.0, 0.25, 3.0, 0.1};
  s.data.displacement_bc.push_back(g);
  s.data.body_force.push_back(g);
  FluxTerm f;
  f.per_side[3] = 1.0 / 3.0;
  s.data.heat_flux.push_back(f);
  s.data.theta0.kind = ScalarField::Kind::Gaussian;
  s.data.theta0.center = {0.1, 0.2, 0.3};
  s.data.theta0.width = 0.7;
  s.data.plastic0.kind = PlasticField::Kind::RandomSmooth;
  s.data.plastic0.seed = 123456789012345ULL;
  s.k = 5;
  s.l = 11;
  s.integrator.method = IntegratorConfig::Method::RK4;
  s.integrator.dt = 1e-3;
  s.t_end = 2.5;
  s.samples = 7;
  s.output.directory = "somewhere";
  const Scenario back = parse_scenario(to_json(s));
  EXPECT_EQ(back, s);
  EXPECT_EQ(to_json(back), to_json(s));
}

TEST(Scenario, RejectsUnknownKeys) {
  EXPECT_THROW(parse_scenario(R"({"mesh": {"cels": [2,2,2]}})"), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"bogus": 1})"), ValidationError);
}

TEST(Scenario, RejectsInvalidValues) {
  EXPECT_THROW(parse_scenario(R"({"material": {"p": 1.5}})"), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"variant": "sideways"})"), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"mesh": {"cells": [0,2,2]}})"), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"integrator": {"t_end": -1}})"), ValidationError);
  EXPECT_THROW(parse_scenario("{not json"), ValidationError);
}

TEST(Scenario, BundledFilesLoad) {
  for (const char* name : {"homogeneous.json", "inhomogeneous.json"}) {
    const Scenario s = load_scenario(std::filesystem::path(TVE_SOURCE_DIR) / "scenarios" / name);
    EXPECT_NO_THROW(s.validate());
  }
  const Scenario h = load_scenario(std::filesystem::path(TVE_SOURCE_DIR) / "scenarios" / "homogeneous.json");
  EXPECT_TRUE(h.data.homogeneous());
  const Scenario l = load_scenario(std::filesystem::path(TVE_SOURCE_DIR) / "scenarios" / "inhomogeneous.json");
  EXPECT_FALSE(l.data.homogeneous());
}

TEST(Scenario, MissingFileThrows) { EXPECT_THROW(load_scenario("/nonexistent/none.json"), Error); }

TEST(Simulation, SampleTimesAndInitialTemperature) {
  Scenario s;
  s.mesh.cells = {2, 2, 2};
  s.k = 3;
  s.l = 3;
  s.t_end = 2.0;
  s.samples = 4;
  s.data.theta0.offset = 0.4;
  const Simulation sim(s);
  EXPECT_EQ(sim.sample_times(), (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
  const Vector th = sim.initial_temperature_qp();
  EXPECT_NEAR(th.maxCoeff(), 0.4, 1e-14);
  EXPECT_NEAR(th.minCoeff(), 0.4, 1e-14);
}

TEST(Scenario, AutomaticBrokenGamma) {
  Scenario s;
  s.mesh.cells = {2, 2, 2};
  s.data.theta0.offset = 0.3;
  s.material.expansion = 2.0;
  s.material.theta_ref = 0.1;
  s.material.theta_R = 0.05;
  const FEAssembly as = assemble(BoxMesh(Vec3(1, 1, 1), {2, 2, 2}), make_elasticity(s.material));
  EXPECT_NEAR(automatic_broken_gamma(s, as), 2.0 * (0.3 - 0.05) + 0.1, 1e-14);
}
