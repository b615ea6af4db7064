#include <gtest/gtest.h>

#include <cmath>

#include "multifluid/diagnostics.hpp"
#include "multifluid/euler_solver.hpp"
#include "multifluid/lagrange_solver.hpp"
#include "support/scenarios.hpp"

namespace mf = multifluid;
using mf::testing::pi;

namespace {

mf::EulerState smooth_state(int n) {
  const mf::Grid grid(n, 1.0);
  const Eigen::VectorXd x = grid.nodes();
  Eigen::MatrixXd rho(n + 1, 2), u(n + 1, 2);
  for (int k = 0; k <= n; ++k) {
    rho(k, 0) = 0.6 + 0.2 * std::sin(2.0 * pi * x[k]);
    rho(k, 1) = 0.8 - 0.3 * std::cos(2.0 * pi * x[k]);
    u(k, 0) = 0.1 * std::sin(pi * x[k]);
    u(k, 1) = -0.2 * std::sin(2.0 * pi * x[k]);
  }
  return mf::make_euler_state(grid, rho, u);
}

mf::LagrangeState uniform_lagrange(int n, double rho, const Eigen::RowVectorXd& c) {
  const mf::Grid grid(n, rho);  // d = rho on the unit interval
  mf::LagrangeState s{0.0, grid, Eigen::VectorXd::Constant(n + 1, rho), c.replicate(n + 1, 1),
                      Eigen::MatrixXd::Zero(n + 1, c.size())};
  return s;
}

}  // namespace

TEST(TotalMassCoordinate, Examples) {
  const mf::Grid grid(64, 1.0);
  const Eigen::VectorXd x = grid.nodes();
  EXPECT_DOUBLE_EQ(mf::total_mass_coordinate(grid, Eigen::MatrixXd::Ones(65, 1)), 1.0);
  Eigen::MatrixXd wave(65, 1);
  wave.col(0) = (1.0 + 0.5 * (2.0 * pi * x.array()).sin()).matrix();
  EXPECT_NEAR(mf::total_mass_coordinate(grid, wave), 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(mf::total_mass_coordinate(grid, Eigen::MatrixXd::Constant(65, 2, 0.75)), 1.5);
}

TEST(ToLagrangian, UniformDensityMapsUniformly) {
  for (double rho : {1.0, 2.0}) {
    mf::EulerState s = mf::testing::uniform_state(32, Eigen::RowVector2d(0.25 * rho, 0.75 * rho));
    const Eigen::VectorXd x = s.grid.nodes();
    for (int k = 0; k <= 32; ++k) s.u.row(k) << std::sin(pi * x[k]), -0.5 * std::sin(pi * x[k]);
    const mf::LagrangeState l = mf::to_lagrangian(s);
    EXPECT_NEAR(l.grid.length(), rho, 1e-15);
    EXPECT_LT((l.rho.array() - rho).abs().maxCoeff(), 1e-13);
    EXPECT_LT((l.concentration.col(0).array() - 0.25).abs().maxCoeff(), 1e-14);
    // y = rho x puts the mass nodes on top of the Eulerian nodes
    EXPECT_LT((l.u - s.u).cwiseAbs().maxCoeff(), 1e-13);

    const mf::EulerState back = mf::to_eulerian(l);
    EXPECT_LT((back.rho - s.rho).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((back.u - s.u).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Transforms, PreserveComponentMasses) {
  const mf::EulerState s = smooth_state(64);
  const mf::LagrangeState l = mf::to_lagrangian(s);
  const Eigen::RowVectorXd euler_mass = mf::integrate_columns(s.grid, s.rho);
  // int rho_i dx = int (rho_i / rho) dy
  const Eigen::RowVectorXd lagrange_mass = mf::integrate_columns(l.grid, l.concentration);
  EXPECT_LT((euler_mass - lagrange_mass).cwiseAbs().maxCoeff(), 1e-10);
  const mf::EulerState back = mf::to_eulerian(l);
  EXPECT_LT((mf::integrate_columns(back.grid, back.rho) - euler_mass).cwiseAbs().maxCoeff(), 1e-10);
  // and the unit volume
  EXPECT_NEAR(mf::integrate(l.grid, Eigen::VectorXd(l.rho.cwiseInverse())), 1.0, 1e-12);
}

TEST(Transforms, RoundTripConverges) {
  std::vector<double> errors;
  for (int n : {64, 128, 256}) {
    const mf::EulerState s = smooth_state(n);
    const mf::EulerState back = mf::to_eulerian(mf::to_lagrangian(s));
    Eigen::MatrixXd d(n + 1, 4);
    d << back.rho - s.rho, back.u - s.u;
    errors.push_back(mf::testing::l2_norm(s.grid, d));
  }
  EXPECT_LT(errors.front(), 2e-4);
  EXPECT_GE(std::log2(errors[0] / errors[1]), 1.4);
  EXPECT_GE(std::log2(errors[1] / errors[2]), 1.4);
}

TEST(ToEulerian, RejectsInconsistentVolume) {
  mf::LagrangeState l = mf::to_lagrangian(smooth_state(32));
  l.rho *= 1.01;
  EXPECT_THROW(mf::to_eulerian(l), mf::MassConsistencyError);
}

TEST(DensityUpdate, StillVelocityChangesNothing) {
  mf::LagrangeState l = uniform_lagrange(32, 1.4, Eigen::RowVector2d(0.5, 0.5));
  EXPECT_EQ(mf::density_update(l, 0.1), l.rho);
  l.u.setConstant(0.3);  // d_y v = 0 in the interior
  const Eigen::VectorXd next = mf::density_update(l, 0.1);
  EXPECT_EQ(next.segment(1, 31), l.rho.segment(1, 31));
}

TEST(DensityUpdate, ExactExponentialForConstantRate) {
  // uniform rho, v linear in y with rho d_y v = a: every step multiplies by exp(-a dt)
  const double a = 0.7, dt = 0.05;
  mf::LagrangeState l = uniform_lagrange(16, 1.0, Eigen::RowVector2d(0.4, 0.6));
  const Eigen::VectorXd y = l.grid.nodes();
  for (int step = 0; step < 10; ++step) {
    const double rho = l.rho[0];
    for (int k = 0; k <= 16; ++k) l.u.row(k).setConstant(a / rho * y[k]);
    l.rho = mf::density_update(l, dt);
  }
  EXPECT_LT((l.rho.array() - std::exp(-a * 10 * dt)).abs().maxCoeff(), 1e-14);
}

TEST(MomentumSolveLagrange, ConstantCoefficientsReduceToTheEulerianSolve) {
  mf::EulerState s = mf::testing::uniform_state(40, Eigen::RowVector2d(0.5, 1.0));
  const Eigen::VectorXd x = s.grid.nodes();
  // equal and opposite, so v = 0 and the Eulerian advection term vanishes
  for (int k = 0; k <= 40; ++k) s.u.row(k) << std::sin(pi * x[k]), -std::sin(pi * x[k]);
  const mf::Physics physics = mf::testing::scenario_r_physics();
  const mf::LagrangeState l = mf::to_lagrangian(s);
  const Eigen::MatrixXd lagrange = mf::momentum_solve_lagrange(l, 0.01, physics);
  const Eigen::MatrixXd euler = mf::viscous_momentum_solve(s, 0.01, physics);
  EXPECT_LT((lagrange - euler).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(MomentumSolveLagrange, ModesSplit) {
  mf::LagrangeState l = uniform_lagrange(40, 2.0, Eigen::RowVector2d(0.5, 0.5));
  const Eigen::VectorXd y = l.grid.nodes();
  for (int k = 0; k <= 40; ++k) l.u.row(k) << std::sin(pi * y[k] / 2.0), -std::sin(pi * y[k] / 2.0);
  const mf::Physics physics = mf::testing::scenario_r_physics();
  const Eigen::MatrixXd u = mf::momentum_solve_lagrange(l, 0.01, physics);
  EXPECT_LT((u.col(0) + u.col(1)).cwiseAbs().maxCoeff(), 1e-14);
  // the difference mode of a sine decays by the discrete symbol of the operator
  const double h = l.grid.spacing();
  const double symbol = 4.0 / (h * h) * std::pow(std::sin(pi / 2.0 * h / 2.0), 2);
  const double factor = 0.5 / (0.5 + 0.01 * 2.0 * (2.0 - 1.0) * symbol);
  EXPECT_LT((u.col(0) - factor * l.u.col(0)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(StepLagrange, EquilibriumIsAFixedPoint) {
  const mf::LagrangeState l = uniform_lagrange(32, 1.0, Eigen::RowVector2d(0.3, 0.7));
  const mf::LagrangeState next = mf::step_lagrange(l, 0.01, mf::testing::scenario_r_physics());
  EXPECT_LT((next.rho - l.rho).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(next.u.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SimulateLagrange, ConcentrationsNeverMove) {
  const int n = 64;
  const auto trajectory = mf::simulate_lagrange(mf::testing::scenario_r_physics(),
                                                mf::to_lagrangian(mf::testing::scenario_r_state(n)),
                                                mf::testing::scenario_r_control(n, 1.0, 1));
  const auto entry = mf::concentration_bounds(trajectory);
  EXPECT_TRUE(entry.passed);
  EXPECT_TRUE(entry.exact);
  for (const auto& snap : trajectory.snapshots) {
    EXPECT_NEAR(mf::integrate(snap.grid, Eigen::VectorXd(snap.rho.cwiseInverse())), 1.0, 1e-8);
  }
}

TEST(SimulateLagrange, AgreesWithEulerUnderRefinement) {
  const mf::Physics physics = mf::testing::scenario_r_physics();
  std::vector<double> distances;
  for (int n : {64, 128, 256}) {
    const mf::EulerState s = mf::testing::scenario_r_state(n);
    const mf::TimeControl control = mf::testing::scenario_r_control(n, 0.5, 8);
    const auto euler = mf::simulate(physics, s, control);
    mf::TimeControl replay = control;
    replay.dt_schedule = euler.step_sizes();
    const auto lagrange = mf::simulate_lagrange(physics, mf::to_lagrangian(s), replay);
    distances.push_back(mf::cross_coordinate_distance(euler, lagrange, 1e-6).sup);
  }
  EXPECT_LT(distances[0], 5e-2);
  EXPECT_GT(distances[0] / distances[1], 1.9);
  EXPECT_GT(distances[1] / distances[2], 1.9);
}

TEST(StepLagrange, KeepsTheEulerianLength) {
  // a common-mode velocity, where the bare exponential update drifts by O(dt)
  mf::EulerState s = smooth_state(64);
  const Eigen::VectorXd x = s.grid.nodes();
  for (int k = 0; k <= 64; ++k) s.u.row(k).setConstant(0.1 * std::sin(pi * x[k]));
  mf::LagrangeState l = mf::to_lagrangian(s);
  const mf::Physics physics = mf::testing::scenario_r_physics();
  const Eigen::MatrixXd c0 = l.concentration;
  for (int step = 0; step < 200; ++step) l = mf::step_lagrange(l, 0.4 / 64, physics);
  EXPECT_NEAR(mf::integrate(l.grid, Eigen::VectorXd(l.rho.cwiseInverse())), 1.0, 1e-13);
  EXPECT_EQ(l.concentration, c0);
}
