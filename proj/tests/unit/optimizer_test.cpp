#include <cmath>

#include <gtest/gtest.h>

#include "dqr/errors.hpp"
#include "dqr/optimizer.hpp"
#include "reference.hpp"

namespace dqr {
namespace {

using reference::relative_error;

DesignPoint case_point(const DeviceParams& d) { return {d, reference::kWindow, reference::kNBar}; }

DesignSpace fixed_space(const DeviceParams& d) {
  DesignSpace s;
  s.base = case_point(d);
  return s;
}

TEST(DesignPoint, OmegaQrMovesQubit) {
  DesignPoint p = case_point(reference::case_i());
  p.set(Variable::omega_qr, kTwoPi * 1e9);
  EXPECT_EQ(p.device.omega_r, reference::kOmegaR);
  EXPECT_DOUBLE_EQ(p.get(Variable::omega_qr), kTwoPi * 1e9);
  p.set(Variable::kappa, 1e8);
  EXPECT_EQ(p.device.kappa, 1e8);
  p.set(Variable::window, 1e-7);
  EXPECT_EQ(p.window, 1e-7);
}

TEST(Variable, NamesRoundTrip) {
  for (auto v : {Variable::kappa, Variable::g, Variable::omega_qr, Variable::window, Variable::n_bar})
    EXPECT_EQ(variable_from_string(to_string(v)), v);
  EXPECT_FALSE(variable_from_string("omega_r").has_value());
  EXPECT_TRUE(default_log_scale(Variable::kappa));
  EXPECT_FALSE(default_log_scale(Variable::n_bar));
  EXPECT_FALSE(default_log_scale(Variable::window));
}

TEST(AxisValues, EndpointsAndSpacing) {
  const auto log = axis_values({Variable::kappa, 1e7, 1e8, true, 5}, 9);
  ASSERT_EQ(log.size(), 5u);
  EXPECT_EQ(log.front(), 1e7);
  EXPECT_EQ(log.back(), 1e8);
  EXPECT_NEAR(log[2], std::sqrt(1e15), 1e-3);
  const auto lin = axis_values({Variable::n_bar, 1.0, 3.0, false, 0}, 3);
  EXPECT_EQ(lin, (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(Sweep, NoFreeVariablesGivesCheckConstraints) {
  const auto result = sweep(fixed_space(reference::case_i()));
  ASSERT_EQ(result.rows.size(), 1u);
  const auto direct = check_constraints(reference::case_i(), 10.0, reference::kWindow, {});
  const auto ratios = result.rows[0].ratios();
  for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(ratios[k], direct.constraints[k].ratio);
  EXPECT_EQ(result.rows[0].report.overall, Status::pass);
  EXPECT_NEAR(*result.rows[0].fidelity, 0.9, 1e-15);
}

TEST(Sweep, LeakageCrossesWindowBoundary) {
  auto space = fixed_space(reference::case_i());
  space.free.push_back({Variable::kappa, 1e7, 9e7, false, 9});
  const auto result = sweep(space);
  ASSERT_EQ(result.rows.size(), 9u);
  for (const auto& row : result.rows) {
    const double kappa = row.point.device.kappa;
    const double c6 = row.ratios()[5];
    EXPECT_DOUBLE_EQ(c6, 1.0 / (0.5 * kappa * reference::kWindow));
    if (kappa < 2.0 / reference::kWindow) {
      EXPECT_EQ(row.report.constraints[5].status, Status::fail);
    } else {
      EXPECT_EQ(row.report.constraints[5].status, Status::pass);
    }
  }
  EXPECT_EQ(result.rows[4].point.device.kappa, 5e7);
  EXPECT_EQ(result.rows[4].ratios()[5], 1.0);
  EXPECT_EQ(result.rows[4].report.overall, Status::pass);
  EXPECT_EQ(result.rows[3].report.overall, Status::fail);
}

TEST(Sweep, LogLeakageSweepFailsBelowBoundary) {
  auto space = fixed_space(reference::case_i());
  space.free.push_back({Variable::kappa, 1e7, 1e8, true, 5});
  const auto result = sweep(space);
  for (const auto& row : result.rows)
    EXPECT_EQ(row.ratios()[5] <= 1.0, row.point.device.kappa >= 5e7);
}

TEST(Sweep, EqualBoundsGiveIdenticalRows) {
  auto space = fixed_space(reference::case_i());
  space.free.push_back({Variable::n_bar, 4.0, 4.0, false, 5});
  const auto result = sweep(space);
  ASSERT_EQ(result.rows.size(), 5u);
  for (const auto& row : result.rows) EXPECT_EQ(row.ratios(), result.rows[0].ratios());
}

TEST(Sweep, MixedRadixOrder) {
  auto space = fixed_space(reference::case_i());
  space.free.push_back({Variable::kappa, 1e7, 1e8, true, 3});
  space.free.push_back({Variable::n_bar, 1.0, 2.0, false, 2});
  const auto result = sweep(space);
  ASSERT_EQ(result.rows.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(result.rows[i].index, i);
    EXPECT_EQ(result.rows[i].coordinates[1], i % 2 == 0 ? 1.0 : 2.0);
  }
  EXPECT_EQ(result.rows[2].coordinates[0], result.rows[3].coordinates[0]);
}

TEST(Sweep, ParallelMatchesSerial) {
  auto space = fixed_space(reference::case_i());
  space.free.push_back({Variable::kappa, 1e6, 1e9, true, 13});
  space.free.push_back({Variable::g, 1e7, 1e9, true, 11});
  SweepOptions serial, parallel;
  serial.threads = 1;
  parallel.threads = 4;
  const auto a = sweep(space, serial);
  const auto b = sweep(space, parallel);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].coordinates, b.rows[i].coordinates);
    EXPECT_EQ(a.rows[i].report.overall, b.rows[i].report.overall);
  }
}

TEST(Sweep, CapExceeded) {
  auto space = fixed_space(reference::case_i());
  space.free.push_back({Variable::kappa, 1e6, 1e9, true, 1000});
  space.free.push_back({Variable::g, 1e7, 1e9, true, 1000});
  space.free.push_back({Variable::n_bar, 1.0, 10.0, false, 2});
  EXPECT_THROW(sweep(space), ConfigError);
}

TEST(DesignSpace, ValidateRejectsBadBounds) {
  auto space = fixed_space(reference::case_i());
  space.free.push_back({Variable::kappa, 1e8, 1e7, true, 3});
  EXPECT_THROW(space.validate(), ConfigError);
  space.free = {{Variable::kappa, 0.0, 1e7, true, 3}};
  EXPECT_THROW(space.validate(), ConfigError);
  space.free = {{Variable::kappa, 1e6, 1e7, true, 3}, {Variable::kappa, 1e6, 1e7, true, 3}};
  EXPECT_THROW(space.validate(), ConfigError);
  space.free = {{Variable::window, 0.0, INFINITY, false, 3}};
  EXPECT_THROW(space.validate(), ConfigError);
}

TEST(Evaluate, ZeroDetuningIsFailRow) {
  DesignPoint p = case_point(reference::case_i());
  p.device.omega_q = p.device.omega_r;
  const auto row = evaluate(p, {});
  EXPECT_EQ(row.report.overall, Status::fail);
  EXPECT_TRUE(std::isnan(row.derived.chi));
}

DesignSpace fidelity_space() {
  auto space = fixed_space(reference::case_ii());
  const double omega_qr = reference::case_ii().detuning();
  space.free.push_back({Variable::g, 0.05 / std::sqrt(2.0) * omega_qr, 0.05 * omega_qr, true, 0});
  return space;
}

TEST(Optimize, MaxFidelityReachesLowerCouplingBound) {
  const auto result = optimize(fidelity_space(), Objective::max_fidelity);
  EXPECT_TRUE(result.feasible);
  EXPECT_NEAR(result.objective, 0.95, 1e-12);
  EXPECT_NEAR(*result.row.fidelity, 0.95, 1e-12);
  EXPECT_EQ(result.row.report.overall, Status::pass);
  EXPECT_LT(result.row.ratios()[4], 1.0);
}

TEST(Optimize, Deterministic) {
  const auto a = optimize(fidelity_space(), Objective::max_fidelity);
  const auto b = optimize(fidelity_space(), Objective::max_fidelity);
  EXPECT_EQ(a.audit, b.audit);
  EXPECT_FALSE(a.audit.empty());
}

TEST(Optimize, FixedFeasiblePointUnchanged) {
  const auto space = fixed_space(reference::case_i());
  const auto result = optimize(space, Objective::min_window);
  EXPECT_TRUE(result.feasible);
  EXPECT_EQ(result.point.window, reference::kWindow);
  EXPECT_EQ(result.point.device.kappa, reference::kKappa);
  EXPECT_EQ(result.objective, reference::kWindow);
}

TEST(Optimize, MinWindowSettlesOnWindowResolutionBoundary) {
  auto space = fixed_space(reference::case_i());
  space.free.push_back({Variable::window, 1e-8, 1e-7, false, 0});
  const auto result = optimize(space, Objective::min_window);
  EXPECT_TRUE(result.feasible);
  EXPECT_LT(relative_error(result.point.window, 4e-8), 1e-5);
  EXPECT_LE(result.row.ratios()[5], 1.0);
  EXPECT_NE(result.row.report.overall, Status::fail);
}

TEST(Optimize, NeverWorseThanCoarseGrid) {
  auto space = fixed_space(reference::case_i());
  space.free.push_back({Variable::kappa, 5e7, 2e8, true, 0});
  space.free.push_back({Variable::n_bar, 5.0, 20.0, false, 0});
  const auto result = optimize(space, Objective::max_n_total);
  const auto grid = sweep(space);
  double best = -INFINITY;
  for (const auto& row : grid.rows)
    if (row.report.overall != Status::fail) best = std::max(best, objective_value(Objective::max_n_total, row));
  EXPECT_TRUE(result.feasible);
  EXPECT_GE(result.objective, best);
  EXPECT_NE(result.row.report.overall, Status::fail);
}

TEST(Optimize, InfeasibleSpaceReportsLeastViolatingPoint) {
  auto d = reference::case_i();
  d.g *= 0.3;
  auto space = fixed_space(d);
  space.free.push_back({Variable::kappa, 1e6, 1e7, true, 0});
  const auto result = optimize(space, Objective::max_fidelity);
  EXPECT_FALSE(result.feasible);
  EXPECT_EQ(result.row.report.overall, Status::fail);
}

TEST(Violation, ZeroAtFeasiblePoints) {
  const auto row = evaluate(case_point(reference::case_i()), {});
  EXPECT_EQ(violation(row.report), 0.0);
  auto d = reference::case_i();
  d.g *= 0.5;
  const auto bad = evaluate(case_point(d), {});
  EXPECT_NEAR(violation(bad.report), bad.ratios()[4] - 1.0, 1e-12);
  EXPECT_TRUE(std::isinf(violation(ConstraintReport{})));
}

TEST(Objective, NamesRoundTrip) {
  for (auto o : {Objective::min_window, Objective::max_fidelity, Objective::max_n_total})
    EXPECT_EQ(objective_from_string(to_string(o)), o);
  EXPECT_EQ(objective_from_string("max-fidelity"), Objective::max_fidelity);
  EXPECT_FALSE(objective_from_string("fastest").has_value());
}

}  // namespace
}  // namespace dqr
