#include <cmath>

#include <gtest/gtest.h>

#include "dqr/errors.hpp"
#include "dqr/readout.hpp"
#include "reference.hpp"

namespace dqr {
namespace {

using reference::relative_error;

DriveSpec case_i_drive() {
  return calibrated(reference::case_i(), DriveSpec{DriveRule::excited_resonant, 0.0, {}}, 10.0);
}

FieldTrajectory constant_trajectory(double photons, double span, std::size_t intervals) {
  FieldTrajectory t;
  t.times = uniform_grid(0.0, span, intervals);
  t.amplitude.assign(t.times.size(), Complex(std::sqrt(photons), 0.0));
  t.photon_number.assign(t.times.size(), photons);
  return t;
}

TEST(OutputField, ZeroFieldZeroOutput) { EXPECT_EQ(output_field(0.0, 5e7), Complex(0.0, 0.0)); }

TEST(OutputField, FluxIsHalfLeakageTimesPhotons) {
  const Complex a(1.3, -0.4);
  EXPECT_LT(relative_error(std::norm(output_field(a, 5e7)), 2.5e7 * std::norm(a)), 1e-15);
  EXPECT_EQ(output_field(a, 5e7), -std::sqrt(2.5e7) * a);
}

TEST(OutputField, CaseOneSteadyFlux) {
  const Complex a = steady_state_field(reference::case_i(), case_i_drive(), QubitState::excited);
  EXPECT_LT(relative_error(std::norm(output_field(a, reference::kKappa)), 2.5e8), 1e-14);
}

TEST(TotalPhotons, ConstantTrajectoryReproducesProduct) {
  const auto count = total_photons(constant_trajectory(10.0, reference::kWindow, 40), reference::kKappa);
  EXPECT_DOUBLE_EQ(count.n_bar, 10.0);
  EXPECT_LT(relative_error(count.n_total, 10.0), 1e-15);
  EXPECT_EQ(count.n_total, photons_emitted(reference::kKappa, reference::kWindow, count.n_bar));
}

TEST(TotalPhotons, ZeroLengthWindow) {
  const auto count = total_photons(constant_trajectory(10.0, 0.0, 1), reference::kKappa);
  EXPECT_EQ(count.n_total, 0.0);
  EXPECT_EQ(photons_emitted(reference::kKappa, 0.0, 10.0), 0.0);
}

TEST(TotalPhotons, SingleSampleThrows) {
  EXPECT_THROW(total_photons(constant_trajectory(1.0, 1.0, 0), 1.0), DomainError);
}

TEST(TotalPhotons, TransientMatchesQuadrature) {
  const auto d = reference::case_i();
  const Complex eps(reference::kEpsilon, 0.0);
  FieldTrajectory t;
  t.times = uniform_grid(0.0, reference::kWindow, 4000);
  for (double time : t.times) {
    t.amplitude.push_back(transient_field(d, eps, time));
    t.photon_number.push_back(std::norm(t.amplitude.back()));
  }
  const auto count = total_photons(t, d.kappa);
  EXPECT_LT(relative_error(count.n_total, reference::kTransientTotalPhotons), 1e-6);
  EXPECT_LT(count.n_total, photons_emitted(d.kappa, reference::kWindow, 10.0));
}

TEST(OutputPowerVoltage, CaseOne) {
  const auto pv = output_power_voltage(10.0, reference::kKappa, reference::kOmegaR, 50.0);
  EXPECT_LT(relative_error(pv.power, reference::kPower), 1e-14);
  EXPECT_LT(relative_error(pv.voltage, reference::kVoltage), 1e-14);
  EXPECT_LT(relative_error(pv.voltage, 0.23e-6), 0.02);
}

TEST(OutputPowerVoltage, CaseTwoRootTwoLarger) {
  const auto one = output_power_voltage(10.0, reference::kKappa, reference::kOmegaR, 50.0);
  const auto two = output_power_voltage(10.0, reference::kKappa, 2.0 * reference::kOmegaR, 50.0);
  EXPECT_LT(relative_error(two.voltage / one.voltage, std::sqrt(2.0)), 1e-15);
  EXPECT_LT(relative_error(two.voltage, reference::kVoltageDoubled), 1e-14);
}

TEST(OutputPowerVoltage, NoPhotonsNoPower) {
  const auto pv = output_power_voltage(0.0, reference::kKappa, reference::kOmegaR, 50.0);
  EXPECT_EQ(pv.power, 0.0);
  EXPECT_EQ(pv.voltage, 0.0);
}

TEST(OutputPowerVoltage, OhmsLawAndMonotonicity) {
  for (double n : {0.5, 3.0, 10.0, 40.0})
    for (double k : {1e6, 5e7, 2e8}) {
      const auto pv = output_power_voltage(n, k, reference::kOmegaR, 50.0);
      EXPECT_LT(relative_error(pv.voltage * pv.voltage / 50.0, pv.power), 1e-15);
      EXPECT_GT(output_power_voltage(1.1 * n, k, reference::kOmegaR, 50.0).voltage, pv.voltage);
      EXPECT_GT(output_power_voltage(n, 1.1 * k, reference::kOmegaR, 50.0).voltage, pv.voltage);
      EXPECT_GT(output_power_voltage(n, k, 1.1 * reference::kOmegaR, 50.0).voltage, pv.voltage);
    }
}

TEST(StateSeparation, CaseOne) {
  EXPECT_LT(relative_error(state_separation(reference::case_i(), case_i_drive()), reference::kSeparation),
            1e-14);
}

TEST(StateSeparation, VanishesForHugeLeakage) {
  auto d = reference::case_i();
  const Complex eps = case_i_drive().amplitude();
  d.kappa = 1e14;
  EXPECT_LT(state_separation(d, DriveSpec{DriveRule::excited_resonant, 0.0, eps}), 1e-6);
}

TEST(StateSeparation, ZeroShiftZeroSeparation) {
  auto d = reference::case_i();
  d.g = 0.0;
  EXPECT_EQ(state_separation(d, DriveSpec{DriveRule::excited_resonant, 0.0, Complex(1e7, 0.0)}), 0.0);
}

TEST(StateSeparation, MonotoneInLeakageAndShift) {
  const auto base = reference::case_i();
  const DriveSpec drive{DriveRule::excited_resonant, 0.0, Complex(reference::kEpsilon, 0.0)};
  double previous = 1e300;
  for (double k = 1e7; k < 1e9; k *= 1.3) {
    auto d = base;
    d.kappa = k;
    const double s = state_separation(d, drive);
    EXPECT_LT(s, previous);
    previous = s;
  }
  previous = 0.0;
  for (double f = 0.01; f < 0.1; f += 0.005) {
    auto d = base;
    d.g = f * d.detuning();
    const double s = state_separation(d, drive);
    EXPECT_GT(s, previous);
    previous = s;
  }
}

TEST(DriveForTargetNbar, CaseOneAmplitude) {
  const Complex eps = drive_for_target_nbar(reference::case_i(), DriveSpec{}, 10.0, QubitState::excited);
  EXPECT_LT(relative_error(eps, Complex(reference::kEpsilon, 0.0)), 1e-15);
  EXPECT_EQ(eps.imag(), 0.0);
}

TEST(DriveForTargetNbar, ZeroTarget) {
  EXPECT_EQ(drive_for_target_nbar(reference::case_i(), DriveSpec{}, 0.0, QubitState::excited),
            Complex(0.0, 0.0));
}

TEST(DriveForTargetNbar, RoundTrip) {
  const auto d = reference::case_i();
  for (auto rule : {DriveRule::excited_resonant, DriveRule::ground_resonant})
    for (auto q : {QubitState::ground, QubitState::excited})
      for (double n : {0.1, 1.0, 10.0, 123.0}) {
        DriveSpec drive{rule, 0.0, {}};
        drive.epsilon = drive_for_target_nbar(d, drive, n, q);
        EXPECT_LT(relative_error(std::norm(steady_state_field(d, drive, q)), n), 1e-12);
      }
}

TEST(DriveForTargetNbar, InfeasibleWithoutLeakage) {
  auto d = reference::case_i();
  d.kappa = 0.0;
  EXPECT_THROW(drive_for_target_nbar(d, DriveSpec{}, 1.0, QubitState::excited), DomainError);
  EXPECT_THROW(drive_for_target_nbar(reference::case_i(), DriveSpec{}, -1.0, QubitState::excited),
               DomainError);
}

TEST(ReadoutBudget, CaseOneInvariants) {
  const auto b = readout_budget(reference::case_i(), case_i_drive(), 10.0, reference::kWindow);
  EXPECT_EQ(b.n_total, photons_emitted(reference::kKappa, reference::kWindow, 10.0));
  EXPECT_EQ(b.n_total_both, 2.0 * b.n_total);
  EXPECT_LT(relative_error(b.shot_noise * b.shot_noise, b.n_total), 1e-15);
  EXPECT_LT(relative_error(b.voltage, reference::kVoltage), 1e-14);
  EXPECT_LT(relative_error(b.separation, reference::kSeparation), 1e-14);
}

TEST(ReadoutBudget, UncalibratedDriveHasNoSeparation) {
  const auto b = readout_budget(reference::case_i(), DriveSpec{}, 10.0, reference::kWindow);
  EXPECT_TRUE(std::isnan(b.separation));
  EXPECT_LT(relative_error(b.n_total, 10.0), 1e-15);
}

}  // namespace
}  // namespace dqr
