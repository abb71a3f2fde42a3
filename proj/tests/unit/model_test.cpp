#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dqr/errors.hpp"
#include "dqr/model.hpp"
#include "dqr/units.hpp"
#include "reference.hpp"

namespace dqr {
namespace {

using reference::relative_error;

TEST(Chi, CaseOneShift) {
  const double g = angular_from_mhz(75.0);
  const double omega_qr = angular_from_ghz(1.5);
  EXPECT_LT(relative_error(chi(g, omega_qr), kTwoPi * reference::kChiOver2Pi), 1e-15);
}

TEST(Chi, ZeroCouplingGivesZero) { EXPECT_EQ(chi(0.0, angular_from_ghz(1.5)), 0.0); }

TEST(Chi, CaseTwoShift) {
  const double value = chi(angular_from_mhz(150.0), angular_from_ghz(3.0));
  EXPECT_LT(relative_error(value, kTwoPi * 7.5e6), 1e-15);
}

TEST(Chi, SignFollowsDetuning) {
  EXPECT_GT(chi(1.0, 2.0), 0.0);
  EXPECT_LT(chi(1.0, -2.0), 0.0);
}

TEST(Chi, ZeroDetuningThrows) { EXPECT_THROW(chi(1.0, 0.0), DomainError); }

TEST(Chi, TimesDetuningIsCouplingSquared) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log_uniform(6.0, 11.0);
  for (int i = 0; i < 1000; ++i) {
    const double g = std::pow(10.0, log_uniform(rng));
    const double omega_qr = std::pow(10.0, log_uniform(rng));
    EXPECT_LT(relative_error(chi(g, omega_qr) * omega_qr, g * g), 4e-16);
  }
}

TEST(CouplingFromCircuit, CircuitExample) {
  const CircuitParams c{10e-15, 0.8e-12, 0.02, 0.17e-9};
  const double g = coupling_from_circuit(c, reference::kOmegaR, reference::kOmegaQ);
  EXPECT_LT(relative_error(g, reference::kCircuitCoupling), 1e-13);
  EXPECT_NEAR(g, 1.94e8, 0.01e8);
}

TEST(CouplingFromCircuit, NoCouplingCapacitor) {
  const CircuitParams c{0.0, 0.8e-12, 0.02, 0.17e-9};
  EXPECT_EQ(coupling_from_circuit(c, reference::kOmegaR, reference::kOmegaQ), 0.0);
}

TEST(CouplingFromCircuit, LinearInCouplingCapacitance) {
  const CircuitParams c{10e-15, 0.8e-12, 0.02, 0.17e-9};
  CircuitParams doubled = c;
  doubled.c_g *= 2.0;
  const double g1 = coupling_from_circuit(c, reference::kOmegaR, reference::kOmegaQ);
  const double g2 = coupling_from_circuit(doubled, reference::kOmegaR, reference::kOmegaQ);
  EXPECT_LT(relative_error(g2 / g1, 2.0), 1e-15);
}

TEST(CouplingFromCircuit, ScalesAsRootOfFrequencyProduct) {
  const CircuitParams c{10e-15, 0.8e-12, 0.02, 0.17e-9};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> factor(0.1, 10.0);
  const double base = coupling_from_circuit(c, reference::kOmegaR, reference::kOmegaQ);
  for (int i = 0; i < 100; ++i) {
    const double fr = factor(rng), fq = factor(rng);
    const double g = coupling_from_circuit(c, fr * reference::kOmegaR, fq * reference::kOmegaQ);
    EXPECT_LT(relative_error(g / base, std::sqrt(fr * fq)), 1e-14);
  }
}

TEST(CouplingFromCircuit, NonpositiveInputsThrow) {
  EXPECT_THROW(coupling_from_circuit({-1e-15, 0.8e-12, 0.02, 0.17e-9}, 1.0, 2.0), DomainError);
  EXPECT_THROW(coupling_from_circuit({1e-15, 0.0, 0.02, 0.17e-9}, 1.0, 2.0), DomainError);
  EXPECT_THROW(coupling_from_circuit({1e-15, 0.8e-12, 0.0, 0.17e-9}, 1.0, 2.0), DomainError);
  EXPECT_THROW(coupling_from_circuit({1e-15, 0.8e-12, 0.02, -1.0}, 1.0, 2.0), DomainError);
  EXPECT_THROW(coupling_from_circuit({1e-15, 0.8e-12, 0.02, 0.17e-9}, 0.0, 2.0), DomainError);
}

TEST(QualityFactor, CaseOne) {
  const double q = quality_factor(reference::kOmegaR, reference::kKappa);
  EXPECT_LT(relative_error(q, reference::kQualityFactor), 1e-15);
  EXPECT_NEAR(q, 816.8, 0.1);
}

TEST(QualityFactor, CaseTwoDoubles) {
  const double q = quality_factor(2.0 * reference::kOmegaR, reference::kKappa);
  EXPECT_LT(relative_error(q, 2.0 * reference::kQualityFactor), 1e-15);
  EXPECT_NEAR(q, 1633.6, 0.1);
}

TEST(QualityFactor, IdentityRatio) { EXPECT_EQ(quality_factor(3.0e10, 3.0e10), 1.0); }

TEST(QualityFactor, ZeroLeakageThrows) { EXPECT_THROW(quality_factor(1.0, 0.0), DomainError); }

TEST(RelaxationRate, CaseOneWithoutVacuumTerm) {
  const auto d = reference::case_i();
  const double rate = relaxation_rate(chi(d.g, d.detuning()), d.detuning(), d.kappa, 10.0,
                                      VacuumTerm::excluded);
  EXPECT_LT(relative_error(rate, reference::kRelaxationRate), 1e-14);
}

TEST(RelaxationRate, NoLeakageNoRelaxation) {
  EXPECT_EQ(relaxation_rate(1e6, 1e9, 0.0, 10.0, VacuumTerm::included), 0.0);
}

TEST(RelaxationRate, VacuumInduced) {
  const auto d = reference::case_i();
  const double rate = relaxation_rate(chi(d.g, d.detuning()), d.detuning(), d.kappa, 0.0,
                                      VacuumTerm::included);
  EXPECT_LT(relative_error(rate, reference::kVacuumRelaxationRate), 1e-14);
}

TEST(RelaxationRate, LinearInLeakageAndPhotonNumber) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  const double c = 2.0e7, w = 9.0e9, k = 5.0e7;
  const double unit = relaxation_rate(c, w, k, 0.0, VacuumTerm::included);
  for (int i = 0; i < 100; ++i) {
    const double n = u(rng), scale = 0.1 + u(rng);
    EXPECT_LT(relative_error(relaxation_rate(c, w, scale * k, n, VacuumTerm::included),
                             scale * (n + 1.0) * unit),
              1e-14);
  }
}

TEST(RelaxationRate, InvalidInputsThrow) {
  EXPECT_THROW(relaxation_rate(1.0, 0.0, 1.0, 1.0, VacuumTerm::included), DomainError);
  EXPECT_THROW(relaxation_rate(1.0, 1.0, 1.0, -1.0, VacuumTerm::included), DomainError);
}

TEST(Fidelity, CaseOne) { EXPECT_NEAR(fidelity(2.5e6, 4e-8), 0.9, 1e-15); }

TEST(Fidelity, NoRelaxation) { EXPECT_EQ(fidelity(0.0, 4e-8), 1.0); }

TEST(Fidelity, CaseTwoReducedCoupling) {
  auto d = reference::case_ii();
  d.g = 0.05 / std::sqrt(2.0) * d.detuning();
  const double gamma = relaxation_rate(chi(d.g, d.detuning()), d.detuning(), d.kappa, 10.0,
                                       VacuumTerm::excluded);
  EXPECT_NEAR(fidelity(gamma, 4e-8), 0.95, 1e-12);
}

TEST(Fidelity, CompleteDecay) {
  EXPECT_THROW(fidelity(2.5e7, 4e-8), CompleteDecayError);
  EXPECT_THROW(fidelity(1.0, 1.0), CompleteDecayError);
  EXPECT_FALSE(try_fidelity(1.0, 2.0).has_value());
  EXPECT_DOUBLE_EQ(*try_fidelity(0.5, 1.0), 0.5);
}

TEST(Fidelity, ComplementsDecayExactly) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> rate(0.0, 1e7), time(0.0, 1e-7);
  for (int i = 0; i < 10000; ++i) {
    const double g = rate(rng), t = time(rng);
    if (g * t >= 1.0) continue;
    EXPECT_EQ(fidelity(g, t) + g * t, 1.0);
  }
}

TEST(VoltageScale, CircuitExample) {
  const double v = voltage_scale(reference::kOmegaR, 0.02, 0.17e-9);
  EXPECT_LT(relative_error(v, reference::kLineVoltageScale), 1e-14);
  EXPECT_NEAR(v, 1.13e-6, 0.01e-6);
}

TEST(VoltageScale, GrowsAsRootOfFrequency) {
  const double v1 = voltage_scale(reference::kOmegaR, 0.02, 0.17e-9);
  const double v4 = voltage_scale(4.0 * reference::kOmegaR, 0.02, 0.17e-9);
  EXPECT_LT(relative_error(v4 / v1, 2.0), 1e-15);
  EXPECT_LT(v1, voltage_scale(1.1 * reference::kOmegaR, 0.02, 0.17e-9));
}

TEST(VoltageScale, QuadrupledLineHalvesScale) {
  const double v1 = voltage_scale(reference::kOmegaR, 0.02, 0.17e-9);
  const double v2 = voltage_scale(reference::kOmegaR, 0.04, 0.34e-9);
  EXPECT_LT(relative_error(v1 / v2, 2.0), 1e-15);
}

TEST(VoltageScale, NonpositiveInputsThrow) {
  EXPECT_THROW(voltage_scale(0.0, 0.02, 0.17e-9), DomainError);
  EXPECT_THROW(voltage_scale(1.0, -0.02, 0.17e-9), DomainError);
  EXPECT_THROW(voltage_scale(1.0, 0.02, 0.0), DomainError);
}

TEST(Units, OrdinaryFrequencyRoundTrip) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> f(0.001, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double ghz = f(rng);
    EXPECT_LT(relative_error(ghz_from_angular(angular_from_ghz(ghz)), ghz), 1e-12);
    EXPECT_LT(relative_error(mhz_from_angular(angular_from_mhz(ghz)), ghz), 1e-12);
  }
}

TEST(QubitState, ConventionMatchesHamiltonianSign) {
  EXPECT_EQ(sigma_z(QubitState::ground), 1.0);
  EXPECT_EQ(sigma_z(QubitState::excited), -1.0);
  EXPECT_EQ(flipped(QubitState::ground), QubitState::excited);
  EXPECT_EQ(flipped(QubitState::excited), QubitState::ground);
}

TEST(DeviceParams, ValidateRejectsBrokenInvariants) {
  EXPECT_NO_THROW(reference::case_i().validate());
  auto bad = reference::case_i();
  bad.omega_q = bad.omega_r;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = reference::case_i();
  bad.kappa = -1.0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = reference::case_i();
  bad.n_bath = -0.5;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = reference::case_i();
  bad.impedance = 0.0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = reference::case_i();
  bad.g = -1.0;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Derive, CaseOne) {
  const auto q = derive(reference::case_i(), 10.0, VacuumTerm::excluded);
  EXPECT_LT(relative_error(q.chi, kTwoPi * reference::kChiOver2Pi), 1e-14);
  EXPECT_LT(relative_error(q.q_factor, reference::kQualityFactor), 1e-15);
  EXPECT_LT(relative_error(q.gamma_r, reference::kRelaxationRate), 1e-14);
  EXPECT_EQ(q.omega_qr, reference::kOmegaQ - reference::kOmegaR);
}

TEST(Derive, ZeroLeakageHasInfiniteQuality) {
  auto d = reference::case_i();
  d.kappa = 0.0;
  EXPECT_TRUE(std::isinf(derive(d, 10.0, VacuumTerm::excluded).q_factor));
}

}  // namespace
}  // namespace dqr
