#include "dqr/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "dqr/errors.hpp"

#include "dqr/readout.hpp"

namespace dqr {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::pass:
      return "PASS";
    case Status::marginal:
      return "MARGINAL";
    case Status::fail:
      return "FAIL";
  }
  return "FAIL";
}

std::string_view to_string(ConstraintKind kind) {
  return kind == ConstraintKind::strong ? "strong" : "weak";
}

Margins Margins::uniform(double strong, double frequency_proximity) {
  Margins m;
  m.frequency_proximity = frequency_proximity;
  m.dispersive_validity = m.many_photons = m.photon_upper_bound = m.bandwidth = m.relaxation =
      strong;
  return m;
}

double constraint_ratio(double lhs, double rhs) {
  if (rhs == 0.0) {
    if (lhs == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::copysign(std::numeric_limits<double>::infinity(), lhs);
  }
  return lhs / rhs;
}

Status grade(double ratio, ConstraintKind kind, double margin) {
  if (std::isnan(ratio)) return Status::fail;
  if (kind == ConstraintKind::weak) return ratio <= 1.0 ? Status::pass : Status::fail;
  if (ratio <= margin) return Status::pass;
  if (ratio <= 1.0) return Status::marginal;
  return Status::fail;
}

Status overall_status(const std::vector<Constraint>& constraints) {
  Status overall = Status::pass;
  for (const auto& c : constraints) {
    if (c.status == Status::fail) return Status::fail;
    if (c.status == Status::marginal) overall = Status::marginal;
  }
  return overall;
}

namespace {

Constraint make(std::string id, std::string tag, double lhs, double rhs, ConstraintKind kind,
                double margin) {
  Constraint c;
  c.id = std::move(id);
  c.tag = std::move(tag);
  c.lhs = lhs;
  c.rhs = rhs;
  c.ratio = constraint_ratio(lhs, rhs);
  c.kind = kind;
  c.margin = kind == ConstraintKind::weak ? 1.0 : margin;
  c.status = grade(c.ratio, kind, c.margin);
  return c;
}

}  // namespace

ConstraintReport check_constraints(const DeviceParams& device, double n_bar, double window,
                                   const FeasibilityOptions& options,
                                   const FieldTrajectory* trajectory) {
  if (!(window > 0.0)) throw DomainError("measurement window must be positive");
  ConstraintReport report;
  report.n_bar = n_bar;
  report.n_total = photons_emitted(device.kappa, window, n_bar);
  if (trajectory != nullptr) {
    const auto count = total_photons(*trajectory, device.kappa);
    report.n_bar = count.n_bar;
    report.n_total = count.n_total;
    report.n_total_source = PhotonSource::trajectory;
  }

  const double omega_qr = device.detuning();
  const double abs_qr = std::abs(omega_qr);
  const double chi_value = chi(device.g, omega_qr);
  const double half_kappa = 0.5 * device.kappa;
  const double gamma_r = relaxation_rate(chi_value, omega_qr, device.kappa, report.n_bar,
                                         options.vacuum);
  // omega_qr / (4 chi) = omega_qr^2 / (4 g^2); infinite without coupling.
  const double photon_ceiling = device.g > 0.0 ? omega_qr * omega_qr / (4.0 * device.g * device.g)
                                               : std::numeric_limits<double>::infinity();
  const auto& m = options.margins;
  using K = ConstraintKind;

  auto& cs = report.constraints;
  cs.push_back(make("C1", "frequency-proximity", abs_qr, std::min(device.omega_q, device.omega_r),
                    K::strong, m.frequency_proximity));
  cs.push_back(make("C2", "dispersive-validity", device.g * std::sqrt(report.n_bar), abs_qr,
                    K::strong, m.dispersive_validity));
  cs.push_back(make("C3", "many-photons", 1.0, report.n_total, K::strong, m.many_photons));
  cs.push_back(make("C4", "photon-upper-bound", report.n_total, photon_ceiling, K::strong,
                    m.photon_upper_bound));
  cs.push_back(make("C5", "line-resolution", half_kappa, 2.0 * std::abs(chi_value), K::weak, 1.0));
  cs.push_back(make("C6", "window-resolution", 1.0, half_kappa * window, K::weak, 1.0));
  cs.push_back(make("C7", "bandwidth-within-detuning", half_kappa, abs_qr, K::strong,
                    m.bandwidth));
  cs.push_back(make("C8", "relaxation-budget", gamma_r * window, 1.0, K::strong, m.relaxation));
  report.overall = overall_status(cs);
  return report;
}

ConstraintReport check_constraints(const DeviceParams& device, const DriveSpec& drive,
                                   double window, const FeasibilityOptions& options,
                                   const FieldTrajectory* trajectory) {
  const Complex a = steady_state_field(device, drive, QubitState::excited);
  return check_constraints(device, std::norm(a) + device.n_bath, window, options, trajectory);
}

std::vector<std::string> explain(const ConstraintReport& report, const ExplainOptions& options) {
  std::vector<const Constraint*> order;
  order.reserve(report.constraints.size());
  for (const auto& c : report.constraints) order.push_back(&c);
  if (options.sort_by_severity) {
    auto rank = [](Status s) { return s == Status::fail ? 0 : s == Status::marginal ? 1 : 2; };
    std::stable_sort(order.begin(), order.end(), [&](const Constraint* a, const Constraint* b) {
      return rank(a->status) < rank(b->status);
    });
  }
  std::vector<std::string> lines;
  lines.reserve(order.size());
  for (const Constraint* c : order)
    lines.push_back(fmt::format("{:<3} {:<26} lhs={:<16.9e} rhs={:<16.9e} ratio={:<16.9e} {}",
                                c->id, c->tag, c->lhs, c->rhs, c->ratio, to_string(c->status)));
  return lines;
}

}  // namespace dqr
