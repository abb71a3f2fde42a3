#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dqr/dynamics.hpp"
#include "dqr/model.hpp"

namespace dqr {

enum class Status { pass, marginal, fail };

// strong: "much less than", graded against a margin.
// weak:   a plain threshold, satisfied iff ratio <= 1 (boundary included).
enum class ConstraintKind { strong, weak };

std::string_view to_string(Status status);
std::string_view to_string(ConstraintKind kind);

// One inequality lhs (<<|<=) rhs, oriented so that ratio = lhs / rhs <= 1 is satisfied.
struct Constraint {
  std::string id;   // "C1" .. "C8"
  std::string tag;  // short human-readable name
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  ConstraintKind kind = ConstraintKind::strong;
  double margin = 1.0;
  Status status = Status::fail;
};

enum class PhotonSource { steady_state_product, trajectory };

struct ConstraintReport {
  std::vector<Constraint> constraints;
  Status overall = Status::pass;
  PhotonSource n_total_source = PhotonSource::steady_state_product;
  double n_bar = 0.0;
  double n_total = 0.0;
};

// Margins for the strong constraints. "much less than" passes at ratio <= margin.
struct Margins {
  double frequency_proximity = 0.5;  // C1
  double dispersive_validity = 0.2;  // C2
  double many_photons = 0.2;         // C3
  double photon_upper_bound = 0.2;   // C4
  double bandwidth = 0.2;            // C7
  double relaxation = 0.2;           // C8

  static Margins uniform(double strong, double frequency_proximity);
};

struct FeasibilityOptions {
  Margins margins;
  VacuumTerm vacuum = VacuumTerm::excluded;
};

// lhs / rhs with 0/0 mapped to NaN (always fails) and x/0 to +inf.
double constraint_ratio(double lhs, double rhs);

// Pure grading rule. NaN ratios fail.
Status grade(double ratio, ConstraintKind kind, double margin);

Status overall_status(const std::vector<Constraint>& constraints);

// Evaluates C1..C8 for a window during which the cavity holds n_bar photons on
// average. With a trajectory, n_bar and n_total come from its trapezoidal average
// instead of the product formula.
ConstraintReport check_constraints(const DeviceParams& device, double n_bar, double window,
                                   const FeasibilityOptions& options,
                                   const FieldTrajectory* trajectory = nullptr);

// Same, with n_bar taken from the excited-state steady state of a calibrated drive.
// Throws ConfigError when the drive has no amplitude.
ConstraintReport check_constraints(const DeviceParams& device, const DriveSpec& drive,
                                   double window, const FeasibilityOptions& options,
                                   const FieldTrajectory* trajectory = nullptr);

struct ExplainOptions {
  bool sort_by_severity = false;
};

// One line per constraint: id, tag, lhs, rhs, ratio, status.
std::vector<std::string> explain(const ConstraintReport& report, const ExplainOptions& options = {});

}  // namespace dqr
