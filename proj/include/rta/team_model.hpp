#pragma once

#include <string>
#include <vector>

#include "rta/linalg.hpp"

namespace rta {

/// Per-species capability matrix. Rows are species, columns are capabilities
/// (physical quantities such as m^2 of sensed area or m/s of speed; the unit
/// labels are metadata only, no unit algebra is performed).
struct CapabilityMatrix {
  Matrix Q;  // S x U, nonnegative
  std::vector<std::string> capability_names;  // size U
  std::vector<std::string> species_names;     // size S

  int num_species() const { return static_cast<int>(Q.rows()); }
  int num_capabilities() const { return static_cast<int>(Q.cols()); }
};

/// Robot-to-species assignment. P is S x N binary with unit column sums;
/// lambda caps how many robots of each species may be deployed at once.
struct SpeciesMapping {
  IntMatrix P;       // S x N
  IntVector lambda;  // size S

  int num_species() const { return static_cast<int>(P.rows()); }
  int num_robots() const { return static_cast<int>(P.cols()); }
  int species_of(int robot) const;

  /// lambda defaulted to the species counts implied by P.
  static SpeciesMapping from_species_ids(const std::vector<int>& species_ids,
                                         int num_species);
};

/// Q_bar: 1 exactly where Q > 0.
IntMatrix binary_shadow(const Matrix& Q);

/// c_m = (A_row * P^T * Q)^T for one task row of the allocation matrix.
Vector aggregate_capabilities(const IntVector& A_row, const SpeciesMapping& P,
                              const CapabilityMatrix& Q);

/// c_hat = (1 - d) .* c. Requires d in [0,1]^U.
Vector effective_capabilities(const Vector& c, const Vector& d);

/// Checks every structural invariant of a team description and returns all
/// violations (empty means valid).
std::vector<std::string> validate_team(const CapabilityMatrix& Q,
                                       const SpeciesMapping& P);

}  // namespace rta
