#include "rta/team_model.hpp"

#include <stdexcept>

namespace rta {

int SpeciesMapping::species_of(int robot) const {
  for (int s = 0; s < P.rows(); ++s) {
    if (P(s, robot) != 0) return s;
  }
  return -1;
}

SpeciesMapping SpeciesMapping::from_species_ids(
    const std::vector<int>& species_ids, int num_species) {
  SpeciesMapping m;
  m.P = IntMatrix::Zero(num_species, static_cast<int>(species_ids.size()));
  for (int i = 0; i < static_cast<int>(species_ids.size()); ++i) {
    m.P(species_ids[i], i) = 1;
  }
  m.lambda = IntVector::Zero(num_species);
  for (int s = 0; s < num_species; ++s) m.lambda(s) = m.P.row(s).sum();
  return m;
}

IntMatrix binary_shadow(const Matrix& Q) {
  IntMatrix shadow(Q.rows(), Q.cols());
  for (int s = 0; s < Q.rows(); ++s) {
    for (int u = 0; u < Q.cols(); ++u) {
      shadow(s, u) = Q(s, u) > 0.0 ? 1 : 0;
    }
  }
  return shadow;
}

Vector aggregate_capabilities(const IntVector& A_row, const SpeciesMapping& P,
                              const CapabilityMatrix& Q) {
  if (A_row.size() != P.num_robots()) {
    throw std::invalid_argument(
        "aggregate_capabilities: allocation row length does not match robot "
        "count");
  }
  if (P.num_species() != Q.num_species()) {
    throw std::invalid_argument(
        "aggregate_capabilities: species mapping and capability matrix "
        "disagree on species count");
  }
  // (A_row P^T Q)^T, additive over assigned robots.
  Vector c = Vector::Zero(Q.num_capabilities());
  for (int i = 0; i < A_row.size(); ++i) {
    if (A_row(i) == 0) continue;
    int s = P.species_of(i);
    if (s >= 0) c += Q.Q.row(s).transpose();
  }
  return c;
}

Vector effective_capabilities(const Vector& c, const Vector& d) {
  if (c.size() != d.size()) {
    throw std::invalid_argument("effective_capabilities: size mismatch");
  }
  for (int u = 0; u < d.size(); ++u) {
    if (d(u) < 0.0 || d(u) > 1.0) {
      throw std::invalid_argument(
          "effective_capabilities: degradation outside [0,1]");
    }
  }
  return (Vector::Ones(c.size()) - d).cwiseProduct(c);
}

std::vector<std::string> validate_team(const CapabilityMatrix& Q,
                                       const SpeciesMapping& P) {
  std::vector<std::string> violations;
  if (Q.Q.rows() < 1 || Q.Q.cols() < 1) {
    violations.push_back("capability matrix must be at least 1x1");
  }
  for (int s = 0; s < Q.Q.rows(); ++s) {
    for (int u = 0; u < Q.Q.cols(); ++u) {
      if (Q.Q(s, u) < 0.0) {
        violations.push_back("negative capability: species " +
                             std::to_string(s) + ", capability " +
                             std::to_string(u));
      }
    }
  }
  if (P.P.rows() != Q.Q.rows()) {
    violations.push_back("species mapping rows do not match species count");
    return violations;
  }
  for (int i = 0; i < P.P.cols(); ++i) {
    int col_sum = P.P.col(i).sum();
    if (col_sum != 1) {
      violations.push_back("robot " + std::to_string(i) +
                           (col_sum > 1 ? " belongs to two species"
                                        : " belongs to no species"));
    }
  }
  if (P.lambda.size() != P.P.rows()) {
    violations.push_back("lambda length does not match species count");
  } else {
    for (int s = 0; s < P.P.rows(); ++s) {
      if (P.lambda(s) < 0) {
        violations.push_back("negative availability for species " +
                             std::to_string(s));
      }
    }
  }
  return violations;
}

}  // namespace rta
