#pragma once

#include <string>
#include <vector>

#include "exseq/polyspace.hpp"

namespace exseq {

enum class DiffOp { grad, curl, div, curl2d_scalar, curl2d_vector };
enum class TraceKind { scalar, tangential, normal, gamma };
enum class BoundaryCondition { none, zero_trace };

std::string to_string(DiffOp op);

// Matrix of an operator between two spaces in their orthonormal coordinates,
// together with the relative residual of the image outside the target space.
struct LinearOpMatrix {
  SpacePtr source;
  SpacePtr target;
  Mat matrix;
  double residual = 0.0;
};

// Ambient matrix of the operator at degree n on a cell.
Mat ambient_op(DiffOp op, const Cell& cell, int n);

// Target is the next space of the complex with the same degree p.
LinearOpMatrix diff_op(DiffOp op, const SpacePtr& source);
LinearOpMatrix trace_op(TraceKind kind, const SpacePtr& source, SubKind sub, int index);

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;  // pass means value <= tolerance (or equality for counts)
  bool pass = false;
  bool count = false;  // integer identity: value is the computed count, tolerance the expected one
};

struct ExactnessReport {
  std::vector<Check> checks;
  bool ok() const;
};

// Complex identities, kernel/range dimension identities, bubble versions.
ExactnessReport check_exact_sequence(const CellPtr& cell, int p, BoundaryCondition bc);

// dim of the range of an operator restricted to a space
int range_dim(DiffOp op, const PolySpace& space);

}  // namespace exseq
