#pragma once

#include <string>
#include <vector>

#include "exseq/polyspace.hpp"

namespace exseq {

enum class FriedrichsCase { curl2d_full, curl2d_bubble, curl3d_full, curl3d_bubble, div3d_full, div3d_bubble };

std::string to_string(FriedrichsCase c);
FriedrichsCase friedrichs_case_from_string(const std::string& s);
std::vector<FriedrichsCase> all_friedrichs_cases();

enum class Constraint { grad_orthogonal_full, grad_orthogonal_bubble, curl_orthogonal_full, curl_orthogonal_bubble_perp };

std::string to_string(Constraint c);

struct ConstrainedSubspace {
  SpacePtr parent;
  Constraint constraint;
  Mat tests;  // ambient images of the constraint test functions (columns)
  Mat basis;  // orthonormal ambient columns

  int dim() const { return static_cast<int>(basis.cols()); }
  // relative size of the constraint functionals applied to an ambient coefficient vector
  double residual(const Vec& coeffs) const;
  // worst residual over the basis
  double basis_residual() const;
};

ConstrainedSubspace constrained_subspace(FriedrichsCase c, int p);

struct FriedrichsResult {
  FriedrichsCase fcase;
  int p = 0;
  int dim = 0;
  double min_ratio = 0.0;  // min ||Du|| / ||u|| over the subspace
  double constant = 0.0;   // 1 / min_ratio; 0 when the subspace is empty
  bool empty = false;
};

FriedrichsResult friedrichs_constant(FriedrichsCase c, int p);

struct LiftingResult {
  Poly lifting;
  double trace_residual = 0.0;          // relative mismatch of the reproduced traces
  double orthogonality_residual = 0.0;  // relative size of the orthogonality functionals
  double multiplier_norm = 0.0;         // Lagrange multiplier relative to the data scale
  double kkt_min_singular = 0.0;
  double inf_sup = 0.0;
  double energy = 0.0;         // ||curl L|| or ||div L||
  double source_energy = 0.0;  // same for the field that supplied the traces
};

// w is a polynomial in Q_p (resp. V_p) on the reference tetrahedron; only its
// tangential (resp. normal) traces are used.
LiftingResult discrete_lifting_curl(int p, const Poly& w);
LiftingResult discrete_lifting_div(int p, const Poly& w);

// inf ||v||_{H(curl)} over v in Q_{lift_p} with the tangential traces of w (w in Q_p, lift_p >= p).
double x_minus_half_norm(int p, const Poly& w, int lift_p);

}  // namespace exseq
