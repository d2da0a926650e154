#pragma once

#include <vector>

#include "exseq/calculus.hpp"
#include "exseq/field.hpp"
#include "exseq/polyspace.hpp"

namespace exseq {

// theta(x) = C (1 - |x-c|^2/r^2)^m on the ball B(c, r), normalized to unit integral.
struct PoincareBump {
  Vec center;
  double radius = 1.0;
  int m = 6;

  // integral of theta(c + b) b^gamma db
  double moment(const std::vector<int>& gamma) const;
};

PoincareBump default_bump(const Cell& cell);

enum class PoincareKind { grad, curl, div, curl2d };

// Regularized Poincare maps applied to a polynomial; the result has degree u.degree + 1.
//   grad  : vector -> scalar   int theta int_0^1 u(a+t(x-a)) . (x-a)
//   curl  : 3D vector -> vector int theta int_0^1 t u(a+t(x-a)) x (x-a)
//   div   : scalar -> vector   int theta int_0^1 t^2 u(a+t(x-a)) (x-a)
//   curl2d: 2D scalar -> vector int theta int_0^1 t u(a+t(x-a)) (-(x2-a2), x1-a1)
Poly apply_poincare(PoincareKind kind, const Poly& u, const PoincareBump& bump);
Poly apply_poincare(PoincareKind kind, const Poly& u);

// theta-weighted mean of a scalar polynomial
double bump_mean(const Poly& u, const PoincareBump& bump);

// Express v (degree <= its own) in a space of possibly lower ambient degree; returns
// relative residual of v outside the space and the coefficients.
double membership_residual(const Poly& v, const PolySpace& space, Vec* coeffs = nullptr);

struct HelmholtzSplit {
  Poly potential;  // phi (grad split) or psi (div split)
  Poly remainder;  // R curl(curl u) or R div(div u)
  Poly reconstruction;
  double residual = 0.0;  // relative L2 mismatch with the input (or its discrete representative)
  double field_error = 0.0;  // for analytic input: ||u - reconstruction||_L2
};

// u = grad R^grad(u - R^curl curl u) + R^curl curl u, for u in Q_p (2D or 3D)
HelmholtzSplit helmholtz_curl(const Poly& u);
// u = curl R^curl(u - R^div div u) + R^div div u, for u in V_p
HelmholtzSplit helmholtz_div(const Poly& u);
// Approximate mode: split the L2 best approximation of u in Q_p (resp. V_p).
HelmholtzSplit helmholtz_curl(const AnalyticField& u, const CellPtr& cell, int p);
HelmholtzSplit helmholtz_div(const AnalyticField& u, const CellPtr& cell, int p);

// Polynomial helpers
Poly grad_poly(const Poly& u);
Poly curl_poly(const Poly& u);
Poly div_poly(const Poly& u);
Poly rot_poly(const Poly& u);
Poly curl2d_poly(const Poly& u);

// Exact-mode identities on random members of the discrete spaces (relative residuals).
std::vector<Check> poincare_identity_checks(int dim, int p, unsigned seed = 1, int samples = 3);
std::vector<Check> helmholtz_checks(int dim, int p, unsigned seed = 1, int samples = 3);

}  // namespace exseq
