#pragma once

#include <memory>
#include <string>

#include "exseq/field.hpp"
#include "exseq/polyspace.hpp"

namespace exseq {

// Quadrature used for integrals involving analytic fields. 1D cells get a
// composite rule whose breakpoints include the midpoint.
QuadratureRule field_rule(const Cell& cell);

// Mass (identity), H1 and H2 Gram matrices of scalar P_n(K) in orthonormal coordinates,
// with spectral data for interpolated norms.
class SobolevGram {
 public:
  SobolevGram(CellPtr cell, int degree);

  const CellPtr& cell() const { return cell_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(A1_.rows()); }
  const Mat& A1() const { return A1_; }
  const Mat& A2() const;

  // H_s for s in [0, 2]; H_0 = mass, H_1 = A1, H_2 = A2.
  Mat H(double s) const;
  // H_s^{-1}
  Mat H_inv(double s) const;

 private:
  void ensure_second() const;
  CellPtr cell_;
  int degree_;
  Mat A1_;
  Mat V1_;
  Vec lam1_;
  mutable Mat A2_, X2_;
  mutable Vec mu2_;
  mutable bool have2_ = false;
};

std::shared_ptr<const SobolevGram> sobolev_gram(const CellPtr& cell, int degree);

// Componentwise interpolated norm of stacked coefficients at the gram's degree.
double fractional_norm(const SobolevGram& g, const Vec& coeffs, double s);
// Discrete dual norm sup_v (e, v)/||v||_{H^s} over the gram's space, given loads b_i = (e, q_i)
// stacked per component.
double dual_norm(const SobolevGram& g, const Vec& loads, double s);

enum class NormKind { L2, H1, H2, Hcurl, Hdiv, H1curl, Hs, Hs_curl, Hs_div };
struct NormSpec {
  NormKind kind = NormKind::L2;
  double s = 0.0;  // for fractional kinds
  int rich_offset = 6;
};
std::string to_string(const NormSpec& n);

// Loads (u, q_i) of a field against the basis of P_n, one column per component.
Mat field_loads(const AnalyticField& u, const Cell& cell, int n);
// Same, for an arbitrary set of field values at the field rule.
Mat values_loads(const Mat& values, const Cell& cell, int n);

// ||u - v|| in the requested norm; v is a polynomial on the same cell.
double error_norm(const AnalyticField& u, const Poly& v, const NormSpec& norm);

struct BestApprox {
  Vec coeffs;  // in space coordinates
  Poly approx;
  double error = 0.0;
};
BestApprox best_approx(const PolySpace& space, const AnalyticField& u, const NormSpec& norm);

// Dual norm of the residual u - v in H~^{-s} (componentwise) on the test space P_P.
double residual_dual_norm(const AnalyticField& u, const Poly& v, double s, int test_degree);

}  // namespace exseq
