#pragma once

#include <memory>
#include <string>
#include <vector>

#include "exseq/orthobasis.hpp"
#include "exseq/refsimplex.hpp"

namespace exseq {

// Spaces of the degree-p complex. W means W_{p+1}, L2 means W_p.
enum class SpaceKind {
  W,
  Q,
  V,
  L2,
  W_ring,
  Q_ring,
  V_ring,
  W_aver,
  Q_perp_ring,
  V_perp_ring,  // bubbles of V_p orthogonal to curl of the Q bubbles (3D)
  trace_W,
  trace_Q,
  trace_V,
  Q_ring_edgezero_2d,
};

std::string to_string(SpaceKind k);
SpaceKind space_kind_from_string(const std::string& s);

enum class SubKind { edge, face };

// Subspace of P_N(K)^m stored through L2-orthonormal coefficient columns with
// respect to the cell's orthonormal basis (component-major stacking).
struct PolySpace {
  CellPtr cell;
  SpaceKind kind = SpaceKind::W;
  int p = 0;
  int value_dim = 1;
  int degree = 0;  // ambient polynomial degree N
  Mat basis;       // (value_dim * size(N)) x dim

  int dim() const { return static_cast<int>(basis.cols()); }
  int scalar_size() const { return cell->basis().size(degree); }
  int ambient_size() const { return value_dim * scalar_size(); }
  // orthogonal projector onto the space in ambient coordinates
  Mat projector() const { return basis * basis.transpose(); }
};
using SpacePtr = std::shared_ptr<const PolySpace>;

// A polynomial (possibly vector valued) in ambient coordinates.
struct Poly {
  CellPtr cell;
  int value_dim = 1;
  int degree = 0;
  Vec coeffs;

  Mat eval(const Mat& pts) const;  // npts x value_dim
  Poly raised(int n) const;        // same function, coefficients at degree n >= degree
};

// Build or fetch (cached) a space. Throws for kinds not defined on the cell.
SpacePtr build_space(const CellPtr& cell, SpaceKind kind, int p);

// Image of a space under the natural trace onto a sub-cell (scalar, tangential or normal).
SpacePtr trace_space(const PolySpace& space, SubKind sub, int index);

// Closed-form dimension counts.
int closed_form_dim(int cell_dim, SpaceKind kind, int p);

// ---- ambient operator matrices (exact, in orthonormal-basis coordinates) ----
namespace ambient {

Mat grad(const Cell& c, int n);    // (d*s) x s
Mat curl(const Cell& c, int n);    // 3D: 3s x 3s
Mat div(const Cell& c, int n);     // s x (d*s)
Mat rot(const Cell& c, int n);     // 2D scalar curl (d2 u, -d1 u): 2s x s
Mat curl2d(const Cell& c, int n);  // 2D vector curl d1 F2 - d2 F1: s x 2s
// raise coefficients of degree n to degree big (zero padding per component)
Mat raise(const Cell& c, int m, int n, int big);
// truncate degree big to degree n (L2 projection onto P_n)
Mat truncate(const Cell& c, int m, int big, int n);

const Chart& chart(const Cell& c, SubKind sub, int index);
Mat trace_scalar(const Cell& c, SubKind sub, int index, int n);
// tangential trace: face -> components along (t1,t2); edge -> t . u
Mat trace_tangential(const Cell& c, SubKind sub, int index, int n);
// normal trace: 3D face, or 2D edge
Mat trace_normal(const Cell& c, SubKind sub, int index, int n);
// n x u on a face, in the face frame
Mat trace_gamma(const Cell& c, int face, int n);
// evaluation at vertices (scalar): (d+1) x s
Mat vertex_eval(const Cell& c, int n);
// mean value functional row: 1 x s
Mat integral_row(const Cell& c, int n);
// number of facets of the relevant kind
int num_sub(const Cell& c, SubKind sub);

}  // namespace ambient

}  // namespace exseq
