#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "exseq/linalg.hpp"

namespace exseq {

class OrthoBasis;
class Cell;
using CellPtr = std::shared_ptr<const Cell>;

struct QuadratureRule {
  Mat points;  // npts x dim
  Vec weights;
  int degree = 0;
};

// Gauss-Jacobi nodes/weights on [-1,1] for weight (1-x)^a (1+x)^b.
void gauss_jacobi(int n, double a, double b, Vec& x, Vec& w);

// Affine embedding x = origin + frame * xi of a sub-cell into its parent.
struct Chart {
  CellPtr sub;
  Mat frame;  // parent dim x sub dim, orthonormal columns
  Vec origin;
  Vec to_parent(const Vec& xi) const { return origin + frame * xi; }
  Mat to_parent_rows(const Mat& xi) const;  // rows are points
};

struct Edge {
  std::array<int, 2> v;  // global orientation: lower index first
  Vec tangent;           // unit, from v[0] to v[1]
  double length = 0;
};

struct Face {
  std::array<int, 3> v;  // sorted vertex ids
  std::array<int, 3> chart_order;  // counterclockwise with respect to normal
  Vec normal;  // outward unit
  Vec t1, t2;  // t1 x t2 = normal
  double area = 0;
};

// Simplex of dimension 1, 2 or 3 embedded isometrically in R^dim.
class Cell : public std::enable_shared_from_this<Cell> {
 public:
  static CellPtr make(const Mat& vertices);  // rows are vertices, (dim+1) x dim
  static CellPtr reference(int dim);         // unit simplex; dim 1 gives (-1,1)
  ~Cell();

  int dim() const { return dim_; }
  int num_vertices() const { return dim_ + 1; }
  Vec vertex(int i) const { return vertices_.row(i).transpose(); }
  const Mat& vertices() const { return vertices_; }
  double measure() const { return measure_; }
  Vec centroid() const { return vertices_.colwise().mean().transpose(); }
  double inradius() const;
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Face>& faces() const { return faces_; }
  Vec outward_normal(int facet) const;  // facet opposite vertex `facet`

  // Largest dihedral (3D) or interior (2D) angle.
  double max_angle() const;
  // pi / max_angle for a 2D cell.
  double s_hat() const;

  QuadratureRule quadrature(int degree) const;

  // Sub-cells with isometric charts: edges as 1D cells [0,L], faces as planar triangles.
  const Chart& edge_chart(int e) const;
  const Chart& face_chart(int f) const;

  const OrthoBasis& basis() const;

  // Affine map from the unit reference simplex.
  Mat from_unit(const Mat& xhat) const;

 private:
  explicit Cell(const Mat& vertices);
  void build_topology();

  int dim_;
  Mat vertices_;
  double measure_ = 0;
  std::vector<Edge> edges_;
  std::vector<Face> faces_;
  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<Chart>> edge_charts_;
  mutable std::vector<std::unique_ptr<Chart>> face_charts_;
  mutable std::unique_ptr<OrthoBasis> basis_;
};

// Gauss rule on the unit simplex of dimension dim (collapsed coordinates).
QuadratureRule unit_simplex_rule(int dim, int degree);

inline constexpr int max_quadrature_degree = 40;

}  // namespace exseq
