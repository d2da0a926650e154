#include "exseq/refsimplex.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "exseq/orthobasis.hpp"

namespace exseq {

namespace {

Eigen::Vector3d v3(const Vec& v) { return Eigen::Vector3d(v(0), v(1), v(2)); }

double simplex_measure(const Mat& vertices) {
  const int d = static_cast<int>(vertices.cols());
  Mat J(d, d);
  for (int i = 0; i < d; ++i) J.col(i) = (vertices.row(i + 1) - vertices.row(0)).transpose();
  double f = 1.0;
  for (int i = 2; i <= d; ++i) f *= i;
  return std::abs(J.determinant()) / f;
}

}  // namespace

Mat Chart::to_parent_rows(const Mat& xi) const {
  Mat x = xi * frame.transpose();
  x.rowwise() += origin.transpose();
  return x;
}

Cell::Cell(const Mat& vertices) : dim_(static_cast<int>(vertices.cols())), vertices_(vertices) {
  if (dim_ < 1 || dim_ > 3) throw std::runtime_error("Cell: dimension must be 1, 2 or 3");
  if (vertices.rows() != dim_ + 1) throw std::runtime_error("Cell: need dim+1 vertices");
  measure_ = simplex_measure(vertices_);
  if (!(measure_ > 0.0)) throw std::runtime_error("Cell: degenerate simplex");
  build_topology();
}

Cell::~Cell() = default;

CellPtr Cell::make(const Mat& vertices) { return CellPtr(new Cell(vertices)); }

CellPtr Cell::reference(int dim) {
  static std::mutex mtx;
  static std::array<CellPtr, 4> refs;
  if (dim < 1 || dim > 3) throw std::runtime_error("Cell::reference: dimension must be 1, 2 or 3");
  std::lock_guard<std::mutex> lock(mtx);
  if (refs[dim]) return refs[dim];
  Mat v;
  if (dim == 1) {
    v.resize(2, 1);
    v << -1.0, 1.0;
  } else if (dim == 2) {
    v.resize(3, 2);
    v << 0, 0, 1, 0, 0, 1;
  } else if (dim == 3) {
    v.resize(4, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
  }
  refs[dim] = make(v);
  return refs[dim];
}

void Cell::build_topology() {
  const int nv = dim_ + 1;
  if (dim_ >= 2) {
    for (int i = 0; i < nv; ++i)
      for (int j = i + 1; j < nv; ++j) {
        Edge e;
        e.v = {i, j};
        Vec d = vertex(j) - vertex(i);
        e.length = d.norm();
        e.tangent = d / e.length;
        edges_.push_back(e);
      }
  }
  if (dim_ == 3) {
    for (int i = 0; i < nv; ++i)
      for (int j = i + 1; j < nv; ++j)
        for (int k = j + 1; k < nv; ++k) {
          const int l = 6 - i - j - k;
          Face f;
          f.v = {i, j, k};
          Eigen::Vector3d a = v3(vertex(j) - vertex(i)), b = v3(vertex(k) - vertex(i));
          Eigen::Vector3d c = a.cross(b);
          f.area = 0.5 * c.norm();
          Eigen::Vector3d n = c.normalized();
          if (n.dot(v3(vertex(l) - vertex(i))) > 0) n = -n;
          f.normal = n;
          if (c.dot(n) > 0)
            f.chart_order = {i, j, k};
          else
            f.chart_order = {i, k, j};
          Eigen::Vector3d t1 = v3(vertex(f.chart_order[1]) - vertex(f.chart_order[0])).normalized();
          f.t1 = t1;
          f.t2 = n.cross(t1);
          faces_.push_back(f);
        }
  }
  edge_charts_.resize(edges_.size());
  face_charts_.resize(faces_.size());
}

double Cell::inradius() const {
  double boundary = 0.0;
  if (dim_ == 1) return 0.5 * measure_;
  if (dim_ == 2) {
    for (const auto& e : edges_) boundary += e.length;
  } else {
    for (const auto& f : faces_) boundary += f.area;
  }
  return dim_ * measure_ / boundary;
}

Vec Cell::outward_normal(int facet) const {
  if (dim_ == 3) {
    for (const auto& f : faces_)
      if (f.v[0] != facet && f.v[1] != facet && f.v[2] != facet) return f.normal;
  } else if (dim_ == 2) {
    int a = (facet + 1) % 3, b = (facet + 2) % 3;
    Vec t = vertex(b) - vertex(a);
    Vec n(2);
    n << t(1), -t(0);
    n.normalize();
    if (n.dot(vertex(facet) - vertex(a)) > 0) n = -n;
    return n;
  } else {
    Vec n(1);
    n(0) = facet == 0 ? (vertex(0)(0) < vertex(1)(0) ? -1.0 : 1.0) : (vertex(1)(0) > vertex(0)(0) ? 1.0 : -1.0);
    return n;
  }
  throw std::runtime_error("outward_normal: bad facet");
}

double Cell::max_angle() const {
  double best = 0.0;
  if (dim_ == 2) {
    for (int i = 0; i < 3; ++i) {
      Vec a = vertex((i + 1) % 3) - vertex(i), b = vertex((i + 2) % 3) - vertex(i);
      best = std::max(best, std::acos(a.dot(b) / (a.norm() * b.norm())));
    }
  } else if (dim_ == 3) {
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        double c = outward_normal(i).dot(outward_normal(j));
        best = std::max(best, std::numbers::pi - std::acos(std::clamp(c, -1.0, 1.0)));
      }
  } else {
    throw std::runtime_error("max_angle: not defined for 1D cells");
  }
  return best;
}

double Cell::s_hat() const {
  if (dim_ != 2) throw std::runtime_error("s_hat: defined for 2D cells");
  return std::numbers::pi / max_angle();
}

Mat Cell::from_unit(const Mat& xhat) const {
  Mat J(dim_, dim_);
  for (int i = 0; i < dim_; ++i) J.col(i) = vertex(i + 1) - vertex(0);
  Mat x = xhat * J.transpose();
  x.rowwise() += vertices_.row(0);
  return x;
}

QuadratureRule Cell::quadrature(int degree) const {
  QuadratureRule u = unit_simplex_rule(dim_, degree);
  QuadratureRule r;
  r.degree = u.degree;
  r.points = from_unit(u.points);
  double f = 1.0;
  for (int i = 2; i <= dim_; ++i) f *= i;
  r.weights = u.weights * (measure_ * f);
  return r;
}

const Chart& Cell::edge_chart(int e) const {
  if (e < 0 || e >= static_cast<int>(edges_.size())) throw std::runtime_error("edge_chart: bad edge index");
  std::lock_guard<std::mutex> lock(mutex_);
  if (!edge_charts_[e]) {
    auto c = std::make_unique<Chart>();
    Mat v(2, 1);
    v << 0.0, edges_[e].length;
    c->sub = Cell::make(v);
    c->frame = edges_[e].tangent;
    c->origin = vertex(edges_[e].v[0]);
    edge_charts_[e] = std::move(c);
  }
  return *edge_charts_[e];
}

const Chart& Cell::face_chart(int fi) const {
  if (fi < 0 || fi >= static_cast<int>(faces_.size())) throw std::runtime_error("face_chart: bad face index");
  std::lock_guard<std::mutex> lock(mutex_);
  if (!face_charts_[fi]) {
    const Face& f = faces_[fi];
    auto c = std::make_unique<Chart>();
    c->origin = vertex(f.chart_order[0]);
    c->frame.resize(3, 2);
    c->frame.col(0) = f.t1;
    c->frame.col(1) = f.t2;
    Mat v(3, 2);
    for (int a = 0; a < 3; ++a) {
      Vec d = vertex(f.chart_order[a]) - c->origin;
      v(a, 0) = d.dot(f.t1);
      v(a, 1) = d.dot(f.t2);
    }
    v(0, 0) = v(0, 1) = v(1, 1) = 0.0;
    c->sub = Cell::make(v);
    face_charts_[fi] = std::move(c);
  }
  return *face_charts_[fi];
}

const OrthoBasis& Cell::basis() const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!basis_) basis_ = std::make_unique<OrthoBasis>(*this);
  return *basis_;
}

}  // namespace exseq
