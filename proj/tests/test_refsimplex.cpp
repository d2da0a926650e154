#include <cmath>

#include "doctest.h"
#include "exseq/orthobasis.hpp"
#include "exseq/refsimplex.hpp"

using namespace exseq;

namespace {

double fact(int n) { return std::tgamma(n + 1.0); }

// integral of x^a y^b z^c over the unit tetrahedron
double tet_monomial(int a, int b, int c) { return fact(a) * fact(b) * fact(c) / fact(a + b + c + 3); }
double tri_monomial(int a, int b) { return fact(a) * fact(b) / fact(a + b + 2); }

}  // namespace

TEST_CASE("reference cells: measures and vertices") {
  CHECK(Cell::reference(3)->measure() == doctest::Approx(1.0 / 6.0));
  CHECK(Cell::reference(2)->measure() == doctest::Approx(0.5));
  CHECK(Cell::reference(1)->measure() == doctest::Approx(2.0));
  CHECK(Cell::reference(1)->vertex(0)(0) == -1.0);
  CHECK(Cell::reference(3).get() == Cell::reference(3).get());
  CHECK(Cell::reference(3)->edges().size() == 6);
  CHECK(Cell::reference(3)->faces().size() == 4);
}

TEST_CASE("quadrature integrates monomials exactly") {
  auto tet = Cell::reference(3);
  for (int deg : {0, 3, 7, 12}) {
    QuadratureRule r = tet->quadrature(deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b) {
        int c = deg - a - b;
        double q = 0.0;
        for (int i = 0; i < r.weights.size(); ++i)
          q += r.weights(i) * std::pow(r.points(i, 0), a) * std::pow(r.points(i, 1), b) * std::pow(r.points(i, 2), c);
        CHECK(q == doctest::Approx(tet_monomial(a, b, c)).epsilon(1e-12));
      }
  }
  auto tri = Cell::reference(2);
  QuadratureRule r = tri->quadrature(9);
  for (int a = 0; a <= 9; ++a) {
    int b = 9 - a;
    double q = 0.0;
    for (int i = 0; i < r.weights.size(); ++i) q += r.weights(i) * std::pow(r.points(i, 0), a) * std::pow(r.points(i, 1), b);
    CHECK(q == doctest::Approx(tri_monomial(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("gauss_jacobi weights integrate the weight function") {
  Vec x, w;
  for (double a : {0.0, 1.0, 2.0}) {
    gauss_jacobi(8, a, 0.0, x, w);
    // int_{-1}^{1} (1-x)^a dx = 2^{a+1}/(a+1)
    CHECK(w.sum() == doctest::Approx(std::pow(2.0, a + 1) / (a + 1)));
    // first moment with the same weight, exact for degree 1
    double m1 = 0.0;
    for (int i = 0; i < x.size(); ++i) m1 += w(i) * x(i);
    const double exact = std::pow(2.0, a + 1) / (a + 1) - std::pow(2.0, a + 2) / (a + 2);
    CHECK(m1 == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("edge and face orientation") {
  auto tet = Cell::reference(3);
  for (const auto& e : tet->edges()) {
    CHECK(e.v[0] < e.v[1]);
    Vec d = tet->vertex(e.v[1]) - tet->vertex(e.v[0]);
    CHECK((d.normalized() - e.tangent).norm() < 1e-14);
    CHECK(e.length == doctest::Approx(d.norm()));
  }
  const Vec c = tet->centroid();
  for (const auto& f : tet->faces()) {
    Vec fc = (tet->vertex(f.v[0]) + tet->vertex(f.v[1]) + tet->vertex(f.v[2])) / 3.0;
    CHECK(f.normal.dot(fc - c) > 0.0);
    Eigen::Vector3d cr = Eigen::Vector3d(f.t1).cross(Eigen::Vector3d(f.t2));
    CHECK((cr - Eigen::Vector3d(f.normal)).norm() < 1e-14);
    CHECK(f.normal.norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("sub-cell charts are isometric") {
  auto tet = Cell::reference(3);
  for (int f = 0; f < 4; ++f) {
    const Chart& ch = tet->face_chart(f);
    CHECK((ch.frame.transpose() * ch.frame - Mat::Identity(2, 2)).norm() < 1e-14);
    CHECK(ch.sub->measure() == doctest::Approx(tet->faces()[f].area));
    // the chart maps sub-cell vertices onto the face vertices
    for (int k = 0; k < 3; ++k) {
      Vec x = ch.to_parent(ch.sub->vertex(k));
      double best = 1e9;
      for (int v : tet->faces()[f].v) best = std::min(best, (x - tet->vertex(v)).norm());
      CHECK(best < 1e-14);
    }
  }
  for (int e = 0; e < 6; ++e) {
    const Chart& ch = tet->edge_chart(e);
    CHECK(ch.sub->measure() == doctest::Approx(tet->edges()[e].length));
  }
}

TEST_CASE("angles of the reference triangle") {
  auto tri = Cell::reference(2);
  CHECK(tri->max_angle() == doctest::Approx(M_PI / 2));
  CHECK(tri->s_hat() == doctest::Approx(2.0));
  // the unit tetrahedron has right dihedral angles at the origin edges
  CHECK(Cell::reference(3)->max_angle() == doctest::Approx(M_PI / 2));
}

TEST_CASE("orthonormal master basis") {
  for (int d : {1, 2, 3}) {
    auto cell = Cell::reference(d);
    const int n = d == 3 ? 6 : 10;
    QuadratureRule r = cell->quadrature(2 * n);
    Mat V = cell->basis().values(r.points, n);
    Mat G = V.transpose() * r.weights.asDiagonal() * V;
    CHECK((G - Mat::Identity(G.rows(), G.cols())).norm() < 1e-11);
    CHECK(V.cols() == poly_dim(d, n));
  }
}

TEST_CASE("derivative matrices match finite differences") {
  auto tet = Cell::reference(3);
  const int n = 4;
  Mat x(1, 3);
  x << 0.21, 0.17, 0.33;
  const double h = 1e-6;
  Mat v0 = tet->basis().values(x, n);
  for (int l = 0; l < 3; ++l) {
    Mat xp = x, xm = x;
    xp(0, l) += h;
    xm(0, l) -= h;
    Mat fd = (tet->basis().values(xp, n) - tet->basis().values(xm, n)) / (2 * h);
    // derivative of basis function j has coefficients deriv.col(j)
    Mat ex = v0 * tet->basis().deriv(l, n);
    CHECK((fd - ex).norm() < 1e-6 * std::max(1.0, ex.norm()));
  }
}

TEST_CASE("skewed cells are accepted") {
  Mat v(4, 3);
  v << 0, 0, 0, 2, 0.1, 0, 0.3, 1.5, 0, 0.2, 0.4, 0.9;
  auto c = Cell::make(v);
  Eigen::Matrix3d e;
  e << v.row(1) - v.row(0), v.row(2) - v.row(0), v.row(3) - v.row(0);
  CHECK(c->measure() == doctest::Approx(std::abs(e.determinant()) / 6.0));
  CHECK(c->inradius() > 0.0);
  Mat bad(4, 3);
  bad << 0, 0, 0, 1, 0, 0, 2, 0, 0, 3, 0, 0;
  CHECK_THROWS(Cell::make(bad));
}
