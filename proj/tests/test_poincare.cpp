#include <random>

#include "doctest.h"
#include "exseq/poincare.hpp"

using namespace exseq;

namespace {

Poly random_poly(const CellPtr& c, int m, int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Vec x(m * c->basis().size(n));
  for (int i = 0; i < x.size(); ++i) x(i) = g(rng);
  return Poly{c, m, n, x};
}

Mat sample_points(const Cell& c) {
  Mat bary(4, c.num_vertices());
  bary.setConstant(1.0);
  for (int i = 0; i < 4; ++i) bary(i, i % c.num_vertices()) += 1.5 + i;
  for (int i = 0; i < 4; ++i) bary.row(i) /= bary.row(i).sum();
  return bary * c.vertices();
}

// midpoint rule on a cube grid covering the unit ball
double grid_moment(int m, const std::vector<int>& gamma, int n) {
  const double h = 2.0 / n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double x = -1 + (i + 0.5) * h, y = -1 + (j + 0.5) * h, z = -1 + (k + 0.5) * h;
        double r2 = x * x + y * y + z * z;
        if (r2 >= 1.0) continue;
        double w = std::pow(1 - r2, m);
        den += w;
        num += w * std::pow(x, gamma[0]) * std::pow(y, gamma[1]) * std::pow(z, gamma[2]);
      }
  return num / den;
}

}  // namespace

TEST_CASE("bump moments") {
  PoincareBump b;
  b.center = Vec::Zero(3);
  b.radius = 1.0;
  b.m = 6;
  CHECK(b.moment({0, 0, 0}) == doctest::Approx(1.0));
  CHECK(b.moment({1, 0, 0}) == 0.0);
  CHECK(b.moment({2, 1, 0}) == 0.0);
  for (std::vector<int> g : {std::vector<int>{2, 0, 0}, {2, 2, 0}, {4, 0, 2}, {2, 2, 2}})
    CHECK(b.moment(g) == doctest::Approx(grid_moment(6, g, 120)).epsilon(2e-3));
  // scaling with the radius
  PoincareBump b2 = b;
  b2.radius = 0.5;
  CHECK(b2.moment({2, 2, 0}) == doctest::Approx(b.moment({2, 2, 0}) / 16.0));
}

TEST_CASE("default bump sits inside the cell") {
  auto tet = Cell::reference(3);
  PoincareBump b = default_bump(*tet);
  CHECK(b.radius < tet->inradius());
  // the constant basis function is 1/sqrt|K|
  Poly one{tet, 1, 0, Vec::Constant(1, std::sqrt(tet->measure()))};
  CHECK(bump_mean(one, b) == doctest::Approx(1.0));
}

TEST_CASE("right inverses of the derivatives") {
  auto tet = Cell::reference(3);
  Mat pts = sample_points(*tet);
  // constant vector field: the potential has that gradient
  Poly c{tet, 3, 0, Vec(3)};
  c.coeffs << 1.0, -2.0, 0.5;
  Poly phi = apply_poincare(PoincareKind::grad, c);
  CHECK((grad_poly(phi).eval(pts) - c.eval(pts)).norm() < 1e-12);
  CHECK(std::abs(bump_mean(phi, default_bump(*tet))) < 1e-12);

  // curl R u = u on divergence-free u
  Poly w = random_poly(tet, 3, 3, 1);
  Poly u = curl_poly(w);
  Poly R = apply_poincare(PoincareKind::curl, u);
  CHECK(R.degree == u.degree + 1);
  CHECK((curl_poly(R).eval(pts) - u.eval(pts)).norm() < 1e-10 * u.eval(pts).norm());
  // curl-free u: grad R u = u
  Poly s = random_poly(tet, 1, 4, 2);
  Poly g = grad_poly(s);
  CHECK((grad_poly(apply_poincare(PoincareKind::grad, g)).eval(pts) - g.eval(pts)).norm() < 1e-10 * g.eval(pts).norm());
  // div R f = f for every f
  Poly f = random_poly(tet, 1, 3, 3);
  CHECK((div_poly(apply_poincare(PoincareKind::div, f)).eval(pts) - f.eval(pts)).norm() < 1e-10 * f.eval(pts).norm());

  auto tri = Cell::reference(2);
  Mat p2 = sample_points(*tri);
  Poly f2 = random_poly(tri, 1, 3, 4);
  Poly r2 = apply_poincare(PoincareKind::curl2d, f2);
  CHECK((curl2d_poly(r2).eval(p2) - f2.eval(p2)).norm() < 1e-10 * f2.eval(p2).norm());
}

TEST_CASE("Poincare maps send the discrete spaces into the previous ones") {
  auto tet = Cell::reference(3);
  for (int p = 0; p <= 3; ++p) {
    auto Q = build_space(tet, SpaceKind::Q, p);
    auto V = build_space(tet, SpaceKind::V, p);
    auto L = build_space(tet, SpaceKind::L2, p);
    auto W = build_space(tet, SpaceKind::W, p);
    std::mt19937 rng(p);
    std::normal_distribution<double> g;
    auto member = [&](const SpacePtr& sp) {
      Vec a(sp->dim());
      for (int i = 0; i < a.size(); ++i) a(i) = g(rng);
      return Poly{tet, sp->value_dim, sp->degree, sp->basis * a};
    };
    CHECK(membership_residual(apply_poincare(PoincareKind::grad, member(Q)), *W) < 1e-10);
    CHECK(membership_residual(apply_poincare(PoincareKind::curl, member(V)), *Q) < 1e-10);
    CHECK(membership_residual(apply_poincare(PoincareKind::div, member(L)), *V) < 1e-10);
  }
}

TEST_CASE("membership residual") {
  auto tet = Cell::reference(3);
  auto Q = build_space(tet, SpaceKind::Q, 1);
  Vec a;
  Poly q{tet, 3, Q->degree, Q->basis.col(0) * 2.0};
  CHECK(membership_residual(q, *Q, &a) < 1e-14);
  CHECK(a(0) == doctest::Approx(2.0));
  Poly outside = random_poly(tet, 3, 4, 8);
  CHECK(membership_residual(outside, *Q) > 0.5);
  CHECK(membership_residual(Poly{tet, 3, 0, Vec::Zero(3)}, *Q) == 0.0);
}

TEST_CASE("identity and Helmholtz checks") {
  for (int dim : {2, 3})
    for (int p = 0; p <= 4; ++p) {
      for (const auto& c : poincare_identity_checks(dim, p)) {
        CAPTURE(c.name);
        CHECK(c.pass);
        CHECK(c.tolerance <= 1e-10);
      }
      for (const auto& c : helmholtz_checks(dim, p)) {
        CAPTURE(c.name);
        CHECK(c.pass);
      }
    }
}

TEST_CASE("Helmholtz split reconstructs the input") {
  auto tet = Cell::reference(3);
  auto Q = build_space(tet, SpaceKind::Q, 3);
  Vec a = Vec::LinSpaced(Q->dim(), -1, 1);
  Poly u{tet, 3, Q->degree, Q->basis * a};
  HelmholtzSplit h = helmholtz_curl(u);
  Mat pts = sample_points(*tet);
  CHECK(h.residual < 1e-10);
  CHECK((h.reconstruction.eval(pts) - u.eval(pts)).norm() < 1e-10 * u.eval(pts).norm());
  // curl of the remainder is curl u
  CHECK((curl_poly(h.remainder).eval(pts) - curl_poly(u).eval(pts)).norm() < 1e-9 * (1 + curl_poly(u).eval(pts).norm()));

  HelmholtzSplit hf = helmholtz_curl(named_field("u3_entire"), tet, 4);
  CHECK(hf.residual < 1e-9);
  CHECK(hf.field_error < 0.5);
}
