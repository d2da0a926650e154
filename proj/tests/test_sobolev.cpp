#include <random>

#include "doctest.h"
#include "exseq/poincare.hpp"
#include "exseq/sobolev.hpp"

using namespace exseq;

namespace {

Vec randn(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Vec x(n);
  for (int i = 0; i < n; ++i) x(i) = g(rng);
  return x;
}

Poly zero_poly(const CellPtr& c, int m) { return Poly{c, m, 0, Vec::Zero(m)}; }

}  // namespace

TEST_CASE("integer norms of polynomials agree with quadrature") {
  auto tet = Cell::reference(3);
  const int n = 3;
  Poly u{tet, 1, n, randn(tet->basis().size(n), 1)};
  AnalyticField f = poly_field(u);
  auto r = tet->quadrature(2 * n);
  Mat val = u.eval(r.points), gr = grad_poly(u).eval(r.points);
  const double l2 = std::sqrt(r.weights.dot(val.col(0).cwiseAbs2()));
  const double semi = std::sqrt(r.weights.dot(gr.rowwise().squaredNorm()));
  Poly z = zero_poly(tet, 1);
  CHECK(error_norm(f, z, {NormKind::L2}) == doctest::Approx(l2).epsilon(1e-10));
  CHECK(error_norm(f, z, {NormKind::H1}) == doctest::Approx(std::hypot(l2, semi)).epsilon(1e-10));
  // orthonormal coordinates: the L2 norm is the coefficient norm, H1 the A1 form
  auto g = sobolev_gram(tet, n);
  CHECK(l2 == doctest::Approx(u.coeffs.norm()).epsilon(1e-10));
  CHECK(std::hypot(l2, semi) == doctest::Approx(std::sqrt(u.coeffs.dot(g->A1() * u.coeffs))).epsilon(1e-10));
  CHECK(fractional_norm(*g, u.coeffs, 1.0) == doctest::Approx(std::hypot(l2, semi)).epsilon(1e-10));

  Poly w{tet, 3, n, randn(3 * tet->basis().size(n), 2)};
  Mat wv = w.eval(r.points), cv = curl_poly(w).eval(r.points), dv = div_poly(w).eval(r.points);
  const double wl2 = std::sqrt(r.weights.dot(wv.rowwise().squaredNorm()));
  const double cl2 = std::sqrt(r.weights.dot(cv.rowwise().squaredNorm()));
  const double dl2 = std::sqrt(r.weights.dot(dv.col(0).cwiseAbs2()));
  AnalyticField fw = poly_field(w);
  Poly z3 = zero_poly(tet, 3);
  CHECK(error_norm(fw, z3, {NormKind::Hcurl}) == doctest::Approx(std::hypot(wl2, cl2)).epsilon(1e-10));
  CHECK(error_norm(fw, z3, {NormKind::Hdiv}) == doctest::Approx(std::hypot(wl2, dl2)).epsilon(1e-10));
}

TEST_CASE("interpolated Gram matrices") {
  auto tri = Cell::reference(2);
  auto g = sobolev_gram(tri, 5);
  const int n = g->size();
  CHECK((g->H(0.0) - Mat::Identity(n, n)).norm() < 1e-10);
  CHECK((g->H(1.0) - g->A1()).norm() < 1e-9 * g->A1().norm());
  CHECK((g->H(2.0) - g->A2()).norm() < 1e-8 * g->A2().norm());
  CHECK((g->H(0.7) * g->H_inv(0.7) - Mat::Identity(n, n)).norm() < 1e-8);
  CHECK_THROWS(g->H(2.5));
  Vec x = randn(n, 3);
  double prev = 0.0;
  for (double s = 0.0; s <= 2.0 + 1e-12; s += 0.25) {
    double v = fractional_norm(*g, x, s);
    CHECK(v >= prev * (1 - 1e-12));
    prev = v;
  }
  // dual norm at s = 0 is the Euclidean norm of the loads
  CHECK(dual_norm(*g, x, 0.0) == doctest::Approx(x.norm()));
  CHECK(dual_norm(*g, x, 1.0) <= x.norm() * (1 + 1e-12));
}

TEST_CASE("best approximation is optimal") {
  auto tet = Cell::reference(3);
  AnalyticField u = named_field("u3_entire");
  for (NormSpec ns : {NormSpec{NormKind::L2}, NormSpec{NormKind::Hcurl}, NormSpec{NormKind::H1curl}}) {
    auto Q = build_space(tet, SpaceKind::Q, 2);
    BestApprox b = best_approx(*Q, u, ns);
    CHECK(b.error == doctest::Approx(error_norm(u, b.approx, ns)).epsilon(1e-9));
    for (unsigned k = 0; k < 5; ++k) {
      Vec d = 1e-3 * randn(Q->dim(), 10 + k);
      Poly q{tet, 3, Q->degree, Q->basis * (b.coeffs + d)};
      CHECK(error_norm(u, q, ns) >= b.error);
    }
  }
  // fractional norm: perturbations do not beat the minimizer
  auto W = build_space(tet, SpaceKind::W, 2);
  AnalyticField phi = named_field("phi3_entire");
  NormSpec hs{NormKind::Hs, 1.5, 4};
  BestApprox b = best_approx(*W, phi, hs);
  for (unsigned k = 0; k < 3; ++k) {
    Vec d = 1e-3 * randn(W->dim(), 20 + k);
    Poly q{tet, 1, W->degree, W->basis * (b.coeffs + d)};
    CHECK(error_norm(phi, q, hs) >= b.error * (1 - 1e-9));
  }
}

TEST_CASE("members of the space are reproduced") {
  auto tri = Cell::reference(2);
  auto Q = build_space(tri, SpaceKind::Q, 3);
  Poly q{tri, 2, Q->degree, Q->basis * randn(Q->dim(), 4)};
  AnalyticField f = poly_field(q);
  for (NormSpec ns : {NormSpec{NormKind::L2}, NormSpec{NormKind::Hs_curl, 0.5, 4}}) {
    BestApprox b = best_approx(*Q, f, ns);
    CHECK(b.error < 1e-10 * q.coeffs.norm());
  }
  CHECK(residual_dual_norm(f, q, 1.0, 8) < 1e-12);
}

TEST_CASE("field jets match finite differences") {
  Mat pts(2, 3);
  pts << 0.2, 0.3, 0.1, 0.15, 0.25, 0.4;
  const double h = 1e-5;
  for (const std::string name : {"phi3_entire", "phi3_rpow", "u3_entire", "u3_rpow@2.5"}) {
    AnalyticField f = named_field(name);
    FieldJets j = f.eval(pts, 2);
    for (int l = 0; l < 3; ++l) {
      Mat a = pts, b = pts;
      a.col(l).array() += h;
      b.col(l).array() -= h;
      FieldJets ja = f.eval(a, 1), jb = f.eval(b, 1);
      Mat dval = (ja.val - jb.val) / (2 * h);
      Mat djac = (ja.jac - jb.jac) / (2 * h);
      for (int c = 0; c < f.value_dim(); ++c) {
        CHECK((dval.col(c) - j.jac.col(c * 3 + l)).norm() < 1e-6 * (1 + j.jac.norm()));
        for (int k = 0; k < 3; ++k)
          CHECK((djac.col(c * 3 + k) - j.hess.col((c * 3 + k) * 3 + l)).norm() < 1e-5 * (1 + j.hess.norm()));
      }
    }
  }
}

TEST_CASE("named fields and exponent suffix") {
  CHECK(named_field("phi3_entire").entire());
  AnalyticField f = named_field("phi3_rpow@2.5");
  CHECK(f.name() == "phi3_rpow@2.5");
  CHECK(f.smoothness() == doctest::Approx(4.0));
  CHECK(named_field("u2_rpow@1").smoothness() == doctest::Approx(2.0));
  CHECK(named_field("f1_abs@1").smoothness() == doctest::Approx(1.5));
  CHECK_THROWS(named_field("nope"));
  CHECK_THROWS(named_field("phi3_entire@2"));
  for (int d : {1, 2, 3})
    for (auto& n : field_names(d, d == 1 ? 1 : d)) CHECK(named_field(n).dim() == d);
}

TEST_CASE("derived fields") {
  AnalyticField phi = named_field("phi3_entire");
  AnalyticField g = grad_of(phi);
  AnalyticField cg = curl_of(g);
  Mat pts(3, 3);
  pts << 0.1, 0.2, 0.3, 0.3, 0.1, 0.2, 0.25, 0.25, 0.25;
  CHECK(cg.values(pts).norm() < 1e-12 * (1 + g.values(pts).norm()));
  AnalyticField u = named_field("u3_entire");
  CHECK(div_of(curl_of(u)).values(pts).norm() < 1e-11 * (1 + u.values(pts).norm()));
  AnalyticField diff = sum_of(u, u, -1.0);
  CHECK(diff.values(pts).norm() == 0.0);
}
