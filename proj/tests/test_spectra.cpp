#include <random>

#include "doctest.h"
#include "exseq/poincare.hpp"
#include "exseq/spectra.hpp"

using namespace exseq;

namespace {

Vec randn(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Vec x(n);
  for (int i = 0; i < n; ++i) x(i) = g(rng);
  return x;
}

// min ||Du|| / ||u|| from quadrature Gram matrices of the parent space, constraint
// imposed through the null space of the quadrature moments against the test gradients/curls
double brute_force_min_ratio(FriedrichsCase fc, int p) {
  const bool two = fc == FriedrichsCase::curl2d_full || fc == FriedrichsCase::curl2d_bubble;
  const bool is_div = fc == FriedrichsCase::div3d_full || fc == FriedrichsCase::div3d_bubble;
  const bool bubble = fc == FriedrichsCase::curl2d_bubble || fc == FriedrichsCase::curl3d_bubble ||
                      fc == FriedrichsCase::div3d_bubble;
  const int d = two ? 2 : 3;
  auto cell = Cell::reference(d);
  SpaceKind parent = is_div ? (bubble ? SpaceKind::V_ring : SpaceKind::V) : (bubble ? SpaceKind::Q_ring : SpaceKind::Q);
  SpaceKind testk = is_div ? (bubble ? SpaceKind::Q_perp_ring : SpaceKind::Q) : (bubble ? SpaceKind::W_ring : SpaceKind::W);
  auto P = build_space(cell, parent, p);
  auto T = build_space(cell, testk, p);
  if (P->dim() == 0) return INFINITY;
  QuadratureRule r = cell->quadrature(2 * P->degree + 2);
  const int np = static_cast<int>(r.points.rows());
  auto stacked = [&](const Poly& u) {
    Mat v = u.eval(r.points);
    return Vec(Eigen::Map<Vec>(v.data(), v.size()));
  };
  Vec wts(np * d);
  for (int c = 0; c < d; ++c) wts.segment(c * np, np) = r.weights;
  const int dd = is_div ? 1 : (two ? 1 : 3);
  Vec wD(np * dd);
  for (int c = 0; c < dd; ++c) wD.segment(c * np, np) = r.weights;
  Mat U(np * d, P->dim()), DU(np * dd, P->dim()), G(np * d, T->dim());
  for (int j = 0; j < P->dim(); ++j) {
    Poly u{cell, d, P->degree, P->basis.col(j)};
    U.col(j) = stacked(u);
    DU.col(j) = stacked(is_div ? div_poly(u) : (two ? curl2d_poly(u) : curl_poly(u)));
  }
  for (int j = 0; j < T->dim(); ++j) {
    Poly t{cell, T->value_dim, T->degree, T->basis.col(j)};
    G.col(j) = stacked(is_div ? curl_poly(t) : grad_poly(t));
  }
  Mat Y = Mat::Identity(P->dim(), P->dim());
  if (T->dim() > 0) {
    Mat C = G.transpose() * wts.asDiagonal() * U;
    Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullV);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-10 * svd.singularValues()(0)) ++rank;
    Y = svd.matrixV().rightCols(P->dim() - rank);
  }
  if (Y.cols() == 0) return INFINITY;
  Mat M = Y.transpose() * U.transpose() * wts.asDiagonal() * U * Y;
  Mat K = Y.transpose() * DU.transpose() * wD.asDiagonal() * DU * Y;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(K, M);
  return std::sqrt(std::max(es.eigenvalues()(0), 0.0));
}

}  // namespace

TEST_CASE("lowest order constants in closed form") {
  // rigid rotations about the centroid (curl), dilation about it (div)
  auto c2 = friedrichs_constant(FriedrichsCase::curl2d_full, 0);
  CHECK(c2.dim == 1);
  CHECK(c2.min_ratio == doctest::Approx(6.0).epsilon(1e-10));
  auto c3 = friedrichs_constant(FriedrichsCase::curl3d_full, 0);
  CHECK(c3.dim == 3);
  CHECK(c3.min_ratio == doctest::Approx(std::sqrt(40.0)).epsilon(1e-10));
  auto d3 = friedrichs_constant(FriedrichsCase::div3d_full, 0);
  CHECK(d3.dim == 1);
  CHECK(d3.min_ratio == doctest::Approx(std::sqrt(80.0)).epsilon(1e-10));
  CHECK(d3.constant == doctest::Approx(1.0 / std::sqrt(80.0)));
  auto b = friedrichs_constant(FriedrichsCase::curl3d_bubble, 0);
  CHECK(b.empty);
  CHECK(b.constant == 0.0);
}

TEST_CASE("Friedrichs constants agree with a quadrature oracle") {
  for (auto fc : all_friedrichs_cases())
    for (int p = 0; p <= 4; ++p) {
      CAPTURE(to_string(fc));
      CAPTURE(p);
      auto r = friedrichs_constant(fc, p);
      double ref = brute_force_min_ratio(fc, p);
      if (r.empty) {
        CHECK(std::isinf(ref));
        continue;
      }
      CHECK(r.min_ratio == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("constants stay in a bounded window") {
  for (auto fc : all_friedrichs_cases()) {
    double lo = INFINITY, hi = 0.0;
    for (int p = 0; p <= 6; ++p) {
      auto r = friedrichs_constant(fc, p);
      if (r.empty) continue;
      CHECK(r.constant > 0.0);
      lo = std::min(lo, r.constant);
      hi = std::max(hi, r.constant);
    }
    CAPTURE(to_string(fc));
    CHECK(hi / lo <= 2.0);
  }
}

TEST_CASE("constrained subspaces") {
  for (auto fc : all_friedrichs_cases()) {
    auto cs = constrained_subspace(fc, 3);
    CHECK(cs.basis_residual() < 1e-11);
    CHECK((cs.basis.transpose() * cs.basis - Mat::Identity(cs.dim(), cs.dim())).norm() < 1e-11);
  }
  // a gradient violates the curl constraint
  auto cs = constrained_subspace(FriedrichsCase::curl3d_full, 2);
  auto tet = Cell::reference(3);
  Poly phi{tet, 1, 3, randn(tet->basis().size(3), 1)};
  CHECK(cs.residual(grad_poly(phi).coeffs) > 1e-2);
  CHECK(friedrichs_case_from_string("div3d_bubble") == FriedrichsCase::div3d_bubble);
  CHECK_THROWS(friedrichs_case_from_string("curl1d_full"));
}

TEST_CASE("discrete curl lifting") {
  auto tet = Cell::reference(3);
  for (int p = 1; p <= 4; ++p) {
    auto W = build_space(tet, SpaceKind::W, p);
    auto Q = build_space(tet, SpaceKind::Q, p);
    // a gradient has a curl-free lifting
    Poly phi{tet, 1, W->degree, W->basis * randn(W->dim(), p)};
    Poly g = grad_poly(phi);
    auto lg = discrete_lifting_curl(p, g);
    CHECK(lg.energy < 1e-9 * g.coeffs.norm());
    CHECK(lg.trace_residual < 1e-10);
    CHECK(lg.orthogonality_residual < 1e-10);
    CHECK(lg.multiplier_norm < 1e-10);

    Poly w{tet, 3, Q->degree, Q->basis * randn(Q->dim(), 10 + p)};
    auto lw = discrete_lifting_curl(p, w);
    CHECK(lw.trace_residual < 1e-10);
    CHECK(lw.energy <= lw.source_energy * (1 + 1e-10));
    CHECK(lw.multiplier_norm < 1e-10);

    auto z = discrete_lifting_curl(p, Poly{tet, 3, Q->degree, Vec::Zero(Q->ambient_size())});
    CHECK(z.lifting.coeffs.norm() == 0.0);
  }
}

TEST_CASE("discrete div lifting") {
  auto tet = Cell::reference(3);
  QuadratureRule r = tet->quadrature(12);
  for (int p = 1; p <= 4; ++p) {
    auto V = build_space(tet, SpaceKind::V, p);
    Poly w{tet, 3, V->degree, V->basis * randn(V->dim(), 20 + p)};
    auto l = discrete_lifting_div(p, w);
    CHECK(l.trace_residual < 1e-10);
    CHECK(l.orthogonality_residual < 1e-10);
    CHECK(l.multiplier_norm < 1e-10);
    CHECK(l.energy <= l.source_energy * (1 + 1e-10));
    // same normal traces, same total divergence
    double a = r.weights.dot(div_poly(l.lifting).eval(r.points).col(0));
    double b = r.weights.dot(div_poly(w).eval(r.points).col(0));
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
  }
}

TEST_CASE("trace norm through discrete liftings") {
  auto tet = Cell::reference(3);
  const int p = 2;
  auto Q = build_space(tet, SpaceKind::Q, p);
  CHECK(x_minus_half_norm(p, Poly{tet, 3, Q->degree, Vec::Zero(Q->ambient_size())}, p) == 0.0);
  Poly w{tet, 3, Q->degree, Q->basis * randn(Q->dim(), 4)};
  const double own = std::hypot(w.coeffs.norm(), curl_poly(w).coeffs.norm());
  const double a = x_minus_half_norm(p, w, p);
  const double b = x_minus_half_norm(p, w, p + 2);
  CHECK(a > 0.0);
  CHECK(a <= own * (1 + 1e-10));
  CHECK(b <= a * (1 + 1e-10));
  CHECK_THROWS(x_minus_half_norm(p, w, p - 1));
}
