#include <functional>
#include <random>

#include "doctest.h"
#include "exseq/polyspace.hpp"
#include "exseq/report.hpp"
#include "json.hpp"

using namespace exseq;

namespace {

Mat random_points(const Cell& c, int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::gamma_distribution<double> g(1.0, 1.0);
  Mat bary(n, c.num_vertices());
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int k = 0; k < c.num_vertices(); ++k) s += (bary(i, k) = g(rng));
    bary.row(i) /= s;
  }
  return bary * c.vertices();
}

// values of the space basis at points, components stacked in rows
Mat sampled(const PolySpace& sp, const Mat& pts) {
  Mat V = sp.cell->basis().values(pts, sp.degree);
  const int s = static_cast<int>(V.cols()), np = static_cast<int>(pts.rows());
  Mat out(np * sp.value_dim, sp.dim());
  for (int c = 0; c < sp.value_dim; ++c) out.middleRows(c * np, np) = V * sp.basis.middleRows(c * s, s);
  return out;
}

double mono(const Mat& pts, int i, const std::vector<int>& e) {
  double v = 1.0;
  for (std::size_t l = 0; l < e.size(); ++l) v *= std::pow(pts(i, l), e[l]);
  return v;
}

// Generators of the classical spaces from monomials:
//   Q: P_p^d + (x cross / x-perp) homogeneous P_p ; V: P_p^d + x homogeneous P_p
Mat generators(int d, SpaceKind kind, int p, const Mat& pts) {
  const int np = static_cast<int>(pts.rows());
  std::vector<Vec> cols;
  auto all = monomial_exponents(d, p);
  auto push = [&](const std::vector<std::function<double(int)>>& comp) {
    Vec v(np * comp.size());
    for (std::size_t c = 0; c < comp.size(); ++c)
      for (int i = 0; i < np; ++i) v(c * np + i) = comp[c](i);
    cols.push_back(v);
  };
  auto zero = [](int) { return 0.0; };
  if (kind == SpaceKind::W || kind == SpaceKind::L2) {
    int deg = kind == SpaceKind::W ? p + 1 : p;
    for (auto& e : monomial_exponents(d, deg)) push({[&, e](int i) { return mono(pts, i, e); }});
  } else {
    for (auto& e : all)
      for (int c = 0; c < d; ++c) {
        std::vector<std::function<double(int)>> comp(d, zero);
        comp[c] = [&, e](int i) { return mono(pts, i, e); };
        push(comp);
      }
    for (auto& e : all) {
      int deg = 0;
      for (int x : e) deg += x;
      if (deg != p) continue;
      auto m = [&, e](int i) { return mono(pts, i, e); };
      if (kind == SpaceKind::V) {
        std::vector<std::function<double(int)>> comp;
        for (int c = 0; c < d; ++c) comp.push_back([&, m, c](int i) { return pts(i, c) * m(i); });
        push(comp);
      } else if (d == 2) {
        push({[&, m](int i) { return -pts(i, 1) * m(i); }, [&, m](int i) { return pts(i, 0) * m(i); }});
      } else {
        // x cross (m e_k)
        for (int k = 0; k < 3; ++k) {
          std::vector<std::function<double(int)>> comp(3, zero);
          int a = (k + 1) % 3, b = (k + 2) % 3;
          // (x cross e_k)_a = x_b ... sign per Levi-Civita
          comp[a] = [&, m, b](int i) { return pts(i, b) * m(i); };
          comp[b] = [&, m, a](int i) { return -pts(i, a) * m(i); };
          push(comp);
        }
      }
    }
  }
  Mat G(np * (kind == SpaceKind::W || kind == SpaceKind::L2 ? 1 : d), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) G.col(j) = cols[j];
  return G;
}

}  // namespace

TEST_CASE("dimension counts") {
  CHECK(poly_dim(3, 2) == 10);
  CHECK(poly_dim(2, 3) == 10);
  CHECK(poly_dim(1, 5) == 6);
  CHECK(homogeneous_dim(3, 2) == 6);
  auto tet = Cell::reference(3);
  auto tri = Cell::reference(2);
  for (int p = 0; p <= 5; ++p) {
    for (auto k : {SpaceKind::W, SpaceKind::Q, SpaceKind::V, SpaceKind::L2, SpaceKind::W_ring, SpaceKind::Q_ring,
                   SpaceKind::V_ring, SpaceKind::W_aver, SpaceKind::Q_perp_ring, SpaceKind::V_perp_ring})
      CHECK(build_space(tet, k, p)->dim() == closed_form_dim(3, k, p));
    for (auto k : {SpaceKind::W, SpaceKind::Q, SpaceKind::V, SpaceKind::W_ring, SpaceKind::Q_ring, SpaceKind::V_ring,
                   SpaceKind::W_aver, SpaceKind::Q_perp_ring})
      CHECK(build_space(tri, k, p)->dim() == closed_form_dim(2, k, p));
  }
  // hand counts
  CHECK(build_space(tet, SpaceKind::Q, 0)->dim() == 6);
  CHECK(build_space(tet, SpaceKind::V, 0)->dim() == 4);
  CHECK(build_space(tri, SpaceKind::Q, 0)->dim() == 3);
  CHECK(build_space(tet, SpaceKind::W_ring, 3)->dim() == 1);
}

TEST_CASE("spaces equal their monomial descriptions") {
  for (int d : {2, 3}) {
    auto cell = Cell::reference(d);
    Mat pts = random_points(*cell, 90, 7);
    for (int p = 0; p <= 3; ++p)
      for (auto k : {SpaceKind::W, SpaceKind::Q, SpaceKind::V, SpaceKind::L2}) {
        if (d == 2 && k == SpaceKind::V) continue;
        auto sp = build_space(cell, k, p);
        Mat A = sampled(*sp, pts);
        Mat B = generators(d, k, p, pts);
        Mat AB(A.rows(), A.cols() + B.cols());
        AB << A, B;
        CAPTURE(d);
        CAPTURE(p);
        CAPTURE(to_string(k));
        CHECK(numerical_rank(A) == sp->dim());
        CHECK(numerical_rank(B) == sp->dim());
        CHECK(numerical_rank(AB) == sp->dim());
      }
  }
}

TEST_CASE("space bases are orthonormal") {
  auto tet = Cell::reference(3);
  for (auto k : {SpaceKind::Q, SpaceKind::Q_ring, SpaceKind::V_perp_ring}) {
    auto sp = build_space(tet, k, 3);
    CHECK((sp->basis.transpose() * sp->basis - Mat::Identity(sp->dim(), sp->dim())).norm() < 1e-12);
  }
}

TEST_CASE("bubbles have vanishing traces") {
  auto tet = Cell::reference(3);
  const int p = 3;
  auto Qr = build_space(tet, SpaceKind::Q_ring, p);
  auto Vr = build_space(tet, SpaceKind::V_ring, p);
  auto Wr = build_space(tet, SpaceKind::W_ring, p);
  for (int f = 0; f < 4; ++f) {
    CHECK((ambient::trace_tangential(*tet, SubKind::face, f, p + 1) * Qr->basis).norm() < 1e-11);
    CHECK((ambient::trace_normal(*tet, SubKind::face, f, p + 1) * Vr->basis).norm() < 1e-11);
    CHECK((ambient::trace_scalar(*tet, SubKind::face, f, p + 1) * Wr->basis).norm() < 1e-11);
  }
  // W_aver has zero mean
  auto Wa = build_space(tet, SpaceKind::W_aver, p);
  CHECK((ambient::integral_row(*tet, p + 1) * Wa->basis).norm() < 1e-12);
}

TEST_CASE("face traces equal the intrinsic face spaces") {
  auto tet = Cell::reference(3);
  for (int p = 0; p <= 3; ++p)
    for (int f = 0; f < 4; ++f) {
      const Chart& ch = tet->face_chart(f);
      std::vector<std::pair<SpaceKind, SpaceKind>> pairs{
          {SpaceKind::W, SpaceKind::W}, {SpaceKind::Q, SpaceKind::Q}, {SpaceKind::V, SpaceKind::L2}};
      for (auto [k3, k2] : pairs) {
        auto tr = trace_space(*build_space(tet, k3, p), SubKind::face, f);
        auto in = build_space(ch.sub, k2, p);
        Mat pts = random_points(*ch.sub, 60, 3 + f);
        Mat A = sampled(*tr, pts);
        Mat B = sampled(*in, pts);
        Mat AB(A.rows(), A.cols() + B.cols());
        AB << A, B;
        CHECK(numerical_rank(A) == in->dim());
        CHECK(numerical_rank(AB) == in->dim());
      }
    }
}

TEST_CASE("raising the degree keeps values") {
  auto tri = Cell::reference(2);
  Poly u{tri, 2, 3, Vec::LinSpaced(2 * poly_dim(2, 3), -1.0, 1.0)};
  Poly v = u.raised(7);
  Mat pts = random_points(*tri, 20, 11);
  CHECK((u.eval(pts) - v.eval(pts)).norm() < 1e-12);
  CHECK_THROWS(v.raised(3));
}

TEST_CASE("basis export evaluates to the basis") {
  auto tet = Cell::reference(3);
  auto sp = build_space(tet, SpaceKind::Q, 2);
  auto doc = nlohmann::json::parse(basis_json(*sp));
  CHECK(doc["space"] == "Q");
  CHECK(doc["functions"].size() == static_cast<std::size_t>(sp->dim()));
  Mat pts = random_points(*tet, 5, 2);
  Mat ref = sampled(*sp, pts);
  const auto& ex = doc["exponents"];
  double worst = 0.0;
  for (int j = 0; j < sp->dim(); ++j)
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < pts.rows(); ++i) {
        double v = 0.0;
        for (std::size_t m = 0; m < ex.size(); ++m)
          v += doc["functions"][j][c][m].get<double>() * mono(pts, i, ex[m].get<std::vector<int>>());
        worst = std::max(worst, std::abs(v - ref(c * pts.rows() + i, j)));
      }
  CHECK(worst < 1e-8);
}

TEST_CASE("unknown kinds are rejected") {
  CHECK_THROWS(space_kind_from_string("nope"));
  CHECK(space_kind_from_string("Q_perp_ring") == SpaceKind::Q_perp_ring);
  CHECK_THROWS(build_space(Cell::reference(2), SpaceKind::V_perp_ring, 2));
}
