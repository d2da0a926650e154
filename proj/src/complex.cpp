#include "exseq/complex.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace exseq {

const LocalComplex& local_complex(const CellPtr& cell, int p) {
  static std::mutex mtx;
  static std::map<std::pair<const Cell*, int>, std::unique_ptr<LocalComplex>> cache;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find({cell.get(), p});
    if (it != cache.end()) return *it->second;
  }
  auto lc = std::make_unique<LocalComplex>();
  const Cell& c = *cell;
  const int d = c.dim();
  lc->cell = cell;
  lc->p = p;
  lc->N = p + 1;
  lc->W = build_space(cell, SpaceKind::W, p);
  lc->Q = build_space(cell, SpaceKind::Q, p);
  lc->L2 = build_space(cell, SpaceKind::L2, p);
  lc->W_ring = build_space(cell, SpaceKind::W_ring, p);
  lc->Q_ring = build_space(cell, SpaceKind::Q_ring, p);
  lc->grad = ambient::grad(c, lc->N);
  if (d >= 2) {
    lc->V = build_space(cell, SpaceKind::V, p);
    lc->V_ring = build_space(cell, SpaceKind::V_ring, p);
    lc->Q_perp = build_space(cell, SpaceKind::Q_perp_ring, p);
    lc->curl = d == 3 ? ambient::curl(c, lc->N) : ambient::curl2d(c, lc->N);
  }
  if (d == 3) {
    lc->V_perp = build_space(cell, SpaceKind::V_perp_ring, p);
    lc->div = ambient::div(c, lc->N);
  }
  std::lock_guard<std::mutex> lock(mtx);
  auto& slot = cache[{cell.get(), p}];
  if (!slot) slot = std::move(lc);
  return *slot;
}

}  // namespace exseq
