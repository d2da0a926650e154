#pragma once

#include "exseq/polyspace.hpp"

namespace exseq {

// All spaces of the degree-p complex on one cell (entries not defined for the
// cell dimension stay null), with ambient operator matrices at degree N = p + 1.
struct LocalComplex {
  CellPtr cell;
  int p = 0;
  int N = 1;
  SpacePtr W, Q, V, L2;
  SpacePtr W_ring, Q_ring, V_ring, Q_perp, V_perp;
  Mat grad;  // (d*s) x s
  Mat curl;  // 3D: 3s x 3s ; 2D: s x 2s (vector curl)
  Mat div;   // 3D: s x 3s
};

const LocalComplex& local_complex(const CellPtr& cell, int p);

}  // namespace exseq
