#pragma once

// Shared hand-built instances for the unit and acceptance suites. All
// expected values in the tests referencing these games were derived on paper
// first; do not adjust them to match the implementation.

#include <vector>

#include "core/model.hpp"

namespace berknash::testing {

// Two symmetric agents, coupling 1/2: Nash actions (2/3, 2/3) with aggregate
// cost -4/9. With attention {other}, the averaged matrix equals G itself.
inline NetworkGame two_agent_game(double sigma = 0.1) {
  Matrix G(2, 2);
  G << 0.0, 0.5, 0.5, 0.0;
  Vector r = Vector::Ones(2);
  Vector b = Vector::Ones(2);
  Vector s = Vector::Constant(2, sigma);
  return make_game(G, r, b, s);
}

inline AttentionStructure two_agent_attention() {
  return AttentionStructure{{{1}, {0}}};
}

// Three agents on a ring, both neighbors at 0.3: Nash actions 0.625,
// local-mean-field equilibrium 10/13, consistent theta 0.6.
inline NetworkGame ring3_game(double sigma = 0.1) {
  Matrix G(3, 3);
  G << 0.0, 0.3, 0.3, 0.3, 0.0, 0.3, 0.3, 0.3, 0.0;
  Vector r = Vector::Ones(3);
  Vector b = Vector::Ones(3);
  Vector s = Vector::Constant(3, sigma);
  return make_game(G, r, b, s);
}

inline AttentionStructure ring3_attention() {
  return AttentionStructure{{{1, 2}, {0, 2}, {0, 1}}};
}

// Complete graph with every row summing to 1/2, unit costs and benefits: the
// global-mean-field equilibrium is exactly 2/3 per agent at every size.
inline NetworkGame mean_field_game(int n) {
  Matrix G = Matrix::Constant(n, n, 0.5 / static_cast<double>(n - 1));
  G.diagonal().setZero();
  return make_game(G, Vector::Ones(n), Vector::Ones(n), Vector::Zero(n));
}

}  // namespace berknash::testing
