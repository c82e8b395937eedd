// Copyright 2026 The anderson-lab Authors
// SPDX-License-Identifier: Apache-2.0

// Nearest-neighbour bonds of a host box with exactly one end in the
// centred inner box, counted from coordinates alone.

#pragma once

#include <cstddef>
#include <vector>

namespace oracle {

inline bool in_range(int x, int n) { return -(n / 2) <= x && x <= -(n / 2) + n - 1; }

inline std::size_t crossing_bonds(int d, int host_n, int inner_n) {
  std::size_t count = 0;
  std::vector<int> x(static_cast<std::size_t>(d), -(host_n / 2));
  const int hi = -(host_n / 2) + host_n - 1;
  while (true) {
    bool inside = true;
    for (int v : x) inside = inside && in_range(v, inner_n);
    for (int axis = 0; axis < d; ++axis) {
      const int nb = x[static_cast<std::size_t>(axis)] + 1;
      if (nb > hi) continue;
      bool nb_inside = true;
      for (int a = 0; a < d; ++a)
        nb_inside = nb_inside && in_range(a == axis ? nb : x[static_cast<std::size_t>(a)], inner_n);
      if (inside != nb_inside) ++count;
    }
    int axis = d - 1;
    while (axis >= 0 && x[static_cast<std::size_t>(axis)] == hi) {
      x[static_cast<std::size_t>(axis)] = -(host_n / 2);
      --axis;
    }
    if (axis < 0) break;
    ++x[static_cast<std::size_t>(axis)];
  }
  return count;
}

}  // namespace oracle
