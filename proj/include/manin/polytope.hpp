#pragma once

// Exact volumes of bounded polytopes {x : a.x <= b} in small dimension.
// Vertices come from every d-subset of tight constraints; the polytope is
// then split into simplices by recursive pyramids over facets.

#include <cstddef>
#include <vector>

#include <gmpxx.h>

namespace manin {

struct Halfspace {
  std::vector<mpq_class> a;
  mpq_class b;
};

struct PolytopeVolume {
  mpq_class volume;
  std::vector<std::vector<mpq_class>> vertices;
  std::size_t simplices = 0;
};

// Throws Unbounded when the region has a recession direction and
// DegenerateInput on malformed input. Empty or lower dimensional regions
// have volume 0.
PolytopeVolume polytope_volume(const std::vector<Halfspace>& halfspaces, int dim);

// Rank of a rational matrix (rows).
int matrix_rank(std::vector<std::vector<mpq_class>> rows);
mpq_class determinant(std::vector<std::vector<mpq_class>> m);

}  // namespace manin
