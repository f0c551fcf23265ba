#include "manin/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "manin/error.hpp"

namespace manin {

namespace {

using i128 = __int128;

constexpr i128 kLimit = i128(1) << 120;

i128 checked_mul(i128 x, i128 y) {
  i128 r;
  if (__builtin_mul_overflow(x, y, &r) || r > kLimit || r < -kLimit)
    throw Error(ErrorCode::TooLarge, "integer overflow in vertex enumeration");
  return r;
}

mpz_class to_mpz(i128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  mpz_class hi(static_cast<unsigned long>(u >> 64));
  mpz_class lo(static_cast<unsigned long>(u & 0xffffffffffffffffULL));
  mpz_class out = (hi << 64) + lo;
  return neg ? mpz_class(-out) : out;
}

// Halfspace scaled to coprime integer coefficients.
struct IntRow {
  std::vector<long long> a;
  long long b = 0;
};

IntRow to_int_row(const Halfspace& h, int dim) {
  mpz_class l = 1;
  for (const auto& x : h.a) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), h.b.get_den_mpz_t());
  std::vector<mpz_class> ints;
  for (const auto& x : h.a) ints.push_back(mpz_class(x * l));
  ints.push_back(mpz_class(h.b * l));
  mpz_class g = 0;
  for (const auto& x : ints) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g == 0) g = 1;
  IntRow row;
  for (int j = 0; j <= dim; ++j) {
    mpz_class v = ints[j] / g;
    if (!v.fits_slong_p()) throw Error(ErrorCode::TooLarge, "halfspace coefficient too large");
    if (j < dim)
      row.a.push_back(v.get_si());
    else
      row.b = v.get_si();
  }
  return row;
}

// Fraction-free Gauss-Jordan on an n x (n+1) system. On success every
// diagonal entry equals the determinant and column n holds det * x.
bool solve_fraction_free(std::vector<std::vector<i128>>& M, int n) {
  i128 prev = 1;
  for (int k = 0; k < n; ++k) {
    int p = k;
    while (p < n && M[p][k] == 0) ++p;
    if (p == n) return false;
    std::swap(M[p], M[k]);
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const i128 aik = M[i][k];
      for (int j = 0; j <= n; ++j) M[i][j] = (checked_mul(M[k][k], M[i][j]) - checked_mul(aik, M[k][j])) / prev;
    }
    prev = M[k][k];
  }
  return true;
}

// Determinant of an integer square matrix (Bareiss).
i128 int_det(std::vector<std::vector<i128>> M) {
  const int n = int(M.size());
  if (n == 0) return 1;
  i128 prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    int p = k;
    while (p < n && M[p][k] == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      std::swap(M[p], M[k]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) M[i][j] = (checked_mul(M[i][j], M[k][k]) - checked_mul(M[i][k], M[k][j])) / prev;
    prev = M[k][k];
  }
  return sign * M[n - 1][n - 1];
}

// Floating point solve used only to discard subsets early. Returns false
// when the system looks singular; callers fall back to exact arithmetic
// whenever the answer is not clear cut.
bool approx_solve(std::vector<std::vector<double>> M, int n, std::vector<double>& x) {
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(M[i][k]) > std::fabs(M[p][k])) p = i;
    if (std::fabs(M[p][k]) < 1e-9) return false;
    std::swap(M[p], M[k]);
    for (int i = k + 1; i < n; ++i) {
      const double f = M[i][k] / M[k][k];
      for (int j = k; j <= n; ++j) M[i][j] -= f * M[k][j];
    }
  }
  x.assign(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double v = M[i][n];
    for (int j = i + 1; j < n; ++j) v -= M[i][j] * x[j];
    x[i] = v / M[i][i];
  }
  return true;
}

int affine_rank(const std::vector<std::vector<mpq_class>>& V, const std::vector<int>& ids) {
  if (ids.size() <= 1) return 0;
  std::vector<std::vector<mpq_class>> rows;
  for (std::size_t i = 1; i < ids.size(); ++i) {
    std::vector<mpq_class> r(V[ids[i]].size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = V[ids[i]][j] - V[ids[0]][j];
    rows.push_back(std::move(r));
  }
  return matrix_rank(std::move(rows));
}

struct Triangulator {
  const std::vector<std::vector<mpq_class>>& V;
  const std::vector<std::vector<char>>& tight;  // tight[v][r]
  int m;
  int dim;
  mpq_class volume = 0;
  std::size_t simplices = 0;
  mpq_class factorial = 1;

  void run(const std::vector<int>& face, int k, std::vector<int>& apexes) {
    if (k == 0) {
      std::vector<int> simplex = apexes;
      simplex.push_back(face[0]);
      std::vector<std::vector<mpq_class>> rows;
      for (int i = 1; i <= dim; ++i) {
        std::vector<mpq_class> r(dim);
        for (int j = 0; j < dim; ++j) r[j] = V[simplex[i]][j] - V[simplex[0]][j];
        rows.push_back(std::move(r));
      }
      volume += abs(determinant(std::move(rows))) / factorial;
      ++simplices;
      return;
    }
    const int apex = face[0];
    std::set<std::vector<int>> seen;
    for (int r = 0; r < m; ++r) {
      if (tight[apex][r]) continue;
      std::vector<int> sub;
      for (int v : face)
        if (tight[v][r]) sub.push_back(v);
      if (int(sub.size()) < k) continue;
      if (seen.count(sub)) continue;
      if (affine_rank(V, sub) != k - 1) continue;
      seen.insert(sub);
      apexes.push_back(apex);
      run(sub, k - 1, apexes);
      apexes.pop_back();
    }
  }
};

}  // namespace

int matrix_rank(std::vector<std::vector<mpq_class>> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows[0].size();
  int rank = 0;
  for (std::size_t c = 0; c < cols && rank < int(rows.size()); ++c) {
    std::size_t p = rank;
    while (p < rows.size() && rows[p][c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[rank]);
    for (std::size_t i = rank + 1; i < rows.size(); ++i) {
      if (rows[i][c] == 0) continue;
      const mpq_class f = rows[i][c] / rows[rank][c];
      for (std::size_t j = c; j < cols; ++j) rows[i][j] -= f * rows[rank][j];
    }
    ++rank;
  }
  return rank;
}

mpq_class determinant(std::vector<std::vector<mpq_class>> m) {
  const std::size_t n = m.size();
  mpq_class det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m[i][c] == 0) continue;
      const mpq_class f = m[i][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return det;
}

PolytopeVolume polytope_volume(const std::vector<Halfspace>& halfspaces, int dim) {
  if (dim < 1) throw Error(ErrorCode::DegenerateInput, "dimension must be positive");
  std::vector<IntRow> rows;
  for (const auto& h : halfspaces) {
    if (int(h.a.size()) != dim) throw Error(ErrorCode::DegenerateInput, "halfspace has wrong dimension");
    if (std::all_of(h.a.begin(), h.a.end(), [](const mpq_class& x) { return x == 0; }))
      throw Error(ErrorCode::DegenerateInput, "halfspace with zero normal");
    rows.push_back(to_int_row(h, dim));
  }
  const int m = int(rows.size());

  {
    std::vector<std::vector<mpq_class>> A;
    for (const auto& r : rows) {
      std::vector<mpq_class> row;
      for (long long v : r.a) row.emplace_back(long(v));
      A.push_back(std::move(row));
    }
    if (matrix_rank(A) < dim) throw Error(ErrorCode::Unbounded, "constraint normals do not span");
  }

  // Recession rays: a pointed cone {A r <= 0} is nonzero iff some
  // (dim-1)-subset of rows cuts out a line on which all rows are <= 0.
  {
    std::vector<int> pick(dim - 1);
    std::vector<double> B(std::size_t(dim) * dim), rd(dim);
    std::vector<int> pivot_col(dim);
    // Null vector of the picked rows in floating point, or false when they
    // look rank deficient (then no ray is defined by them).
    auto approx_null = [&]() {
      const int rcount = dim - 1;
      for (int i = 0; i < rcount; ++i)
        for (int j = 0; j < dim; ++j) B[i * dim + j] = double(rows[pick[i]].a[j]);
      std::vector<char> is_pivot(dim, 0);
      int row = 0;
      for (int c = 0; c < dim && row < rcount; ++c) {
        int p = row;
        for (int i = row + 1; i < rcount; ++i)
          if (std::fabs(B[i * dim + c]) > std::fabs(B[p * dim + c])) p = i;
        if (std::fabs(B[p * dim + c]) < 1e-9) continue;
        for (int j = 0; j < dim; ++j) std::swap(B[p * dim + j], B[row * dim + j]);
        for (int i = 0; i < rcount; ++i) {
          if (i == row) continue;
          const double f = B[i * dim + c] / B[row * dim + c];
          if (f == 0) continue;
          for (int j = 0; j < dim; ++j) B[i * dim + j] -= f * B[row * dim + j];
        }
        pivot_col[row] = c;
        is_pivot[c] = 1;
        ++row;
      }
      if (row < rcount) return false;
      int free_col = 0;
      while (is_pivot[free_col]) ++free_col;
      std::fill(rd.begin(), rd.end(), 0.0);
      rd[free_col] = 1;
      for (int i = 0; i < rcount; ++i) rd[pivot_col[i]] = -B[i * dim + free_col] / B[i * dim + pivot_col[i]];
      return true;
    };
    auto check_subset = [&]() {
      // Coefficients are small integers, so a pivot below 1e-9 is a genuine
      // rank drop and the subset defines no direction.
      if (!approx_null()) return;
      {
        // Cheap screen: a direction that visibly has both signs cannot be a ray.
        bool pos = false, neg = false;
        for (const auto& row : rows) {
          double s = 0, scale = 0;
          for (int c = 0; c < dim; ++c) {
            s += double(row.a[c]) * rd[c];
            scale += std::fabs(double(row.a[c]) * rd[c]);
          }
          if (s > 1e-7 * (1 + scale)) pos = true;
          if (s < -1e-7 * (1 + scale)) neg = true;
        }
        if (pos && neg) return;
      }
      std::vector<i128> r(dim);
      bool nonzero = false;
      for (int j = 0; j < dim; ++j) {
        std::vector<std::vector<i128>> minor;
        for (int idx : pick) {
          std::vector<i128> row;
          for (int c = 0; c < dim; ++c)
            if (c != j) row.push_back(rows[idx].a[c]);
          minor.push_back(std::move(row));
        }
        r[j] = ((j % 2) ? -1 : 1) * int_det(std::move(minor));
        if (r[j] != 0) nonzero = true;
      }
      if (!nonzero) return;
      bool all_le = true, all_ge = true;
      for (const auto& row : rows) {
        i128 s = 0;
        for (int c = 0; c < dim; ++c) s += checked_mul(row.a[c], r[c]);
        if (s > 0) all_le = false;
        if (s < 0) all_ge = false;
      }
      if (all_le || all_ge) throw Error(ErrorCode::Unbounded, "region has a recession direction");
    };
    auto rec = [&](auto&& self, int start, int depth) -> void {
      if (depth == dim - 1) {
        check_subset();
        return;
      }
      for (int i = start; i <= m - (dim - 1 - depth); ++i) {
        pick[depth] = i;
        self(self, i + 1, depth + 1);
      }
    };
    if (dim == 1) {
      pick.clear();
      // In one dimension the only directions are +1 and -1.
      bool pos = false, neg = false;
      for (const auto& row : rows) {
        if (row.a[0] > 0) pos = true;
        if (row.a[0] < 0) neg = true;
      }
      if (!pos || !neg) throw Error(ErrorCode::Unbounded, "region has a recession direction");
    } else {
      rec(rec, 0, 0);
    }
  }

  // Vertices.
  std::map<std::vector<mpq_class>, int> index;
  std::vector<std::vector<mpq_class>> V;
  std::vector<int> pick(dim);
  std::vector<std::vector<i128>> M(dim, std::vector<i128>(dim + 1));
  std::vector<std::vector<double>> Md(dim, std::vector<double>(dim + 1));
  std::vector<double> xd;
  // Rows tight at each vertex found so far. A subset whose rows are all
  // tight at a known vertex either defines that vertex or is singular, so
  // it can be skipped; this matters for cones, where most subsets meet at 0.
  std::vector<std::vector<char>> found_tight;
  auto consider = [&]() {
    for (const auto& t : found_tight) {
      bool all = true;
      for (int i = 0; i < dim && all; ++i) all = t[pick[i]];
      if (all) return;
    }
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) Md[i][j] = double(rows[pick[i]].a[j]);
      Md[i][dim] = double(rows[pick[i]].b);
    }
    if (approx_solve(Md, dim, xd)) {
      for (const auto& row : rows) {
        double lhs = 0, scale = std::fabs(double(row.b));
        for (int j = 0; j < dim; ++j) {
          lhs += double(row.a[j]) * xd[j];
          scale += std::fabs(double(row.a[j]) * xd[j]);
        }
        if (lhs - double(row.b) > 1e-7 * (1.0 + scale)) return;
      }
    }
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) M[i][j] = rows[pick[i]].a[j];
      M[i][dim] = rows[pick[i]].b;
    }
    if (!solve_fraction_free(M, dim)) return;
    const i128 det = M[0][0];
    const int sgn = det > 0 ? 1 : -1;
    for (const auto& row : rows) {
      i128 lhs = 0;
      for (int j = 0; j < dim; ++j) lhs += checked_mul(row.a[j], M[j][dim]);
      if (sgn * (lhs - checked_mul(row.b, det)) > 0) return;
    }
    std::vector<mpq_class> x(dim);
    const mpz_class d = to_mpz(det);
    for (int j = 0; j < dim; ++j) {
      x[j] = mpq_class(to_mpz(M[j][dim]), d);
      x[j].canonicalize();
    }
    if (index.emplace(x, int(V.size())).second) {
      V.push_back(std::move(x));
      std::vector<char> t(m);
      for (int r = 0; r < m; ++r) {
        i128 lhs = 0;
        for (int j = 0; j < dim; ++j) lhs += checked_mul(rows[r].a[j], M[j][dim]);
        t[r] = (lhs == checked_mul(rows[r].b, det));
      }
      found_tight.push_back(std::move(t));
    }
  };
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == dim) {
      consider();
      return;
    }
    for (int i = start; i <= m - (dim - depth); ++i) {
      pick[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);

  PolytopeVolume out;
  out.vertices = V;
  std::sort(out.vertices.begin(), out.vertices.end());
  if (int(V.size()) <= dim) return out;

  std::vector<std::vector<char>> tight(V.size(), std::vector<char>(m, 0));
  for (std::size_t v = 0; v < V.size(); ++v)
    for (int r = 0; r < m; ++r) {
      mpq_class s = 0;
      for (int j = 0; j < dim; ++j) s += mpq_class(long(rows[r].a[j])) * V[v][j];
      tight[v][r] = (s == mpq_class(long(rows[r].b)));
    }
  std::vector<int> all(V.size());
  std::iota(all.begin(), all.end(), 0);
  if (affine_rank(V, all) < dim) return out;

  Triangulator tri{V, tight, m, dim};
  for (int i = 2; i <= dim; ++i) tri.factorial *= i;
  std::vector<int> apexes;
  tri.run(all, dim, apexes);
  out.volume = tri.volume;
  out.simplices = tri.simplices;
  return out;
}

}  // namespace manin
