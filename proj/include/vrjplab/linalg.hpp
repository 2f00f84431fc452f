// Dense symmetric linear algebra: packed symmetric storage, positive-definite
// inversion, Schur-complement block inversion, and support-graph connectivity.
#pragma once

#include <cstdint>
#include <vector>

#include "vrjplab/errors.hpp"
#include "vrjplab/stats.hpp"

namespace vrjplab::linalg {

// Symmetric matrix with a single stored triangle, so symmetry is exact by
// construction.  Entries are addressed through (i,j) in any order.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : n_(n), tri_(packed_size(n), 0.0) {}

  int dim() const { return n_; }

  double operator()(int i, int j) const { return tri_[index(i, j)]; }
  void set(int i, int j, double v) { tri_[index(i, j)] = v; }
  void add(int i, int j, double v) { tri_[index(i, j)] += v; }

  // Dense row-major copy (n*n values), for interop with solvers.
  std::vector<double> dense() const;

  // Builds from a dense row-major buffer; verifies symmetry exactly
  // (the buffer must already be bitwise symmetric).
  static SymMatrix from_dense_exact(const std::vector<double>& a, int n);

  bool operator==(const SymMatrix& o) const {
    return n_ == o.n_ && tri_ == o.tri_;
  }

 private:
  static std::size_t packed_size(int n) {
    return static_cast<std::size_t>(n) * (n + 1) / 2;
  }
  std::size_t index(int i, int j) const {
    if (i < j) std::swap(i, j);
    return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
  }
  int n_ = 0;
  std::vector<double> tri_;
};

// Inverse of a positive-definite matrix via Cholesky; throws
// NotPositiveDefiniteError when the factorization fails.
SymMatrix invert_pd(const SymMatrix& h);

// Inverse computed through the Schur complement of the leading split x split
// block: [[A,B],[B^T,D]]^{-1} assembled from A^{-1} and S = D - B^T A^{-1} B.
// Agrees with invert_pd; exists as an independently-routed oracle.
SymMatrix block_inverse(const SymMatrix& h, int split);

// True iff i and j are joined by a path of off-diagonal entries with
// |h(u,v)| > zero_tol (exact zero threshold for constructed matrices;
// callers pass 1e-12 for sampled ones).
bool h_connected(const SymMatrix& h, int i, int j, double zero_tol = 0.0);

// For a PD matrix with non-positive off-diagonal entries, verifies that the
// inverse is entrywise >= 0 and strictly positive exactly on connected pairs.
// Throws ConfigError if the off-diagonal sign precondition fails.
TestReport green_positivity_check(const SymMatrix& h, double zero_tol = 1e-12);

// Solves h x = b for PD h (Cholesky).  Used by samplers and experiments.
std::vector<double> solve_pd(const SymMatrix& h, const std::vector<double>& b);

// Log-determinant via Cholesky; throws NotPositiveDefiniteError.
double logdet_pd(const SymMatrix& h);

// Cholesky-based positive-definiteness test (never throws).
bool is_pd(const SymMatrix& h);

// Quadratic form x^T h^{-1} y evaluated in extended precision (long double
// Cholesky).  The assembled matrices of the coupling experiments can carry
// condition numbers of order 1/gamma with gamma ~ Gamma(1/2,1/2), where
// double-precision solves lose up to 8 digits; the identity checks at 1e-9
// need the extra headroom.
double quad_form_pd_ext(const SymMatrix& h, const std::vector<double>& x,
                        const std::vector<double>& y);

// Entries of h^{-1} at a vertex pair together with the 2x2 principal minor
// det2 = gxx*gyy - gxy^2 of the inverse.
struct GreenPair {
  double gxx = 0.0;
  double gyy = 0.0;
  double gxy = 0.0;
  double det2 = 0.0;
};

// Computes GreenPair from one extended-precision Cholesky factor L of h.
// With u = L^{-1} e_x and v = L^{-1} e_y the three entries are inner
// products of u and v, and the minor is evaluated through the Lagrange
// identity det2 = sum_{i<j} (u_i v_j - u_j v_i)^2 -- a sum of squares.  The
// direct difference gxx*gyy - gxy^2 cancels catastrophically when the pair
// is strongly coupled (gxy^2 close to gxx*gyy) and can lose 8+ digits on
// sampled matrices; the Lagrange form keeps full precision there.
GreenPair green_pair_pd(const SymMatrix& h, int x, int y);

}  // namespace vrjplab::linalg
