#include "vrjplab/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>

namespace vrjplab::linalg {

namespace {

Eigen::MatrixXd to_eigen(const SymMatrix& m) {
  const int n = m.dim();
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = m(i, j);
  return a;
}

SymMatrix from_eigen_symmetrized(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
  return m;
}

}  // namespace

std::vector<double> SymMatrix::dense() const {
  std::vector<double> a(static_cast<std::size_t>(n_) * n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      a[static_cast<std::size_t>(i) * n_ + j] = (*this)(i, j);
  return a;
}

SymMatrix SymMatrix::from_dense_exact(const std::vector<double>& a, int n) {
  if (a.size() != static_cast<std::size_t>(n) * n)
    throw DimensionError("from_dense_exact: buffer size does not match n*n");
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double lo = a[static_cast<std::size_t>(i) * n + j];
      const double hi = a[static_cast<std::size_t>(j) * n + i];
      if (lo != hi)
        throw DimensionError("from_dense_exact: buffer is not symmetric");
      m.set(i, j, lo);
    }
  return m;
}

SymMatrix invert_pd(const SymMatrix& h) {
  const int n = h.dim();
  if (n == 0) return SymMatrix(0);
  Eigen::MatrixXd a = to_eigen(h);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefiniteError("invert_pd: Cholesky factorization failed");
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  return from_eigen_symmetrized(inv);
}

SymMatrix block_inverse(const SymMatrix& h, int split) {
  const int n = h.dim();
  if (split <= 0 || split >= n)
    throw DimensionError("block_inverse: split must satisfy 0 < split < dim");
  Eigen::MatrixXd m = to_eigen(h);
  const int k = split, r = n - split;
  Eigen::MatrixXd A = m.topLeftCorner(k, k);
  Eigen::MatrixXd B = m.topRightCorner(k, r);
  Eigen::MatrixXd D = m.bottomRightCorner(r, r);
  Eigen::LLT<Eigen::MatrixXd> lltA(A);
  if (lltA.info() != Eigen::Success)
    throw NotPositiveDefiniteError("block_inverse: leading block not PD");
  Eigen::MatrixXd AinvB = lltA.solve(B);
  Eigen::MatrixXd S = D - B.transpose() * AinvB;
  Eigen::LLT<Eigen::MatrixXd> lltS(S);
  if (lltS.info() != Eigen::Success)
    throw NotPositiveDefiniteError("block_inverse: Schur complement not PD");
  Eigen::MatrixXd Sinv = lltS.solve(Eigen::MatrixXd::Identity(r, r));
  Eigen::MatrixXd Ainv = lltA.solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd out(n, n);
  out.topLeftCorner(k, k) = Ainv + AinvB * Sinv * AinvB.transpose();
  out.topRightCorner(k, r) = -AinvB * Sinv;
  out.bottomLeftCorner(r, k) = out.topRightCorner(k, r).transpose();
  out.bottomRightCorner(r, r) = Sinv;
  return from_eigen_symmetrized(out);
}

bool h_connected(const SymMatrix& h, int i, int j, double zero_tol) {
  const int n = h.dim();
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw DimensionError("h_connected: index out of range");
  if (i == j) return true;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{i};
  seen[i] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      if (v == u || seen[v]) continue;
      if (std::fabs(h(u, v)) > zero_tol) {
        if (v == j) return true;
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return false;
}

TestReport green_positivity_check(const SymMatrix& h, double zero_tol) {
  const int n = h.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (h(i, j) > 0.0)
        throw ConfigError(
            "green_positivity_check: off-diagonal entries must be <= 0");
  const SymMatrix g = invert_pd(h);
  // violation = |most negative entry| or |largest entry that contradicts the
  // connectivity equivalence|; statistic reports the worst case.
  double worst = 0.0;
  bool ok = true;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = g(i, j);
      const bool conn = h_connected(h, i, j, zero_tol);
      if (v < -zero_tol) {
        ok = false;
        worst = std::max(worst, -v);
      }
      if (conn && v <= zero_tol) {
        ok = false;
        worst = std::max(worst, zero_tol - v);
      }
      if (!conn && std::fabs(v) > zero_tol) {
        ok = false;
        worst = std::max(worst, std::fabs(v));
      }
    }
  }
  TestReport r;
  r.test = "green_positivity_check";
  r.statistic = worst;
  r.threshold = zero_tol;
  r.pass = ok;
  r.seed = 0;
  r.params = "dim=" + std::to_string(n);
  return r;
}

std::vector<double> solve_pd(const SymMatrix& h, const std::vector<double>& b) {
  const int n = h.dim();
  if (b.size() != static_cast<std::size_t>(n))
    throw DimensionError("solve_pd: rhs size mismatch");
  Eigen::MatrixXd a = to_eigen(h);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefiniteError("solve_pd: Cholesky factorization failed");
  Eigen::VectorXd bv = Eigen::Map<const Eigen::VectorXd>(b.data(), n);
  Eigen::VectorXd x = llt.solve(bv);
  return std::vector<double>(x.data(), x.data() + n);
}

double logdet_pd(const SymMatrix& h) {
  const int n = h.dim();
  if (n == 0) return 0.0;
  Eigen::MatrixXd a = to_eigen(h);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefiniteError("logdet_pd: Cholesky factorization failed");
  double acc = 0.0;
  const auto& L = llt.matrixLLT();
  for (int i = 0; i < n; ++i) acc += std::log(L(i, i));
  return 2.0 * acc;
}

bool is_pd(const SymMatrix& h) {
  const int n = h.dim();
  if (n == 0) return true;
  for (int i = 0; i < n; ++i)
    if (!(h(i, i) > 0.0)) return false;
  Eigen::MatrixXd a = to_eigen(h);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  return llt.info() == Eigen::Success;
}

double quad_form_pd_ext(const SymMatrix& h, const std::vector<double>& x,
                        const std::vector<double>& y) {
  using LD = long double;
  using MatLD = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
  using VecLD = Eigen::Matrix<LD, Eigen::Dynamic, 1>;
  const int n = h.dim();
  if (x.size() != static_cast<std::size_t>(n) ||
      y.size() != static_cast<std::size_t>(n))
    throw DimensionError("quad_form_pd_ext: vector size mismatch");
  if (n == 0) return 0.0;
  MatLD a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = static_cast<LD>(h(i, j));
  Eigen::LLT<MatLD> llt(a);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefiniteError("quad_form_pd_ext: factorization failed");
  VecLD yv(n);
  for (int i = 0; i < n; ++i) yv(i) = static_cast<LD>(y[i]);
  VecLD sol = llt.solve(yv);
  LD acc = 0;
  for (int i = 0; i < n; ++i) acc += static_cast<LD>(x[i]) * sol(i);
  return static_cast<double>(acc);
}

GreenPair green_pair_pd(const SymMatrix& h, int x, int y) {
  using LD = long double;
  using MatLD = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
  using VecLD = Eigen::Matrix<LD, Eigen::Dynamic, 1>;
  const int n = h.dim();
  if (x < 0 || x >= n || y < 0 || y >= n)
    throw DimensionError("green_pair_pd: index out of range");
  if (x == y) throw ConfigError("green_pair_pd: indices must differ");
  MatLD a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = static_cast<LD>(h(i, j));
  Eigen::LLT<MatLD> llt(a);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefiniteError("green_pair_pd: factorization failed");
  // h^{-1} = L^{-T} L^{-1}, so the (x,y) entry of the inverse is the inner
  // product of the forward solves u = L^{-1} e_x and v = L^{-1} e_y.
  VecLD ex = VecLD::Zero(n), ey = VecLD::Zero(n);
  ex(x) = 1.0L;
  ey(y) = 1.0L;
  VecLD u = llt.matrixL().solve(ex);
  VecLD v = llt.matrixL().solve(ey);
  LD gxx = 0, gyy = 0, gxy = 0, det2 = 0;
  for (int i = 0; i < n; ++i) {
    gxx += u(i) * u(i);
    gyy += v(i) * v(i);
    gxy += u(i) * v(i);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const LD t = u(i) * v(j) - u(j) * v(i);
      det2 += t * t;
    }
  GreenPair out;
  out.gxx = static_cast<double>(gxx);
  out.gyy = static_cast<double>(gyy);
  out.gxy = static_cast<double>(gxy);
  out.det2 = static_cast<double>(det2);
  return out;
}

}  // namespace vrjplab::linalg
