#include "suffreduce/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "suffreduce/error.hpp"

namespace suffreduce {

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.front().size();
  Matrix out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != m)
      throw InvalidArgument("ragged rows: row " + std::to_string(i) + " has " +
                            std::to_string(rows[i].size()) + " entries, expected " +
                            std::to_string(m));
    std::copy(rows[i].begin(), rows[i].end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Matrix Matrix::transposed() const {
  Matrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("multiply: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto orow = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(std::size_t p, double fill) : p_(p), v_(p * (p + 1) / 2, fill) {}

SymMatrix SymMatrix::identity(std::size_t p) {
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i) out(i, i) = 1.0;
  return out;
}

SymMatrix SymMatrix::ones(std::size_t p) { return SymMatrix(p, 1.0); }

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out(i, i) = d[i];
  return out;
}

Vector SymMatrix::diag() const {
  Vector d(p_);
  for (std::size_t i = 0; i < p_; ++i) d[i] = (*this)(i, i);
  return d;
}

Matrix SymMatrix::to_dense() const {
  Matrix out(p_, p_);
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = i; j < p_; ++j) out(i, j) = out(j, i) = (*this)(i, j);
  return out;
}

SymMatrix SymMatrix::principal(std::span<const std::size_t> idx) const {
  SymMatrix out(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (idx[a] >= p_) throw InvalidArgument("principal: index out of range");
    for (std::size_t b = a; b < idx.size(); ++b) out(a, b) = (*this)(idx[a], idx[b]);
  }
  return out;
}

namespace {
void require_same_dim(const SymMatrix& a, const SymMatrix& b, const char* what) {
  if (a.dim() != b.dim())
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" +
                          std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}
} // namespace

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  require_same_dim(*this, o, "operator+");
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  require_same_dim(*this, o, "operator-");
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

SymMatrix from_dense(const Matrix& values, double asym_tol) {
  if (values.rows() != values.cols())
    throw InvalidArgument("from_dense: matrix is " + std::to_string(values.rows()) + "x" +
                          std::to_string(values.cols()) + ", expected square");
  const std::size_t p = values.rows();
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      const double a = values(i, j);
      const double b = values(j, i);
      if (!std::isfinite(a) || !std::isfinite(b))
        throw InvalidArgument("from_dense: non-finite entry at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      if (std::abs(a - b) > asym_tol)
        throw InvalidArgument("from_dense: asymmetry " + std::to_string(std::abs(a - b)) +
                              " at (" + std::to_string(i) + "," + std::to_string(j) +
                              ") exceeds tolerance");
      out(i, j) = 0.5 * (a + b);
    }
  }
  return out;
}

SymMatrix uncentered_covariance(const Matrix& observations) {
  const std::size_t n = observations.rows();
  const std::size_t p = observations.cols();
  if (n == 0) throw InvalidArgument("uncentered_covariance: no observations");
  SymMatrix out(p);
  auto acc = out.packed();
  for (std::size_t t = 0; t < n; ++t) {
    auto v = observations.row(t);
    std::size_t k = 0;
    for (std::size_t i = 0; i < p; ++i) {
      const double vi = v[i];
      for (std::size_t j = i; j < p; ++j) acc[k++] += vi * v[j];
    }
  }
  out *= 1.0 / static_cast<double>(n);
  return out;
}

SymMatrix hadamard(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b, "hadamard");
  SymMatrix out(a);
  auto o = out.packed();
  auto bp = b.packed();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] *= bp[k];
  return out;
}

double inner(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b, "inner");
  const std::size_t p = a.dim();
  double diag = 0.0, off = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    diag += a(i, i) * b(i, i);
    for (std::size_t j = i + 1; j < p; ++j) off += a(i, j) * b(i, j);
  }
  return diag + 2.0 * off;
}

double frobenius_norm(const SymMatrix& a) { return std::sqrt(inner(a, a)); }

double max_abs(const SymMatrix& a) {
  double m = 0.0;
  for (double x : a.packed()) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b, "max_abs_diff");
  double m = 0.0;
  auto ap = a.packed();
  auto bp = b.packed();
  for (std::size_t k = 0; k < ap.size(); ++k) m = std::max(m, std::abs(ap[k] - bp[k]));
  return m;
}

SymMatrix abs(const SymMatrix& a) {
  return a.map([](double x) { return std::abs(x); });
}

double l1_norm(const SymMatrix& a) {
  const std::size_t p = a.dim();
  double diag = 0.0, off = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    diag += std::abs(a(i, i));
    for (std::size_t j = i + 1; j < p; ++j) off += std::abs(a(i, j));
  }
  return diag + 2.0 * off;
}

bool is_binary(const SymMatrix& a) {
  return std::all_of(a.packed().begin(), a.packed().end(),
                     [](double x) { return x == 0.0 || x == 1.0; });
}

// ---------------------------------------------------------------------------
// Eigendecomposition

SymMatrix EigenDecomposition::reconstruct() const { return synthesize(values); }

SymMatrix EigenDecomposition::synthesize(std::span<const double> spectrum) const {
  const std::size_t p = values.size();
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < p; ++k)
    if (spectrum[k] != 0.0) active.push_back(k);
  const std::size_t m = active.size();
  // Rows of the active columns only: b(i,a) = basis(i,active[a]), w = b * diag(spectrum).
  std::vector<double> b(p * m), w(p * m);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t a = 0; a < m; ++a) {
      b[i * m + a] = basis(i, active[a]);
      w[i * m + a] = b[i * m + a] * spectrum[active[a]];
    }
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i) {
    const double* wi = w.data() + i * m;
    for (std::size_t j = i; j < p; ++j) {
      const double* bj = b.data() + j * m;
      double s = 0.0;
      for (std::size_t a = 0; a < m; ++a) s += wi[a] * bj[a];
      out(i, j) = s;
    }
  }
  return out;
}

namespace {

constexpr int kJacobiSweeps = 100;
constexpr int kQlStepsPerValue = 60;

// Overflow-safe like std::hypot, without its last-ulp correction.
double norm2(double a, double b) {
  a = std::abs(a);
  b = std::abs(b);
  if (a < b) std::swap(a, b);
  if (a == 0.0) return 0.0;
  const double r = b / a;
  return a * std::sqrt(1.0 + r * r);
}

// Cyclic Jacobi on a dense copy. a is destroyed; v receives eigenvectors as columns.
void jacobi(Matrix& a, Matrix& v, Vector& d) {
  const std::size_t n = a.rows();
  v = Matrix::identity(n);
  double fro2 = 0.0;
  for (double x : a.data()) fro2 += x * x;
  const double threshold = 1e-14 * std::sqrt(fro2);

  for (int sweep = 0;; ++sweep) {
    double off2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off2 += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off2) <= threshold) break;
    if (sweep == kJacobiSweeps)
      throw ConvergenceError("eigh: Jacobi did not converge within " +
                             std::to_string(kJacobiSweeps) + " sweeps");

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double g = a(r, p);
          const double h = a(r, q);
          a(r, p) = a(p, r) = g - s * (h + g * tau);
          a(r, q) = a(q, r) = h + s * (g - h * tau);
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double g = v(r, p);
          const double h = v(r, q);
          v(r, p) = g - s * (h + g * tau);
          v(r, q) = h + s * (g - h * tau);
        }
      }
    }
  }
  d.resize(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
}

// Distinct rows, so the loop vectorizes.
void rotate_rows(double* __restrict zi, double* __restrict zi1, std::size_t n, double c, double s) {
  for (std::size_t k = 0; k < n; ++k) {
    const double t = zi1[k];
    zi1[k] = s * zi[k] + c * t;
    zi[k] = c * zi[k] - s * t;
  }
}

// Householder tridiagonalization (v holds the input and receives the
// orthogonal transform), then implicit QL with shifts. Follows the
// EISPACK tred2/tql2 pair.
void tridiagonal_ql(Matrix& v, Vector& d) {
  const std::size_t un = v.rows();
  const long n = static_cast<long>(un);
  d.assign(un, 0.0);
  Vector e(un, 0.0);
  if (n == 0) return;

  for (long j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (long i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (long k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (long j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (long k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (long j = 0; j < i; ++j) e[j] = 0.0;

      for (long j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (long k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (long j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (long j = 0; j < i; ++j) e[j] -= hh * d[j];
      // Row-major sweep of the lower triangle; each entry sees the same update.
      for (long k = 0; k < i; ++k) {
        double* vk = &v(k, 0);
        const double ek = e[k], dk = d[k];
        for (long j = 0; j <= k; ++j) vk[j] -= (d[j] * ek + e[j] * dk);
      }
      for (long j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  Vector acc(un, 0.0);
  for (long i = 0; i < n - 1; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (long k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      // Accumulated by rows; the sum over k runs in the same order for every j.
      std::fill(acc.begin(), acc.begin() + i + 1, 0.0);
      for (long k = 0; k <= i; ++k) {
        const double* vk = &v(k, 0);
        const double w = v(k, i + 1);
        for (long j = 0; j <= i; ++j) acc[j] += w * vk[j];
      }
      for (long k = 0; k <= i; ++k) {
        double* vk = &v(k, 0);
        for (long j = 0; j <= i; ++j) vk[j] -= acc[j] * d[k];
      }
    }
    for (long k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (long j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;

  // QL iterations operate on rows of z = v^T so rotations touch contiguous memory.
  Matrix z = v.transposed();
  for (long i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::ldexp(1.0, -52);
  for (long l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    long m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > kQlStepsPerValue)
          throw ConvergenceError("eigh: QL iteration did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = norm2(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (long i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (long i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = norm2(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          rotate_rows(z.row(static_cast<std::size_t>(i)).data(), z.row(static_cast<std::size_t>(i + 1)).data(), un, c, s);
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
  v = z.transposed();
}

} // namespace

EigenDecomposition eigh(const SymMatrix& x, EigenMethod method) {
  const std::size_t p = x.dim();
  for (double a : x.packed())
    if (!std::isfinite(a)) throw InvalidArgument("eigh: non-finite entry");

  Matrix vecs;
  Vector vals;
  if (method == EigenMethod::Jacobi) {
    Matrix a = x.to_dense();
    jacobi(a, vecs, vals);
  } else {
    vecs = x.to_dense();
    tridiagonal_ql(vecs, vals);
  }

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });

  EigenDecomposition out;
  out.values.resize(p);
  out.basis = Matrix(p, p);
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t src = order[k];
    out.values[k] = vals[src];
    std::size_t arg = 0;
    for (std::size_t i = 1; i < p; ++i)
      if (std::abs(vecs(i, src)) > std::abs(vecs(arg, src))) arg = i;
    const double sign = vecs(arg, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < p; ++i) out.basis(i, k) = sign * vecs(i, src);
  }
  return out;
}

double min_eigenvalue(const SymMatrix& x) {
  if (x.dim() == 0) return 0.0;
  return eigh(x).values.back();
}

namespace {
// Lower Cholesky factor in a dense matrix; false if a pivot is not positive.
bool cholesky(const SymMatrix& x, Matrix& l) {
  const std::size_t p = x.dim();
  l = Matrix(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double s = x(j, j);
    auto lj = l.row(j);
    for (std::size_t k = 0; k < j; ++k) s -= lj[k] * lj[k];
    if (!(s > 0.0) || !std::isfinite(s)) return false;
    const double ljj = std::sqrt(s);
    lj[j] = ljj;
    for (std::size_t i = j + 1; i < p; ++i) {
      auto li = l.row(i);
      double t = x(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= li[k] * lj[k];
      li[j] = t / ljj;
    }
  }
  return true;
}
} // namespace

std::optional<SymMatrix> inverse_spd(const SymMatrix& x) {
  Matrix l;
  if (!cholesky(x, l)) return std::nullopt;
  const std::size_t p = x.dim();
  // Invert L in place (lower triangular), then X^{-1} = L^{-T} L^{-1}.
  Matrix li(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    li(j, j) = 1.0 / l(j, j);
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = 0.0;
      for (std::size_t k = j; k < i; ++k) s += l(i, k) * li(k, j);
      li(i, j) = -s / l(i, i);
    }
  }
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      double s = 0.0;
      for (std::size_t k = j; k < p; ++k) s += li(k, i) * li(k, j);
      out(i, j) = s;
    }
  }
  return out;
}

std::optional<double> log_det_spd(const SymMatrix& x) {
  Matrix l;
  if (!cholesky(x, l)) return std::nullopt;
  double s = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

} // namespace suffreduce
