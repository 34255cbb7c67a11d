#include "covest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace covest {

namespace {

std::vector<std::size_t> descending_order(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  return idx;
}

// In-place cyclic Jacobi on a row-major p x p symmetric array. Returns the
// eigenvalues in diagonal order and the accumulated rotations in v.
std::vector<double> jacobi(std::vector<double>& a, std::size_t p, std::vector<double>& v) {
  v.assign(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i) v[i * p + i] = 1.0;

  double frob2 = 0.0;
  for (double x : a) frob2 += x * x;
  const double stop = 1e-30 * frob2;
  const std::size_t max_sweeps = NumericConfig::jacobi_sweep_factor * p * p;

  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * p + j]; };

  for (std::size_t sweep = 0;; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) off += at(i, j) * at(i, j);
    }
    if (off <= stop || off == 0.0) break;
    if (sweep >= max_sweeps) throw Error(ErrorCode::NoConvergence, "Jacobi sweep cap exceeded");

    for (std::size_t q = 1; q < p; ++q) {
      for (std::size_t k = 0; k < q; ++k) {
        const double apq = at(k, q);
        if (apq == 0.0) continue;
        const double app = at(k, k);
        const double aqq = at(q, q);
        // Rotation is negligible once a_kq is below the rounding level of both diagonals.
        if (std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq)) ) {
          at(k, q) = 0.0;
          at(q, k) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t r = 0; r < p; ++r) {
          const double ark = at(r, k);
          const double arq = at(r, q);
          at(r, k) = c * ark - s * arq;
          at(r, q) = s * ark + c * arq;
        }
        for (std::size_t r = 0; r < p; ++r) {
          const double akr = at(k, r);
          const double aqr = at(q, r);
          at(k, r) = c * akr - s * aqr;
          at(q, r) = s * akr + c * aqr;
        }
        at(k, q) = 0.0;
        at(q, k) = 0.0;
        for (std::size_t r = 0; r < p; ++r) {
          const double vrk = v[r * p + k];
          const double vrq = v[r * p + q];
          v[r * p + k] = c * vrk - s * vrq;
          v[r * p + q] = s * vrk + c * vrq;
        }
      }
    }
  }

  std::vector<double> values(p);
  for (std::size_t i = 0; i < p; ++i) values[i] = at(i, i);
  return values;
}

template <class T>
double abs2(T x) {
  return std::norm(x);
}

double conj_of(double x) { return x; }
cplx conj_of(cplx x) { return std::conj(x); }

// Semidefinite Cholesky. Returns false when a pivot is negative or a zero
// pivot carries a nonzero residual column.
template <class T>
bool try_cholesky(const Dense<T>& a, Dense<T>& l) {
  const std::size_t p = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < p; ++i) max_diag = std::max(max_diag, std::abs(std::real(a(i, i))));
  const double zero_tol = 1e-14 * max_diag;

  l = Dense<T>(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double d = std::real(a(j, j));
    for (std::size_t k = 0; k < j; ++k) d -= abs2(l(j, k));
    if (d > zero_tol) {
      const double ljj = std::sqrt(d);
      l(j, j) = ljj;
      for (std::size_t i = j + 1; i < p; ++i) {
        T r = a(i, j);
        for (std::size_t k = 0; k < j; ++k) r -= l(i, k) * conj_of(l(j, k));
        l(i, j) = r / ljj;
      }
    } else if (d >= -zero_tol) {
      for (std::size_t i = j + 1; i < p; ++i) {
        T r = a(i, j);
        for (std::size_t k = 0; k < j; ++k) r -= l(i, k) * conj_of(l(j, k));
        if (std::abs(r) > 1e-12 * std::max(max_diag, 1e-300)) return false;
      }
    } else {
      return false;
    }
  }
  return true;
}

template <class T>
Dense<T> cholesky_with_ridge(Dense<T> a) {
  const std::size_t p = a.rows();
  bool all_zero = true;
  for (const T& x : a.data()) {
    require(std::isfinite(std::real(x)) && std::isfinite(std::imag(x)), ErrorCode::NonFinite,
            "cholesky input has non-finite entries");
    if (x != T{}) all_zero = false;
  }
  if (all_zero) return Dense<T>(p, p);

  Dense<T> l;
  if (try_cholesky(a, l)) return l;

  double trace = 0.0;
  for (std::size_t i = 0; i < p; ++i) trace += std::real(a(i, i));
  const double ridge = NumericConfig::cholesky_ridge * trace / static_cast<double>(p);
  for (std::size_t i = 0; i < p; ++i) a(i, i) += ridge;
  if (try_cholesky(a, l)) return l;
  throw Error(ErrorCode::NotPSD, "Cholesky factorization failed even after ridge");
}

}  // namespace

void check_finite(const SymMatrix& a) {
  for (double x : a.data()) require(std::isfinite(x), ErrorCode::NonFinite, "matrix has non-finite entries");
}

void check_finite(const HermMatrix& a) {
  for (const cplx& x : a.data()) {
    require(std::isfinite(x.real()) && std::isfinite(x.imag()), ErrorCode::NonFinite,
            "matrix has non-finite entries");
  }
}

EigDecomp eig_sym(const SymMatrix& a) {
  check_finite(a);
  const std::size_t p = a.dim();
  std::vector<double> work = a.data();
  std::vector<double> v;
  const std::vector<double> raw = jacobi(work, p, v);
  const auto order = descending_order(raw);

  EigDecomp out;
  out.values.resize(p);
  out.vectors = Matrix(p, p);
  for (std::size_t c = 0; c < p; ++c) {
    out.values[c] = raw[order[c]];
    for (std::size_t r = 0; r < p; ++r) out.vectors(r, c) = v[r * p + order[c]];
  }
  return out;
}

HermEigDecomp eig_herm(const HermMatrix& a) {
  check_finite(a);
  const std::size_t m = a.dim();
  const std::size_t n = 2 * m;
  SymMatrix embed(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const cplx z = a(i, j);
      embed.set(i, j, z.real());
      embed.set(m + i, m + j, z.real());
      embed.set(i, m + j, -z.imag());
      embed.set(j, m + i, z.imag());
    }
  }
  const EigDecomp e = eig_sym(embed);

  double scale = 1.0;
  for (double x : e.values) scale = std::max(scale, std::abs(x));
  const double tol = NumericConfig::herm_pairing_tol * scale;

  HermEigDecomp out;
  out.vectors = CMatrix(m, m);
  std::size_t filled = 0;

  // Each eigenvalue of the embedding appears twice; inside each cluster of
  // (numerically) equal values, pivoted complex Gram-Schmidt keeps half of the
  // candidates x + i y as an orthonormal complex basis.
  std::size_t begin = 0;
  while (begin < n) {
    std::size_t end = begin + 1;
    while (end < n && e.values[end - 1] - e.values[end] <= tol) ++end;
    const std::size_t size = end - begin;
    const std::size_t need = std::min((size + 1) / 2, m - filled);

    std::vector<std::vector<cplx>> cand(size, std::vector<cplx>(m));
    for (std::size_t c = 0; c < size; ++c) {
      for (std::size_t r = 0; r < m; ++r) {
        cand[c][r] = cplx(e.vectors(r, begin + c), e.vectors(m + r, begin + c));
      }
    }
    std::vector<bool> used(size, false);
    for (std::size_t k = 0; k < need; ++k) {
      std::size_t best = size;
      double best_norm = -1.0;
      for (std::size_t c = 0; c < size; ++c) {
        if (used[c]) continue;
        double nn = 0.0;
        for (const cplx& z : cand[c]) nn += std::norm(z);
        if (nn > best_norm) {
          best_norm = nn;
          best = c;
        }
      }
      if (best == size || best_norm < 1e-12) {
        throw Error(ErrorCode::NoConvergence, "Hermitian eigenvector pairing failed");
      }
      used[best] = true;
      const double inv = 1.0 / std::sqrt(best_norm);
      std::vector<cplx> q = cand[best];
      for (cplx& z : q) z *= inv;
      for (std::size_t c = 0; c < size; ++c) {
        if (used[c]) continue;
        cplx proj{};
        for (std::size_t r = 0; r < m; ++r) proj += std::conj(q[r]) * cand[c][r];
        for (std::size_t r = 0; r < m; ++r) cand[c][r] -= proj * q[r];
      }
      // Fix the global phase so the largest-modulus entry is real positive.
      std::size_t arg = 0;
      for (std::size_t r = 1; r < m; ++r) {
        if (std::abs(q[r]) > std::abs(q[arg]) + 1e-12) arg = r;
      }
      const cplx phase = std::conj(q[arg]) / std::abs(q[arg]);
      for (std::size_t r = 0; r < m; ++r) out.vectors(r, filled) = q[r] * phase;
      out.values.push_back(e.values[begin + best]);
      ++filled;
    }
    begin = end;
  }
  if (filled != m) throw Error(ErrorCode::NoConvergence, "Hermitian eigenvalue pairing incomplete");

  // Values within a cluster may come out of order by rounding; restore order.
  const auto order = descending_order(out.values);
  HermEigDecomp sorted;
  sorted.values.resize(m);
  sorted.vectors = CMatrix(m, m);
  for (std::size_t c = 0; c < m; ++c) {
    sorted.values[c] = out.values[order[c]];
    for (std::size_t r = 0; r < m; ++r) sorted.vectors(r, c) = out.vectors(r, order[c]);
  }
  return sorted;
}

namespace {

template <class M>
Norms norms_from_values(const M& a, const std::vector<double>& values) {
  Norms n;
  const std::size_t p = a.dim();
  for (double v : values) {
    n.op = std::max(n.op, std::abs(v));
    n.nuclear += std::abs(v);
  }
  double f2 = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double c2 = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double e2 = std::norm(a(i, j));
      c2 += e2;
      n.max = std::max(n.max, std::sqrt(e2));
    }
    f2 += c2;
    n.col12 = std::max(n.col12, std::sqrt(c2));
    n.trace += std::real(a(j, j));
  }
  n.frob = std::sqrt(f2);
  return n;
}

}  // namespace

Norms norms(const SymMatrix& a) { return norms_from_values(a, eig_sym(a).values); }

Norms norms(const HermMatrix& a) { return norms_from_values(a, eig_herm(a).values); }

double frobenius_norm(const SymMatrix& a) {
  double s = 0.0;
  for (double x : a.data()) s += x * x;
  return std::sqrt(s);
}

double frobenius_norm(const HermMatrix& a) {
  double s = 0.0;
  for (const cplx& x : a.data()) s += std::norm(x);
  return std::sqrt(s);
}

double operator_norm(const SymMatrix& a) {
  const auto v = eig_sym(a).values;
  return std::max(std::abs(v.front()), std::abs(v.back()));
}

double max_norm(const SymMatrix& a) {
  double m = 0.0;
  for (double x : a.data()) m = std::max(m, std::abs(x));
  return m;
}

SymMatrix reconstruct(const EigDecomp& e) {
  const std::size_t p = e.values.size();
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < p; ++k) s += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
      out.set(i, j, s);
    }
  }
  return out;
}

SymMatrix psd_project(const SymMatrix& a) {
  EigDecomp e = eig_sym(a);
  bool clamped = false;
  for (double& v : e.values) {
    if (v < 0.0) {
      v = 0.0;
      clamped = true;
    }
  }
  if (!clamped) return a;
  return reconstruct(e);
}

ToeplitzCol toeplitz_project(const SymMatrix& a) {
  check_finite(a);
  const std::size_t p = a.dim();
  ToeplitzCol t{std::vector<double>(p, 0.0)};
  for (std::size_t r = 0; r < p; ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j + r < p; ++j) s += a(j + r, j);
    t.col[r] = s / static_cast<double>(p - r);
  }
  return t;
}

CToeplitzCol toeplitz_project(const HermMatrix& a) {
  check_finite(a);
  const std::size_t m = a.dim();
  CToeplitzCol t{std::vector<cplx>(m)};
  for (std::size_t r = 0; r < m; ++r) {
    cplx s{};
    for (std::size_t j = 0; j + r < m; ++j) s += a(j + r, j);
    t.col[r] = s / static_cast<double>(m - r);
  }
  t.col[0] = cplx(t.col[0].real(), 0.0);
  return t;
}

SymMatrix hadamard(const SymMatrix& a, const SymMatrix& b) {
  require(a.dim() == b.dim(), ErrorCode::DimMismatch, "hadamard operands differ in dimension");
  SymMatrix out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = i; j < a.dim(); ++j) out.set(i, j, a(i, j) * b(i, j));
  }
  return out;
}

SymMatrix hadamard(const SymMatrix& a, const Mask& m) { return hadamard(a, m.weights()); }

Matrix cholesky(const SymMatrix& a) { return cholesky_with_ridge(a.dense()); }

CMatrix cholesky(const HermMatrix& a) { return cholesky_with_ridge(a.dense()); }

std::vector<double> least_squares(const Matrix& a, const std::vector<double>& b) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  require(b.size() == m, ErrorCode::DimMismatch, "least_squares: rhs length mismatch");
  require(m >= n, ErrorCode::InvalidParam, "least_squares needs rows >= cols");

  Matrix r = a;
  std::vector<double> qtb = b;
  double anorm = 0.0;
  for (double x : a.data()) anorm += x * x;
  anorm = std::sqrt(anorm);
  std::vector<bool> dependent(n, false);

  for (std::size_t k = 0; k < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k; i < m; ++i) alpha += r(i, k) * r(i, k);
    alpha = std::sqrt(alpha);
    if (alpha <= 1e-12 * anorm) {
      dependent[k] = true;
      continue;
    }
    if (r(k, k) > 0) alpha = -alpha;
    std::vector<double> v(m - k);
    for (std::size_t i = k; i < m; ++i) v[i - k] = r(i, k);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;
    if (vnorm2 == 0.0) continue;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += v[i - k] * r(i, j);
      s = 2.0 * s / vnorm2;
      for (std::size_t i = k; i < m; ++i) r(i, j) -= s * v[i - k];
    }
    double s = 0.0;
    for (std::size_t i = k; i < m; ++i) s += v[i - k] * qtb[i];
    s = 2.0 * s / vnorm2;
    for (std::size_t i = k; i < m; ++i) qtb[i] -= s * v[i - k];
  }

  // Back substitution; dependent columns are pinned to 0. Rows of dependent
  // columns are skipped, which leaves a valid (not minimum-norm) solution.
  std::vector<double> x(n, 0.0);
  for (std::size_t kk = n; kk-- > 0;) {
    if (dependent[kk] || std::abs(r(kk, kk)) <= 1e-12 * anorm) continue;
    double s = qtb[kk];
    for (std::size_t j = kk + 1; j < n; ++j) s -= r(kk, j) * x[j];
    x[kk] = s / r(kk, kk);
  }
  return x;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorCode::DimMismatch, "matmul dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  require(a.cols() == x.size(), ErrorCode::DimMismatch, "matvec dimension mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

std::vector<double> matvec_t(const Matrix& a, const std::vector<double>& x) {
  require(a.rows() == x.size(), ErrorCode::DimMismatch, "matvec_t dimension mismatch");
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * x[i];
  }
  return y;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size(), ErrorCode::DimMismatch, "dot length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

SymMatrix square(const SymMatrix& z) {
  const std::size_t p = z.dim();
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < p; ++k) s += z(i, k) * z(k, j);
      out.set(i, j, s);
    }
  }
  return out;
}

}  // namespace covest
