#pragma once

// Dense linear algebra for small matrices (dimension up to ~64): Jacobi
// eigensolver, Hessenberg/Francis QR eigenvalues, matrix exponential,
// pseudo-inverse of antisymmetric matrices and central finite differences.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "pnspec/errors.hpp"

namespace pnspec {

using cplx = std::complex<double>;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class T>
inline T conj_of(const T& x) {
  if constexpr (is_complex_v<T>) {
    return std::conj(x);
  } else {
    return x;
  }
}

template <class T>
inline double real_of(const T& x) {
  if constexpr (is_complex_v<T>) {
    return x.real();
  } else {
    return x;
  }
}

template <class T>
inline double imag_of(const T& x) {
  if constexpr (is_complex_v<T>) {
    return x.imag();
  } else {
    return 0.0;
  }
}

template <class T>
inline bool is_finite_scalar(const T& x) {
  return std::isfinite(real_of(x)) && std::isfinite(imag_of(x));
}

/// Row-major dense matrix over double or std::complex<double>.
template <class T>
class DenseMatrix {
 public:
  using value_type = T;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T{}) {}

  /// Builds from row-major entries; rejects wrong counts and non-finite values.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("DenseMatrix: entry count " + std::to_string(data_.size()) + " != " +
                       std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    for (const auto& x : data_) {
      if (!is_finite_scalar(x)) throw NumericalError("DenseMatrix: non-finite entry on construction");
    }
  }

  DenseMatrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ShapeError("DenseMatrix: ragged initializer");
      for (const auto& x : r) {
        if (!is_finite_scalar(x)) throw NumericalError("DenseMatrix: non-finite entry on construction");
        data_.push_back(x);
      }
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  static DenseMatrix diagonal(const std::vector<T>& d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<T>& data() const noexcept { return data_; }
  std::vector<T>& data() noexcept { return data_; }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  DenseMatrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator-(DenseMatrix a) {
    for (auto& x : a.data_) x = -x;
    return a;
  }
  friend DenseMatrix operator*(DenseMatrix a, const T& s) { return a *= s; }
  friend DenseMatrix operator*(const T& s, DenseMatrix a) { return a *= s; }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols_ != b.rows_) throw ShapeError("DenseMatrix: product shape mismatch");
    DenseMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      T* crow = &c.data_[i * c.cols_];
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T aik = a.data_[i * a.cols_ + k];
        if (aik == T{}) continue;
        const T* brow = &b.data_[k * b.cols_];
        for (std::size_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
      }
    }
    return c;
  }

  std::vector<T> operator*(const std::vector<T>& v) const {
    if (v.size() != cols_) throw ShapeError("DenseMatrix: matrix-vector shape mismatch");
    std::vector<T> out(rows_, T{});
    for (std::size_t i = 0; i < rows_; ++i) {
      T acc{};
      for (std::size_t j = 0; j < cols_; ++j) acc += data_[i * cols_ + j] * v[j];
      out[i] = acc;
    }
    return out;
  }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  DenseMatrix adjoint() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = conj_of((*this)(i, j));
    return t;
  }

  T trace() const {
    T acc{};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) acc += (*this)(i, i);
    return acc;
  }

  double frobenius() const {
    double acc = 0.0;
    for (const auto& x : data_) acc += std::norm(cplx(x));
    return std::sqrt(acc);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  /// Induced 1-norm (max column sum).
  double norm1() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
      best = std::max(best, s);
    }
    return best;
  }

  DenseMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw ShapeError("DenseMatrix: block out of range");
    DenseMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  /// Upper-left k x k minor.
  DenseMatrix leading(std::size_t k) const { return block(0, 0, k, k); }

  DenseMatrix column_block(std::size_t c0, std::size_t nc) const { return block(0, c0, rows_, nc); }

  std::string dump() const {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < rows_; ++i) {
      os << "[";
      for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << (*this)(i, j);
      os << "]\n";
    }
    return os.str();
  }

 private:
  void check_same_shape(const DenseMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("DenseMatrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using CMatrix = DenseMatrix<cplx>;
using RMatrix = DenseMatrix<double>;

inline CMatrix to_complex(const RMatrix& a) {
  CMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i];
  return c;
}

inline RMatrix real_part(const CMatrix& a) {
  RMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) r.data()[i] = a.data()[i].real();
  return r;
}

inline double max_imag(const CMatrix& a) {
  double m = 0.0;
  for (const auto& x : a.data()) m = std::max(m, std::abs(x.imag()));
  return m;
}

template <class T>
DenseMatrix<T> commutator(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  return a * b - b * a;
}

/// max |A - A^dagger|
template <class T>
double hermiticity_residual(const DenseMatrix<T>& a) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r = std::max(r, std::abs(a(i, j) - conj_of(a(j, i))));
  return r;
}

/// max |A + A^dagger|
template <class T>
double antihermiticity_residual(const DenseMatrix<T>& a) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r = std::max(r, std::abs(a(i, j) + conj_of(a(j, i))));
  return r;
}

/// max |U^dagger U - 1|
template <class T>
double unitarity_residual(const DenseMatrix<T>& u) {
  return (u.adjoint() * u - DenseMatrix<T>::identity(u.cols())).max_abs();
}

/// Determinant by partial-pivot LU.
template <class T>
T determinant(DenseMatrix<T> a) {
  if (!a.square()) throw ShapeError("determinant: non-square input");
  const std::size_t n = a.rows();
  T det{1};
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == T{}) return T{};
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const T f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

template <class T>
struct EigenSystem {
  std::vector<double> values;  // ascending
  DenseMatrix<T> vectors;      // columns
};

/// Cyclic Jacobi diagonalization of a Hermitian (or real symmetric) matrix.
/// Throws ConventionError when max|A - A^dagger| exceeds `tol`.
template <class T>
EigenSystem<T> hermitian_eigen(const DenseMatrix<T>& input, double tol = 1e-10) {
  if (!input.square()) throw ShapeError("hermitian_eigen: non-square input");
  const double herm = hermiticity_residual(input);
  if (herm > tol) {
    throw ConventionError("hermitian_eigen: Hermiticity residual " + std::to_string(herm) + " above tolerance");
  }
  const std::size_t n = input.rows();
  DenseMatrix<T> a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + conj_of(input(j, i)));
  DenseMatrix<T> v = DenseMatrix<T>::identity(n);

  const double scale = std::max(a.frobenius(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(cplx(a(p, q)));
    if (std::sqrt(off) <= 1e-17 * scale) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const T apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300 || mag <= 1e-19 * scale) {
          a(p, q) = T{};
          a(q, p) = T{};
          continue;
        }
        const T phase = apq / mag;
        const double app = real_of(a(p, p));
        const double aqq = real_of(a(q, q));
        const double theta = (aqq - app) / (2.0 * mag);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // U = [[c, s], [-s conj(phase), c conj(phase)]] on (p, q)
        const T upp = T{c};
        const T upq = T{s};
        const T uqp = -s * conj_of(phase);
        const T uqq = c * conj_of(phase);
        for (std::size_t k = 0; k < n; ++k) {
          const T akp = a(k, p);
          const T akq = a(k, q);
          a(k, p) = akp * upp + akq * uqp;
          a(k, q) = akp * upq + akq * uqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const T apk = a(p, k);
          const T aqk = a(q, k);
          a(p, k) = conj_of(upp) * apk + conj_of(uqp) * aqk;
          a(q, k) = conj_of(upq) * apk + conj_of(uqq) * aqk;
        }
        a(p, q) = T{};
        a(q, p) = T{};
        a(p, p) = T{real_of(a(p, p))};
        a(q, q) = T{real_of(a(q, q))};
        for (std::size_t k = 0; k < n; ++k) {
          const T vkp = v(k, p);
          const T vkq = v(k, q);
          v(k, p) = vkp * upp + vkq * uqp;
          v(k, q) = vkp * upq + vkq * uqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return real_of(a(i, i)) < real_of(a(j, j)); });
  EigenSystem<T> out{std::vector<double>(n), DenseMatrix<T>(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = real_of(a(order[c], order[c]));
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

template <class T>
std::vector<double> hermitian_eigenvalues(const DenseMatrix<T>& a, double tol = 1e-10) {
  return hermitian_eigen(a, tol).values;
}

namespace detail {

// Householder reduction to upper Hessenberg form, in place.
inline void reduce_to_hessenberg(RMatrix& a) {
  const std::size_t n = a.rows();
  if (n < 3) return;
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha += a(i, k) * a(i, k);
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    if (a(k + 1, k) > 0) alpha = -alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a(i, k);
      if (i == k + 1) v[i] -= alpha;
      vnorm2 += v[i] * v[i];
    }
    if (vnorm2 == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) dot += v[i] * a(i, j);
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= f * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * v[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

inline double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr layout).
inline std::vector<cplx> hessenberg_qr(RMatrix a, const RMatrix& original) {
  const int n = static_cast<int>(a.rows());
  std::vector<cplx> wri(static_cast<std::size_t>(n));
  const double eps = std::numeric_limits<double>::epsilon();
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  int nn = n - 1;
  double t = 0.0;
  int l = 0;
  while (nn >= 0) {
    int its = 0;
    do {
      for (l = nn; l > 0; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        wri[static_cast<std::size_t>(nn--)] = x + t;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wri[static_cast<std::size_t>(nn - 1)] = wri[static_cast<std::size_t>(nn)] = x + z;
            if (z != 0.0) wri[static_cast<std::size_t>(nn)] = x - w / z;
          } else {
            wri[static_cast<std::size_t>(nn)] = cplx(x + p, -z);
            wri[static_cast<std::size_t>(nn - 1)] = std::conj(wri[static_cast<std::size_t>(nn)]);
          }
          nn -= 2;
        } else {
          if (its == 60) {
            throw NumericalError("real_eigenvalues: QR iteration did not converge; matrix:\n" + original.dump());
          }
          if (its == 10 || its == 20 || its == 40) {
            t += x;
            for (int i = 0; i < nn + 1; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0, q = 0, r = 0, z = 0;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j < nn + 1; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k + 1 != nn) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i < mmin + 1; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k + 1 != nn) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return wri;
}

}  // namespace detail

/// Eigenvalues of a real square matrix (Householder-Hessenberg + Francis QR),
/// sorted by (real, imag).
inline std::vector<cplx> real_eigenvalues(const RMatrix& a) {
  if (!a.square()) throw ShapeError("real_eigenvalues: non-square input");
  if (a.rows() == 0) return {};
  RMatrix h = a;
  detail::reduce_to_hessenberg(h);
  auto ev = detail::hessenberg_qr(std::move(h), a);
  std::sort(ev.begin(), ev.end(), [](const cplx& x, const cplx& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return ev;
}

/// Scaling and squaring with a Taylor kernel on ||X/2^s||_1 <= 1/2.
template <class T>
DenseMatrix<T> matrix_exp(const DenseMatrix<T>& x) {
  if (!x.square()) throw ShapeError("matrix_exp: non-square input");
  const std::size_t n = x.rows();
  const double nrm = x.norm1();
  int s = 0;
  if (nrm > 0.5) s = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  const DenseMatrix<T> y = x * T{std::ldexp(1.0, -s)};
  DenseMatrix<T> sum = DenseMatrix<T>::identity(n);
  DenseMatrix<T> term = DenseMatrix<T>::identity(n);
  for (int k = 1; k <= 30; ++k) {
    term = term * y;
    term *= T{1.0 / k};
    sum += term;
    if (term.max_abs() <= 1e-18 * sum.max_abs()) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

/// Range projector data of a real antisymmetric matrix P: orthonormal range
/// basis Q (columns) and the Moore-Penrose pseudo-inverse, computed from the
/// eigendecomposition of P P^T with cutoff rel_cutoff * max eigenvalue.
struct AntisymmetricRange {
  RMatrix basis;
  RMatrix pinv;
  std::size_t rank = 0;
};

inline AntisymmetricRange antisymmetric_range(const RMatrix& p, double rel_cutoff = 1e-9) {
  if (!p.square()) throw ShapeError("antisymmetric_range: non-square input");
  const std::size_t d = p.rows();
  const RMatrix ppt = p * p.transpose();
  const auto es = hermitian_eigen(ppt, 1e-8 * std::max(1.0, ppt.max_abs()));
  const double wmax = es.values.empty() ? 0.0 : std::max(es.values.back(), 0.0);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < d; ++i) {
    if (wmax > 0 && es.values[i] > rel_cutoff * wmax) keep.push_back(i);
  }
  AntisymmetricRange out;
  out.rank = keep.size();
  out.basis = RMatrix(d, keep.size());
  RMatrix scaled(d, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    for (std::size_t r = 0; r < d; ++r) {
      out.basis(r, c) = es.vectors(r, keep[c]);
      scaled(r, c) = es.vectors(r, keep[c]) / es.values[keep[c]];
    }
  }
  // P^+ = P^T (P P^T)^+
  out.pinv = p.transpose() * (scaled * out.basis.transpose());
  return out;
}

/// Central-difference directional derivatives of f at `base` along each
/// direction, with `advance(base, direction, eps)` producing the displaced
/// point. O(h^2) truncation error.
template <class Point, class Direction, class F, class Advance>
std::vector<double> fd_gradient(const F& f, const Point& base, const std::vector<Direction>& directions,
                                double h, const Advance& advance) {
  std::vector<double> out;
  out.reserve(directions.size());
  for (const auto& dir : directions) {
    const double fp = f(advance(base, dir, h));
    const double fm = f(advance(base, dir, -h));
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw NumericalError("fd_gradient: non-finite function value");
    out.push_back((fp - fm) / (2.0 * h));
  }
  return out;
}

/// Vector-space overload: displaced point is base + eps * direction.
template <class F>
std::vector<double> fd_gradient(const F& f, const std::vector<double>& base,
                                const std::vector<std::vector<double>>& directions, double h = 1e-5) {
  return fd_gradient(f, base, directions, h,
                     [](const std::vector<double>& b, const std::vector<double>& d, double eps) {
                       if (b.size() != d.size()) throw ShapeError("fd_gradient: direction dimension mismatch");
                       std::vector<double> p(b);
                       for (std::size_t i = 0; i < p.size(); ++i) p[i] += eps * d[i];
                       return p;
                     });
}

/// Multi-output variant: f returns a vector; result[i][k] is the derivative of
/// output k along direction i.
template <class Point, class Direction, class F, class Advance>
std::vector<std::vector<double>> fd_jacobian(const F& f, const Point& base, const std::vector<Direction>& directions,
                                             double h, const Advance& advance) {
  std::vector<std::vector<double>> out;
  out.reserve(directions.size());
  for (const auto& dir : directions) {
    const std::vector<double> fp = f(advance(base, dir, h));
    const std::vector<double> fm = f(advance(base, dir, -h));
    if (fp.size() != fm.size()) throw NumericalError("fd_jacobian: output size changed between evaluations");
    std::vector<double> row(fp.size());
    for (std::size_t k = 0; k < fp.size(); ++k) {
      if (!std::isfinite(fp[k]) || !std::isfinite(fm[k])) throw NumericalError("fd_jacobian: non-finite value");
      row[k] = (fp[k] - fm[k]) / (2.0 * h);
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace pnspec
