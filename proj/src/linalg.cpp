#include "bkmr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "bkmr/simd.hpp"

namespace bkmr::la {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw InternalError(msg);
}

// y += sum_k a_k x_k over an arbitrary number of (a, x) pairs, feeding the
// 4-way fused kernel and mopping up with plain axpy.
void multi_axpy(const double* coeffs, const Matrix& rows_src, std::size_t first_row,
                std::size_t count, double* y, std::size_t n) {
    const auto& k = simd::active();
    std::size_t j = 0;
    for (; j + 4 <= count; j += 4) {
        const double a[4] = {coeffs[j], coeffs[j + 1], coeffs[j + 2], coeffs[j + 3]};
        k.axpy4(a, rows_src.row(first_row + j), rows_src.row(first_row + j + 1),
                rows_src.row(first_row + j + 2), rows_src.row(first_row + j + 3), y, n);
    }
    for (; j < count; ++j) k.axpy(coeffs[j], rows_src.row(first_row + j), y, n);
}

} // namespace

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Vector Matrix::diag() const {
    const std::size_t n = std::min(rows_, cols_);
    Vector d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = (*this)(i, i);
    return d;
}

double dot(const Vector& x, const Vector& y) {
    require(x.size() == y.size(), "dot: size mismatch");
    return simd::active().dot(x.data(), y.data(), x.size());
}

double norm2_sq(const Vector& x) { return simd::active().sumsq(x.data(), x.size()); }

Vector add(const Vector& x, const Vector& y) {
    require(x.size() == y.size(), "add: size mismatch");
    Vector r(x);
    simd::active().axpy(1.0, y.data(), r.data(), r.size());
    return r;
}

Vector sub(const Vector& x, const Vector& y) {
    require(x.size() == y.size(), "sub: size mismatch");
    Vector r(x);
    simd::active().axpy(-1.0, y.data(), r.data(), r.size());
    return r;
}

Vector scaled(const Vector& x, double a) {
    Vector r(x);
    simd::active().scal(a, r.data(), r.size());
    return r;
}

bool all_finite(const Vector& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

Vector matvec(const Matrix& a, const Vector& x) {
    require(a.cols() == x.size(), "matvec: size mismatch");
    const auto& k = simd::active();
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = k.dot(a.row(i), x.data(), a.cols());
    return y;
}

Vector matvec_t(const Matrix& a, const Vector& x) {
    require(a.rows() == x.size(), "matvec_t: size mismatch");
    const auto& k = simd::active();
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) k.axpy(x[i], a.row(i), y.data(), a.cols());
    return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "matmul: size mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        multi_axpy(a.row(i), b, 0, a.cols(), c.row(i), b.cols());
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows(), "matmul_tn: size mismatch");
    const auto& k = simd::active();
    Matrix c(a.cols(), b.cols());
    for (std::size_t l = 0; l < a.rows(); ++l)
        for (std::size_t i = 0; i < a.cols(); ++i)
            k.axpy(a(l, i), b.row(l), c.row(i), b.cols());
    return c;
}

Matrix crossprod(const Matrix& x) {
    Matrix c = matmul_tn(x, x);
    symmetrize(c);
    return c;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "add: shape mismatch");
    Matrix r(a);
    simd::active().axpy(1.0, b.data(), r.data(), r.size());
    return r;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "sub: shape mismatch");
    Matrix r(a);
    simd::active().axpy(-1.0, b.data(), r.data(), r.size());
    return r;
}

Matrix scaled(const Matrix& a, double s) {
    Matrix r(a);
    simd::active().scal(s, r.data(), r.size());
    return r;
}

void add_to_diagonal(Matrix& a, double s) {
    require(a.square(), "add_to_diagonal: not square");
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += s;
}

void symmetrize(Matrix& a) {
    require(a.square(), "symmetrize: not square");
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
}

double trace(const Matrix& a) {
    require(a.square(), "trace: not square");
    double t = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

double trace_product_sym(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "trace_product_sym: shape mismatch");
    return simd::active().dot(a.data(), b.data(), a.size());
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    const double* p = a.data();
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(p[i]));
    return m;
}

double max_asymmetry(const Matrix& a) {
    require(a.square(), "max_asymmetry: not square");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - a(j, i)));
    return m;
}

bool all_finite(const Matrix& a) {
    const double* p = a.data();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!std::isfinite(p[i])) return false;
    return true;
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "frobenius_distance: shape mismatch");
    double acc = 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = pa[i] - pb[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

// ---- Cholesky ----

Cholesky::Cholesky(const Matrix& a) {
    require(a.square(), "cholesky: not square");
    const std::size_t n = a.rows();
    const auto& k = simd::active();
    l_ = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j) - k.dot(l_.row(j), l_.row(j), j);
        if (!(d > 0.0) || !std::isfinite(d))
            throw NotPositiveDefinite("cholesky: matrix is not positive definite");
        const double ljj = std::sqrt(d);
        l_(j, j) = ljj;
        const double inv = 1.0 / ljj;
        for (std::size_t i = j + 1; i < n; ++i)
            l_(i, j) = (a(i, j) - k.dot(l_.row(i), l_.row(j), j)) * inv;
    }
}

double Cholesky::log_det() const {
    double s = 0.0;
    for (std::size_t i = 0; i < l_.rows(); ++i) s += std::log(l_(i, i));
    return 2.0 * s;
}

void Cholesky::solve_lower_in_place(Matrix& b) const {
    require(b.rows() == l_.rows(), "solve_lower: shape mismatch");
    const std::size_t n = l_.rows();
    const std::size_t m = b.cols();
    const auto& k = simd::active();
    for (std::size_t i = 0; i < n; ++i) {
        double* bi = b.row(i);
        std::size_t j = 0;
        for (; j + 4 <= i; j += 4) {
            const double a[4] = {-l_(i, j), -l_(i, j + 1), -l_(i, j + 2), -l_(i, j + 3)};
            k.axpy4(a, b.row(j), b.row(j + 1), b.row(j + 2), b.row(j + 3), bi, m);
        }
        for (; j < i; ++j) k.axpy(-l_(i, j), b.row(j), bi, m);
        k.scal(1.0 / l_(i, i), bi, m);
    }
}

void Cholesky::solve_upper_in_place(Matrix& b) const {
    require(b.rows() == l_.rows(), "solve_upper: shape mismatch");
    const std::size_t n = l_.rows();
    const std::size_t m = b.cols();
    const auto& k = simd::active();
    for (std::size_t ii = n; ii-- > 0;) {
        double* bi = b.row(ii);
        // L^T(ii, j) = L(j, ii) for j > ii
        std::size_t j = ii + 1;
        for (; j + 4 <= n; j += 4) {
            const double a[4] = {-l_(j, ii), -l_(j + 1, ii), -l_(j + 2, ii), -l_(j + 3, ii)};
            k.axpy4(a, b.row(j), b.row(j + 1), b.row(j + 2), b.row(j + 3), bi, m);
        }
        for (; j < n; ++j) k.axpy(-l_(j, ii), b.row(j), bi, m);
        k.scal(1.0 / l_(ii, ii), bi, m);
    }
}

Vector Cholesky::solve(const Vector& b) const {
    require(b.size() == l_.rows(), "cholesky solve: size mismatch");
    const std::size_t n = l_.rows();
    const auto& k = simd::active();
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = (b[i] - k.dot(l_.row(i), y.data(), i)) / l_(i, i);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= l_(j, ii) * y[j];
        y[ii] = acc / l_(ii, ii);
    }
    return y;
}

Matrix Cholesky::solve(Matrix b) const {
    solve_lower_in_place(b);
    solve_upper_in_place(b);
    return b;
}

Matrix Cholesky::inverse() const {
    Matrix inv = solve(Matrix::identity(l_.rows()));
    symmetrize(inv);
    return inv;
}

// ---- symmetric eigensolver (Householder tridiagonalization + implicit QL) ----

namespace {

// Reduce symmetric A to tridiagonal form: A = Q T Q^T with diag d, subdiag e.
// On return `vt` holds Q^T (rows of vt are columns of Q).
void tridiagonalize(Matrix a, Vector& d, Vector& e, Matrix& vt) {
    const std::size_t n = a.rows();
    const auto& kr = simd::active();
    d.assign(n, 0.0);
    e.assign(n, 0.0);

    std::vector<Vector> hh_vectors; // Householder v (support k+1..n-1), v[k+1] pivot
    std::vector<double> hh_beta;
    hh_vectors.reserve(n);
    hh_beta.reserve(n);

    Vector v(n), p(n), w(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t len = n - k - 1;
        // scale for overflow protection
        double scale = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) scale += std::abs(a(i, k));
        if (scale == 0.0) {
            e[k + 1] = 0.0;
            hh_vectors.emplace_back();
            hh_beta.push_back(0.0);
            continue;
        }
        double sigma = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k) / scale;
            sigma += v[i] * v[i];
        }
        double alpha = std::sqrt(sigma);
        if (v[k + 1] > 0.0) alpha = -alpha;
        e[k + 1] = scale * alpha;
        sigma -= v[k + 1] * alpha;
        v[k + 1] -= alpha;
        const double beta = 1.0 / sigma; // H = I - beta v v^T with this v

        // p = beta * A22 * v on the trailing block
        for (std::size_t i = k + 1; i < n; ++i)
            p[i] = beta * kr.dot(a.row(i) + (k + 1), v.data() + (k + 1), len);
        // w = p - (beta/2)(p.v) v
        const double kcoef =
            0.5 * beta * kr.dot(p.data() + (k + 1), v.data() + (k + 1), len);
        for (std::size_t i = k + 1; i < n; ++i) w[i] = p[i] - kcoef * v[i];
        // A22 -= v w^T + w v^T
        for (std::size_t i = k + 1; i < n; ++i) {
            kr.axpy(-v[i], w.data() + (k + 1), a.row(i) + (k + 1), len);
            kr.axpy(-w[i], v.data() + (k + 1), a.row(i) + (k + 1), len);
        }
        hh_vectors.emplace_back(v.begin() + static_cast<long>(k + 1), v.end());
        hh_beta.push_back(beta);
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
    if (n >= 2) e[n - 1] = a(n - 1, n - 2);

    // Accumulate Q^T = H_{n-3} ... H_0 by applying the reflectors to the
    // identity in first-to-last order.
    vt = Matrix::identity(n);
    Vector u(n);
    for (std::size_t kk = 0; kk < hh_vectors.size(); ++kk) {
        if (hh_beta[kk] == 0.0 || hh_vectors[kk].empty()) continue;
        const Vector& hv = hh_vectors[kk];
        const std::size_t off = kk + 1;
        // u = v^T V (over rows off..n-1); V is identity outside processed block,
        // but a full accumulation keeps the logic simple.
        std::fill(u.begin(), u.end(), 0.0);
        for (std::size_t i = 0; i < hv.size(); ++i)
            kr.axpy(hv[i], vt.row(off + i), u.data(), n);
        for (std::size_t i = 0; i < hv.size(); ++i)
            kr.axpy(-hh_beta[kk] * hv[i], u.data(), vt.row(off + i), n);
    }
}

// Implicit QL with Wilkinson shifts on the tridiagonal (d, e); rotations are
// accumulated into the rows of vt so that row k of vt ends up being the
// eigenvector for d[k].
void tql_implicit(Vector& d, Vector& e, Matrix& vt) {
    const std::size_t n = d.size();
    if (n == 0) return;
    const auto& kr = simd::active();
    // shift subdiagonal: e[i] couples i and i+1
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    // Deflation tests against the running matrix scale (EISPACK style), so
    // clusters of near-zero eigenvalues from rank-deficient kernels deflate
    // immediately instead of iterating on noise. Iterations draw on a global
    // 30n budget rather than a per-eigenvalue cap: tightly clustered small
    // eigenvalues under a huge spectral radius can need far more than the
    // classic 30 sweeps each while the total stays low.
    std::size_t budget = std::max<std::size_t>(30 * n, 1000);
    double tst1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double tst2 = tst1 + std::abs(e[m]);
                if (tst2 == tst1) break;
            }
            if (m != l) {
                if (budget-- == 0)
                    throw InternalError("sym_eig: QL iteration failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                std::size_t i = m;
                bool underflow = false;
                while (i-- > l) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    kr.rot(vt.row(i + 1), vt.row(i), c, s, vt.cols());
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

} // namespace

SymEig sym_eig(const Matrix& a) {
    require(a.square(), "sym_eig: not square");
    const std::size_t n = a.rows();
    SymEig out;
    if (n == 0) return out;
    if (n == 1) {
        out.values = {a(0, 0)};
        out.vectors = Matrix::identity(1);
        return out;
    }
    Vector e;
    tridiagonalize(a, out.values, e, out.vectors);
    tql_implicit(out.values, e, out.vectors);
    return out;
}

std::size_t rank_qr(const Matrix& x, double rel_tol) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (n == 0 || p == 0) return 0;
    Matrix a = x;
    std::vector<double> col_norm(p);
    for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a(i, j) * a(i, j);
        col_norm[j] = s;
    }
    const std::size_t steps = std::min(n, p);
    double first_pivot = 0.0;
    std::size_t rank = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        std::size_t piv = k;
        for (std::size_t j = k + 1; j < p; ++j)
            if (col_norm[j] > col_norm[piv]) piv = j;
        if (piv != k) {
            for (std::size_t i = 0; i < n; ++i) std::swap(a(i, k), a(i, piv));
            std::swap(col_norm[k], col_norm[piv]);
        }
        double sigma = 0.0;
        for (std::size_t i = k; i < n; ++i) sigma += a(i, k) * a(i, k);
        const double rkk = std::sqrt(sigma);
        if (k == 0) first_pivot = rkk;
        if (rkk <= rel_tol * first_pivot || rkk == 0.0) break;
        ++rank;
        // Householder vector for column k
        double alpha = a(k, k) >= 0.0 ? -rkk : rkk;
        Vector v(n - k, 0.0);
        v[0] = a(k, k) - alpha;
        for (std::size_t i = k + 1; i < n; ++i) v[i - k] = a(i, k);
        const double vtv = v[0] * v[0] + (sigma - a(k, k) * a(k, k));
        a(k, k) = alpha;
        for (std::size_t i = k + 1; i < n; ++i) a(i, k) = 0.0;
        if (vtv > 0.0) {
            const double beta = 2.0 / vtv;
            for (std::size_t j = k + 1; j < p; ++j) {
                double proj = 0.0;
                for (std::size_t i = k; i < n; ++i) proj += v[i - k] * a(i, j);
                proj *= beta;
                for (std::size_t i = k; i < n; ++i) a(i, j) -= proj * v[i - k];
            }
        }
        for (std::size_t j = k + 1; j < p; ++j) {
            col_norm[j] -= a(k, j) * a(k, j);
            if (col_norm[j] < 0.0) col_norm[j] = 0.0;
        }
    }
    return rank;
}

} // namespace bkmr::la
