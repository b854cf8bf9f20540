#ifndef CVPHY_LINALG_HPP
#define CVPHY_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cvphy {

/// Small dense row-major real matrix. Sized for the analytics in this library
/// (CCA, kernel weights), not for large-scale linear algebra.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const double& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }
};

inline Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
    Mat c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double v = a.at(i, k);
            if (v == 0.0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) c.at(i, j) += v * b.at(k, j);
        }
    return c;
}

inline Mat transpose(const Mat& a) {
    Mat t(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
    return t;
}

struct SymEigenResult {
    std::vector<double> values; // descending
    Mat vectors;                // columns are eigenvectors
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
inline SymEigenResult sym_eigen(const Mat& a_in, int max_sweeps = 64) {
    if (a_in.rows != a_in.cols) throw std::invalid_argument("sym_eigen: matrix not square");
    const std::size_t n = a_in.rows;
    Mat a = a_in;
    Mat v = Mat::identity(n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a.at(i, p);
                    const double aiq = a.at(i, q);
                    a.at(i, p) = c * aip - s * aiq;
                    a.at(i, q) = s * aip + c * aiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double apj = a.at(p, j);
                    const double aqj = a.at(q, j);
                    a.at(p, j) = c * apj - s * aqj;
                    a.at(q, j) = s * apj + c * aqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v.at(i, p);
                    const double viq = v.at(i, q);
                    v.at(i, p) = c * vip - s * viq;
                    v.at(i, q) = s * vip + c * viq;
                }
            }
    }
    // Sort eigenpairs by descending eigenvalue.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (a.at(order[j], order[j]) > a.at(order[i], order[i])) std::swap(order[i], order[j]);
    SymEigenResult out;
    out.values.resize(n);
    out.vectors = Mat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a.at(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors.at(i, j) = v.at(i, order[j]);
    }
    return out;
}

struct SvdResult {
    Mat u;                             // m x r
    std::vector<double> singular_values; // descending, length r = min(m, n)
    Mat v;                             // n x r
};

/// SVD via the eigendecomposition of A^T A (adequate for the small,
/// well-conditioned matrices this library produces).
inline SvdResult svd(const Mat& a) {
    const std::size_t m = a.rows;
    const std::size_t n = a.cols;
    const Mat ata = matmul(transpose(a), a);
    const SymEigenResult eig = sym_eigen(ata);
    const std::size_t r = std::min(m, n);
    SvdResult out;
    out.singular_values.resize(r);
    out.v = Mat(n, r);
    out.u = Mat(m, r);
    for (std::size_t j = 0; j < r; ++j) {
        const double lam = std::max(eig.values[j], 0.0);
        const double s = std::sqrt(lam);
        out.singular_values[j] = s;
        for (std::size_t i = 0; i < n; ++i) out.v.at(i, j) = eig.vectors.at(i, j);
        if (s > 1e-150) {
            for (std::size_t i = 0; i < m; ++i) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) acc += a.at(i, k) * eig.vectors.at(k, j);
                out.u.at(i, j) = acc / s;
            }
        }
    }
    return out;
}

} // namespace cvphy

#endif
