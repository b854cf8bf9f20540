#ifndef CVPHY_INFO_HPP
#define CVPHY_INFO_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cvphy/linalg.hpp"
#include "cvphy/signal.hpp"

namespace cvphy {

inline constexpr double kPmfTolerance = 1e-9;

inline double bits_to_nats(double b) { return b * M_LN2; }
inline double nats_to_bits(double n) { return n / M_LN2; }

/// Joint pmf over a product alphabet A x B.
struct DiscreteJoint {
    Mat pmf;

    void validate() const {
        if (pmf.rows == 0 || pmf.cols == 0)
            throw std::invalid_argument("DiscreteJoint: empty pmf");
        double total = 0.0;
        for (double p : pmf.data) {
            if (p < 0.0) throw std::invalid_argument("DiscreteJoint: negative probability");
            total += p;
        }
        if (std::abs(total - 1.0) > kPmfTolerance)
            throw std::invalid_argument("DiscreteJoint: pmf does not sum to 1");
    }
};

/// Row-stochastic conditional pmf matrix (a discrete channel).
struct StochasticMatrix {
    Mat rows;

    void validate() const {
        if (rows.rows == 0 || rows.cols == 0)
            throw std::invalid_argument("StochasticMatrix: empty matrix");
        for (std::size_t i = 0; i < rows.rows; ++i) {
            double total = 0.0;
            for (std::size_t j = 0; j < rows.cols; ++j) {
                const double p = rows.at(i, j);
                if (p < 0.0) throw std::invalid_argument("StochasticMatrix: negative entry");
                total += p;
            }
            if (std::abs(total - 1.0) > kPmfTolerance)
                throw std::invalid_argument("StochasticMatrix: row does not sum to 1");
        }
    }
};

/// Shannon entropy in bits, with 0 log 0 = 0.
inline double entropy(const std::vector<double>& pmf) {
    if (pmf.empty()) throw std::invalid_argument("entropy: empty pmf");
    double total = 0.0;
    double h = 0.0;
    for (double p : pmf) {
        if (p < 0.0) throw std::invalid_argument("entropy: negative probability");
        total += p;
        if (p > 0.0) h -= p * std::log2(p);
    }
    if (std::abs(total - 1.0) > kPmfTolerance)
        throw std::invalid_argument("entropy: pmf does not sum to 1");
    return h;
}

/// I(A;B) in bits from the joint pmf.
inline double mutual_information(const DiscreteJoint& joint) {
    joint.validate();
    const Mat& p = joint.pmf;
    std::vector<double> pa(p.rows, 0.0);
    std::vector<double> pb(p.cols, 0.0);
    for (std::size_t a = 0; a < p.rows; ++a)
        for (std::size_t b = 0; b < p.cols; ++b) {
            pa[a] += p.at(a, b);
            pb[b] += p.at(a, b);
        }
    double mi = 0.0;
    for (std::size_t a = 0; a < p.rows; ++a)
        for (std::size_t b = 0; b < p.cols; ++b) {
            const double pab = p.at(a, b);
            if (pab > 0.0) mi += pab * std::log2(pab / (pa[a] * pb[b]));
        }
    return std::max(mi, 0.0);
}

struct MiSequenceResult {
    std::vector<double> mi_bits;  // MI at stage 0 (input joint) through the last stage
    bool non_increasing = true;
    double max_violation = 0.0;   // largest positive increase seen, if any
};

namespace detail {

// Pushforward of the joint through one per-view stage pair: both views pass
// through their own channel independently (the Markov-chain construction).
inline Mat push_joint(const Mat& joint, const Mat* stage_a, const Mat* stage_b) {
    const std::size_t na = stage_a ? stage_a->cols : joint.rows;
    const std::size_t nb = stage_b ? stage_b->cols : joint.cols;
    Mat out(na, nb);
    for (std::size_t a = 0; a < joint.rows; ++a)
        for (std::size_t b = 0; b < joint.cols; ++b) {
            const double pab = joint.at(a, b);
            if (pab == 0.0) continue;
            if (stage_a && stage_b) {
                for (std::size_t a2 = 0; a2 < na; ++a2) {
                    const double ta = stage_a->at(a, a2);
                    if (ta == 0.0) continue;
                    for (std::size_t b2 = 0; b2 < nb; ++b2)
                        out.at(a2, b2) += pab * ta * stage_b->at(b, b2);
                }
            } else if (stage_a) {
                for (std::size_t a2 = 0; a2 < na; ++a2) out.at(a2, b) += pab * stage_a->at(a, a2);
            } else if (stage_b) {
                for (std::size_t b2 = 0; b2 < nb; ++b2) out.at(a, b2) += pab * stage_b->at(b, b2);
            } else {
                out.at(a, b) += pab;
            }
        }
    return out;
}

} // namespace detail

/**
 * Exact brute-force check of the mutual-information non-increase across a
 * chain of independent per-view encoder stages. Stage j of each chain is a
 * discrete channel applied to that view alone; the MI sequence is computed by
 * exact pushforward of the joint. Chains of different depth are allowed; the
 * shorter chain holds its view fixed once exhausted.
 */
inline MiSequenceResult verify_mi_nonincreasing(const DiscreteJoint& joint,
                                                const std::vector<StochasticMatrix>& stages1,
                                                const std::vector<StochasticMatrix>& stages2,
                                                double tolerance = 1e-9) {
    joint.validate();
    for (const auto& s : stages1) s.validate();
    for (const auto& s : stages2) s.validate();

    MiSequenceResult out;
    Mat current = joint.pmf;
    out.mi_bits.push_back(mutual_information(DiscreteJoint{current}));
    const std::size_t depth = std::max(stages1.size(), stages2.size());
    for (std::size_t j = 0; j < depth; ++j) {
        const Mat* sa = j < stages1.size() ? &stages1[j].rows : nullptr;
        const Mat* sb = j < stages2.size() ? &stages2[j].rows : nullptr;
        if (sa && sa->rows != current.rows)
            throw std::invalid_argument("verify_mi_nonincreasing: stage/alphabet mismatch (view 1)");
        if (sb && sb->rows != current.cols)
            throw std::invalid_argument("verify_mi_nonincreasing: stage/alphabet mismatch (view 2)");
        current = detail::push_joint(current, sa, sb);
        out.mi_bits.push_back(mutual_information(DiscreteJoint{current}));
    }
    for (std::size_t j = 1; j < out.mi_bits.size(); ++j) {
        const double rise = out.mi_bits[j] - out.mi_bits[j - 1];
        if (rise > out.max_violation) out.max_violation = rise;
    }
    out.non_increasing = out.max_violation <= tolerance;
    return out;
}

/// Squared cosine similarity of two real vectors: <a,b>^2 / (|a|^2 |b|^2).
inline double scs(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || a.size() != b.size())
        throw std::invalid_argument("scs: size mismatch or empty input");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("scs: zero vector");
    return dot * dot / (na * nb);
}

/// Complex overload using the conjugate inner product, |<a,b>|^2 / (|a|^2 |b|^2).
inline double scs(const ComplexSignal& a, const ComplexSignal& b) {
    if (a.empty() || a.size() != b.size())
        throw std::invalid_argument("scs: size mismatch or empty input");
    Complex dot(0.0, 0.0);
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += std::conj(a[i]) * b[i];
        na += std::norm(a[i]);
        nb += std::norm(b[i]);
    }
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("scs: zero vector");
    return std::norm(dot) / (na * nb);
}

struct CcaResult {
    double cosine = 0.0;   // first canonical correlation
    Mat transform1;        // d1 x 1 projection achieving it
    Mat transform2;        // d2 x 1
    bool reduced_rank = false;
};

namespace detail {

// Columns-centered covariance S^T S / n and the centered matrix itself.
inline Mat center_columns(const Mat& s) {
    Mat c = s;
    for (std::size_t j = 0; j < s.cols; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < s.rows; ++i) mean += s.at(i, j);
        mean /= static_cast<double>(s.rows);
        for (std::size_t i = 0; i < s.rows; ++i) c.at(i, j) -= mean;
    }
    return c;
}

// Inverse square root via eigendecomposition; eigenvalues below tol are
// dropped (reduced-rank path).
inline Mat inv_sqrt_sym(const Mat& a, double tol, bool& reduced) {
    const SymEigenResult eig = sym_eigen(a);
    const std::size_t n = a.rows;
    Mat out(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        if (eig.values[j] > tol) {
            const double w = 1.0 / std::sqrt(eig.values[j]);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < n; ++k)
                    out.at(i, k) += w * eig.vectors.at(i, j) * eig.vectors.at(k, j);
        } else {
            reduced = true;
        }
    }
    return out;
}

} // namespace detail

/**
 * First canonical correlation between two data matrices (rows are samples),
 * computed by SVD of the whitened cross-covariance. Returns the achieving
 * linear transforms; rank-deficient inputs fall back to the span actually
 * present and set reduced_rank.
 */
inline CcaResult cca_cosine_linear(const Mat& s1, const Mat& s2) {
    if (s1.rows == 0 || s2.rows == 0 || s1.rows != s2.rows)
        throw std::invalid_argument("cca_cosine_linear: sample counts must match and be nonzero");
    if (s1.cols == 0 || s2.cols == 0)
        throw std::invalid_argument("cca_cosine_linear: empty feature dimensions");

    const double n = static_cast<double>(s1.rows);
    const Mat c1 = detail::center_columns(s1);
    const Mat c2 = detail::center_columns(s2);
    Mat s11 = matmul(transpose(c1), c1);
    Mat s22 = matmul(transpose(c2), c2);
    Mat s12 = matmul(transpose(c1), c2);
    for (double& v : s11.data) v /= n;
    for (double& v : s22.data) v /= n;
    for (double& v : s12.data) v /= n;

    double scale = 0.0;
    for (std::size_t i = 0; i < s11.rows; ++i) scale = std::max(scale, s11.at(i, i));
    for (std::size_t i = 0; i < s22.rows; ++i) scale = std::max(scale, s22.at(i, i));
    const double tol = std::max(scale, 1.0) * 1e-12;

    CcaResult out;
    const Mat w1 = detail::inv_sqrt_sym(s11, tol, out.reduced_rank);
    const Mat w2 = detail::inv_sqrt_sym(s22, tol, out.reduced_rank);
    const Mat m = matmul(w1, matmul(s12, w2));
    const SvdResult dec = svd(m);

    out.cosine = dec.singular_values.empty() ? 0.0 : std::min(dec.singular_values[0], 1.0);
    out.transform1 = Mat(s1.cols, 1);
    out.transform2 = Mat(s2.cols, 1);
    if (!dec.singular_values.empty()) {
        for (std::size_t i = 0; i < s1.cols; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < s1.cols; ++k) acc += w1.at(i, k) * dec.u.at(k, 0);
            out.transform1.at(i, 0) = acc;
        }
        for (std::size_t i = 0; i < s2.cols; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < s2.cols; ++k) acc += w2.at(i, k) * dec.v.at(k, 0);
            out.transform2.at(i, 0) = acc;
        }
    }
    return out;
}

/// Named positive-definite kernels for the feature-space cosine.
struct Kernel {
    enum class Type { Linear, Polynomial, Gaussian };
    Type type = Type::Linear;
    double degree = 2.0;     // polynomial
    double offset = 1.0;     // polynomial
    double bandwidth = 1.0;  // gaussian

    void validate() const {
        if (type == Type::Polynomial && !(degree >= 1.0))
            throw std::invalid_argument("Kernel: polynomial degree must be >= 1");
        if (type == Type::Gaussian && !(bandwidth > 0.0))
            throw std::invalid_argument("Kernel: gaussian bandwidth must be > 0");
    }
};

namespace detail {

inline double kernel_eval(const Kernel& k, const std::vector<double>& a,
                          const std::vector<double>& b) {
    double dot = 0.0;
    double dist2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        const double d = a[i] - b[i];
        dist2 += d * d;
    }
    switch (k.type) {
        case Kernel::Type::Linear: return dot;
        case Kernel::Type::Polynomial: return std::pow(dot + k.offset, k.degree);
        case Kernel::Type::Gaussian: return std::exp(-dist2 / (2.0 * k.bandwidth * k.bandwidth));
    }
    return 0.0;
}

} // namespace detail

/// Feature-space cosine K(s1,s2) / sqrt(K(s1,s1) K(s2,s2)).
inline double kernel_cosine(const std::vector<double>& s1, const std::vector<double>& s2,
                            const Kernel& kernel) {
    kernel.validate();
    if (s1.empty() || s1.size() != s2.size())
        throw std::invalid_argument("kernel_cosine: size mismatch or empty input");
    const double k12 = detail::kernel_eval(kernel, s1, s2);
    const double k11 = detail::kernel_eval(kernel, s1, s1);
    const double k22 = detail::kernel_eval(kernel, s2, s2);
    if (!(k11 > 0.0) || !(k22 > 0.0))
        throw std::invalid_argument("kernel_cosine: zero self-similarity");
    return k12 / std::sqrt(k11 * k22);
}

} // namespace cvphy

#endif
