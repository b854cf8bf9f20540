#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cvphy/info.hpp"
#include "cvphy/rng.hpp"

using namespace cvphy;

namespace {

DiscreteJoint random_joint(SeededRng& rng, std::size_t na, std::size_t nb) {
    DiscreteJoint j;
    j.pmf = Mat(na, nb);
    double total = 0.0;
    for (double& v : j.pmf.data) {
        v = rng.uniform() + 1e-4;
        total += v;
    }
    for (double& v : j.pmf.data) v /= total;
    return j;
}

StochasticMatrix random_stage(SeededRng& rng, std::size_t in, std::size_t out) {
    StochasticMatrix s;
    s.rows = Mat(in, out);
    for (std::size_t i = 0; i < in; ++i) {
        double total = 0.0;
        for (std::size_t o = 0; o < out; ++o) {
            s.rows.at(i, o) = rng.uniform() + 1e-4;
            total += s.rows.at(i, o);
        }
        for (std::size_t o = 0; o < out; ++o) s.rows.at(i, o) /= total;
    }
    return s;
}

StochasticMatrix identity_stage(std::size_t n) {
    StochasticMatrix s;
    s.rows = Mat::identity(n);
    return s;
}

} // namespace

TEST_CASE("entropy basics") {
    CHECK(entropy({0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(entropy({1.0, 0.0, 0.0}) == 0.0);
    CHECK(entropy({0.5, 0.25, 0.25}) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK_THROWS_AS(entropy({0.5, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(entropy({1.2, -0.2}), std::invalid_argument);
    CHECK_THROWS_AS(entropy({}), std::invalid_argument);
}

TEST_CASE("mutual information basics") {
    DiscreteJoint indep;
    indep.pmf = Mat(2, 3);
    const double pa[2] = {0.3, 0.7};
    const double pb[3] = {0.2, 0.5, 0.3};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 3; ++b) indep.pmf.at(a, b) = pa[a] * pb[b];
    CHECK(mutual_information(indep) == doctest::Approx(0.0).epsilon(1e-12));

    DiscreteJoint ident;
    ident.pmf = Mat(4, 4);
    for (int a = 0; a < 4; ++a) ident.pmf.at(a, a) = 0.25;
    CHECK(mutual_information(ident) == doctest::Approx(2.0).epsilon(1e-12));

    DiscreteJoint j;
    j.pmf = Mat(2, 2);
    j.pmf.at(0, 0) = 0.4;
    j.pmf.at(0, 1) = 0.1;
    j.pmf.at(1, 0) = 0.1;
    j.pmf.at(1, 1) = 0.4;
    CHECK(mutual_information(j) == doctest::Approx(0.2780719051).epsilon(1e-9));

    DiscreteJoint bad;
    bad.pmf = Mat(2, 2, 0.3);
    CHECK_THROWS_AS(mutual_information(bad), std::invalid_argument);
}

TEST_CASE("MI bounds on random joints") {
    SeededRng rng(41);
    for (int t = 0; t < 500; ++t) {
        const DiscreteJoint j = random_joint(rng, 2 + t % 5, 2 + (t / 5) % 5);
        const double mi = mutual_information(j);
        std::vector<double> pa(j.pmf.rows, 0.0), pb(j.pmf.cols, 0.0);
        for (std::size_t a = 0; a < j.pmf.rows; ++a)
            for (std::size_t b = 0; b < j.pmf.cols; ++b) {
                pa[a] += j.pmf.at(a, b);
                pb[b] += j.pmf.at(a, b);
            }
        CHECK(mi >= 0.0);
        CHECK(mi <= std::min(entropy(pa), entropy(pb)) + 1e-12);
    }
}

TEST_CASE("identity stages keep the MI sequence constant") {
    SeededRng rng(42);
    const DiscreteJoint j = random_joint(rng, 4, 5);
    std::vector<StochasticMatrix> s1 = {identity_stage(4), identity_stage(4)};
    std::vector<StochasticMatrix> s2 = {identity_stage(5), identity_stage(5)};
    const MiSequenceResult r = verify_mi_nonincreasing(j, s1, s2);
    CHECK(r.non_increasing);
    for (double mi : r.mi_bits) CHECK(mi == doctest::Approx(r.mi_bits[0]).epsilon(1e-12));
}

TEST_CASE("a fully mixing stage kills the MI") {
    SeededRng rng(43);
    const DiscreteJoint j = random_joint(rng, 4, 4);
    StochasticMatrix mix;
    mix.rows = Mat(4, 4, 0.25);
    const MiSequenceResult r = verify_mi_nonincreasing(j, {mix}, {identity_stage(4)});
    CHECK(r.non_increasing);
    CHECK(r.mi_bits.back() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("MI non-increase over random joints and stage chains") {
    SeededRng rng(44);
    for (int t = 0; t < 300; ++t) {
        const std::size_t na = 2 + static_cast<std::size_t>(rng.uniform() * 5.0);
        const std::size_t nb = 2 + static_cast<std::size_t>(rng.uniform() * 5.0);
        const DiscreteJoint j = random_joint(rng, na, nb);
        const int depth = 1 + static_cast<int>(rng.uniform() * 4.0);
        std::vector<StochasticMatrix> s1, s2;
        std::size_t ca = na, cb = nb;
        for (int d = 0; d < depth; ++d) {
            const std::size_t oa = 2 + static_cast<std::size_t>(rng.uniform() * 5.0);
            const std::size_t ob = 2 + static_cast<std::size_t>(rng.uniform() * 5.0);
            s1.push_back(random_stage(rng, ca, oa));
            s2.push_back(random_stage(rng, cb, ob));
            ca = oa;
            cb = ob;
        }
        const MiSequenceResult r = verify_mi_nonincreasing(j, s1, s2);
        CHECK(r.non_increasing);
        CHECK(r.max_violation <= 1e-9);
    }
}

TEST_CASE("stage dimension mismatch is rejected") {
    SeededRng rng(45);
    const DiscreteJoint j = random_joint(rng, 3, 3);
    CHECK_THROWS_AS(verify_mi_nonincreasing(j, {identity_stage(4)}, {}), std::invalid_argument);
}

TEST_CASE("scs: collinear, orthogonal, halfway, symmetry, scale invariance") {
    using RealVec = std::vector<double>;
    CHECK(scs(RealVec{1.0, 2.0, -1.0}, RealVec{3.0, 6.0, -3.0}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(scs(RealVec{1.0, 0.0}, RealVec{0.0, 5.0}) == 0.0);
    CHECK(scs(RealVec{1.0, 0.0}, RealVec{1.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-12));

    SeededRng rng(46);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> a(8), b(8);
        for (double& v : a) v = rng.gaussian();
        for (double& v : b) v = rng.gaussian();
        const double base = scs(a, b);
        CHECK(scs(b, a) == doctest::Approx(base).epsilon(1e-12));
        std::vector<double> a3 = a;
        for (double& v : a3) v *= -3.7;
        CHECK(scs(a3, b) == doctest::Approx(base).epsilon(1e-12));
        CHECK(base >= 0.0);
        CHECK(base <= 1.0);
    }

    CHECK_THROWS_AS(scs(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 0.0}),
                    std::invalid_argument);

    // complex overload uses the conjugate inner product
    ComplexSignal ca = {Complex(1.0, 1.0), Complex(0.0, 2.0)};
    ComplexSignal cb = {Complex(2.0, 2.0), Complex(0.0, 4.0)};
    CHECK(scs(ca, cb) == doctest::Approx(1.0).epsilon(1e-12));
    ComplexSignal cc = {Complex(0.0, -2.0), Complex(1.0, 1.0)};
    CHECK(scs(ca, cc) < 1.0);
}

namespace {

// Exactly orthonormal mean-zero columns from seeded Gram-Schmidt (centering
// first keeps CCA's internal centering from disturbing the construction).
Mat orthonormal_columns(SeededRng& rng, std::size_t n, std::size_t k) {
    Mat q(n, k);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> v(n);
        double mean = 0.0;
        for (double& x : v) {
            x = rng.gaussian();
            mean += x;
        }
        mean /= static_cast<double>(n);
        for (double& x : v) x -= mean;
        for (std::size_t jj = 0; jj < j; ++jj) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += v[i] * q.at(i, jj);
            for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q.at(i, jj);
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < n; ++i) q.at(i, j) = v[i] / norm;
    }
    return q;
}

} // namespace

TEST_CASE("linear CCA: identical and orthogonal data") {
    SeededRng rng(47);
    Mat s1(40, 2);
    for (double& v : s1.data) v = rng.gaussian();
    const CcaResult same = cca_cosine_linear(s1, s1);
    CHECK(same.cosine == doctest::Approx(1.0).epsilon(1e-9));

    // Views built on orthogonal latent directions: nothing to correlate.
    const Mat q = orthonormal_columns(rng, 50, 4);
    Mat a(50, 2), b(50, 2);
    for (std::size_t i = 0; i < 50; ++i) {
        a.at(i, 0) = q.at(i, 0);
        a.at(i, 1) = q.at(i, 1);
        b.at(i, 0) = q.at(i, 2);
        b.at(i, 1) = q.at(i, 3);
    }
    const CcaResult ortho = cca_cosine_linear(a, b);
    CHECK(ortho.cosine < 1e-8);
}

TEST_CASE("linear CCA recovers a planted canonical correlation") {
    SeededRng rng(48);
    for (double rho : {0.3, 0.62, 0.9}) {
        const std::size_t n = 64;
        const Mat q = orthonormal_columns(rng, n, 4);
        // latent pair with exact sample correlation rho, plus independent junk
        Mat s1(n, 2), s2(n, 2);
        for (std::size_t i = 0; i < n; ++i) {
            const double z1 = q.at(i, 0);
            const double z2 = rho * q.at(i, 0) + std::sqrt(1.0 - rho * rho) * q.at(i, 1);
            s1.at(i, 0) = 2.0 * z1 + 0.5 * q.at(i, 2);
            s1.at(i, 1) = -1.0 * z1 + 1.5 * q.at(i, 2);
            s2.at(i, 0) = 0.7 * z2 - 2.0 * q.at(i, 3);
            s2.at(i, 1) = 1.3 * z2 + 0.4 * q.at(i, 3);
        }
        const CcaResult r = cca_cosine_linear(s1, s2);
        CHECK(std::abs(r.cosine - rho) < 1e-6);

        // the returned transforms achieve the reported correlation
        std::vector<double> u(n, 0.0), v(n, 0.0);
        double mu = 0.0, mv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = s1.at(i, 0) * r.transform1.at(0, 0) + s1.at(i, 1) * r.transform1.at(1, 0);
            v[i] = s2.at(i, 0) * r.transform2.at(0, 0) + s2.at(i, 1) * r.transform2.at(1, 0);
            mu += u[i];
            mv += v[i];
        }
        mu /= n;
        mv /= n;
        double suv = 0.0, suu = 0.0, svv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            suv += (u[i] - mu) * (v[i] - mv);
            suu += (u[i] - mu) * (u[i] - mu);
            svv += (v[i] - mv) * (v[i] - mv);
        }
        CHECK(std::abs(std::abs(suv) / std::sqrt(suu * svv) - rho) < 1e-6);
    }
}

TEST_CASE("rank-deficient CCA flags the reduced-rank path") {
    SeededRng rng(49);
    Mat s1(30, 3);
    for (std::size_t i = 0; i < 30; ++i) {
        s1.at(i, 0) = rng.gaussian();
        s1.at(i, 1) = rng.gaussian();
        s1.at(i, 2) = s1.at(i, 0) + s1.at(i, 1); // exact collinearity
    }
    Mat s2(30, 2);
    for (double& v : s2.data) v = rng.gaussian();
    const CcaResult r = cca_cosine_linear(s1, s2);
    CHECK(r.reduced_rank);
    CHECK(r.cosine <= 1.0 + 1e-12);
}

TEST_CASE("kernel cosine: reductions and limits") {
    std::vector<double> a = {1.0, 0.5, -0.3};
    std::vector<double> b = {0.2, -1.0, 0.9};

    Kernel lin;
    lin.type = Kernel::Type::Linear;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    CHECK(kernel_cosine(a, b, lin) == doctest::Approx(dot / std::sqrt(na * nb)).epsilon(1e-12));

    Kernel gauss;
    gauss.type = Kernel::Type::Gaussian;
    gauss.bandwidth = 0.7;
    CHECK(kernel_cosine(a, a, gauss) == doctest::Approx(1.0).epsilon(1e-12));

    gauss.bandwidth = 1e6; // flat kernel limit
    CHECK(kernel_cosine(a, b, gauss) == doctest::Approx(1.0).epsilon(1e-6));

    Kernel poly;
    poly.type = Kernel::Type::Polynomial;
    poly.degree = 0.5;
    CHECK_THROWS_AS(kernel_cosine(a, b, poly), std::invalid_argument);
    Kernel badband;
    badband.type = Kernel::Type::Gaussian;
    badband.bandwidth = 0.0;
    CHECK_THROWS_AS(kernel_cosine(a, b, badband), std::invalid_argument);
}

TEST_CASE("log-base conversions") {
    CHECK(bits_to_nats(1.0) == doctest::Approx(M_LN2).epsilon(1e-15));
    CHECK(nats_to_bits(bits_to_nats(2.5)) == doctest::Approx(2.5).epsilon(1e-15));
}
