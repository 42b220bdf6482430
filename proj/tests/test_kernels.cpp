#include <cmath>
#include <vector>

#include "doctest.h"

#include "coda/errors.hpp"
#include "coda/kernels.hpp"
#include "coda/matrix.hpp"
#include "coda/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace coda;
using doctest::Approx;

namespace {

Matrix reconstruct(const EigenDecomposition& dec) {
    const std::size_t n = dec.values.size();
    Matrix scaled = dec.vectors;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= dec.values[j];
    return scaled * dec.vectors.transposed();
}

SymmetricMatrix random_symmetric(std::size_t n, RandomStream& rng) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            m(i, j) = rng.uniform(-2.0, 2.0);
            m(j, i) = m(i, j);
        }
    return SymmetricMatrix(std::move(m));
}

SymmetricMatrix random_spd(std::size_t n, RandomStream& rng) {
    const Matrix g = testutil::random_gaussian_matrix(n + 2, n, rng);
    return sample_covariance(g);
}

}  // namespace

TEST_CASE("sample covariance basics") {
    Matrix constant(5, 3);
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t j = 0; j < 3; ++j) constant(r, j) = 3.25;
    CHECK(sample_covariance(constant).mat().max_abs() == 0.0);

    const Matrix two_points{{0.0, 0.0}, {2.0, 2.0}};
    const SymmetricMatrix cov = sample_covariance(two_points);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(cov(i, j) == Approx(2.0).epsilon(1e-14));

    CHECK_THROWS_AS(sample_covariance(Matrix(1, 3)), TooFewRows);

    RandomStream rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix rows = testutil::random_gaussian_matrix(12, 4, rng);
        const SymmetricMatrix c = sample_covariance(rows);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) CHECK(c(i, j) == c(j, i));
        const auto vals = sym_eigvals_desc(c);
        CHECK(vals.back() >= -1e-10);
        // Agreement with the definitional double loop.
        CHECK(testutil::max_abs_diff(c.mat(), oracle::covariance_by_definition(rows)) <=
              1e-12);
    }
}

TEST_CASE("symmetric eigendecomposition") {
    const auto id4 = sym_eig_desc(SymmetricMatrix(Matrix::identity(4)));
    for (double v : id4.values) CHECK(v == Approx(1.0).epsilon(1e-14));

    Matrix d(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 3.0;
    d(2, 2) = 2.0;
    const auto dec = sym_eig_desc(SymmetricMatrix(std::move(d)));
    CHECK(dec.values[0] == Approx(3.0).epsilon(1e-14));
    CHECK(dec.values[1] == Approx(2.0).epsilon(1e-14));
    CHECK(dec.values[2] == Approx(1.0).epsilon(1e-14));
    CHECK(dec.vectors(1, 0) == Approx(1.0).epsilon(1e-14));
    CHECK(dec.vectors(2, 1) == Approx(1.0).epsilon(1e-14));
    CHECK(dec.vectors(0, 2) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigendecomposition reconstruction sweep") {
    RandomStream rng(29);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = rep < 700 ? 7 : 2 + rng.uniform_index(9);  // up to 10
        const SymmetricMatrix m = random_symmetric(n, rng);
        const auto dec = sym_eig_desc(m);
        for (std::size_t i = 0; i + 1 < n; ++i) CHECK(dec.values[i] >= dec.values[i + 1]);
        const Matrix gram = dec.vectors.transposed() * dec.vectors;
        CHECK(testutil::max_abs_diff(gram, Matrix::identity(n)) <= 1e-8);
        const double tol = 1e-8 * std::max(1.0, m.mat().max_abs());
        CHECK(testutil::max_abs_diff(reconstruct(dec), m.mat()) <= tol);
        // Sign rule: the largest-magnitude entry of each column is positive.
        for (std::size_t j = 0; j < n; ++j) {
            double best = 0.0, signed_best = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (std::fabs(dec.vectors(i, j)) > best) {
                    best = std::fabs(dec.vectors(i, j));
                    signed_best = dec.vectors(i, j);
                }
            CHECK(signed_best > 0.0);
        }
    }
}

TEST_CASE("eigenvalues agree with characteristic-polynomial roots") {
    RandomStream rng(37);
    for (int rep = 0; rep < 200; ++rep) {
        const SymmetricMatrix m = random_symmetric(3, rng);
        const auto vals = sym_eigvals_desc(m);
        const auto expected = oracle::sym3_eigvals(m.mat());
        for (int i = 0; i < 3; ++i)
            CHECK(vals[std::size_t(i)] == Approx(expected[std::size_t(i)]).epsilon(1e-9));
    }
}

TEST_CASE("chi-square survival function") {
    CHECK_THROWS_AS(chi2_sf(1.0, 0), InvalidDf);
    for (int df : {1, 2, 5, 17}) CHECK(chi2_sf(0.0, df) == 1.0);

    // df=2 closed form: exp(-x/2).
    CHECK(chi2_sf(2.0 * std::log(2.0), 2) == Approx(0.5).epsilon(1e-12));
    for (double x = 0.0; x <= 50.0; x += 0.375)
        CHECK(std::fabs(chi2_sf(x, 2) - std::exp(-0.5 * x)) <= 1e-10);

    // df=1 at the 5% critical value, against Simpson quadrature.
    CHECK(std::fabs(chi2_sf(3.841, 1) - oracle::chi2_sf_df1_quadrature(3.841)) <= 1e-8);
    CHECK(chi2_sf(3.841, 1) == Approx(0.0500).epsilon(1e-2));

    for (int df : {1, 3, 8, 30}) {
        double prev = 1.0;
        for (double x = 0.0; x <= 80.0; x += 0.5) {
            const double p = chi2_sf(x, df);
            CHECK(p <= prev + 1e-15);
            prev = p;
        }
    }
}

TEST_CASE("haar orthonormal matrices") {
    RandomStream rng(41);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t d = 1 + rng.uniform_index(8);
        const Matrix q = haar_orthonormal(d, rng);
        CHECK(testutil::max_abs_diff(q.transposed() * q, Matrix::identity(d)) <= 1e-10);
    }
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix q1 = haar_orthonormal(1, rng);
        CHECK(std::fabs(std::fabs(q1(0, 0)) - 1.0) <= 1e-14);
    }
    double mean_entry = 0.0;
    for (int rep = 0; rep < 10000; ++rep)
        mean_entry += haar_orthonormal(3, rng)(0, 0) / 10000.0;
    CHECK(std::fabs(mean_entry) <= 0.02);
}

TEST_CASE("haar rotations") {
    RandomStream rng(43);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t d = 1 + rng.uniform_index(7);
        const Matrix r = haar_rotation(d, rng);
        CHECK(r.determinant() == Approx(1.0).epsilon(1e-10));
        CHECK(testutil::max_abs_diff(r.transposed() * r, Matrix::identity(d)) <= 1e-10);
    }

    // d=2: the rotation angle is uniform on [0, 2pi).
    std::vector<double> u;
    u.reserve(10000);
    for (int rep = 0; rep < 10000; ++rep) {
        const Matrix r = haar_rotation(2, rng);
        const double angle = std::atan2(r(1, 0), r(0, 0));
        u.push_back((angle + M_PI) / (2.0 * M_PI));
    }
    CHECK(oracle::ks_uniform_pvalue(u) > 0.01);
}

TEST_CASE("rotation law is invariant under fixed left rotation") {
    RandomStream rng(53);
    const Matrix fixed = haar_rotation(3, rng);
    std::vector<double> traces, rotated_traces;
    for (int rep = 0; rep < 4000; ++rep) {
        const Matrix r = haar_rotation(3, rng);
        double tr = 0.0, trf = 0.0;
        const Matrix fr = fixed * r;
        for (std::size_t i = 0; i < 3; ++i) {
            tr += r(i, i);
            trf += fr(i, i);
        }
        traces.push_back(tr);
        rotated_traces.push_back(trf);
    }
    CHECK(oracle::ks_two_sample_pvalue(traces, rotated_traces) > 0.01);
}

TEST_CASE("cholesky factorization") {
    const Matrix id = cholesky_lower(SymmetricMatrix(Matrix::identity(4)));
    CHECK(testutil::max_abs_diff(id, Matrix::identity(4)) <= 1e-14);

    const SymmetricMatrix m(Matrix{{4.0, 2.0}, {2.0, 5.0}});
    const Matrix l = cholesky_lower(m);
    CHECK(l(0, 0) == Approx(2.0).epsilon(1e-14));
    CHECK(l(0, 1) == 0.0);
    CHECK(l(1, 0) == Approx(1.0).epsilon(1e-14));
    CHECK(l(1, 1) == Approx(2.0).epsilon(1e-14));

    RandomStream rng(71);
    for (int rep = 0; rep < 30; ++rep) {
        const SymmetricMatrix spd = random_spd(5, rng);
        const Matrix c = cholesky_lower(spd);
        CHECK(testutil::max_abs_diff(c * c.transposed(), spd.mat()) <= 1e-9);
    }

    CHECK_THROWS_AS(cholesky_lower(SymmetricMatrix(Matrix{{1.0, 2.0}, {2.0, 1.0}})),
                    NotPositiveDefinite);
}
