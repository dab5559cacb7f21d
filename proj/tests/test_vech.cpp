#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "tplcov/errors.hpp"
#include "tplcov/matrix.hpp"
#include "tplcov/quantile.hpp"
#include "tplcov/vech.hpp"

using namespace tplcov;

TEST_CASE("pair_to_index examples") {
    CHECK(pair_to_index(1, 1, 4) == 1);
    CHECK(pair_to_index(3, 4, 4) == 9);
    CHECK(pair_to_index(2, 2, 4) == 5);
    CHECK_THROWS_AS(pair_to_index(0, 1, 4), std::invalid_argument);
    CHECK_THROWS_AS(pair_to_index(3, 2, 4), std::invalid_argument);
    CHECK_THROWS_AS(pair_to_index(1, 5, 4), std::invalid_argument);
}

TEST_CASE("index_to_pair examples") {
    CHECK(index_to_pair(1, 4) == std::pair<std::size_t, std::size_t>{1, 1});
    CHECK(index_to_pair(9, 4) == std::pair<std::size_t, std::size_t>{3, 4});
    CHECK(index_to_pair(10, 4) == std::pair<std::size_t, std::size_t>{4, 4});
    CHECK_THROWS_AS(index_to_pair(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(index_to_pair(11, 4), std::invalid_argument);
}

TEST_CASE("vech round trip and ordering for p = 2..25") {
    for (std::size_t p = 2; p <= 25; ++p) {
        const VechIndex vech(p);
        REQUIRE(vech.size() == p * (p + 1) / 2);
        std::size_t expected = 1;
        for (std::size_t j = 1; j <= p; ++j) {
            for (std::size_t k = j; k <= p; ++k, ++expected) {
                const std::size_t idx = pair_to_index(j, k, p);
                CHECK(idx == expected);
                CHECK(index_to_pair(idx, p) == std::pair{j, k});
                CHECK(vech.offset(j - 1, k - 1) == idx - 1);
                CHECK(vech.pair_at(idx - 1) == std::pair{j - 1, k - 1});
            }
        }
    }
}

TEST_CASE("SymMatrix stores one copy per pair") {
    SymMatrix m(3);
    m(0, 2) = 1.5;
    CHECK(m(2, 0) == 1.5);
    m(2, 1) = -2.0;
    CHECK(m(1, 2) == -2.0);
    CHECK(m.vech().size() == 6);
    CHECK(SymMatrix::identity(3).is_pd());
}

TEST_CASE("sample_covariance examples") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 0, 0, 1;
    const SymMatrix s = sample_covariance(DataMatrix(a));
    CHECK(s(0, 0) == 0.5);
    CHECK(s(0, 1) == 0.0);
    CHECK(s(1, 1) == 0.5);

    const SymMatrix z = sample_covariance(DataMatrix(Eigen::MatrixXd::Zero(5, 3)));
    for (double v : z.vech()) CHECK(v == 0.0);

    Eigen::MatrixXd b(2, 2);
    b << 2, 2, -2, -2;
    const SymMatrix t = sample_covariance(DataMatrix(b));
    CHECK(t(0, 0) == 4.0);
    CHECK(t(0, 1) == 4.0);
    CHECK(t(1, 1) == 4.0);
}

TEST_CASE("sample_covariance centering and errors") {
    Eigen::MatrixXd a(2, 1);
    a << 3, 5;
    CHECK(sample_covariance(DataMatrix(a), true)(0, 0) == doctest::Approx(1.0));
    CHECK(sample_covariance(DataMatrix(a), false)(0, 0) == doctest::Approx(17.0));
    CHECK_THROWS_AS(sample_covariance(DataMatrix(Eigen::MatrixXd::Ones(1, 2))), std::invalid_argument);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(3, 2);
    bad(1, 1) = std::nan("");
    CHECK_THROWS_AS(DataMatrix{bad}, DataError);
}

TEST_CASE("sample_covariance is symmetric and PSD") {
    Rng rng = make_stream(11, {});
    std::uniform_int_distribution<std::size_t> pd(2, 12), nd(2, 30);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t p = pd(rng);
        const std::size_t n = nd(rng);
        const DataMatrix d = oracle::gaussian_data(n, p, rng);
        const SymMatrix s = sample_covariance(d, trial % 2 == 0);
        const Eigen::MatrixXd dense = s.to_dense();
        CHECK(dense == dense.transpose());
        SymMatrix ridge = s;
        for (std::size_t j = 0; j < p; ++j) ridge(j, j) += 1e-10;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(ridge.to_dense());
        CHECK(ldlt.vectorD().minCoeff() > 0.0);
    }
}

TEST_CASE("cholesky_factor examples") {
    const auto l3 = cholesky_factor(SymMatrix::identity(3));
    REQUIRE(l3);
    CHECK(*l3 == Eigen::MatrixXd::Identity(3, 3));

    Eigen::MatrixXd a(2, 2);
    a << 4, 2, 2, 5;
    const auto l = cholesky_factor(SymMatrix::from_dense(a));
    REQUIRE(l);
    Eigen::MatrixXd want(2, 2);
    want << 2, 0, 1, 2;
    CHECK(*l == want);

    Eigen::MatrixXd b(2, 2);
    b << 1, 2, 2, 1;
    CHECK_FALSE(cholesky_factor(SymMatrix::from_dense(b)).has_value());
    CHECK_FALSE(SymMatrix::from_dense(b).is_pd());
}

TEST_CASE("chisq1_quantile examples against the incomplete-gamma oracle") {
    // Frozen from oracle::chisq1_quantile.
    CHECK(chisq1_quantile(0.5) == doctest::Approx(0.4549364).epsilon(1e-7));
    CHECK(chisq1_quantile(0.1) == doctest::Approx(2.7055435).epsilon(1e-7));
    CHECK(chisq1_quantile(0.01) == doctest::Approx(6.6348966).epsilon(1e-7));
    for (double alpha : {0.5, 0.1, 0.01}) {
        CHECK(std::abs(chisq1_quantile(alpha) - oracle::chisq1_quantile(alpha)) < 1e-8);
    }
    CHECK_THROWS_AS(chisq1_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(chisq1_quantile(1.0), std::invalid_argument);
}

TEST_CASE("chisq1_quantile inverts the forward CDF") {
    for (double alpha : {0.5, 0.2, 0.1, 0.05, 0.01}) {
        CHECK(std::abs(oracle::chisq1_cdf(chisq1_quantile(alpha)) - (1.0 - alpha)) < 1e-7);
    }
}

TEST_CASE("normal_quantile symmetry and tails") {
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    for (double q : {1e-4, 0.0625, 0.2, 0.375}) {
        CHECK(normal_quantile(q) == doctest::Approx(-normal_quantile(1.0 - q)).epsilon(1e-9));
    }
}
