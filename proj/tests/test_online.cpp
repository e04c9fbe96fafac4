#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "cardest/online.hpp"
#include "oracles.hpp"

using namespace cardest;
using Eigen::VectorXd;
using oracle::pa_objective;
using oracle::random_vec;

namespace {

VectorXd vec(std::initializer_list<double> v) {
    VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

}  // namespace

TEST_CASE("predict") {
    CHECK(predict(VectorXd::Zero(3), vec({4, 5, 1})) == 0.0);
    CHECK(predict(vec({2, 3}), vec({1, 4})) == 14.0);
    CHECK(predict(vec({0, 7.5}), vec({0, 1})) == 7.5);
    CHECK_THROWS_AS(predict(vec({1, 2}), vec({1, 2, 3})), DegenerateError);
    CHECK(clamp_estimate(-3.0) == 0.0);
    CHECK(clamp_estimate(3.0) == 3.0);
}

TEST_CASE("SGD step by hand") {
    VectorXd w = VectorXd::Zero(2);
    sgd_step<double>(w, vec({1, 1}), 1.0, 0.1);
    CHECK(w[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(0.1).epsilon(1e-15));

    VectorXd v = vec({1, 2});
    const VectorXd before = v;
    sgd_step<double>(v, vec({3, 4}), 11.0, 0.5);
    CHECK(v == before);
}

TEST_CASE("SGD step follows the finite-difference gradient") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 500; ++t) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 6);
        const VectorXd w = random_vec(rng, n);
        const VectorXd x = random_vec(rng, n);
        const double y = random_vec(rng, 1, 5.0)[0];
        const double eta = 0.01;
        const VectorXd grad = oracle::loss_gradient(w, x, y);
        VectorXd stepped = w;
        sgd_step<double>(stepped, x, y, eta);
        const VectorXd expect = w - eta * grad;
        CHECK((stepped - w - (expect - w)).norm() <= 1e-6 * std::max(1e-12, (expect - w).norm()) + 1e-12);
    }
}

TEST_CASE("SGD divergence is reported") {
    SgdRegressor<double> m(2, {1e3});
    bool threw = false;
    try {
        for (int i = 0; i < 2000; ++i) m.partial_fit(vec({1e3, 1}), 1e6);
    } catch (const DivergenceError&) {
        threw = true;
    }
    CHECK(threw);
    CHECK_THROWS_AS(SgdRegressor<double>(2, {0.0}), DomainError);
}

TEST_CASE("SGD bootstrap converges on one example") {
    SgdParams<double> p;
    p.learning_rate = 0.1;
    SgdRegressor<double> m(2, p);
    const VectorXd x = vec({1, 2});
    const auto report = m.bootstrap(x, 40.0);
    CHECK(report.converged);
    CHECK(report.iterations > 1);
    // residual contracts by 1 - eta*|x|^2 = 0.5 per step; the stop rule then bounds it
    CHECK(std::abs(m.predict(x) - 40.0) <= std::sqrt(2 * 1e-4 / 0.75));

    SgdRegressor<double> slow(2);
    const auto capped = slow.bootstrap(x, 40.0);
    CHECK(capped.iterations <= 10000);
}

TEST_CASE("PA-II step by hand") {
    VectorXd w = VectorXd::Zero(1);
    CHECK(pa2_step<double>(w, vec({1}), 1.0, 0.1, 1.0));
    CHECK(w[0] == doctest::Approx(0.6).epsilon(1e-15));

    PaRegressor<double> m(1);
    m.bootstrap(vec({1}), 10.0);
    CHECK(m.weights()[0] == doctest::Approx(6.6).epsilon(1e-15));
}

TEST_CASE("PA-II passive steps leave weights bitwise unchanged") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 300; ++t) {
        VectorXd w = random_vec(rng, 4);
        const VectorXd x = random_vec(rng, 4);
        const double y = w.dot(x) + 0.09 * (2.0 * static_cast<double>(rng() % 1000) / 1000.0 - 1.0);
        const VectorXd before = w;
        CHECK_FALSE(pa2_step<double>(w, x, y, 0.1, 1.0));
        CHECK(std::memcmp(w.data(), before.data(), sizeof(double) * 4) == 0);
    }
    VectorXd w = VectorXd::Zero(2);
    CHECK_THROWS_AS(pa2_step<double>(w, VectorXd::Zero(2), 5.0, 0.1, 1.0), DegenerateError);
}

TEST_CASE("PA-II step minimizes its objective") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 300; ++t) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 5);
        const VectorXd w0 = random_vec(rng, n);
        const VectorXd x = random_vec(rng, n);
        const double y = random_vec(rng, 1, 10.0)[0];
        const double eps = 0.1;
        const double c = 0.1 + static_cast<double>(rng() % 100) / 10.0;
        VectorXd w = w0;
        pa2_step<double>(w, x, y, eps, c);

        const VectorXd numeric = oracle::pa_minimizer(w0, x, y, eps, c);
        CHECK((numeric - w).norm() <= 1e-8 * std::max(1.0, w.norm()));

        const long double best = pa_objective(w0, w, x, y, eps, c);
        for (int k = 0; k < 50; ++k) {
            const VectorXd cand = w + random_vec(rng, n, 0.5);
            CHECK(best <= pa_objective(w0, cand, x, y, eps, c) + 1e-12L);
        }
    }
}

TEST_CASE("RLS step by hand") {
    RlsParams<double> p;
    p.mu = 1.0;
    RlsRegressor<double> m(1, p);
    m.partial_fit(vec({1}), 1.0);
    CHECK(m.weights()[0] == doctest::Approx(100.0 / 101.0).epsilon(1e-14));
    CHECK(m.covariance()(0, 0) == doctest::Approx(100.0 / 101.0).epsilon(1e-14));
}

TEST_CASE("RLS zero innovation keeps weights and shrinks P") {
    RlsParams<double> p;
    p.mu = 1.0;
    RlsRegressor<double> m(2, p);
    m.set_weights(vec({2, 3}));
    const double trace0 = m.covariance().trace();
    m.partial_fit(vec({1, 1}), 5.0);
    CHECK(m.weights() == vec({2, 3}));
    CHECK(m.covariance().trace() < trace0);
}

TEST_CASE("RLS equals exponentially weighted least squares") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index f = 1 + static_cast<Eigen::Index>(rng() % 5);
        const int steps = 1 + static_cast<int>(rng() % 50);
        const double mu = 0.99;
        const double delta = 0.01;
        RlsRegressor<double> m(f, {mu, delta});
        std::vector<VectorXd> xs;
        std::vector<double> ys;
        const VectorXd truth = random_vec(rng, f, 3.0);
        for (int t = 0; t < steps; ++t) {
            VectorXd x = random_vec(rng, f);
            x[f - 1] = 1.0;
            const double y = truth.dot(x) + random_vec(rng, 1, 0.1)[0];
            xs.push_back(x);
            ys.push_back(y);
            m.partial_fit(x, y);

            const VectorXd expect = oracle::weighted_least_squares(xs, ys, mu, delta);
            CHECK((m.weights() - expect).norm() <= 1e-9 * std::max(1.0, expect.norm()));
            const auto& P = m.covariance();
            CHECK((P - P.transpose()).norm() == 0.0);
        }
    }
}

TEST_CASE("RLS parameter checks") {
    CHECK_THROWS_AS(RlsRegressor<double>(2, {0.0, 0.01}), DomainError);
    CHECK_THROWS_AS(RlsRegressor<double>(2, {1.5, 0.01}), DomainError);
    CHECK_THROWS_AS(RlsRegressor<double>(2, {0.99, 0.0}), DomainError);
    CHECK_THROWS_AS(PaRegressor<double>(2, {-1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(PaRegressor<double>(2, {0.1, 0.0}), DomainError);
}

TEST_CASE("bootstrap for PA and RLS is one update") {
    const VectorXd x = vec({3, 1});
    PaRegressor<double> a(2), b(2);
    a.bootstrap(x, 17.0);
    b.partial_fit(x, 17.0);
    CHECK(a.weights() == b.weights());
    RlsRegressor<double> c(2), d(2);
    c.bootstrap(x, 17.0);
    d.partial_fit(x, 17.0);
    CHECK(c.weights() == d.weights());
    CHECK(c.covariance() == d.covariance());
}

TEST_CASE("learners are generic over the scalar type") {
    RlsRegressor<float> r(2);
    Eigen::VectorXf x(2);
    x << 2.0f, 1.0f;
    r.partial_fit(x, 5.0f);
    // one step from P0 = 100 I: prediction y * 100|x|^2 / (mu + 100|x|^2)
    CHECK(r.predict(x) == doctest::Approx(5.0 * 500.0 / 500.99).epsilon(1e-5));
    PaRegressor<long double> p(1);
    Eigen::Matrix<long double, Eigen::Dynamic, 1> xl(1);
    xl << 1.0L;
    p.partial_fit(xl, 1.0L);
    CHECK(static_cast<double>(p.weights()[0]) == doctest::Approx(0.6));
}

TEST_CASE("type-erased regressor matches the concrete learners") {
    std::mt19937_64 rng(6);
    Hyperparameters<double> hp;
    for (auto alg : {Algorithm::sgd, Algorithm::pa, Algorithm::rls}) {
        AnyRegressor any(alg, 3, hp);
        CHECK(any.algorithm() == alg);
        SgdRegressor<double> sgd(3, hp.sgd);
        PaRegressor<double> pa(3, hp.pa);
        RlsRegressor<double> rls(3, hp.rls);
        for (int t = 0; t < 20; ++t) {
            const VectorXd x = random_vec(rng, 3, 10.0);
            const double y = random_vec(rng, 1, 100.0)[0];
            any.partial_fit(x, y);
            sgd.partial_fit(x, y);
            pa.partial_fit(x, y);
            rls.partial_fit(x, y);
        }
        const VectorXd& expect = alg == Algorithm::sgd ? sgd.weights() : alg == Algorithm::pa ? pa.weights() : rls.weights();
        CHECK(any.weights() == expect);
        CHECK(any.updates() == 20);
    }
    CHECK(parse_algorithm("rls") == Algorithm::rls);
    CHECK(parse_algorithm("PA") == Algorithm::pa);
    CHECK(to_string(Algorithm::sgd) == "SGD");
    CHECK_THROWS_AS(parse_algorithm("adam"), ConfigError);
}
