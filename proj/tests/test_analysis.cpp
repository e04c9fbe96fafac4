#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "cardest/analysis.hpp"
#include "cardest/error.hpp"

using namespace cardest;

namespace {

std::vector<double> random_series(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("error metrics by hand") {
    const std::vector<double> d{10, 20}, e{13, 16};
    const auto m = error_metrics(d, e);
    CHECK(m.mae == doctest::Approx(3.5));
    CHECK(m.rmse == doctest::Approx(std::sqrt(12.5)));
    REQUIRE(m.mape.has_value());
    CHECK(*m.mape == doctest::Approx(25.0));
    CHECK(m.maxae == 4.0);
    CHECK(m.n_pairs == 2);

    const auto perfect = error_metrics(d, d);
    CHECK(perfect.rmse == 0.0);
    CHECK(perfect.mae == 0.0);
    CHECK(*perfect.mape == 0.0);
    CHECK(perfect.maxae == 0.0);

    const std::vector<double> one{10}, zero{0};
    CHECK(*error_metrics(one, zero).mape == 100.0);
}

TEST_CASE("error metrics with zero labels") {
    const std::vector<double> d{0, 10}, e{5, 12};
    const auto m = error_metrics(d, e);
    CHECK(m.n_excluded == 1);
    CHECK(*m.mape == doctest::Approx(20.0));
    const std::vector<double> z{0, 0};
    const auto all_zero = error_metrics(z, e);
    CHECK_FALSE(all_zero.mape.has_value());
    CHECK(all_zero.maxae == 12.0);
    const std::vector<double> empty, three{1, 2, 3};
    CHECK_THROWS_AS(error_metrics(empty, empty), DomainError);
    CHECK_THROWS_AS(error_metrics(d, three), DomainError);
}

TEST_CASE("error metric properties") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng() % 50;
        auto d = random_series(rng, n, 1, 1000);
        auto e = random_series(rng, n, 0, 1200);
        const auto m = error_metrics(d, e);
        CHECK(m.mae <= m.rmse + 1e-9);
        CHECK(m.maxae >= m.mae - 1e-9);
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> d2, e2;
        for (auto i : perm) {
            d2.push_back(d[i]);
            e2.push_back(e[i]);
        }
        const auto p = error_metrics(d2, e2);
        CHECK(p.rmse == doctest::Approx(m.rmse).epsilon(1e-12));
        CHECK(p.mae == doctest::Approx(m.mae).epsilon(1e-12));
        CHECK(*p.mape == doctest::Approx(*m.mape).epsilon(1e-12));
        CHECK(p.maxae == m.maxae);
    }
}

TEST_CASE("pearson") {
    const std::vector<double> x{1, 2, 3}, y{1, 2, 4};
    CHECK(pearson(x, y) == doctest::Approx(3.0 / std::sqrt(2.0 * 14.0 / 3.0)).epsilon(1e-12));
    CHECK(pearson(x, y) == doctest::Approx(0.9820).epsilon(1e-4));
    const std::vector<double> lin{3, 5, 7}, neg{-1, -2, -3}, flat{2, 2, 2};
    CHECK(pearson(x, lin) == doctest::Approx(1.0));
    CHECK(pearson(x, neg) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(pearson(x, flat), DegenerateError);

    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        const auto a = random_series(rng, 20, -5, 5);
        const auto b = random_series(rng, 20, -5, 5);
        const double r = pearson(a, b);
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
        std::vector<double> scaled(a.size()), flipped(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            scaled[i] = 3.5 * a[i] + 7;
            flipped[i] = -2 * a[i] + 1;
        }
        CHECK(pearson(scaled, b) == doctest::Approx(r).epsilon(1e-10));
        CHECK(pearson(flipped, b) == doctest::Approx(-r).epsilon(1e-10));
    }
}

TEST_CASE("spearman") {
    const std::vector<double> x{1, 2, 3, 4}, y{10, 100, 1000, 10000}, z{4, 3, 2, 1};
    CHECK(spearman(x, y) == doctest::Approx(1.0));
    CHECK(spearman(x, z) == doctest::Approx(-1.0));
    const std::vector<double> ties{1, 1, 2, 3};
    CHECK(spearman(ties, x) == doctest::Approx(pearson(std::vector<double>{1.5, 1.5, 3, 4}, x)));
}

TEST_CASE("line fit") {
    const std::vector<double> x{0, 1}, y{1, 3};
    const auto f = linfit(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    const std::vector<double> xs{1, 2, 3}, flat{4, 4, 4};
    const auto c = linfit(xs, flat);
    CHECK(c.slope == doctest::Approx(0.0));
    CHECK(c.intercept == doctest::Approx(4.0));
    CHECK_THROWS_AS(linfit(flat, xs), DegenerateError);
}

TEST_CASE("line fit matches normal equations and has orthogonal residuals") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng() % 60;
        const auto xs = random_series(rng, n, 0, 100);
        const auto ys = random_series(rng, n, -50, 500);
        const auto f = linfit(xs, ys);
        Eigen::MatrixXd a(static_cast<Eigen::Index>(n), 2);
        Eigen::VectorXd b(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            a(static_cast<Eigen::Index>(i), 0) = xs[i];
            a(static_cast<Eigen::Index>(i), 1) = 1.0;
            b[static_cast<Eigen::Index>(i)] = ys[i];
        }
        const Eigen::Vector2d sol = (a.transpose() * a).ldlt().solve(a.transpose() * b);
        CHECK(std::abs(f.slope - sol[0]) <= 1e-10 * std::max(1.0, std::abs(sol[0])));
        CHECK(std::abs(f.intercept - sol[1]) <= 1e-10 * std::max(1.0, std::abs(sol[1])));
        double rx = 0, r1 = 0, scale = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ys[i] - f.slope * xs[i] - f.intercept;
            rx += r * xs[i];
            r1 += r;
            scale += std::abs(ys[i] * xs[i]);
        }
        CHECK(std::abs(rx) <= 1e-8 * scale);
        CHECK(std::abs(r1) <= 1e-8 * scale);
    }
}

TEST_CASE("interval fit recovers a planted line") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> noise(0.0, 5.0);
    std::uniform_real_distribution<double> f1(30, 200);
    std::vector<double> xs, ys;
    for (int i = 0; i < 113; ++i) {
        xs.push_back(f1(rng));
        ys.push_back(2.49 * xs.back() + 144.17 + noise(rng));
    }
    for (int i = 0; i < 50; ++i) {
        xs.push_back(f1(rng));
        ys.push_back(7.57 * xs.back() + 261.5 + noise(rng));
    }
    const auto a = fit_interval(xs, ys, 0, 112);
    CHECK(a.slope == doctest::Approx(2.49).epsilon(0.05));
    CHECK(a.pearson > 0.99);
    const auto b = fit_interval(xs, ys, 113, 162);
    CHECK(b.slope == doctest::Approx(7.57).epsilon(0.05));
    CHECK(b.first == 113);
    CHECK(b.last == 162);
    CHECK_THROWS_AS(fit_interval(xs, ys, 5, 5), DegenerateError);
    CHECK_THROWS_AS(fit_interval(xs, ys, 100, 400), DomainError);
}
