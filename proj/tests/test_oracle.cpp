#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "l1atf/l1atf.hpp"

using namespace l1atf;

namespace {

DenseProblemd dense(Matrix<double> a, Vector<double> y, double lambda)
{
    DenseProblemd p;
    const auto cols = a.cols();
    p.a = std::move(a);
    p.y = std::move(y);
    p.lambda = lambda;
    p.weights = Vector<double>::Ones(cols);
    p.lower = Vector<double>::Constant(cols, -std::numeric_limits<double>::infinity());
    p.upper = Vector<double>::Constant(cols, std::numeric_limits<double>::infinity());
    return p;
}

} // namespace

TEST_CASE("lambda zero is least squares")
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    Matrix<double> a(30, 5);
    Vector<double> y(30);
    for (auto& v : a.reshaped()) v = g(rng);
    for (auto& v : y) v = g(rng);
    const auto p = dense(a, y, 0.0);
    const Vector<double> ls = a.colPivHouseholderQr().solve(y);
    CHECK((oracle_solve(p, {1e-12, 1000000}) - ls).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("orthonormal design has a closed form")
{
    // Columns orthogonal with |A_i|^2 = n: theta_i = soft(<A_i, y> / n, lambda w_i).
    const Eigen::Index n = 8;
    Matrix<double> a = Matrix<double>::Zero(n, 3);
    a(0, 0) = a(1, 0) = a(2, 0) = a(3, 0) = std::sqrt(2.0);
    a(4, 1) = a(5, 1) = std::sqrt(4.0);
    a(6, 2) = std::sqrt(8.0);
    Vector<double> y(n);
    y << 1, 2, 3, 4, -5, -1, 0.5, 9;
    auto p = dense(a, y, 0.4);
    p.weights << 1.0, 2.0, 0.5;
    const auto th = oracle_solve(p, {1e-13, 100000});
    for (Eigen::Index i = 0; i < 3; ++i) {
        const double z = a.col(i).dot(y) / double(n);
        CHECK(th[i] == doctest::Approx(soft_threshold(z, 0.4 * p.weights[i])).epsilon(1e-10));
    }
}

TEST_CASE("kkt check accepts the solution and flags perturbations")
{
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    Matrix<double> a(25, 10);
    Vector<double> y(25);
    for (auto& v : a.reshaped()) v = g(rng);
    for (auto& v : y) v = g(rng);
    const auto p = dense(a, y, 0.2);
    const auto th = oracle_solve(p, {1e-12, 1000000});
    CHECK(kkt_check(p, th).max() < 1e-9);

    Vector<double> bumped = th;
    Eigen::Index i = 0;
    th.cwiseAbs().maxCoeff(&i);
    bumped[i] += 0.05;
    const auto rep = kkt_check(p, bumped);
    CHECK(rep.active > 1e-4);

    Vector<double> added = th;
    Eigen::Index zero = 0;
    while (th[zero] != 0) ++zero;
    added[zero] = 0.5;
    CHECK(kkt_check(p, added).max() > 1e-4);
}

TEST_CASE("infinite weights pin coordinates at zero")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Matrix<double> a(20, 4);
    Vector<double> y(20);
    for (auto& v : a.reshaped()) v = g(rng);
    y = 3 * a.col(1);
    auto p = dense(a, y, 0.01);
    p.weights[1] = std::numeric_limits<double>::infinity();
    const auto th = oracle_solve(p);
    CHECK(th[1] == 0.0);
    CHECK(std::isinf(dense_penalty(p, Vector<double>(Vector<double>::Ones(4)))));

    Vector<double> bad = th;
    bad[1] = 1;
    CHECK(std::isinf(kkt_check(p, bad).active));
}

TEST_CASE("bounds and one-sided conditions")
{
    Matrix<double> a = Matrix<double>::Identity(4, 2) * 2;
    Vector<double> y(4);
    y << -3, 5, 0, 0;
    auto p = dense(a, y, 0.1);
    p.lower[0] = 0;
    const auto th = oracle_solve(p, {1e-13, 100000});
    CHECK(th[0] == 0.0);
    CHECK(th[1] > 0.0);
    CHECK(kkt_check(p, th).max() < 1e-10);

    // moved off its bound into the interior
    Vector<double> inward = th;
    inward[0] = 0.5;
    CHECK(kkt_check(p, inward).max() > 1e-3);
}

TEST_CASE("dense problems are limited to desk scale")
{
    auto p = dense(Matrix<double>::Ones(257, 2), Vector<double>::Ones(257), 0.1);
    CHECK_THROWS_AS(p.validate(), UsageError);
    CHECK_THROWS_AS(oracle_solve(p), UsageError);
    auto q = dense(Matrix<double>::Ones(256, 2), Vector<double>::Ones(256), 0.1);
    CHECK_NOTHROW(q.validate());
    q.lower[0] = 1;
    CHECK_THROWS_AS(q.validate(), UsageError);
    q.lower[0] = 0;
    q.lambda = -1;
    CHECK_THROWS_AS(q.validate(), UsageError);
}

TEST_CASE("matrix-free and dense checks agree")
{
    DictionarySpecd spec;
    spec.n = 35;
    spec.omega = {0.6, 1.9};
    const Dictionaryd d(spec);
    SyntheticSpecd synth;
    synth.n = 35;
    synth.steps = {{9, 1.0}};
    synth.sinusoids = {{0.6, 0.5, 0.5}};
    synth.noise_sigma = 0.2;
    synth.rng_seed = 6;
    const auto y = generate(synth).first;
    for (bool centered : {true, false}) {
        const Problem<double> pr(d, y, centered);
        const auto w = make_weights(pr, 0.5);
        const double lam = 0.05 * lambda_max(pr, w);
        // a deliberately non-optimal point so that every condition is exercised
        SparseCoefficientsd c;
        c.entries[{BlockKind::Step, 8}] = 0.7;
        c.entries[{BlockKind::Sine, 0}] = 0.2;
        c.entries[{BlockKind::Slope, 3}] = -0.01;
        const auto mf = kkt_check(pr, w, lam, c);
        const auto dp = make_dense_problem(d, y.values, centered, w, lam);
        const auto de = kkt_check(dp, c.to_dense(d));
        CHECK(mf.active == doctest::Approx(de.active).epsilon(1e-9));
        CHECK(mf.inactive == doctest::Approx(de.inactive).epsilon(1e-9));
    }
}
