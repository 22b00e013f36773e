#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "lmio/numerics.hpp"

using namespace lmio;

// power-series oracle for J_n, adequate up to x ~ 15
static double bessel_series(int n, double x, int terms = 50) {
    long double fact_n = 1.0L;
    for (int k = 1; k <= n; ++k) fact_n *= k;
    long double term = std::pow((long double)x / 2.0L, n) / fact_n;
    long double sum = 0.0L;
    for (int m = 0; m < terms; ++m) {
        sum += term;
        term *= -(long double)x * x / 4.0L / ((m + 1.0L) * (m + 1.0L + n));
    }
    return (double)sum;
}

TEST_CASE("bessel_j basic values") {
    auto b = bessel_j(0, 0.0);
    CHECK(b.j == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.jp == doctest::Approx(0.0).epsilon(1e-15));
    b = bessel_j(1, 0.0);
    CHECK(b.j == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(b.jp == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("bessel_j locates the first zero of J0 (series oracle)") {
    const double x = 2.404826;
    CHECK(std::abs(bessel_series(0, x)) < 1e-5);
    CHECK(std::abs(bessel_j(0, x).j) < 1e-5);
    CHECK(std::abs(bessel_j(0, x).j - bessel_series(0, x)) < 1e-12);
}

TEST_CASE("bessel_j matches the series oracle to 1e-12") {
    for (int n : {0, 1, 2, 5, 9}) {
        for (double x : {0.05, 0.7, 2.3, 6.1, 11.0}) {
            const double ref = bessel_series(n, x, 60);
            const auto b = bessel_j(n, x);
            CHECK(std::abs(b.j - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
            const double refp = (n == 0)
                                    ? -bessel_series(1, x, 60)
                                    : 0.5 * (bessel_series(n - 1, x, 60) -
                                             bessel_series(n + 1, x, 60));
            CHECK(std::abs(b.jp - refp) <= 1e-12 * std::max(1.0, std::abs(refp)));
        }
    }
}

TEST_CASE("bessel recurrence J_{n-1}+J_{n+1} = (2n/x) J_n") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.1, 50.0);
    for (int n = 1; n <= 10; ++n) {
        for (int i = 0; i < 50; ++i) {
            const double x = ux(rng);
            const double lhs = bessel_j(n - 1, x).j + bessel_j(n + 1, x).j;
            const double rhs = 2.0 * n / x * bessel_j(n, x).j;
            const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-3});
            CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("bessel_j rejects bad input") {
    CHECK_THROWS_AS(bessel_j(-1, 1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_j(0, -1.0), std::domain_error);
}

TEST_CASE("axial_wavenumber branches") {
    const double c = Units::si().c;
    cplx h = axial_wavenumber(cplx(1.0), 2.0 * c, 1.0);
    CHECK(h.real() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(h.imag() == doctest::Approx(0.0));

    h = axial_wavenumber(cplx(1.0), c, 2.0);
    CHECK(h.real() == doctest::Approx(0.0));
    CHECK(h.imag() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));

    const cplx eps(2.0, 0.5);
    h = axial_wavenumber(eps, c, 1.0);
    CHECK(h.imag() > 0.0);
    const cplx k = wavenumber(eps, c, c);
    CHECK(std::abs(h * h - (k * k - 1.0)) <= 1e-14 * std::abs(k * k));
}

TEST_CASE("axial_wavenumber branch contract on random samples") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const cplx eps(0.5 + 5.0 * u(rng), 2.0 * u(rng));
        const double omega = std::pow(10.0, 14.0 + 2.0 * u(rng));
        const double lam = 3.0 * omega / Units::si().c * u(rng);
        const cplx h = axial_wavenumber(eps, omega, lam);
        CHECK(h.imag() >= 0.0);
        if (h.imag() == 0.0) CHECK(h.real() >= 0.0);
        const cplx k = wavenumber(eps, omega, Units::si().c);
        CHECK(std::abs(h * h - (k * k - cplx(lam) * lam)) <= 1e-13 * std::abs(k * k));
    }
}

TEST_CASE("integrate_spectral on analytic integrals") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    spec.abs_tol = 1e-16;
    spec.lambda_max = 50.0;
    auto r1 = integrate_spectral([](double x) { return cplx(std::exp(-x)); }, spec);
    CHECK(r1.converged);
    CHECK(std::abs(r1.value - 1.0) < 1e-10);

    spec.lambda_max = 40.0;
    auto r2 = integrate_spectral([](double x) { return cplx(x * std::exp(-x * x)); }, spec);
    CHECK(r2.converged);
    CHECK(std::abs(r2.value - 0.5) < 1e-10);
}

TEST_CASE("integrate_spectral matches a brute-force trapezoid oracle") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    spec.abs_tol = 1e-18;
    spec.lambda_max = 50.0;
    auto f = [](double x) { return bessel_j(0, x).j * std::exp(-x / 10.0); };
    auto r = integrate_spectral([&](double x) { return cplx(f(x)); }, spec);

    const int N = 1000000;
    long double acc = 0.5L * (f(0.0) + f(50.0));
    for (int i = 1; i < N; ++i) acc += f(50.0 * i / N);
    const double oracle = (double)(acc * 50.0L / N);
    CHECK(std::abs(r.value.real() - oracle) < 1e-8);
}

TEST_CASE("quadrature error bound honesty on an analytic suite") {
    struct Case {
        std::function<cplx(double)> f;
        cplx exact;
        double lmax;
    };
    const double spi = std::sqrt(pi);
    std::vector<Case> suite = {
        {[](double x) { return cplx(std::exp(-x)); }, cplx(1.0), 60.0},
        {[](double x) { return cplx(x * std::exp(-x * x)); }, cplx(0.5), 30.0},
        {[](double x) { return cplx(std::exp(-x * x)); }, cplx(0.5 * spi), 30.0},
        {[](double x) { return cplx(std::sin(x) * std::exp(-x)); }, cplx(0.5), 80.0},
        {[](double x) { return cplx(std::cos(3.0 * x) * std::exp(-2.0 * x)); },
         cplx(2.0 / 13.0), 40.0},
        {[](double x) { return cplx(1.0 / ((1.0 + x) * (1.0 + x))); },
         cplx(1.0 - 1.0 / 101.0), 100.0},
        {[](double x) { return cplx(x * x * std::exp(-x)); }, cplx(2.0), 90.0},
        {[](double x) { return std::exp(cplx(-0.5, 1.0) * x); },
         1.0 / cplx(0.5, -1.0), 90.0},
        {[](double x) { return cplx(1.0 / (1.0 + x * x)); }, cplx(std::atan(50.0)), 50.0},
        {[](double x) { return cplx(std::sqrt(x) * std::exp(-x)); }, cplx(0.5 * spi), 70.0},
    };
    for (size_t i = 0; i < suite.size(); ++i) {
        QuadratureSpec spec;
        spec.rel_tol = 1e-9;
        spec.abs_tol = 1e-16;
        spec.lambda_max = suite[i].lmax;
        auto r = integrate_spectral(suite[i].f, spec);
        const double true_err = std::abs(r.value - suite[i].exact);
        INFO("case ", i, " true=", true_err, " bound=", r.error_bound);
        CHECK(r.error_bound >= true_err * 0.999);
    }
}

TEST_CASE("integrate_spectral reports non-convergence honestly") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-14;
    spec.abs_tol = 1e-30;
    spec.lambda_max = 1.0;
    spec.max_subdivisions = 2;
    auto r = integrate_spectral([](double x) { return cplx(std::cos(40.0 * x * x)); }, spec);
    CHECK_FALSE(r.converged);
    CHECK(r.error_bound > 0.0);
}

TEST_CASE("find_root_complex on known roots") {
    auto r = find_root_complex([](cplx z) { return z * z + 1.0; }, cplx(0.0, 0.5), 1e-13);
    CHECK(r.converged);
    CHECK(std::abs(r.root - cplx(0.0, 1.0)) < 1e-12);

    r = find_root_complex([](cplx z) { return z - 1.0; }, cplx(7.0, 3.0), 1e-13);
    CHECK(r.converged);
    CHECK(std::abs(r.root - 1.0) < 1e-12);
}

TEST_CASE("find_root_complex vs bisection on a slab transcendental equation") {
    // even TE guided modes of a symmetric slab in normalized variables:
    // u tan u = sqrt(V^2 - u^2), V = 2
    const double V = 2.0;
    auto g = [&](double u) { return u * std::tan(u) - std::sqrt(V * V - u * u); };
    double a = 0.5, b = 1.5;
    REQUIRE(g(a) < 0.0);
    REQUIRE(g(b) > 0.0);
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        (g(m) < 0.0 ? a : b) = m;
    }
    const double oracle = 0.5 * (a + b);

    auto f = [&](cplx z) { return z * std::tan(z) - std::sqrt(V * V - z * z); };
    auto r = find_root_complex(f, cplx(1.2, 0.05), 1e-13);
    CHECK(r.converged);
    CHECK(std::abs(r.root - oracle) < 1e-9);
}

TEST_CASE("QuadratureSpec validation") {
    QuadratureSpec spec;
    spec.lambda_max = 1.0;
    CHECK_NOTHROW(spec.validate());
    spec.rel_tol = -1.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
