#include "doctest.h"

#include "sclame/numerics.hpp"

#include <cmath>
#include <numeric>

using namespace sclame;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("quadrature: constant integrand is exact")
{
    QuadratureSpec spec;
    const cplx v = integrate_singular([](double) { return cplx{1.0, 0.0}; }, spec);
    CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("quadrature: inverse square root endpoint")
{
    QuadratureSpec spec;
    spec.exponent_left = -0.5;
    const cplx v = integrate_singular(
        [](double x) { return cplx{1.0 / std::sqrt(x), 0.0}; }, spec);
    CHECK(std::abs(v - 2.0) < 1e-10);
}

TEST_CASE("quadrature: sin(pi x)^{-1/2} matches midpoint-refinement oracle")
{
    QuadratureSpec spec;
    spec.exponent_left = spec.exponent_right = -0.5;
    const cplx v = integrate_singular(
        [](double x) { return cplx{1.0 / std::sqrt(std::sin(kPi * x)), 0.0}; }, spec);

    // independent oracle: dyadically graded composite midpoint
    double oracle = 0.0;
    const int levels = 26;
    double a = 0.5;
    // integrate [2^-k-1 .. 2^-k] with midpoint panels, exploiting symmetry
    for (int k = 0; k < levels; ++k) {
        const double b = a * 0.5;
        const int n = 4096;
        double s = 0.0;
        const double h = (a - b) / n;
        for (int i = 0; i < n; ++i) {
            const double x = b + (i + 0.5) * h;
            s += 1.0 / std::sqrt(std::sin(kPi * x));
        }
        oracle += s * h;
        a = b;
    }
    // tail below 2^-levels: integrand ~ (pi x)^{-1/2}, tail integral 2 sqrt(a/pi)
    oracle += 2.0 * std::sqrt(a / kPi);
    oracle *= 2.0;   // symmetric halves
    CHECK(std::abs(v.real() - oracle) < 1e-8);
    CHECK(std::abs(v.imag()) < 1e-12);
}

TEST_CASE("quadrature: linearity within tolerance")
{
    QuadratureSpec spec;
    auto f = [](double x) { return cplx{x * x, 0.1 * x}; };
    auto g = [](double x) { return cplx{std::cos(x), x}; };
    const cplx a{2.0, -1.0}, b{0.5, 3.0};
    const cplx lhs = integrate_singular(
        [&](double x) { return a * f(x) + b * g(x); }, spec);
    const cplx rhs = a * integrate_singular(f, spec) + b * integrate_singular(g, spec);
    CHECK(std::abs(lhs - rhs) < 2.0 * (spec.abs_tol + spec.rel_tol * std::abs(lhs)));
}

TEST_CASE("quadrature: NaN integrand aborts naming the abscissa")
{
    QuadratureSpec spec;
    CHECK_THROWS_WITH_AS(
        integrate_singular(
            [](double x) {
                return x > 0.4 && x < 0.6 ? cplx{std::nan(""), 0.0} : cplx{1.0, 0.0};
            },
            spec),
        doctest::Contains("at x ="), NumericsError);
}

TEST_CASE("quadrature: adaptive midpoint method agrees with tanh-sinh")
{
    QuadratureSpec ts;
    QuadratureSpec mid;
    mid.method = QuadratureSpec::Method::AdaptiveMidpoint;
    mid.abs_tol = 1e-10;
    auto f = [](double x) { return cplx{std::exp(x) * std::cos(3 * x), x}; };
    CHECK(std::abs(integrate_singular(f, ts) - integrate_singular(f, mid)) < 1e-8);
}

TEST_CASE("find_root: square root of unity")
{
    RootSpec spec;
    spec.guess = cplx{1.5, 0.0};
    const RootResult r = find_root([](cplx z) { return z * z - 1.0; }, spec);
    CHECK(std::abs(r.root - 1.0) < 1e-12);
}

TEST_CASE("find_root: omega constant against bisection oracle")
{
    RootSpec spec;
    spec.guess = cplx{0.5, 0.0};
    spec.f_tol = 1e-14;
    const RootResult r = find_root([](cplx z) { return z - std::exp(-z); }, spec);

    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((mid - std::exp(-mid)) < 0 ? lo : hi) = mid;
    }
    CHECK(std::abs(r.root.real() - 0.5 * (lo + hi)) < 1e-10);
    CHECK(std::abs(r.root.imag()) < 1e-12);
}

TEST_CASE("find_root: root at the guess returns immediately")
{
    RootSpec spec;
    spec.guess = cplx{0.0, 0.0};
    const RootResult r = find_root([](cplx z) { return z; }, spec);
    CHECK(r.iterations == 0);
    CHECK(std::abs(r.root) == 0.0);
}

TEST_CASE("find_root: newton fallback uses the derivative")
{
    RootSpec spec;
    spec.guess = cplx{2.0, 1.0};
    std::function<cplx(cplx)> df = [](cplx z) { return 3.0 * z * z; };
    const RootResult r =
        find_root([](cplx z) { return z * z * z - 8.0; }, spec, &df);
    CHECK(std::abs(r.root - 2.0) < 1e-11);
}

TEST_CASE("ode: linear rotation reaches e^{i}")
{
    OdeSpec spec;
    spec.t0 = 0.0;
    spec.t1 = 1.0;
    spec.y0 = {cplx{1.0, 0.0}};
    spec.rel_tol = 1e-12;
    spec.abs_tol = 1e-14;
    const OdeTrajectory traj = integrate_ode(
        [](const cplx&, const std::vector<cplx>& y, std::vector<cplx>& d) {
            d[0] = cplx{0.0, 1.0} * y[0];
        },
        spec);
    CHECK(std::abs(traj.final_state()[0] - std::exp(cplx{0.0, 1.0})) < 1e-9);
}

TEST_CASE("ode: zero rhs keeps the state")
{
    OdeSpec spec;
    spec.t0 = cplx{0.0, 2.0};
    spec.t1 = cplx{3.0, -1.0};
    spec.y0 = {cplx{0.7, -0.3}, cplx{2.0, 0.0}};
    const OdeTrajectory traj = integrate_ode(
        [](const cplx&, const std::vector<cplx>&, std::vector<cplx>& d) {
            d[0] = d[1] = 0.0;
        },
        spec);
    CHECK(std::abs(traj.final_state()[0] - spec.y0[0]) == 0.0);
    CHECK(std::abs(traj.final_state()[1] - spec.y0[1]) == 0.0);
}

TEST_CASE("ode: harmonic oscillator over one period returns")
{
    OdeSpec spec;
    spec.t0 = 0.0;
    spec.t1 = 2.0 * kPi;
    spec.y0 = {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
    spec.rel_tol = 1e-11;
    spec.abs_tol = 1e-13;
    auto rhs = [](const cplx&, const std::vector<cplx>& y, std::vector<cplx>& d) {
        d[0] = y[1];
        d[1] = -y[0];
    };
    const OdeTrajectory traj = integrate_ode(rhs, spec);
    CHECK(std::abs(traj.final_state()[0] - 1.0) < 1e-8);
    CHECK(std::abs(traj.final_state()[1]) < 1e-8);
}

TEST_CASE("ode: reversing the path returns the initial state")
{
    OdeSpec fwd;
    fwd.t0 = 0.0;
    fwd.t1 = cplx{1.0, 0.5};
    fwd.y0 = {cplx{0.3, 0.1}};
    auto rhs = [](const cplx& t, const std::vector<cplx>& y, std::vector<cplx>& d) {
        d[0] = std::cos(t) * y[0];
    };
    const OdeTrajectory f = integrate_ode(rhs, fwd);
    OdeSpec bwd = fwd;
    bwd.t0 = fwd.t1;
    bwd.t1 = fwd.t0;
    bwd.y0 = f.final_state();
    const OdeTrajectory b = integrate_ode(rhs, bwd);
    CHECK(std::abs(b.final_state()[0] - fwd.y0[0]) <
          10.0 * (fwd.rel_tol * std::abs(fwd.y0[0]) + fwd.abs_tol) * 100);
}

TEST_CASE("ode: dense output interpolates the solution")
{
    OdeSpec spec;
    spec.t0 = 0.0;
    spec.t1 = 2.0;
    spec.y0 = {cplx{1.0, 0.0}};
    spec.dense_output = true;
    spec.rel_tol = 1e-11;
    const OdeTrajectory traj = integrate_ode(
        [](const cplx& t, const std::vector<cplx>& y, std::vector<cplx>& d) {
            d[0] = -0.5 * y[0];
        },
        spec);
    for (double s : {0.13, 0.5, 0.77}) {
        const cplx t = traj.path_point(s);
        CHECK(std::abs(traj.dense_eval(s)[0] - std::exp(-0.5 * t)) < 1e-9);
    }
}

TEST_CASE("fit_polynomial: exact line and constant")
{
    const auto line = fit_polynomial(
        {{cplx{0, 0}, cplx{1, 0}}, {cplx{1, 0}, cplx{2, 0}}, {cplx{2, 0}, cplx{3, 0}}}, 1);
    CHECK(std::abs(line[0] - 1.0) < 1e-13);
    CHECK(std::abs(line[1] - 1.0) < 1e-13);

    const auto c = fit_polynomial({{cplx{0, 0}, cplx{5, 0}}}, 0);
    CHECK(std::abs(c[0] - 5.0) < 1e-14);
}

TEST_CASE("fit_polynomial: quadratic through five points")
{
    std::vector<std::pair<cplx, cplx>> pts;
    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) pts.push_back({{x, 0}, {x * x, 0}});
    const auto q = fit_polynomial(pts, 2);
    CHECK(std::abs(q[0]) < 1e-12);
    CHECK(std::abs(q[1]) < 1e-12);
    CHECK(std::abs(q[2] - 1.0) < 1e-12);
}

TEST_CASE("fit_polynomial: duplicated abscissae rejected")
{
    CHECK_THROWS_AS(fit_polynomial({{cplx{1, 0}, cplx{0, 0}}, {cplx{1, 0}, cplx{1, 0}}}, 1),
                    NumericsError);
}

TEST_CASE("gaussian_stream: count zero, prefix property, reproducibility")
{
    RandomStream s{12345, 7};
    CHECK(gaussian_stream(s, 0).empty());
    const auto a = gaussian_stream(s, 100);
    const auto b = gaussian_stream(s, 250);
    for (int i = 0; i < 100; ++i) CHECK(a[i] == b[i]);
    const auto c = gaussian_stream(RandomStream{12345, 7}, 100);
    for (int i = 0; i < 100; ++i) CHECK(a[i] == c[i]);
    // distinct stream indexes decorrelate
    const auto d = gaussian_stream(RandomStream{12345, 8}, 100);
    int same = 0;
    for (int i = 0; i < 100; ++i) same += (a[i] == d[i]);
    CHECK(same == 0);
}

TEST_CASE("gaussian_stream: moments at one million draws")
{
    RandomStream s{987654321, 0};
    const std::size_t n = 1000000;
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = s.gaussian(i);
        sum += g;
        sq += g * g;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.005);        // 3 sigma / sqrt(n) bound with margin
    CHECK(std::abs(var - 1.0) < 0.006);   // CLT bound on the second moment
}
