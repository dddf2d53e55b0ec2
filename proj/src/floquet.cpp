#include "sclame/floquet.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sclame {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kResonanceEps = 1e-8;

bool resonant_w(const HeunSpectralProblem& p, int N)
{
    // C_n or A_n factors vanish when w+n+1 = 0 (or w+n-1, w+n+1 for A_n)
    for (long n = -N - 1; n <= N + 1; ++n) {
        const cplx s = p.w + static_cast<double>(n);
        if (std::abs(s) < kResonanceEps) return true;
    }
    return false;
}

} // namespace

RecurrenceCoeffs recurrence_coeffs(const HeunSpectralProblem& p, cplx lambda, long n)
{
    const cplx s = p.w + static_cast<double>(n);
    RecurrenceCoeffs rc;
    rc.a = (s - 1.0) * (s + 1.0) + p.A * p.B;
    rc.b = (s + 1.0) * s * (p.T + 1.0) + lambda;
    rc.c = (s + 1.0) * (s + 1.0);
    return rc;
}

HeunSpectralProblem build_heun(const LameParams& params, const Torus& torus)
{
    params.validate();
    const HalfPeriodRoots roots = half_period_roots(torus, RootLabeling::SmallT);
    if (std::abs(roots.e1 - roots.e2) < 1e-12 * (1.0 + std::abs(roots.e1)))
        throw FloquetError("degenerate torus: e1 and e2 coincide");

    HeunSpectralProblem p;
    p.A = cplx{-params.alpha0 / 4.0, 0.0};
    p.B = cplx{1.0 + params.alpha0 / 4.0, 0.0};
    p.e1 = roots.e1;
    p.e2 = roots.e2;
    p.e3 = roots.e3;
    p.T = (roots.e3 - roots.e1) / (roots.e2 - roots.e1);
    return p;
}

cplx lambda_from_lame_accessory(cplx acc, const HeunSpectralProblem& p)
{
    return -(acc + p.A * p.B * p.e1) / (p.e2 - p.e1);
}

// ------------------------------------------------------------------ CF tails

namespace {

// One backward sweep of length N; fills ratios[0..N-1] with u_n (Plus) or
// v_n (Minus) and returns ratios[0].
cplx tail_sweep(const HeunSpectralProblem& p, TailDirection dir, cplx lambda, int N,
                std::vector<cplx>* ratios)
{
    cplx r = 0.0;   // u_N = 0 / v_N = 0
    if (ratios) ratios->assign(N, cplx{0.0, 0.0});
    for (int n = N; n >= 1; --n) {
        cplx denom, numer;
        if (dir == TailDirection::Plus) {
            const RecurrenceCoeffs rc = recurrence_coeffs(p, lambda, n);
            denom = rc.b - p.T * rc.c * r;
            numer = rc.a;
        } else {
            const RecurrenceCoeffs rc = recurrence_coeffs(p, lambda, -n);
            denom = rc.b - p.T * rc.a * r;
            numer = rc.c;
        }
        const double scale = std::abs(numer) + std::abs(r) + 1.0;
        if (std::abs(denom) < 1e-14 * scale) {
            std::ostringstream os;
            os << "continued-fraction denominator vanished at n = " << n
               << " (Lambda near a resonance)";
            throw FloquetError(os.str());
        }
        r = numer / denom;
        if (ratios) (*ratios)[n - 1] = r;
    }
    return r;
}

} // namespace

TailResult cf_tail(const HeunSpectralProblem& p, TailDirection dir, cplx lambda)
{
    int N = std::max(p.N, 8);
    cplx prev = tail_sweep(p, dir, lambda, N, nullptr);
    for (int iter = 0; iter < 10; ++iter) {
        const int N2 = 2 * N;
        const cplx next = tail_sweep(p, dir, lambda, N2, nullptr);
        if (std::abs(next - prev) < p.tolerance * (1.0 + std::abs(next))) {
            TailResult out;
            out.truncation = N2;
            out.ratios.reserve(N2);
            out.value = tail_sweep(p, dir, lambda, N2, &out.ratios);
            return out;
        }
        prev = next;
        N = N2;
        if (N > (1 << 16))
            break;
    }
    std::ostringstream os;
    os << "continued fraction did not converge in N (reached " << N << ", |T| = "
       << std::abs(p.T) << ")";
    throw FloquetError(os.str());
}

cplx matching(const HeunSpectralProblem& p, cplx lambda)
{
    auto eval = [&](const HeunSpectralProblem& prob) {
        const TailResult up = cf_tail(prob, TailDirection::Plus, lambda);
        const TailResult vm = cf_tail(prob, TailDirection::Minus, lambda);
        const RecurrenceCoeffs rc0 = recurrence_coeffs(prob, lambda, 0);
        return rc0.b - prob.T * rc0.c * up.value - prob.T * rc0.a * vm.value;
    };
    if (resonant_w(p, std::max(p.N, 8))) {
        HeunSpectralProblem pp = p, pm = p;
        pp.w += kResonanceEps;
        pm.w -= kResonanceEps;
        return 0.5 * (eval(pp) + eval(pm));
    }
    return eval(p);
}

// --------------------------------------------------------------- full solves

namespace {

FloquetSolution reconstruct(const HeunSpectralProblem& p, cplx lambda)
{
    const TailResult up = cf_tail(p, TailDirection::Plus, lambda);
    const TailResult vm = cf_tail(p, TailDirection::Minus, lambda);
    const int N = std::min(up.truncation, vm.truncation);

    FloquetSolution sol;
    sol.w = p.w;
    sol.lambda = lambda;
    sol.N = N;
    sol.coeff.assign(2 * N + 1, cplx{0.0, 0.0});
    sol.coeff[N] = 1.0;
    // plus side: c_{n+1} = u_n c_n
    for (int n = 0; n < N; ++n)
        sol.coeff[N + n + 1] = up.ratios[n] * sol.coeff[N + n];
    // minus side: d_{k+1} = v_k d_k, c_{-k} = T^k d_k
    cplx d = 1.0, tk = 1.0;
    for (int k = 1; k <= N; ++k) {
        d *= vm.ratios[k - 1];
        tk *= p.T;
        sol.coeff[N - k] = tk * d;
    }
    const RecurrenceCoeffs rc0 = recurrence_coeffs(p, lambda, 0);
    sol.matching_residual =
        std::abs(rc0.b - p.T * rc0.c * up.value - p.T * rc0.a * vm.value);
    sol.resonant = resonant_w(p, N);
    return sol;
}

} // namespace

FloquetSolution solve_lambda(const HeunSpectralProblem& p, cplx lambda_guess)
{
    RootSpec rs;
    rs.guess = lambda_guess;
    rs.secant_step = cplx{1e-4, 1e-5} * (1.0 + std::abs(lambda_guess));
    rs.f_tol = 1e-11;
    rs.step_tol = 1e-14;
    rs.max_iterations = 80;
    const RootResult root = find_root([&](cplx lam) { return matching(p, lam); }, rs);
    return reconstruct(p, root.root);
}

FloquetSolution solve_w(const HeunSpectralProblem& p, cplx lambda, cplx w_guess)
{
    RootSpec rs;
    rs.guess = w_guess;
    rs.secant_step = cplx{1e-4, 1e-5};
    rs.f_tol = 1e-10;
    rs.step_tol = 1e-14;
    rs.max_iterations = 80;
    const RootResult root = find_root(
        [&](cplx w) {
            HeunSpectralProblem q = p;
            q.w = w;
            return matching(q, lambda);
        },
        rs);
    HeunSpectralProblem q = p;
    q.w = root.root;
    return reconstruct(q, lambda);
}

std::vector<cplx> tridiag_oracle(const HeunSpectralProblem& p, int N)
{
    if (N > 200) throw FloquetError("tridiag_oracle: N must be <= 200");
    const int dim = 2 * N + 1;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const long n = static_cast<long>(i) - N;
        const cplx s = p.w + static_cast<double>(n);
        M(i, i) = -(s + 1.0) * s * (p.T + 1.0);
        if (i > 0) M(i, i - 1) = (s - 1.0) * (s + 1.0) + p.A * p.B;   // A_n
        if (i + 1 < dim) M(i, i + 1) = p.T * (s + 1.0) * (s + 1.0);   // T C_n
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(M, false);
    if (solver.info() != Eigen::Success)
        throw FloquetError("tridiag_oracle: eigensolver did not converge");
    std::vector<cplx> ev(dim);
    for (int i = 0; i < dim; ++i) ev[i] = solver.eigenvalues()(i);
    std::sort(ev.begin(), ev.end(),
              [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    return ev;
}

// --------------------------------------------------------------- ODE residual

cplx FloquetSolution::series_eval(cplx x) const
{
    const cplx xw = std::pow(x, w);
    cplx plus = 0.0, minus = 0.0;
    cplx xn = 1.0;
    for (long n = 0; n <= N; ++n) {
        plus += c(n) * xn;
        xn *= x;
    }
    cplx xm = 1.0;
    for (long n = 1; n <= N; ++n) {
        xm /= x;
        minus += c(-n) * xm;
    }
    return xw * (plus + minus);
}

double interior_radius(const HeunSpectralProblem& p)
{
    const double t = std::abs(p.T);
    if (t == 0.0) return 0.5;
    return std::sqrt(t);   // geometric mean of the annulus |T| < |X| < 1
}

OdeResidual ode_residual(const FloquetSolution& sol, const HeunSpectralProblem& p,
                         double r)
{
    if (!(r > 0.0) || !(r < 1.0))
        throw FloquetError("ode_residual: radius must lie in (0,1)");

    // coefficient decay on the circle: both |c_n| r^n (n>0) and |c_{-n}| r^{-n}
    // must decay toward the truncation edges
    const int N = sol.N;
    auto term = [&](long n) { return std::abs(sol.c(n)) * std::pow(r, double(n)); };
    double interior_peak = 0.0;
    for (long n = -N / 2; n <= N / 2; ++n) interior_peak = std::max(interior_peak, term(n));
    const double edge = std::max(term(N) + term(N - 1), term(-N) + term(-N + 1));
    if (!(edge < 1e-8 * interior_peak)) {
        std::ostringstream os;
        os << "Floquet series does not decay on |X| = " << r
           << " (edge/interior = " << edge / interior_peak
           << "); choose a radius inside the annulus |T| < |X| < 1";
        throw FloquetError(os.str());
    }

    const int M = 16;
    double max_norm = 0.0;
    cplx mode0 = 0.0;
    double mode0_scale = 0.0;
    for (int j = 0; j < M; ++j) {
        const double phi = 2.0 * kPi * j / M;
        const cplx x = r * std::exp(cplx{0.0, phi});

        cplx y = 0.0, y1 = 0.0, y2 = 0.0;
        for (long n = -N; n <= N; ++n) {
            const cplx s = sol.w + static_cast<double>(n);
            const cplx xp = std::pow(x, s);
            const cplx cn = sol.c(n);
            y += cn * xp;
            y1 += cn * s * xp / x;
            y2 += cn * s * (s - 1.0) * xp / (x * x);
        }
        const cplx t1 = x * (x - 1.0) * (x - p.T) * y2;
        const cplx t2 = (3.0 * x * x - 2.0 * (p.T + 1.0) * x + p.T) * y1;
        const cplx t3 = (p.A * p.B * x - sol.lambda) * y;
        const cplx res = t1 + t2 + t3;
        const double denom = std::abs(t1) + std::abs(t2) + std::abs(t3) + 1e-300;
        max_norm = std::max(max_norm, std::abs(res) / denom);

        const cplx xw = std::pow(x, sol.w);
        mode0 += res / xw;
        mode0_scale += denom / std::abs(xw);
    }
    OdeResidual out;
    out.max_normalized = max_norm;
    out.mode0_normalized = std::abs(mode0) / std::max(mode0_scale, 1e-300);
    out.radius = r;
    return out;
}

// ------------------------------------------------------------------ q-series

QSeriesResult lambda_qseries(const LameParams& params, cplx w,
                             const std::vector<double>& q_grid, int degree)
{
    if (q_grid.size() < static_cast<std::size_t>(degree) + 2)
        throw FloquetError("lambda_qseries: need at least degree+2 grid nomes");

    std::vector<std::pair<cplx, cplx>> samples;
    for (double q : q_grid) {
        const Torus torus = Torus::from_q(cplx{q, 0.0});
        HeunSpectralProblem p = build_heun(params, torus);
        p.w = w;
        const FloquetSolution sol = solve_lambda(p, -w * (w + 1.0));
        samples.emplace_back(cplx{q, 0.0}, sol.lambda);
    }

    QSeriesResult out;
    for (const auto& s : samples) out.lambda_values.push_back(s.second);
    out.coeffs = fit_polynomial(samples, degree);

    // leave-one-out stability
    for (std::size_t drop = 0; drop < samples.size(); ++drop) {
        if (samples.size() - 1 < static_cast<std::size_t>(degree) + 1) break;
        std::vector<std::pair<cplx, cplx>> sub;
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (i != drop) sub.push_back(samples[i]);
        const std::vector<cplx> c = fit_polynomial(sub, degree);
        for (int k = 0; k <= degree; ++k)
            out.loo_spread = std::max(out.loo_spread, std::abs(c[k] - out.coeffs[k]));
    }
    out.stable = out.loo_spread < 10.0 * 1e-3;
    return out;
}

} // namespace sclame
