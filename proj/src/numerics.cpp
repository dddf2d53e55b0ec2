#include "sclame/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sclame {

namespace {

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

[[noreturn]] void bad_integrand(double x, cplx v)
{
    std::ostringstream os;
    os << "integrand returned non-finite value (" << v.real() << "," << v.imag()
       << ") at x = " << x;
    throw NumericsError(os.str());
}

} // namespace

void QuadratureSpec::validate() const
{
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw NumericsError("quadrature tolerances must be positive");
    if (max_level < 1)
        throw NumericsError("quadrature max_level must be >= 1");
    if (exponent_left <= -1.0 || exponent_right <= -1.0)
        throw NumericsError("endpoint exponents must exceed -1 (integrability)");
}

// ------------------------------------------------------------- tanh-sinh rule
//
// x(t) = (1 + tanh((pi/2) sinh t))/2 maps R onto (0,1); the induced weight
// decays doubly exponentially, absorbing integrable endpoint singularities.
// Levels halve the step h, reusing previous nodes (odd multiples only).

namespace {

struct TSNode {
    double x;       // abscissa in (0,1)
    double xc;      // distance to the nearer endpoint, computed stably
    double w;       // weight dx/dt
};

// Node at parameter t: x = (1+tanh(u))/2 with u = (pi/2) sinh t.
// 1-x and x are both available to full relative precision via exp forms.
TSNode ts_node(double t)
{
    const double u = 1.5707963267948966 * std::sinh(t);
    const double eu = std::exp(u);
    const double sech = 2.0 / (eu + 1.0 / eu);
    TSNode n;
    n.x = 1.0 / (1.0 + std::exp(-2.0 * u));
    n.xc = (u > 0.0) ? 1.0 / (1.0 + std::exp(2.0 * u)) : n.x;
    n.w = 0.25 * 3.141592653589793 * std::cosh(t) * sech * sech;
    return n;
}

constexpr double kTsTmax = 4.3;   // exp(-2u) underflows relative precision past here

} // namespace

QuadratureResult quadrature_tanh_sinh(const std::function<cplx(double)>& f,
                                      const QuadratureSpec& spec)
{
    QuadratureResult res;
    double h = 1.0;
    cplx sum = 0.0;

    // level 0: coarse trapezoid over t = k*h
    {
        const TSNode n0 = ts_node(0.0);
        cplx v = f(n0.x);
        if (!finite(v)) bad_integrand(n0.x, v);
        sum = n0.w * v;
        res.evaluations++;
        for (int k = 1; k * h <= kTsTmax; ++k) {
            for (double sgn : {1.0, -1.0}) {
                const TSNode n = ts_node(sgn * k * h);
                if (n.w < 1e-320) continue;
                v = f(n.x);
                if (!finite(v)) bad_integrand(n.x, v);
                sum += n.w * v;
                res.evaluations++;
            }
        }
    }

    cplx estimate = sum * h;
    cplx prev = estimate;

    for (int level = 1; level <= spec.max_level; ++level) {
        h *= 0.5;
        // new nodes at odd multiples of h
        for (int k = 1; k * h <= kTsTmax; k += 2) {
            for (double sgn : {1.0, -1.0}) {
                const TSNode n = ts_node(sgn * k * h);
                if (n.w < 1e-320) continue;
                cplx v = f(n.x);
                if (!finite(v)) bad_integrand(n.x, v);
                sum += n.w * v;
                res.evaluations++;
            }
        }
        prev = estimate;
        estimate = sum * h;
        res.levels_used = level;
        const double diff = std::abs(estimate - prev);
        const double tol = spec.abs_tol + spec.rel_tol * std::abs(estimate);
        res.error_estimate = diff;
        if (level >= 2 && diff <= tol) {
            res.converged = true;
            break;
        }
    }
    res.value = estimate;
    res.previous_estimate = prev;
    return res;
}

// -------------------------------------------------- adaptive open-midpoint rule
//
// Open rule (no endpoint evaluations) with trisection refinement: the parent
// midpoint sample is reused as the middle child's midpoint.  Recursion grades
// the mesh into endpoint singularities on its own.

namespace {

struct MidpointWorker {
    const std::function<cplx(double)>& f;
    const QuadratureSpec& spec;
    long evals = 0;
    int deepest = 0;

    cplx refine(double a, double b, cplx fm, int depth, double tol)
    {
        const double len = b - a;
        const double third = len / 3.0;
        const double m1 = a + 0.5 * third;
        const double m3 = b - 0.5 * third;
        cplx f1 = f(m1), f3 = f(m3);
        if (!finite(f1)) bad_integrand(m1, f1);
        if (!finite(f3)) bad_integrand(m3, f3);
        evals += 2;
        const cplx coarse = fm * len;
        const cplx fine = (f1 + fm + f3) * third;
        deepest = std::max(deepest, depth);
        if (std::abs(fine - coarse) <= tol || depth >= 12 + 4 * spec.max_level)
            return fine;
        return refine(a, a + third, f1, depth + 1, tol / 3.0) +
               refine(a + third, b - third, fm, depth + 1, tol / 3.0) +
               refine(b - third, b, f3, depth + 1, tol / 3.0);
    }
};

} // namespace

QuadratureResult quadrature_adaptive_midpoint(const std::function<cplx(double)>& f,
                                              const QuadratureSpec& spec)
{
    QuadratureResult res;
    MidpointWorker worker{f, spec};
    cplx fm = f(0.5);
    if (!finite(fm)) bad_integrand(0.5, fm);
    worker.evals = 1;
    const double tol = spec.abs_tol;
    res.value = worker.refine(0.0, 1.0, fm, 0, tol);
    res.evaluations = worker.evals;
    res.levels_used = worker.deepest;
    res.converged = worker.deepest < 12 + 4 * spec.max_level;
    res.error_estimate = tol;
    return res;
}

QuadratureResult quadrature(const std::function<cplx(double)>& f,
                            const QuadratureSpec& spec)
{
    spec.validate();
    switch (spec.method) {
        case QuadratureSpec::Method::AdaptiveMidpoint:
            return quadrature_adaptive_midpoint(f, spec);
        case QuadratureSpec::Method::TanhSinh:
        default:
            return quadrature_tanh_sinh(f, spec);
    }
}

cplx integrate_singular(const std::function<cplx(double)>& f,
                        const QuadratureSpec& spec)
{
    QuadratureResult res = quadrature(f, spec);
    if (!res.converged) {
        std::ostringstream os;
        os << "quadrature did not converge after level " << res.levels_used
           << "; last two estimates (" << res.previous_estimate.real() << ","
           << res.previous_estimate.imag() << ") -> (" << res.value.real() << ","
           << res.value.imag() << "), |diff| = " << res.error_estimate;
        throw NumericsError(os.str());
    }
    return res.value;
}

// ---------------------------------------------------------------- root finding

void RootSpec::validate() const
{
    if (!(f_tol > 0.0) || !(step_tol > 0.0))
        throw NumericsError("root tolerances must be positive");
    if (max_iterations < 1)
        throw NumericsError("root max_iterations must be >= 1");
}

RootResult find_root(const std::function<cplx(cplx)>& f, const RootSpec& spec,
                     const std::function<cplx(cplx)>* df)
{
    spec.validate();
    RootResult out;
    cplx z0 = spec.guess;
    cplx f0 = f(z0);
    out.trace.push_back(z0);
    if (std::abs(f0) <= spec.f_tol) {
        out.root = z0;
        out.residual = std::abs(f0);
        return out;
    }

    cplx z1, f1;
    if (df) {
        cplx d = (*df)(z0);
        if (!finite(d) || std::abs(d) == 0.0)
            throw NumericsError("derivative vanished or non-finite at initial guess");
        z1 = z0 - f0 / d;
    } else {
        z1 = z0 + spec.secant_step;
    }
    f1 = f(z1);
    out.trace.push_back(z1);
    out.iterations = 1;

    double best = std::min(std::abs(f0), std::abs(f1));
    int stall = 0;
    for (; out.iterations < spec.max_iterations; ++out.iterations) {
        if (std::abs(f1) <= spec.f_tol) break;
        cplx step;
        if (df) {
            cplx d = (*df)(z1);
            if (std::abs(d) > 0.0 && finite(d)) {
                step = -f1 / d;
            } else {
                step = -f1 * (z1 - z0) / (f1 - f0);
            }
        } else {
            cplx denom = f1 - f0;
            if (std::abs(denom) == 0.0)
                throw NumericsError("secant iteration stalled: f(z_k) == f(z_{k-1})");
            step = -f1 * (z1 - z0) / denom;
        }
        cplx z2 = z1 + step;
        cplx f2 = f(z2);
        if (!finite(f2) || !finite(z2)) {
            std::ostringstream os;
            os << "root iteration produced non-finite value after " << out.iterations
               << " steps";
            throw NumericsError(os.str());
        }
        z0 = z1; f0 = f1;
        z1 = z2; f1 = f2;
        out.trace.push_back(z1);
        if (std::abs(f1) < best) { best = std::abs(f1); stall = 0; } else if (++stall > 12) {
            std::ostringstream os;
            os << "root iteration diverging/oscillating; |f| stuck near " << best
               << " after " << out.iterations << " steps";
            throw NumericsError(os.str());
        }
        if (std::abs(step) <= spec.step_tol * (1.0 + std::abs(z1)))
            break;
    }
    if (std::abs(f1) > spec.f_tol) {
        std::ostringstream os;
        os << "root finder failed: |f| = " << std::abs(f1) << " after "
           << out.iterations << " iterations (tol " << spec.f_tol << ")";
        throw NumericsError(os.str());
    }
    out.root = z1;
    out.residual = std::abs(f1);
    return out;
}

// ------------------------------------------------------------------- ODE 5(4)

void OdeSpec::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw NumericsError("ode tolerances must be positive");
    if (y0.empty())
        throw NumericsError("ode initial state is empty");
    if (max_steps < 1)
        throw NumericsError("ode max_steps must be >= 1");
}

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense output coefficients (Hairer-Norsett-Wanner)
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

} // namespace

std::vector<cplx> OdeTrajectory::dense_eval(double s) const
{
    if (steps.empty())
        throw NumericsError("dense output was not requested");
    s = std::clamp(s, steps.front().s0, steps.back().s1);
    // binary search for the covering step
    std::size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (steps[mid].s1 < s) lo = mid + 1; else hi = mid;
    }
    const OdeStepRecord& st = steps[lo];
    const double u = (st.s1 > st.s0) ? (s - st.s0) / (st.s1 - st.s0) : 0.0;
    const double u1 = 1.0 - u;
    std::vector<cplx> y(st.y0.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = st.y0[i] + u * (st.d1[i] + u1 * (st.d2[i] + u * (st.d3[i] + u1 * st.d4[i])));
    return y;
}

cplx OdeTrajectory::path_point(double s) const
{
    double total = 0.0;
    std::vector<double> seglen(path_nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < path_nodes.size(); ++i) {
        seglen[i] = std::abs(path_nodes[i + 1] - path_nodes[i]);
        total += seglen[i];
    }
    double target = s * total;
    for (std::size_t i = 0; i + 1 < path_nodes.size(); ++i) {
        if (target <= seglen[i] || i + 2 == path_nodes.size()) {
            double u = seglen[i] > 0 ? target / seglen[i] : 0.0;
            return path_nodes[i] + u * (path_nodes[i + 1] - path_nodes[i]);
        }
        target -= seglen[i];
    }
    return path_nodes.back();
}

double OdeTrajectory::path_length() const
{
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path_nodes.size(); ++i)
        total += std::abs(path_nodes[i + 1] - path_nodes[i]);
    return total;
}

OdeTrajectory integrate_ode(const OdeRhs& rhs, const OdeSpec& spec)
{
    spec.validate();
    OdeTrajectory traj;
    traj.path_nodes.push_back(spec.t0);
    for (const cplx& w : spec.waypoints) traj.path_nodes.push_back(w);
    traj.path_nodes.push_back(spec.t1);

    const std::size_t dim = spec.y0.size();
    std::vector<cplx> y = spec.y0;

    traj.t_samples.push_back(spec.t0);
    traj.y_samples.push_back(y);

    const double total_len = traj.path_length();
    if (total_len == 0.0) return traj;

    double s_off = 0.0;   // path parameter offset of current segment start
    std::vector<cplx> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim),
        ytmp(dim), ynew(dim), yerr(dim);

    for (std::size_t seg = 0; seg + 1 < traj.path_nodes.size(); ++seg) {
        const cplx za = traj.path_nodes[seg];
        const cplx zb = traj.path_nodes[seg + 1];
        const double seg_len = std::abs(zb - za);
        if (seg_len == 0.0) continue;
        const cplx dir = (zb - za) / seg_len;   // unit direction in C
        // integrate dy/dl = dir * rhs(t(l), y) for arc length l in [0, seg_len]
        auto eval = [&](double l, const std::vector<cplx>& yy, std::vector<cplx>& out) {
            rhs(za + dir * l, yy, out);
            for (auto& v : out) v *= dir;
        };

        double l = 0.0;
        double h = seg_len / 100.0;
        bool first = true;
        double err_prev = 1.0;
        eval(l, y, k1);

        while (l < seg_len) {
            if (traj.total_steps + traj.rejected_steps > spec.max_steps) {
                std::ostringstream os;
                os << "ode exceeded max step count " << spec.max_steps
                   << " at t = (" << (za + dir * l).real() << ","
                   << (za + dir * l).imag() << ")";
                throw NumericsError(os.str());
            }
            h = std::min(h, seg_len - l);
            if (h < 1e-14 * seg_len) {
                if (spec.stop_on_underflow) {
                    traj.underflow = true;
                    traj.stopped_early = true;
                    traj.stop_location = za + dir * l;
                    return traj;
                }
                std::ostringstream os;
                os << "ode step underflow near t = (" << (za + dir * l).real() << ","
                   << (za + dir * l).imag() << "); last good |y0| = "
                   << std::abs(y[0]);
                throw NumericsError(os.str());
            }

            for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
            eval(l + c2 * h, ytmp, k2);
            for (std::size_t i = 0; i < dim; ++i)
                ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            eval(l + c3 * h, ytmp, k3);
            for (std::size_t i = 0; i < dim; ++i)
                ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            eval(l + c4 * h, ytmp, k4);
            for (std::size_t i = 0; i < dim; ++i)
                ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            eval(l + c5 * h, ytmp, k5);
            for (std::size_t i = 0; i < dim; ++i)
                ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                      a64 * k4[i] + a65 * k5[i]);
            eval(l + h, ytmp, k6);
            for (std::size_t i = 0; i < dim; ++i)
                ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                      b5 * k5[i] + b6 * k6[i]);
            eval(l + h, ynew, k7);

            double errnorm = 0.0;
            bool ok = true;
            for (std::size_t i = 0; i < dim; ++i) {
                yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                               e6 * k6[i] + e7 * k7[i]);
                if (!finite(ynew[i])) { ok = false; break; }
                const double sc = spec.abs_tol +
                    spec.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                const double e = std::abs(yerr[i]) / sc;
                errnorm = std::max(errnorm, e);
            }

            if (!ok || errnorm > 1.0) {
                traj.rejected_steps++;
                h *= ok ? std::max(0.2, 0.9 * std::pow(errnorm, -0.25)) : 0.2;
                continue;
            }

            // accept
            if (spec.dense_output) {
                OdeStepRecord rec;
                rec.s0 = (s_off + l) / total_len;
                rec.s1 = (s_off + l + h) / total_len;
                rec.t0 = za + dir * l;
                rec.t1 = za + dir * (l + h);
                rec.y0 = y;
                rec.y1 = ynew;
                rec.d1.resize(dim); rec.d2.resize(dim); rec.d3.resize(dim); rec.d4.resize(dim);
                for (std::size_t i = 0; i < dim; ++i) {
                    const cplx dy = ynew[i] - y[i];
                    const cplx bspl = h * k1[i] - dy;
                    rec.d1[i] = dy;
                    rec.d2[i] = bspl;
                    rec.d3[i] = dy - h * k7[i] - bspl;
                    rec.d4[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                     d6 * k6[i] + d7 * k7[i]);
                }
                traj.steps.push_back(std::move(rec));
            }
            l += h;
            y = ynew;
            k1 = k7;   // FSAL
            traj.total_steps++;
            traj.t_samples.push_back(za + dir * l);
            traj.y_samples.push_back(y);
            if (spec.stop_condition && spec.stop_condition(za + dir * l, y)) {
                traj.stopped_early = true;
                traj.stop_location = za + dir * l;
                return traj;
            }

            // PI controller
            const double safe = 0.9;
            double fac = safe * std::pow(std::max(errnorm, 1e-16), -0.7 / 5.0) *
                         std::pow(err_prev, 0.4 / 5.0);
            fac = std::clamp(fac, 0.2, 6.0);
            err_prev = std::max(errnorm, 1e-16);
            h *= fac;
            if (first) { first = false; }
        }
        s_off += seg_len;
    }
    return traj;
}

// ---------------------------------------------------------------- polynomial

std::vector<cplx> fit_polynomial(const std::vector<std::pair<cplx, cplx>>& samples,
                                 int degree)
{
    if (degree < 0) throw NumericsError("polynomial degree must be >= 0");
    const std::size_t n = samples.size();
    if (n < static_cast<std::size_t>(degree) + 1)
        throw NumericsError("need at least degree+1 samples");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (samples[i].first == samples[j].first) {
                std::ostringstream os;
                os << "duplicated abscissa (" << samples[i].first.real() << ","
                   << samples[i].first.imag() << ") at positions " << i << "," << j;
                throw NumericsError(os.str());
            }

    Eigen::MatrixXcd V(n, degree + 1);
    Eigen::VectorXcd rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx p = 1.0;
        for (int k = 0; k <= degree; ++k) {
            V(i, k) = p;
            p *= samples[i].first;
        }
        rhs(i) = samples[i].second;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(V);
    if (qr.rank() < degree + 1)
        throw NumericsError("rank-deficient Vandermonde system");
    Eigen::VectorXcd c = qr.solve(rhs);
    std::vector<cplx> out(degree + 1);
    for (int k = 0; k <= degree; ++k) out[k] = c(k);
    return out;
}

cplx eval_polynomial(const std::vector<cplx>& coeffs, cplx x)
{
    cplx acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
    return acc;
}

// ---------------------------------------------------------------- RNG

namespace {

inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index)
{
    return mix64(mix64(seed) ^ (mix64(index ^ 0xD1B54A32D192ED03ULL) + 0x632BE59BD9B4E019ULL));
}

inline double to_unit(std::uint64_t bits)
{
    // (0,1): top 53 bits, offset by half an ulp so 0 is excluded
    return (static_cast<double>(bits >> 11) + 0.5) * 1.1102230246251565e-16;
}

} // namespace

double RandomStream::uniform(std::uint64_t i) const
{
    return to_unit(mix64(stream_key(seed, index) + i * 0x9E3779B97F4A7C15ULL));
}

double RandomStream::gaussian(std::uint64_t i) const
{
    // Box-Muller on the counter pair belonging to draw pair i/2.
    const std::uint64_t pair = i >> 1;
    const std::uint64_t key = stream_key(seed, index);
    const double u1 = to_unit(mix64(key + (2 * pair) * 0x9E3779B97F4A7C15ULL));
    const double u2 = to_unit(mix64(key + (2 * pair + 1) * 0x9E3779B97F4A7C15ULL));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586 * u2;
    return (i & 1) ? r * std::sin(a) : r * std::cos(a);
}

std::vector<double> gaussian_stream(const RandomStream& stream, std::size_t count)
{
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = stream.gaussian(i);
    return out;
}

} // namespace sclame
