#include "refpot/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

namespace refpot::numerics {

namespace odeint = boost::numeric::odeint;

namespace {

template <std::size_t N>
std::array<double, N> run_ode(
    const std::function<void(const std::array<double, N>&, std::array<double, N>&, double)>& sys,
    std::array<double, N> y, double r0, double r1, const Tolerance& tol) {
    if (r0 == r1) return y;
    using state = std::array<double, N>;
    // per-step control; the /64 keeps the accumulated global error within tol
    // on the standard test problems
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<state>>(tol.abs_tol / 64.0,
                                                                              tol.rel_tol / 64.0);
    double h = (r1 - r0) / 100.0;
    try {
        odeint::integrate_adaptive(stepper, sys, y, r0, r1, h);
    } catch (const std::exception& e) {
        throw NumericsError(std::string("ODE integration failed: ") + e.what());
    }
    return y;
}

}  // namespace

double integrate_ode(const ScalarField& f, double y0, double r0, double r1,
                     const Tolerance& tol) {
    auto sys = std::function<void(const std::array<double, 1>&, std::array<double, 1>&, double)>(
        [&f](const std::array<double, 1>& y, std::array<double, 1>& dy, double r) {
            dy[0] = f(r, y[0]);
        });
    return run_ode<1>(sys, {y0}, r0, r1, tol)[0];
}

std::vector<double> integrate_ode_sampled(const ScalarField& f, double y0,
                                          double r0, double r1,
                                          const std::vector<double>& at,
                                          const Tolerance& tol) {
    using state = std::array<double, 1>;
    auto sys = [&f](const state& y, state& dy, double r) { dy[0] = f(r, y[0]); };
    auto stepper = odeint::make_dense_output<odeint::runge_kutta_dopri5<state>>(tol.abs_tol / 64.0,
                                                                                tol.rel_tol / 64.0);
    state y = {y0};
    stepper.initialize(y, r0, (r1 - r0) / 100.0);
    std::vector<double> out;
    out.reserve(at.size());
    std::size_t i = 0;
    while (i < at.size() && stepper.current_time() < r1) {
        stepper.do_step(sys);
        double t = std::min(stepper.current_time(), r1);
        while (i < at.size() && at[i] <= t) {
            state s;
            stepper.calc_state(at[i], s);
            out.push_back(s[0]);
            ++i;
        }
    }
    for (; i < at.size(); ++i) {
        state s;
        stepper.calc_state(r1, s);
        out.push_back(s[0]);
    }
    return out;
}

std::array<double, 2> integrate_ode2(
    const std::function<std::array<double, 2>(double, const std::array<double, 2>&)>& f,
    std::array<double, 2> y0, double r0, double r1, const Tolerance& tol) {
    auto sys = std::function<void(const std::array<double, 2>&, std::array<double, 2>&, double)>(
        [&f](const std::array<double, 2>& y, std::array<double, 2>& dy, double r) {
            dy = f(r, y);
        });
    return run_ode<2>(sys, y0, r0, r1, tol);
}

double adaptive_quadrature(const Fn& f, double a, double b, const Tolerance& tol) {
    if (a == b) return 0.0;
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 18, tol.rel_tol, &err);
    return v;
}

double adaptive_quadrature_log(const Fn& f, double a, double b, const Tolerance& tol) {
    if (a == b) return 0.0;
    if (a < 0 || b <= a) throw NumericsError("adaptive_quadrature_log needs 0 <= a < b");
    double lo = a;
    if (lo == 0.0) {
        lo = b * 0x1p-40;
        // leading linear panel
    }
    double sum = (a == 0.0) ? adaptive_quadrature(f, 0.0, lo, tol) : 0.0;
    // geometric panels, at most one decade each
    double x = lo;
    while (x < b) {
        double x2 = std::min(b, x * 10.0);
        sum += adaptive_quadrature(f, x, x2, tol);
        x = x2;
    }
    return sum;
}

double principal_value(const Fn& f, double pole, double a, double b,
                       const Tolerance& tol) {
    if (!(a < pole && pole < b)) throw NumericsError("principal_value: pole must be interior");
    double w = 0.5 * std::min(pole - a, b - pole);
    if (w == 0.0) throw NumericsError("principal_value: pole on the boundary");
    // symmetric window: P int_{pole-w}^{pole+w} f/(x-pole) = int_0^w [f(p+t)-f(p-t)]/t dt
    auto odd = [&](double t) {
        if (t == 0.0) return 0.0;
        return (f(pole + t) - f(pole - t)) / t;
    };
    double inner = adaptive_quadrature(odd, 0.0, w, tol);
    // substitute x = pole -+ (w + s) so the log panels resolve the window edge
    auto g = [&](double x) { return f(x) / (x - pole); };
    double left = adaptive_quadrature_log([&](double s) { return g(pole - w - s); }, 0.0,
                                          pole - w - a, tol);
    double right = adaptive_quadrature_log([&](double s) { return g(pole + w + s); }, 0.0,
                                           b - pole - w, tol);
    return inner + left + right;
}

namespace {

struct FilonWeights {
    double alpha, beta, gamma;
};

FilonWeights filon_weights(double theta) {
    FilonWeights w{};
    if (std::abs(theta) < 0.05) {
        double t2 = theta * theta;
        w.alpha = theta * t2 * (2.0 / 45 + t2 * (-2.0 / 315 + t2 * (2.0 / 4725)));
        w.beta = 2.0 / 3 + t2 * (2.0 / 15 + t2 * (-4.0 / 105 + t2 * (2.0 / 567)));
        w.gamma = 4.0 / 3 + t2 * (-2.0 / 15 + t2 * (1.0 / 210 + t2 * (-1.0 / 11340)));
    } else {
        double s = std::sin(theta), c = std::cos(theta), t3 = theta * theta * theta;
        w.alpha = (theta * theta + theta * s * c - 2 * s * s) / t3;
        w.beta = 2 * (theta * (1 + c * c) - 2 * s * c) / t3;
        w.gamma = 4 * (s - theta * c) / t3;
    }
    return w;
}

double filon_pass(const Fn& g, double a, double b, double omega, std::size_t n2) {
    const double h = (b - a) / double(n2);
    const auto w = filon_weights(omega * h);
    double ceven = 0.0, codd = 0.0;
    for (std::size_t i = 0; i <= n2; ++i) {
        double x = a + h * double(i);
        double fc = g(x) * std::cos(omega * x);
        if (i % 2 == 0)
            ceven += fc;
        else
            codd += fc;
    }
    ceven -= 0.5 * (g(a) * std::cos(omega * a) + g(b) * std::cos(omega * b));
    double boundary = g(b) * std::sin(omega * b) - g(a) * std::sin(omega * a);
    return h * (w.alpha * boundary + w.beta * ceven + w.gamma * codd);
}

}  // namespace

double filon_cos(const Fn& g, double a, double b, double omega, const Tolerance& tol) {
    if (b <= a) return 0.0;
    std::size_t n2 = 8;
    double prev = filon_pass(g, a, b, omega, n2);
    for (int pass = 0; pass < 16; ++pass) {
        n2 *= 2;
        double cur = filon_pass(g, a, b, omega, n2);
        if (std::abs(cur - prev) <= tol.abs_tol + tol.rel_tol * std::abs(cur)) return cur;
        prev = cur;
    }
    return prev;
}

double oscillatory_cos_integral(const Fn& g, double omega, double k_cut,
                                const OscillatoryTail& tail, const Tolerance& tol) {
    if (!(k_cut > 0)) throw NumericsError("oscillatory_cos_integral: k_cut must be positive");
    if (!tail.analytic_envelope && tail.tail_k2 == 0.0)
        throw NumericsError("oscillatory_cos_integral: envelope tail not supplied");
    Tolerance pt = tol;
    pt.abs_tol = std::max(tol.abs_tol / 64.0, 1e-300);
    // geometric blocks over [0, k_cut]
    double sum = 0.0;
    double edge = k_cut * 0x1p-24;
    sum += filon_cos(g, 0.0, edge, omega, pt);
    while (edge < k_cut) {
        double next = std::min(k_cut, edge * 2.0);
        sum += filon_cos(g, edge, next, omega, pt);
        edge = next;
    }
    // analytic tail region by the same product quadrature
    double k_far = tail.k_far > 0 ? tail.k_far : 64.0 * k_cut;
    if (tail.analytic_envelope) {
        edge = k_cut;
        while (edge < k_far) {
            double next = std::min(k_far, edge * 2.0);
            sum += filon_cos(tail.analytic_envelope, edge, next, omega, pt);
            edge = next;
        }
    } else {
        k_far = k_cut;
    }
    // leading 1/k^2 closed form beyond k_far
    if (tail.tail_k2 != 0.0) {
        if (omega == 0.0) {
            sum += tail.tail_k2 / k_far;
        } else {
            double x = omega * k_far;
            sum += tail.tail_k2 *
                   (std::cos(x) / k_far - omega * (M_PI / 2 - sin_integral(x)));
        }
    }
    return sum;
}

double find_root(const Fn& f, double x1, double x2, const Tolerance& tol) {
    double f1 = f(x1), f2 = f(x2);
    if (f1 == 0.0) return x1;
    if (f2 == 0.0) return x2;
    if (f1 * f2 > 0) throw NumericsError("find_root: invalid bracket");
    auto stop = [&tol](double lo, double hi) {
        return std::abs(hi - lo) <= tol.abs_tol + tol.rel_tol * std::abs(hi);
    };
    std::uintmax_t iters = 200;
    auto res = boost::math::tools::toms748_solve(f, x1, x2, f1, f2, stop, iters);
    return 0.5 * (res.first + res.second);
}

double sin_integral(double x) {
    if (x < 0) return -sin_integral(-x);
    if (x == 0) return 0.0;
    if (x <= 6.0) {
        // power series
        double term = x, sum = x;
        double x2 = x * x;
        for (int n = 1; n < 60; ++n) {
            term *= -x2 / (2.0 * n * (2.0 * n + 1));
            double add = term / (2.0 * n + 1);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    // Si(x) = pi/2 + Im E1(ix); E1 by modified Lentz continued fraction
    std::complex<double> z(0.0, x);
    std::complex<double> b = z + 1.0, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 300; ++i) {
        double an = -double(i) * double(i);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        std::complex<double> del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    std::complex<double> e1 = h * std::exp(-z);
    return M_PI / 2 + e1.imag();
}

NumerovResult numerov_propagate(const std::vector<double>& q, double h,
                                double u0, double u1) {
    const std::size_t n = q.size();
    if (n < 3) throw NumericsError("numerov_propagate: grid too short");
    NumerovResult res;
    res.u.resize(n);
    res.u[0] = u0;
    res.u[1] = u1;
    res.log_scale = 0.0;
    const double h12 = h * h / 12.0;
    std::vector<double> scale_log(1, 0.0);
    std::vector<std::size_t> scale_from(1, 0);
    double fm = 1.0 - h12 * q[0], f0 = 1.0 - h12 * q[1];
    for (std::size_t i = 2; i < n; ++i) {
        double fp = 1.0 - h12 * q[i];
        double u = ((12.0 - 10.0 * f0) * res.u[i - 1] - fm * res.u[i - 2]) / fp;
        res.u[i] = u;
        fm = f0;
        f0 = fp;
        double au = std::abs(u);
        if (au > 1e200) {
            res.u[i] /= au;
            res.u[i - 1] /= au;
            scale_log.push_back(scale_log.back() + std::log(au));
            scale_from.push_back(i - 1);
        }
    }
    // flatten to a common scale (the last epoch); early entries may underflow
    double total = scale_log.back();
    for (std::size_t e = 0; e + 1 < scale_log.size(); ++e) {
        double fac = std::exp(scale_log[e] - total);
        std::size_t hi = scale_from[e + 1];
        for (std::size_t i = scale_from[e]; i < hi; ++i) res.u[i] *= fac;
    }
    // normalize to unit maximum so squares of the stored values stay alive
    double mx = 0.0;
    for (double x : res.u) mx = std::max(mx, std::abs(x));
    if (mx > 0.0 && std::isfinite(mx)) {
        for (auto& x : res.u) x /= mx;
        total += std::log(mx);
    }
    res.log_scale = total;
    res.nodes = count_nodes(res.u);
    return res;
}

int count_nodes(const std::vector<double>& u) {
    int nodes = 0;
    double prev = 0.0;
    for (double x : u) {
        if (x == 0.0) continue;
        if (prev != 0.0 && prev * x < 0) ++nodes;
        prev = x;
    }
    return nodes;
}

RegularLaunch regular_launch(const Fn& q, double r0, double rs, const Tolerance& tol) {
    if (!(0 < r0 && r0 < rs)) throw NumericsError("regular_launch: need 0 < r0 < rs");
    // series start: u = r + q0 r^3/6 + q0' r^4/12 + (q0''/40 + q0^2/120) r^5
    double dq = r0 * 0.5;
    double q0 = q(r0), qm = q(std::max(r0 - dq, r0 * 0.25)), qp = q(r0 + dq);
    double d1 = (qp - qm) / (2 * dq), d2 = (qp - 2 * q0 + qm) / (dq * dq);
    double r2 = r0 * r0;
    double u = r0 * (1 + q0 * r2 / 6 + d1 * r0 * r2 / 12 + (d2 / 40 + q0 * q0 / 120) * r2 * r2);
    double up = 1 + q0 * r2 / 2 + d1 * r0 * r2 / 3 + 5 * (d2 / 40 + q0 * q0 / 120) * r2 * r2;
    std::array<double, 2> y = {std::log(u), up / u};
    auto sys = std::function<std::array<double, 2>(double, const std::array<double, 2>&)>(
        [&q](double r, const std::array<double, 2>& s) {
            return std::array<double, 2>{s[1], q(r) - s[1] * s[1]};
        });
    y = integrate_ode2(sys, y, r0, rs, tol);
    return {y[0], y[1]};
}

SteffenSpline::SteffenSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 3 || y_.size() != n) throw NumericsError("SteffenSpline: need >= 3 points");
    std::vector<double> hseg(n - 1), s(n - 1), yp(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        hseg[i] = x_[i + 1] - x_[i];
        if (hseg[i] <= 0) throw NumericsError("SteffenSpline: x must be strictly increasing");
        s[i] = (y_[i + 1] - y_[i]) / hseg[i];
    }
    yp[0] = s[0];
    yp[n - 1] = s[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double p = (s[i - 1] * hseg[i] + s[i] * hseg[i - 1]) / (hseg[i - 1] + hseg[i]);
        double lim = 2 * std::min(std::abs(s[i - 1]), std::abs(s[i]));
        if (s[i - 1] * s[i] <= 0)
            yp[i] = 0;
        else if (std::abs(p) > lim)
            yp[i] = (s[i - 1] > 0 ? 1.0 : -1.0) * lim;
        else
            yp[i] = p;
    }
    c1_.resize(n - 1);
    c2_.resize(n - 1);
    c3_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        c1_[i] = yp[i];
        c2_[i] = (3 * s[i] - 2 * yp[i] - yp[i + 1]) / hseg[i];
        c3_[i] = (yp[i] + yp[i + 1] - 2 * s[i]) / (hseg[i] * hseg[i]);
    }
}

double SteffenSpline::operator()(double x) const {
    if (x_.empty()) throw NumericsError("SteffenSpline: empty");
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = (it == x_.begin()) ? 0 : std::size_t(it - x_.begin()) - 1;
    if (i >= x_.size() - 1) i = x_.size() - 2;
    double t = x - x_[i];
    return y_[i] + t * (c1_[i] + t * (c2_[i] + t * c3_[i]));
}

void LogSum::add(double log_term, int term_sign) {
    if (term_sign == 0) return;
    if (sign == 0) {
        log_abs = log_term;
        sign = term_sign;
        return;
    }
    double hi = std::max(log_abs, log_term), lo = std::min(log_abs, log_term);
    double r = std::exp(lo - hi);
    if (sign == term_sign) {
        log_abs = hi + std::log1p(r);
    } else {
        int hi_sign = (log_abs >= log_term) ? sign : term_sign;
        if (r == 1.0) {
            sign = 0;
            log_abs = -1e300;
            return;
        }
        log_abs = hi + std::log1p(-r);
        sign = hi_sign;
    }
}

unsigned thread_count(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("REFPOT_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    threads = std::min<std::size_t>(threads, n);
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::atomic<bool> failed{false};
    std::string message;
    std::mutex mmu;
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                body(i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(mmu);
                failed.store(true);
                if (message.empty()) message = e.what();
            }
        }
    };
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) throw NumericsError("parallel task failed: " + message);
}

}  // namespace refpot::numerics
