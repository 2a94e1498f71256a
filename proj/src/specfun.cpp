#include "refpot/specfun.hpp"

#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "refpot/numerics.hpp"

namespace refpot::specfun {

namespace mp = boost::multiprecision;
using hp_complex = mp::cpp_complex_100;

cplx kummer_phi(cplx a, cplx c, cplx x, int term_cap) {
    if (c.real() <= 0 && c.imag() == 0 && c.real() == std::floor(c.real()))
        throw SpecfunError("kummer_phi: c must not be a non-positive integer");
    cplx sum = 1.0, term = 1.0;
    int small_streak = 0;
    for (int n = 0; n < term_cap; ++n) {
        term *= (a + double(n)) / (c + double(n)) * x / double(n + 1);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) {
            if (++small_streak >= 3) return sum;
        } else {
            small_streak = 0;
        }
    }
    throw SpecfunError("kummer_phi: series did not converge within the term cap");
}

KummerPair kummer_phi_hp(cplx a, cplx c, cplx x, int term_cap) {
    hp_complex ha(a.real(), a.imag()), hc(c.real(), c.imag()), hx(x.real(), x.imag());
    hp_complex sum = 1, term = 1, dsum = 0;
    int small_streak = 0;
    for (int n = 0; n < term_cap; ++n) {
        hp_complex ratio = (ha + n) / (hc + n);
        // derivative series: d/dx x^{n+1}-term = (n+1) x^n * coeff
        hp_complex dterm = term * ratio;       // coeff * x^n * (n+1)/(n+1)
        dsum += dterm;
        term *= ratio * hx / (n + 1);
        sum += term;
        if (abs(term) < 1e-35 * abs(sum)) {
            if (++small_streak >= 3) break;
        } else {
            small_streak = 0;
        }
        if (n + 1 == term_cap)
            throw SpecfunError("kummer_phi_hp: series did not converge within the term cap");
    }
    KummerPair out;
    out.phi = cplx(double(sum.real()), double(sum.imag()));
    out.dphi = cplx(double(dsum.real()), double(dsum.imag()));
    return out;
}

PseudoMorseParams::PseudoMorseParams(double E, double v, double d, double alpha, double r0_)
    : mu0(0), alpha0(alpha), r0(r0_) {
    double arg = (E - v) / d - 1.0;
    if (!(arg > 0)) throw SpecfunError("PseudoMorseParams: need E > v + d for real mu0");
    mu0 = 0.5 * std::sqrt(arg);
}

double PseudoMorseParams::y0_at(double r) const { return std::exp(-alpha0 * (r - r0)); }

namespace {

AsymptoticSum bracket_series(double mu0, double y0, double sign, int dorder) {
    if (!(mu0 * mu0 / y0 < 0.1))
        throw SpecfunError("asymptotic bracket outside validity window (mu0^2/y0 >= 0.1)");
    double term = 1.0;          // value of prod/(n! y0^n), n = 0
    double sum = dorder ? 0.0 : 1.0;
    double prev_mag = std::abs(term);
    int n = 0;
    for (;;) {
        double next = term * sign * (mu0 * mu0 + double(n) * double(n)) / ((n + 1.0) * y0);
        if (std::abs(next) >= prev_mag && n > 0) {
            return {sum, std::abs(next), n};
        }
        ++n;
        term = next;
        sum += dorder ? term * (-double(n) / y0) : term;
        prev_mag = std::abs(term);
        if (std::abs(term) < 1e-18 * std::abs(sum) || n > 400)
            return {sum, std::abs(term), n};
    }
}

}  // namespace

AsymptoticSum tricomi_psi_asymptotic(double mu0, double y0, Parity parity) {
    return bracket_series(mu0, y0, parity == Parity::minus ? -1.0 : 1.0, 0);
}

AsymptoticSum tricomi_bracket_dy(double mu0, double y0, Parity parity) {
    return bracket_series(mu0, y0, parity == Parity::minus ? -1.0 : 1.0, 1);
}

AsymptoticSum growing_bracket_corrected(double mu0, double y0, int dorder) {
    if (!(mu0 * mu0 / y0 < 0.1))
        throw SpecfunError("asymptotic bracket outside validity window (mu0^2/y0 >= 0.1)");
    // f = sum_n c_n y^{-n-1}, c_{n+1} = ((n+1)^2 + mu0^2) c_n / (n+1)
    double term = 1.0 / y0;  // n = 0
    double sum = dorder ? -1.0 / (y0 * y0) : term;
    double prev_mag = std::abs(term);
    int n = 0;
    for (;;) {
        double next = term * (mu0 * mu0 + double(n + 1) * double(n + 1)) / ((n + 1.0) * y0);
        if (std::abs(next) >= prev_mag && n > 0) return {sum, std::abs(next), n};
        ++n;
        term = next;
        sum += dorder ? term * (-double(n + 1) / y0) : term;
        prev_mag = std::abs(term);
        if (std::abs(term) < 1e-18 * std::abs(sum) || n > 400) return {sum, std::abs(term), n};
    }
}

LogRatio regular_mixture(double mu0, double y0_at_zero) {
    auto minus = tricomi_psi_asymptotic(mu0, y0_at_zero, Parity::minus);
    auto plus = tricomi_psi_asymptotic(mu0, y0_at_zero, Parity::plus);
    double q = minus.value / plus.value;
    LogRatio out;
    out.sign = (q > 0) ? -1 : 1;  // overall minus sign in front
    out.log_abs = -y0_at_zero + std::log(std::abs(q));
    return out;
}

namespace {

// g(x) = (coth x - 1/x)/x, smooth on (0, inf), g(0) = 1/3.
double coth_core(double x) {
    if (x < 0.4) {
        double x2 = x * x;
        return 1.0 / 3 +
               x2 * (-1.0 / 45 +
                     x2 * (2.0 / 945 +
                           x2 * (-1.0 / 4725 +
                                 x2 * (2.0 / 93555 + x2 * (-1382.0 / 638512875 +
                                                           x2 * (4.0 / 18243225))))));
    }
    return (1.0 / std::tanh(x) - 1.0 / x) / x;
}

}  // namespace

double integral_I_quadrature(double mu0) {
    if (!(mu0 > 0)) return 0.0;
    const double T = M_PI / (2.0 * mu0);
    // folded integrand: f(t) = sum_m (-1)^m e^{-mT} g(t + mT)
    auto folded = [T](double t) {
        double sum = 0.0, w = 1.0;
        for (int m = 0; m < 4000; ++m) {
            double add = w * coth_core(t + m * T);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum) && m > 0) break;
            w *= -std::exp(-T);
        }
        return sum;
    };
    double upper = std::min(T, 50.0);
    numerics::Tolerance tol{1e-15, 1e-14};
    return numerics::adaptive_quadrature(
        [&](double t) { return std::exp(-t) * std::sin(M_PI * t / T) * folded(t); }, 0.0, upper,
        tol);
}

AsymptoticSum integral_I_bernoulli(double mu0) {
    const cplx z(1.0, 2.0 * mu0);
    const double z2 = 1.0 + 4.0 * mu0 * mu0;
    double sum = 0.0, prev_mag = 1e300;
    for (int n = 1; n <= 60; ++n) {
        double sgn = (n % 2 == 1) ? 1.0 : -1.0;
        double pre = sgn * std::pow(2.0, 2 * n) * bernoulli_number(n) /
                     ((2.0 * n) * (2.0 * n - 1.0) * std::pow(z2, 2 * n - 1));
        double term = pre * std::pow(z, 2 * n - 1).imag();
        if (std::abs(term) >= prev_mag) {
            return {sum, std::abs(term), n - 1};
        }
        sum += term;
        prev_mag = std::abs(term);
    }
    return {sum, prev_mag, 60};
}

double arg_gamma_ratio(double mu0) {
    if (!(mu0 > 0)) throw SpecfunError("arg_gamma_ratio: mu0 must be positive");
    double I = integral_I_quadrature(mu0);
    auto alt = integral_I_bernoulli(mu0);
    if (alt.error_estimate < 1e-12 * std::max(1.0, std::abs(I))) {
        if (std::abs(alt.value - I) > 1e-10)
            throw SpecfunError("arg_gamma_ratio: quadrature and Bernoulli series disagree");
    }
    return mu0 * (std::log(2.0) - 1.0 + 0.5 * std::log(1.0 + 4.0 * mu0 * mu0)) - 0.5 * I;
}

double phi0(double mu0, double alpha0, double r0) {
    if (!(mu0 > 0)) throw SpecfunError("phi0: mu0 must be positive");
    double I = integral_I_quadrature(mu0);
    return mu0 * (alpha0 * r0 + 1.0 - std::log(2.0) - 0.5 * std::log(1.0 + 4.0 * mu0 * mu0)) +
           0.5 * I;
}

AmpPhase amplitude_phase_A0B0(double mu0, double y0) {
    if (std::abs(y0) > 80.0)
        throw SpecfunError("amplitude_phase_A0B0: |y0| beyond the series guard (80)");
    // grouped series: sum_n (y0/4)^{2n} / (n! (i mu0 + 1/2)_n) [1 - (y0/4)/(i mu0 + n + 1/2)]
    const hp_complex imu(0.5, mu0);  // i mu0 + 1/2
    const hp_complex q(y0 / 4.0, 0.0);
    hp_complex sum = 0, front = 1;  // front = (y0/4)^{2n} / (n! (imu)_n)
    for (int n = 0; n < 2000; ++n) {
        hp_complex term = front * (1 - q / (imu + n));
        sum += term;
        if (abs(term) < 1e-25 * abs(sum) && n > 2) {
            AmpPhase out;
            cplx s(double(sum.real()), double(sum.imag()));
            out.amplitude = std::abs(s);
            out.phase = std::arg(s);
            return out;
        }
        front *= q * q / ((n + 1) * (imu + n));
    }
    throw SpecfunError("amplitude_phase_A0B0: series did not converge");
}

double bernoulli_number(int n) {
    if (n < 1 || n > 60) throw SpecfunError("bernoulli_number: n must be 1..60");
    using rational = mp::cpp_rational;
    static std::vector<double> cache;  // positive-convention values, index n
    static std::vector<rational> braw; // standard B_m, m = 0..
    if (cache.empty()) {
        const int M = 121;
        braw.assign(M + 1, rational(0));
        braw[0] = 1;
        for (int m = 1; m <= M; ++m) {
            // sum_{j=0}^{m} C(m+1, j) B_j = 0
            rational acc = 0;
            mp::cpp_int binom = 1;  // C(m+1, 0)
            for (int j = 0; j < m; ++j) {
                acc += rational(binom) * braw[j];
                binom = binom * (m + 1 - j) / (j + 1);
            }
            braw[m] = -acc / rational(binom);
        }
        cache.resize(61, 0.0);
        for (int k = 1; k <= 60; ++k) {
            rational b2k = braw[2 * k];
            cache[k] = std::abs(static_cast<double>(b2k));
        }
    }
    return cache[n];
}

}  // namespace refpot::specfun
