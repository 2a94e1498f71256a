#include "refpot/boundstates.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "refpot/numerics.hpp"

namespace refpot::boundstates {

using numerics::NumerovResult;

double BoundState::norming() const { return std::exp(log_norming); }

namespace {

struct Geometry {
    double r_in = 0, r_out = 0, h = 0;
    bool wall_at_origin = false;
};

double bisect_crossing(const std::function<double(double)>& f, double lo, double hi) {
    // f(lo), f(hi) have opposite signs; plain bisection (f is only piecewise smooth)
    for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++i) {
        double mid = 0.5 * (lo + hi);
        if ((f(lo) > 0) == (f(mid) > 0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Geometry geometry_for(const RadialProblem& prob, double E, const SolverOptions& opts) {
    Geometry g{};
    const double C = prob.c_const;
    auto q = [&](double r) { return (prob.V(r) - E) / C; };

    // first classically allowed sample
    double allowed = -1.0;
    for (double r = 0.05; r < 64.0; r *= 1.05) {
        if (q(r) < 0) {
            allowed = r;
            break;
        }
    }
    if (allowed < 0) throw BoundStatesError("no classically allowed region at E");

    // outermost turning point
    double r_hi = allowed;
    while (q(r_hi) < 0 && r_hi < 2e3) r_hi *= 1.5;
    double r_turn = bisect_crossing(q, allowed, r_hi);
    const double gamma = std::sqrt(std::max(-E, 1e-300) / C);
    g.r_out = std::min(r_turn + opts.tail_action / std::max(gamma, 0.05), 400.0);

    g.wall_at_origin = q(opts.r_floor) > 0;
    if (!g.wall_at_origin) {
        g.r_in = opts.r_floor;
    } else {
        double r_inner_turn = bisect_crossing(q, opts.r_floor, allowed);
        double action = 0.0, r = r_inner_turn;
        const double dr = 1e-3;
        while (r > opts.r_floor && action < opts.barrier_action) {
            double step = std::min(dr, r - opts.r_floor);
            double k1 = std::sqrt(std::max(q(r), 0.0));
            double k2 = std::sqrt(std::max(q(r - step), 0.0));
            action += 0.5 * (k1 + k2) * step;
            r -= step;
        }
        g.r_in = r;
    }
    double qmax = std::max({q(g.r_in), std::abs(q(0.5 * (g.r_in + r_turn))), 1.0});
    g.h = std::min(opts.grid_h, 0.35 / std::sqrt(qmax));
    if (opts.force_r_in > 0) {
        g.r_in = opts.force_r_in;
        g.wall_at_origin = q(g.r_in) > 0;
    }
    if (opts.force_r_out > 0) g.r_out = opts.force_r_out;
    if (opts.force_h > 0) g.h = opts.force_h;
    return g;
}

struct Shot {
    std::vector<double> r;
    double h = 0;
    NumerovResult left, right;  // right is stored from index match-1 upward
    std::size_t match = 0;
    double w_mismatch = 0;
    int nodes_total = 0;
};

Shot shoot(const RadialProblem& prob, double E, const Geometry& g) {
    Shot s;
    s.h = g.h;
    const double C = prob.c_const;
    std::size_t n = static_cast<std::size_t>(std::ceil((g.r_out - g.r_in) / g.h)) + 1;
    if (n < 16) throw BoundStatesError("grid too coarse");
    s.r.resize(n);
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.r[i] = g.r_in + g.h * double(i);
        q[i] = (prob.V(s.r[i]) - E) / C;
    }
    std::size_t m = n - 2;
    while (m > 1 && q[m] > 0) --m;
    if (m <= 1) throw BoundStatesError("matching point degenerate");
    s.match = m;

    double u0, u1;
    if (g.wall_at_origin) {
        u0 = 0.0;
        u1 = 1e-160;
    } else {
        auto series = [&](double r) { return r * (1.0 + (prob.V(r) - E) / C * r * r / 6.0); };
        u0 = series(s.r[0]);
        u1 = series(s.r[1]);
    }
    std::vector<double> qL(q.begin(), q.begin() + long(m) + 2);
    s.left = numerics::numerov_propagate(qL, g.h, u0, u1);

    std::vector<double> qR(q.rbegin(), q.rend() - long(m) + 1);  // r_out down to r_{m-1}
    const double gamma = std::sqrt(std::max(-E, 1e-300) / C);
    NumerovResult rrev =
        numerics::numerov_propagate(qR, g.h, 1e-180, 1e-180 * std::exp(gamma * g.h));
    s.right.u.assign(rrev.u.rbegin(), rrev.u.rend());
    s.right.log_scale = rrev.log_scale;
    s.right.nodes = rrev.nodes;

    double uL0 = s.left.u[m], uL1 = s.left.u[m + 1];
    double uR0 = s.right.u[1], uR1 = s.right.u[2];
    double scale = std::sqrt((uL0 * uL0 + uL1 * uL1) * (uR0 * uR0 + uR1 * uR1));
    s.w_mismatch = (uL0 * uR1 - uL1 * uR0) / (scale > 0 ? scale : 1.0);
    int nodes_left = numerics::count_nodes(
        std::vector<double>(s.left.u.begin(), s.left.u.begin() + long(m) + 1));
    int nodes_right = numerics::count_nodes(
        std::vector<double>(s.right.u.begin() + 1, s.right.u.end()));
    s.nodes_total = nodes_left + nodes_right + ((uL0 * uR0 < 0) ? 1 : 0);
    return s;
}

int forward_node_count(const RadialProblem& prob, double E, const SolverOptions& opts) {
    Geometry g;
    try {
        g = geometry_for(prob, E, opts);
    } catch (const BoundStatesError&) {
        return 0;  // below the potential minimum
    }
    std::size_t n = static_cast<std::size_t>(std::ceil((g.r_out - g.r_in) / g.h)) + 1;
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i)
        q[i] = (prob.V(g.r_in + g.h * double(i)) - E) / prob.c_const;
    double u0 = 0.0, u1 = 1e-160;
    if (!g.wall_at_origin) {
        u0 = g.r_in;
        u1 = g.r_in + g.h;
    }
    return numerics::numerov_propagate(q, g.h, u0, u1).nodes;
}

double refine_in_bracket(const RadialProblem& prob, double elo, double ehi, Geometry g,
                         const SolverOptions& opts) {
    auto wfun = [&](double E) { return shoot(prob, E, g).w_mismatch; };
    double flo = wfun(elo), fhi = wfun(ehi);
    int guard = 0;
    while (flo * fhi > 0 && guard++ < 80) {
        // a node sits at the matching point; shrink via node counts
        double mid = 0.5 * (elo + ehi);
        int nlo = forward_node_count(prob, elo, opts);
        int nm = forward_node_count(prob, mid, opts);
        if (nm > nlo) {
            ehi = mid;
            fhi = wfun(ehi);
        } else {
            elo = mid;
            flo = wfun(elo);
        }
        if (ehi - elo < 1e-13 * std::max(1.0, std::abs(elo))) break;
    }
    if (flo == 0) return elo;
    if (fhi == 0) return ehi;
    if (flo * fhi > 0) throw BoundStatesError("eigenvalue bracket lost during refinement");
    numerics::Tolerance rt;
    rt.abs_tol = opts.energy_tol;
    rt.rel_tol = 1e-14;
    return numerics::find_root(wfun, elo, ehi, rt);
}

}  // namespace

BoundSpectrum find_eigenvalues(const RadialProblem& prob, double v_min,
                               std::optional<double> e_lo, const SolverOptions& opts) {
    BoundSpectrum sp;
    if (v_min >= 0) return sp;
    double elo = e_lo.value_or(v_min + std::max(1e-10, 1e-10 * std::abs(v_min)));
    elo = std::max(elo, v_min + std::max(1e-10, 1e-10 * std::abs(v_min)));
    double ehi = -std::max(1e-12, std::abs(v_min) * 1e-12);

    int nlo = forward_node_count(prob, elo, opts);
    int nhi = forward_node_count(prob, ehi, opts);
    if (nlo != 0)
        throw BoundStatesError("node count at the window bottom is " + std::to_string(nlo));
    const int total = nhi;
    if (total == 0) return sp;

    struct Seg {
        double a, b;
        int na, nb;
    };
    std::vector<std::pair<double, double>> brackets(static_cast<std::size_t>(total), {0, 0});
    std::deque<Seg> work{{elo, ehi, nlo, nhi}};
    while (!work.empty()) {
        Seg s = work.front();
        work.pop_front();
        if (s.nb == s.na) continue;
        if (s.nb - s.na == 1 && (s.b - s.a) < std::max(1e-4, 1e-3 * std::abs(s.a))) {
            brackets[static_cast<std::size_t>(s.na)] = {s.a, s.b};
            continue;
        }
        if ((s.b - s.a) < 1e-12 * std::max(1.0, std::abs(s.a)))
            throw BoundStatesError("node staircase jump of " + std::to_string(s.nb - s.na) +
                                   " at E ~ " + std::to_string(s.a) +
                                   " meV cannot be split (missed levels?)");
        double mid = 0.5 * (s.a + s.b);
        int nm = forward_node_count(prob, mid, opts);
        work.push_back({s.a, mid, s.na, nm});
        work.push_back({mid, s.b, nm, s.nb});
    }

    for (int n = 0; n < total; ++n) {
        auto [a, b] = brackets[static_cast<std::size_t>(n)];
        if (a == 0 && b == 0) throw BoundStatesError("lost bracket for level " + std::to_string(n));
        Geometry g = geometry_for(prob, 0.5 * (a + b), opts);
        double E;
        if (opts.richardson) {
            double Eh = refine_in_bracket(prob, a, b, g, opts);
            Geometry gh = g;
            gh.h = g.h / 2;
            double Eh2 = refine_in_bracket(prob, a, b, gh, opts);
            E = (16.0 * Eh2 - Eh) / 15.0;
        } else {
            E = refine_in_bracket(prob, a, b, g, opts);
        }
        BoundState st;
        st.n = n;
        st.energy = E;
        st.gamma = std::sqrt(-E / prob.c_const);
        sp.states.push_back(st);
    }
    for (std::size_t i = 1; i < sp.states.size(); ++i)
        if (!(sp.states[i].energy > sp.states[i - 1].energy))
            throw BoundStatesError("eigenvalues not strictly increasing");
    return sp;
}

BoundSpectrum find_eigenvalues(const ReferencePotential& pot, std::optional<double> e_lo,
                               const SolverOptions& opts) {
    RadialProblem prob{[&pot](double r) { return pot.eval(r, 0); }, pot.c_const()};
    auto sp = find_eigenvalues(prob, pot.min_energy(), e_lo, opts);
    sp.potential_fingerprint = pot.fingerprint();
    return sp;
}

namespace {

// ln of int u^2 dr for a flattened solution (Simpson + trapezoid remainder).
double log_integral_sq(const std::vector<double>& u, double h, double log_scale,
                       std::size_t i0, std::size_t i1) {
    long double acc = 0.0L;
    std::size_t i = i0;
    for (; i + 2 <= i1; i += 2) {
        long double a = u[i], b = u[i + 1], c = u[i + 2];
        acc += (a * a + 4.0L * b * b + c * c) * (h / 3.0L);
    }
    if (i + 1 <= i1) {
        long double a = u[i], b = u[i + 1];
        acc += (a * a + b * b) * (h / 2.0L);
    }
    if (acc <= 0) return -1e300;
    return 2.0 * log_scale + std::log(static_cast<double>(acc));
}

}  // namespace

void fill_norming_constants(const RadialProblem& prob, BoundSpectrum& spectrum,
                            const SolverOptions& opts) {
    const double C = prob.c_const;
    for (auto& st : spectrum.states) {
        Geometry g = geometry_for(prob, st.energy, opts);
        Shot s = shoot(prob, st.energy, g);
        auto q = [&](double r) { return (prob.V(r) - st.energy) / C; };

        // tie the left solution to the regular phi ~ r normalization: re-seed
        // the propagation from the log launcher so the stored values are the
        // true regular solution scaled by exp(log_left_norm + log_scale),
        // free of the arbitrary-seed transient
        double log_left_norm = 0.0;
        if (g.wall_at_origin) {
            double r0 = std::min(1e-5, g.r_in / 8);
            auto launchA = numerics::regular_launch(q, r0, g.r_in, {1e-14, 1e-13});
            auto launchB = numerics::regular_launch(q, r0, g.r_in + g.h, {1e-14, 1e-13});
            std::vector<double> qL(s.match + 2);
            for (std::size_t i = 0; i < qL.size(); ++i) qL[i] = q(s.r[i]);
            s.left = numerics::numerov_propagate(qL, g.h, 1.0,
                                                 std::exp(launchB.log_u - launchA.log_u));
            log_left_norm = launchA.log_u;
        }

        std::size_t m = s.match;
        double uLm = s.left.u[m], uRm = s.right.u[1];
        if (uLm == 0 || uRm == 0) throw BoundStatesError("zero at matching point");
        double log_match = (std::log(std::abs(uLm)) + s.left.log_scale) -
                           (std::log(std::abs(uRm)) + s.right.log_scale);
        double logIL = log_integral_sq(s.left.u, s.h, s.left.log_scale, 0, m);
        double logIR =
            log_integral_sq(s.right.u, s.h, s.right.log_scale + log_match, 1, s.right.u.size() - 1);
        double u_end = std::abs(s.right.u.back());
        double log_tail = (u_end > 0) ? 2.0 * (std::log(u_end) + s.right.log_scale + log_match) -
                                            std::log(2.0 * st.gamma)
                                      : -1e300;
        numerics::LogSum total;
        total.add(logIL, 1);
        total.add(logIR, 1);
        total.add(log_tail, 1);
        st.log_norming = -(total.log_abs + 2.0 * log_left_norm);
        st.has_norming = true;
    }
}

void fill_norming_constants(const ReferencePotential& pot, BoundSpectrum& spectrum,
                            const SolverOptions& opts) {
    RadialProblem prob{[&pot](double r) { return pot.eval(r, 0); }, pot.c_const()};
    fill_norming_constants(prob, spectrum, opts);
}

Eigenfunction eigenfunction(const RadialProblem& prob, double energy, const SolverOptions& opts) {
    Geometry g = geometry_for(prob, energy, opts);
    Shot s = shoot(prob, energy, g);
    std::size_t m = s.match;
    double uLm = s.left.u[m], uRm = s.right.u[1];
    if (uLm == 0 || uRm == 0) throw BoundStatesError("zero at matching point");
    double ratio = uLm / uRm;
    Eigenfunction ef;
    ef.r_first = s.r[0];
    ef.h = s.h;
    ef.u.assign(s.r.size(), 0.0);
    for (std::size_t i = 0; i <= m; ++i) ef.u[i] = s.left.u[i];
    for (std::size_t i = m + 1; i < s.r.size(); ++i) {
        std::size_t ri = i - (m - 1);
        if (ri < s.right.u.size()) ef.u[i] = s.right.u[ri] * ratio;
    }
    long double norm2 = 0.0L;
    for (std::size_t i = 0; i + 1 < ef.u.size(); ++i)
        norm2 += 0.5L * (ef.u[i] * ef.u[i] + ef.u[i + 1] * ef.u[i + 1]) * ef.h;
    double inv = 1.0 / std::sqrt(static_cast<double>(norm2));
    for (auto& x : ef.u) x *= inv;
    ef.nodes = numerics::count_nodes(ef.u);
    return ef;
}

Eigenfunction eigenfunction(const ReferencePotential& pot, double energy,
                            const SolverOptions& opts) {
    RadialProblem prob{[&pot](double r) { return pot.eval(r, 0); }, pot.c_const()};
    return eigenfunction(prob, energy, opts);
}

}  // namespace refpot::boundstates
