#include "refpot/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "refpot/fingerprint.hpp"

namespace refpot {

namespace {

bool finite(double x) { return std::isfinite(x); }

// Polynomial in y = exp(-alpha (r - r0)) over one segment. Applying d/dr
// maps y^k -> -alpha k y^k, so every derivative of V stays a polynomial.
struct PolyY {
    std::vector<long double> c;  // c[k] * y^k

    PolyY deriv(double alpha) const {
        PolyY out;
        out.c.resize(c.size());
        for (std::size_t k = 1; k < c.size(); ++k) out.c[k] = -static_cast<long double>(alpha) * k * c[k];
        return out;
    }
    PolyY operator*(const PolyY& o) const {
        PolyY out;
        out.c.assign(c.size() + o.c.size() - 1, 0.0L);
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < o.c.size(); ++j) out.c[i + j] += c[i] * o.c[j];
        return out;
    }
    long double eval(long double y) const {
        long double s = 0.0L;
        for (std::size_t k = c.size(); k-- > 0;) s = s * y + c[k];
        return s;
    }
};

PolyY component_poly(const MorseComponent& m, int deriv_order, double scale = 1.0) {
    PolyY p;
    p.c = {static_cast<long double>((m.v + m.d) * scale),
           static_cast<long double>(-2.0 * m.d * scale),
           static_cast<long double>(m.d * scale)};
    for (int j = 0; j < deriv_order; ++j) p = p.deriv(m.alpha);
    return p;
}

// int_A^B y^k dr = (y(A)^k - y(B)^k)/(k alpha); k = 0 gives B - A.
long double integrate_poly(const PolyY& p, const MorseComponent& m, double A, double B) {
    const long double yA = std::exp((long double)(-m.alpha * (A - m.r0)));
    const bool to_inf = !std::isfinite(B);
    const long double yB = to_inf ? 0.0L : std::exp((long double)(-m.alpha * (B - m.r0)));
    long double s = 0.0L;
    for (std::size_t k = p.c.size(); k-- > 1;) {
        s += p.c[k] * (std::pow(yA, (long double)k) - std::pow(yB, (long double)k)) /
             ((long double)k * m.alpha);
    }
    if (!p.c.empty() && p.c[0] != 0.0L) {
        if (to_inf) {
            // only legal when the constant term vanishes; tolerate rounding dust
            long double scale = 0.0L;
            for (auto v : p.c) scale = std::max(scale, std::fabs(v));
            if (std::fabs(p.c[0]) > 1e-20L * std::max(1.0L, scale))
                throw PotentialError("non-integrable constant term on the last segment");
        } else {
            s += p.c[0] * (long double)(B - A);
        }
    }
    return s;
}

// Monomial table of the high-energy chain e_1..e_9 (orders of v-derivatives).
struct ChainMonomial {
    double coeff;
    std::vector<int> orders;
};
const std::vector<std::vector<ChainMonomial>>& chain_table() {
    static const std::vector<std::vector<ChainMonomial>> table = {
        {},                                             // e_0 unused
        {{1, {0}}},                                     // e_1 = v
        {{-1, {1}}},                                    // e_2 = -v'
        {{1, {2}}, {-1, {0, 0}}},                       // e_3 = v'' - v^2
        {{-1, {3}}, {4, {0, 1}}},                       // e_4
        {{1, {4}}, {-6, {0, 2}}, {-5, {1, 1}}, {2, {0, 0, 0}}},
        {{-1, {5}}, {8, {0, 3}}, {18, {1, 2}}, {-16, {0, 0, 1}}},
        {{1, {6}}, {-10, {0, 4}}, {-28, {1, 3}}, {-19, {2, 2}},
         {30, {0, 0, 2}}, {50, {0, 1, 1}}, {-5, {0, 0, 0, 0}}},
        {{-1, {7}}, {12, {0, 5}}, {40, {1, 4}}, {68, {2, 3}},
         {-48, {0, 0, 3}}, {-216, {0, 1, 2}}, {-60, {1, 1, 1}}, {64, {0, 0, 0, 1}}},
        {{1, {8}}, {-14, {0, 6}}, {-54, {1, 5}}, {-110, {2, 4}}, {-69, {3, 3}},
         {70, {0, 0, 4}}, {392, {0, 1, 3}}, {266, {0, 2, 2}}, {442, {1, 1, 2}},
         {-140, {0, 0, 0, 2}}, {-350, {0, 0, 1, 1}}, {14, {0, 0, 0, 0, 0}}},
    };
    return table;
}

std::string canonical_params(const std::vector<MorseComponent>& comps,
                             const std::vector<double>& bounds, double c) {
    std::ostringstream os;
    char buf[64];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17e;", x);
        os << buf;
    };
    put(c);
    for (const auto& m : comps) {
        put(m.v);
        put(m.d);
        put(m.alpha);
        put(m.r0);
    }
    for (double x : bounds) put(x);
    return os.str();
}

}  // namespace

double MorseComponent::y(double r) const { return std::exp(-alpha * (r - r0)); }

double MorseComponent::eval(double r, int order) const {
    const double yy = y(r);
    switch (order) {
        case 0: return v + d * (yy - 1) * (yy - 1);
        case 1: return -2 * d * alpha * yy * (yy - 1);
        case 2: return 2 * d * alpha * alpha * yy * (2 * yy - 1);
        case 3: return -2 * d * alpha * alpha * alpha * yy * (4 * yy - 1);
        default: throw PotentialError("eval: order must be 0..3");
    }
}

ReferencePotential::ReferencePotential(std::vector<MorseComponent> components,
                                       std::vector<double> boundaries, double c_const,
                                       bool pseudo_first, std::string fingerprint)
    : comps_(std::move(components)), bounds_(std::move(boundaries)), c_(c_const),
      fingerprint_(std::move(fingerprint)) {
    if (!(c_ > 0) || !finite(c_)) throw PotentialError("c_const must be positive and finite");
    if (!comps_.empty() && bounds_.size() + 1 != comps_.size())
        throw PotentialError("need exactly one boundary between consecutive components");
    for (std::size_t i = 1; i < bounds_.size(); ++i)
        if (!(bounds_[i - 1] < bounds_[i])) throw PotentialError("boundaries must increase");
    for (const auto& m : comps_) {
        if (!(m.alpha > 0) || !finite(m.v) || !finite(m.d) || !finite(m.alpha) || !finite(m.r0))
            throw PotentialError("component fields must be finite with alpha > 0");
    }
    if (pseudo_first && !comps_.empty()) {
        const auto& m = comps_.front();
        double want = c_ * m.alpha * m.alpha / 4.0;
        if (std::abs(m.d - want) > 1e-12 * std::abs(want))
            throw PotentialError("pseudo-Morse constraint violated: d0 != C*alpha0^2/4 (residual " +
                                 std::to_string(m.d - want) + " meV)");
    }
    if (!comps_.empty()) {
        const auto& last = comps_.back();
        if (std::abs(last.v + last.d) > 1e-12)
            throw PotentialError("last component must vanish at infinity: |v+d| = " +
                                 std::to_string(std::abs(last.v + last.d)) + " meV");
        auto res = join_residuals();
        for (std::size_t j = 0; j < bounds_.size(); ++j) {
            double X = bounds_[j];
            double vj = comps_[j + 1].eval(X, 0);
            double tolv = 1e-9 * std::max(1.0, std::abs(vj));
            double dv = std::abs(comps_[j].eval(X, 0) - vj);
            double dp = std::abs(comps_[j].eval(X, 1) - comps_[j + 1].eval(X, 1));
            double tolp = 1e-9 * std::max(1.0, std::abs(comps_[j + 1].eval(X, 1)));
            if (dv > tolv || dp > tolp)
                throw PotentialError("smooth-join residual too large at X_" + std::to_string(j + 1) +
                                     ": dV = " + std::to_string(dv) + " meV, dV' = " +
                                     std::to_string(dp) + " meV/A");
        }
        (void)res;
    }
    if (fingerprint_.empty())
        fingerprint_ = to_hex(fnv1a64(canonical_params(comps_, bounds_, c_)));
}

ReferencePotential ReferencePotential::free_particle(double c_const) {
    return ReferencePotential({}, {}, c_const);
}

std::size_t ReferencePotential::segment_of(double r) const {
    auto it = std::upper_bound(bounds_.begin(), bounds_.end(), r);
    return static_cast<std::size_t>(it - bounds_.begin());
}

double ReferencePotential::eval(double r, int order) const {
    if (r < 0) throw PotentialError("eval: r must be >= 0");
    if (comps_.empty()) return 0.0;
    return comps_[segment_of(r)].eval(r, order);
}

double ReferencePotential::min_energy() const {
    if (comps_.empty()) return 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        double A = (i == 0) ? 0.0 : bounds_[i - 1];
        double B = (i + 1 == comps_.size()) ? std::numeric_limits<double>::infinity() : bounds_[i];
        const auto& m = comps_[i];
        lo = std::min(lo, m.eval(A, 0));
        lo = std::min(lo, std::isfinite(B) ? m.eval(B, 0) : m.v + m.d);
        if (m.d > 0 && m.r0 > A && m.r0 < B) lo = std::min(lo, m.v);  // interior minimum at y=1
        if (m.d < 0) {
            // reversed piece: interior minimum only at y=0 limit, covered above
        }
    }
    return lo;
}

std::array<double, 2> ReferencePotential::join_residuals() const {
    double dv = 0.0, dp = 0.0;
    for (std::size_t j = 0; j < bounds_.size(); ++j) {
        double X = bounds_[j];
        dv = std::max(dv, std::abs(comps_[j].eval(X, 0) - comps_[j + 1].eval(X, 0)));
        dp = std::max(dp, std::abs(comps_[j].eval(X, 1) - comps_[j + 1].eval(X, 1)));
    }
    return {dv, dp};
}

Moments ReferencePotential::moments() const {
    Moments mo;
    if (comps_.empty()) return mo;
    long double W = 0, U = 0, T3 = 0, DW = 0;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        const auto& m = comps_[i];
        double A = (i == 0) ? 0.0 : bounds_[i - 1];
        double B = (i + 1 == comps_.size()) ? std::numeric_limits<double>::infinity() : bounds_[i];
        PolyY p0 = component_poly(m, 0);
        PolyY p1 = component_poly(m, 1);
        W += integrate_poly(p0, m, A, B);
        U += integrate_poly(p0 * p0, m, A, B);
        T3 += integrate_poly(p0 * p0 * p0, m, A, B);
        DW += integrate_poly(p1 * p1, m, A, B);
    }
    mo.W = static_cast<double>(W);
    mo.U = static_cast<double>(U);
    mo.T3 = static_cast<double>(T3);
    mo.DW = static_cast<double>(DW);
    mo.V0 = eval(0.0, 0);
    mo.Vp0 = eval(0.0, 1);
    mo.Vpp0 = eval(0.0, 2);
    mo.Vppp0 = eval(0.0, 3);
    return mo;
}

std::array<double, 10> ReferencePotential::chain_integrals() const {
    std::array<double, 10> out{};
    if (comps_.empty()) return out;
    const auto& table = chain_table();
    for (int n = 1; n <= 9; ++n) {
        long double total = 0.0L;
        for (std::size_t i = 0; i < comps_.size(); ++i) {
            const auto& m = comps_[i];
            double A = (i == 0) ? 0.0 : bounds_[i - 1];
            double B = (i + 1 == comps_.size()) ? std::numeric_limits<double>::infinity() : bounds_[i];
            // cache v^(j)/C polynomials for this segment
            std::array<PolyY, 9> dp;
            for (int j = 0; j <= 8; ++j) dp[j] = component_poly(m, j, 1.0 / c_);
            for (const auto& mono : table[n]) {
                PolyY prod = dp[mono.orders[0]];
                for (std::size_t f = 1; f < mono.orders.size(); ++f) prod = prod * dp[mono.orders[f]];
                total += (long double)mono.coeff * integrate_poly(prod, m, A, B);
            }
        }
        out[n] = static_cast<double>(total);
    }
    return out;
}

MorseComponent smooth_join(const MorseComponent& anchor, double boundary,
                           double value, double slope, JoinMode mode) {
    MorseComponent out = anchor;
    switch (mode) {
        case JoinMode::solve_v_r0: {
            // slope = -2 d a y (y-1): quadratic in y. When both roots are
            // admissible the one whose center is closest to the anchor's wins.
            double cterm = slope / (2.0 * anchor.d * anchor.alpha);
            double disc = 1.0 - 4.0 * cterm;
            if (disc < 0) throw PotentialError("smooth_join: no real solution for y");
            double best_y = 0, best_dist = 1e300;
            for (double y : {(1.0 + std::sqrt(disc)) / 2.0, (1.0 - std::sqrt(disc)) / 2.0}) {
                if (y <= 0) continue;
                double r0 = boundary + std::log(y) / anchor.alpha;
                double dist = std::abs(r0 - anchor.r0);
                if (dist < best_dist) {
                    best_dist = dist;
                    best_y = y;
                }
            }
            if (best_y <= 0) throw PotentialError("smooth_join: no positive-y solution");
            out.v = value - anchor.d * (best_y - 1) * (best_y - 1);
            out.r0 = boundary + std::log(best_y) / anchor.alpha;
            return out;
        }
        case JoinMode::solve_v_r0_tail_zero: {
            // V = v (1 - (y-1)^2), V' = 2 v a y (y-1) with d = -v
            if (value == 0.0) throw PotentialError("smooth_join: tail-zero join needs V(X) != 0");
            double q = slope / (2.0 * anchor.alpha * value);
            double den = 1.0 + q;
            if (den == 0.0) throw PotentialError("smooth_join: degenerate tail-zero join");
            double y = (1.0 + 2.0 * q) / den;
            if (y <= 0) throw PotentialError("smooth_join: no positive-y solution");
            double omy = 1.0 - (y - 1) * (y - 1);
            if (omy == 0.0) throw PotentialError("smooth_join: singular tail-zero join");
            out.v = value / omy;
            out.d = -out.v;
            out.r0 = boundary + std::log(y) / anchor.alpha;
            return out;
        }
    }
    throw PotentialError("smooth_join: bad mode");
}

namespace {

using nlohmann::json;

double num_or_throw(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number())
        throw PotentialError("config: missing numeric field '" + key + "' in " + where);
    return j[key].get<double>();
}

}  // namespace

ReferencePotential parse_config(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const std::exception& e) {
        throw PotentialError("config parse error in " + origin + ": " + e.what());
    }
    if (j.contains("units")) {
        if (j["units"].value("energy", "") != std::string("meV") ||
            j["units"].value("length", "") != std::string("angstrom"))
            throw PotentialError("config: units must be {energy: meV, length: angstrom}");
    }
    std::vector<double> bounds;
    for (const auto& b : j.value("boundaries", json::array())) bounds.push_back(b.get<double>());

    struct Entry {
        MorseComponent m;
        bool pseudo = false, tail_zero = false;
        bool derive_v = false, derive_r0 = false;
        double given_v = 0, given_r0 = 0;
    };
    std::vector<Entry> entries;
    for (const auto& cj : j.value("components", json::array())) {
        Entry e;
        e.m.index = cj.value("k", int(entries.size()));
        e.m.alpha = num_or_throw(cj, "alpha", "component " + std::to_string(e.m.index));
        e.pseudo = cj.value("pseudo_morse", false);
        e.tail_zero = cj.value("tail_zero", false);
        for (const auto& dname : cj.value("derived", json::array())) {
            if (dname == "v") e.derive_v = true;
            else if (dname == "r0") e.derive_r0 = true;
            else throw PotentialError("config: only v and r0 may be derived");
        }
        if (cj.contains("v")) e.m.v = cj["v"].get<double>();
        if (cj.contains("r0")) e.m.r0 = cj["r0"].get<double>();
        if (cj.contains("d")) e.m.d = cj["d"].get<double>();
        else if (e.tail_zero) e.m.d = -e.m.v;
        else throw PotentialError("config: component " + std::to_string(e.m.index) + " needs d");
        e.given_v = e.m.v;
        e.given_r0 = e.m.r0;
        entries.push_back(e);
    }
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].m.index != int(i))
            throw PotentialError("config: components must be listed as k = 0..K-1");

    double c_const = 0.0;
    bool c_auto = !j.contains("c_const") || (j["c_const"].is_string() && j["c_const"] == "auto");
    if (c_auto) {
        if (entries.empty()) throw PotentialError("config: free-particle config needs explicit c_const");
        if (!entries.front().pseudo)
            throw PotentialError("config: c_const 'auto' requires a pseudo-Morse component 0");
        const auto& m0 = entries.front().m;
        c_const = 4.0 * m0.d / (m0.alpha * m0.alpha);
    } else {
        c_const = j["c_const"].get<double>();
    }
    if (!(c_const > 0)) throw PotentialError("config: c_const must be positive");

    // pseudo-Morse constraint check (meaningful when c_const was explicit)
    for (auto& e : entries) {
        if (e.pseudo) {
            double want = c_const * e.m.alpha * e.m.alpha / 4.0;
            if (std::abs(e.m.d - want) > 1e-12 * std::abs(want))
                throw PotentialError("config: pseudo-Morse constraint violated on component " +
                                     std::to_string(e.m.index) + " (d - C*alpha^2/4 = " +
                                     std::to_string(e.m.d - want) + " meV)");
            e.m.d = want;
        }
    }

    // recompute derived (v, r0) from the adjacent fully-specified component
    for (std::size_t i = 0; i < entries.size(); ++i) {
        auto& e = entries[i];
        if (!(e.derive_v || e.derive_r0)) continue;
        if (!(e.derive_v && e.derive_r0))
            throw PotentialError("config: derived must name both v and r0");
        std::size_t anchor;
        double X;
        if (i + 1 < entries.size() && i > 0)
            throw PotentialError("config: only the first and last components may be derived");
        if (i == 0) {
            anchor = 1;
            X = bounds.at(0);
        } else {
            anchor = i - 1;
            X = bounds.at(i - 1);
        }
        if (anchor >= entries.size()) throw PotentialError("config: derived component lacks an anchor");
        const auto& am = entries[anchor].m;
        double value = am.eval(X, 0), slope = am.eval(X, 1);
        MorseComponent solved = smooth_join(e.m, X, value, slope,
                                            e.tail_zero ? JoinMode::solve_v_r0_tail_zero
                                                        : JoinMode::solve_v_r0);
        auto check = [&](const char* name, double given, double got) {
            if (given == 0.0) return;
            if (std::abs(given - got) > 1e-3 * std::max(1.0, std::abs(got)))
                throw PotentialError(std::string("config: derived ") + name + " of component " +
                                     std::to_string(e.m.index) + " disagrees with the given value (" +
                                     std::to_string(got) + " vs " + std::to_string(given) + ")");
        };
        check("v", e.given_v, solved.v);
        check("r0", e.given_r0, solved.r0);
        e.m = solved;
    }

    std::vector<MorseComponent> comps;
    bool pseudo_first = !entries.empty() && entries.front().pseudo;
    for (auto& e : entries) comps.push_back(e.m);
    return ReferencePotential(std::move(comps), std::move(bounds), c_const, pseudo_first,
                              to_hex(fnv1a64(text)));
}

ReferencePotential load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PotentialError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace refpot
