#include <doctest.h>

#include <cmath>
#include <random>

#include "refpot/numerics.hpp"
#include "refpot/potential.hpp"

using namespace refpot;

namespace {
const std::string cfg_dir = REFPOT_CONFIG_DIR;
ReferencePotential xe2() { return load_config(cfg_dir + "/xe2.cfg"); }
}  // namespace

TEST_CASE("xe2 config loads with tight joins and derived parameters") {
    auto pot = xe2();
    REQUIRE(pot.components().size() == 3);
    auto res = pot.join_residuals();
    CHECK(res[0] < 1e-6);   // meV
    CHECK(res[1] < 1e-6);   // meV/A

    // derived inner-wall parameters reproduce the quoted values
    const auto& c0 = pot.components()[0];
    CHECK(std::abs(c0.v - (-38.865765625809)) < 1e-6);
    CHECK(std::abs(c0.r0 - 6.23549082364147) < 1e-6);
    // tail piece: the quoted v is matched to ~5e-7, the quoted r0 only to
    // ~4e-5 (limited by the rounding of the printed inputs)
    const auto& c2 = pot.components()[2];
    CHECK(std::abs(c2.v - 0.0155845) < 1e-5);
    CHECK(std::abs(c2.r0 - 14.05149) < 1e-4);
    CHECK(std::abs(c2.v + c2.d) < 1e-15);

    // C recoverable from the pseudo-Morse constraint
    double c_rec = 4.0 * c0.d / (c0.alpha * c0.alpha);
    CHECK(std::abs(c_rec - pot.c_const()) < 1e-15 * pot.c_const());
    CHECK(std::abs(pot.c_const() - 0.0318400000055789) < 1e-12);
}

TEST_CASE("evaluation at landmark points") {
    auto pot = xe2();
    // component minimum: y = 1 at r = r0 of the middle piece
    const auto& c1 = pot.components()[1];
    CHECK(pot.eval(c1.r0, 0) == doctest::Approx(c1.v).epsilon(1e-12));
    // both sides of the first join agree
    double left = pot.components()[0].eval(4.0, 0);
    double right = pot.components()[1].eval(4.0, 0);
    CHECK(std::abs(left - right) < 1e-8);
    CHECK(left == doctest::Approx(-11.8609169).epsilon(1e-6));
    // steep wall at the origin
    CHECK(pot.eval(0.0, 0) == doctest::Approx(1.17261726e7).epsilon(1e-6));
    // vanishing tail
    CHECK(std::abs(pot.eval(100.0, 0)) < 1e-10);
}

TEST_CASE("piecewise continuity across the joins") {
    auto pot = xe2();
    // h small enough that the smooth slope term V' * 2h stays below the
    // 1e-6 meV gate (|V'| ~ 90 meV/A at the first join)
    const double h = 2e-10;
    for (double X : pot.boundaries()) {
        CHECK(std::abs(pot.eval(X - h, 0) - pot.eval(X + h, 0)) < 1e-6);
        CHECK(std::abs(pot.eval(X - h, 1) - pot.eval(X + h, 1)) < 1e-6);
    }
}

TEST_CASE("analytic derivatives match central differences") {
    auto pot = xe2();
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> pick(0.1, 20.0);
    for (int t = 0; t < 100; ++t) {
        double r = pick(rng);
        double h = 1e-5 * std::max(1.0, r);
        double fd1 = (pot.eval(r + h, 0) - pot.eval(r - h, 0)) / (2 * h);
        double an1 = pot.eval(r, 1);
        CHECK(std::abs(fd1 - an1) <= 1e-6 * std::max(1.0, std::abs(an1)));
        double fd2 = (pot.eval(r + h, 1) - pot.eval(r - h, 1)) / (2 * h);
        double an2 = pot.eval(r, 2);
        CHECK(std::abs(fd2 - an2) <= 1e-6 * std::max(1.0, std::abs(an2)));
    }
}

TEST_CASE("moments: closed form against adaptive quadrature") {
    auto pot = xe2();
    auto mo = pot.moments();
    numerics::Tolerance tol{1e-14, 1e-13};
    auto quad = [&](auto f) {
        return numerics::adaptive_quadrature_log(f, 0.0, 300.0, tol);
    };
    double W = quad([&](double r) { return pot.eval(r, 0); });
    double U = quad([&](double r) { double v = pot.eval(r, 0); return v * v; });
    double T3 = quad([&](double r) { double v = pot.eval(r, 0); return v * v * v; });
    double DW = quad([&](double r) { double v = pot.eval(r, 1); return v * v; });
    CHECK(std::abs(W / mo.W - 1.0) < 1e-10);
    CHECK(std::abs(U / mo.U - 1.0) < 1e-10);
    CHECK(std::abs(T3 / mo.T3 - 1.0) < 1e-10);
    CHECK(std::abs(DW / mo.DW - 1.0) < 1e-10);
}

TEST_CASE("moments of a single vanishing-tail piece") {
    // v + d = 0 so every moment is finite in closed form
    MorseComponent m{-7.5, 7.5, 1.1, 5.0, 0};
    ReferencePotential pot({m}, {}, 0.0318400000055789);
    auto mo = pot.moments();
    numerics::Tolerance tol{1e-14, 1e-13};
    double W = numerics::adaptive_quadrature_log([&](double r) { return pot.eval(r, 0); }, 0.0,
                                                 300.0, tol);
    CHECK(std::abs(W / mo.W - 1.0) < 1e-10);
    auto free_pot = ReferencePotential::free_particle(1.0);
    auto fm = free_pot.moments();
    CHECK(fm.W == 0.0);
    CHECK(fm.U == 0.0);
    CHECK(fm.V0 == 0.0);
}

TEST_CASE("chain integrals agree with the moment identities") {
    auto pot = xe2();
    auto I = pot.chain_integrals();
    auto mo = pot.moments();
    const double C = pot.c_const();
    // I1 = W/C, I2 = v(0), I3 = -v'(0) - int v^2, I4 = v''(0) - 2 v(0)^2
    CHECK(std::abs(I[1] - mo.W / C) < 1e-12 * std::abs(I[1]));
    CHECK(std::abs(I[2] - mo.V0 / C) < 1e-12 * std::abs(I[2]));
    double i3 = -mo.Vp0 / C - mo.U / (C * C);
    CHECK(std::abs(I[3] - i3) < 1e-10 * std::abs(i3));
    double i4 = mo.Vpp0 / C - 2.0 * mo.V0 * mo.V0 / (C * C);
    CHECK(std::abs(I[4] - i4) < 1e-10 * std::abs(i4));
    double i5 = -mo.Vppp0 / C + mo.DW / (C * C) + 6.0 * mo.V0 * mo.Vp0 / (C * C) +
                2.0 * mo.T3 / (C * C * C);
    CHECK(std::abs(I[5] - i5) < 1e-9 * std::abs(i5));
}

TEST_CASE("smooth join: identity and the tail-zero mode") {
    MorseComponent m{-20.0, 18.0, 1.4, 4.2, 1};
    double X = 5.0;
    auto same = smooth_join(m, X, m.eval(X, 0), m.eval(X, 1), JoinMode::solve_v_r0);
    CHECK(std::abs(same.v - m.v) < 1e-10);
    CHECK(std::abs(same.r0 - m.r0) < 1e-10);

    // no-real-solution: a slope too steep for the given d, alpha
    CHECK_THROWS_AS(smooth_join(m, X, -5.0, 1e9, JoinMode::solve_v_r0), PotentialError);

    auto pot = xe2();
    const auto& c1 = pot.components()[1];
    const auto& c2 = pot.components()[2];
    double X2 = pot.boundaries()[1];
    MorseComponent anchor{0, 0, c2.alpha, 0, 2};
    auto solved = smooth_join(anchor, X2, c1.eval(X2, 0), c1.eval(X2, 1),
                              JoinMode::solve_v_r0_tail_zero);
    CHECK(std::abs(solved.v - c2.v) < 1e-12);
    CHECK(std::abs(solved.r0 - c2.r0) < 1e-12);
}

TEST_CASE("config validation failures") {
    // pseudo-Morse constraint violated under an explicit c_const
    std::string bad = R"({
      "units": {"energy": "meV", "length": "angstrom"},
      "c_const": 0.03184,
      "boundaries": [],
      "components": [{"k": 0, "pseudo_morse": true, "alpha": 1.0, "d": 0.5, "v": -1.0, "r0": 2.0}]
    })";
    CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("pseudo-Morse"), PotentialError);

    std::string bad_units = R"({"units": {"energy": "eV", "length": "angstrom"}})";
    CHECK_THROWS_AS(parse_config(bad_units), PotentialError);

    std::string not_json = "alpha = 1.0";
    CHECK_THROWS_AS(parse_config(not_json), PotentialError);
}

TEST_CASE("free-particle config") {
    auto pot = load_config(cfg_dir + "/free.cfg");
    CHECK(pot.is_free());
    CHECK(pot.eval(3.7, 0) == 0.0);
    CHECK(pot.eval(3.7, 2) == 0.0);
    CHECK(pot.min_energy() == 0.0);
}

TEST_CASE("fingerprints are stable and parameter-sensitive") {
    auto a = xe2();
    auto b = xe2();
    CHECK(a.fingerprint() == b.fingerprint());
    MorseComponent m{-7.5, 7.5, 1.1, 5.0, 0};
    ReferencePotential p1({m}, {}, 0.03184);
    m.alpha = 1.100001;
    ReferencePotential p2({m}, {}, 0.03184);
    CHECK(p1.fingerprint() != p2.fingerprint());
}
