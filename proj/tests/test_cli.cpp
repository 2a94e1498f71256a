#include <doctest.h>

#include <cmath>

#include "refpot/csvio.hpp"
#include "refpot/fingerprint.hpp"
#include "refpot/potential.hpp"

using namespace refpot;

TEST_CASE("scientific formatting is fixed-width deterministic") {
    CHECK(io::fmt(1.0) == "1.00000000000e+00");
    CHECK(io::fmt(-0.0318400000055789) == "-3.18400000056e-02");
}

TEST_CASE("log-scale formatting survives absurd exponents") {
    // ln C ~ -23700 => ~1e-10293
    double ln_c = -23700.0;
    auto s = io::fmt_log(ln_c);
    CHECK(s.find("e-10293") != std::string::npos);
    CHECK(io::fmt_log(0.0) == "1.00000000000e+0");
    CHECK(io::fmt_log(-1e301, 1) == "0");
    CHECK(io::fmt_log(std::log(2.5), -1).substr(0, 2) == "-2");
}

TEST_CASE("manifest fingerprints react to option changes") {
    io::RunManifest a;
    a.subcommand = "report";
    a.config_fingerprint = "0123456789abcdef";
    a.options = "k_min=1e-5";
    io::RunManifest b = a;
    b.options = "k_min=2e-5";
    CHECK(a.fingerprint() != b.fingerprint());
    CHECK(a.fingerprint() == a.fingerprint());
}

TEST_CASE("fnv1a is the reference implementation") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("config parser reports the failing constraint") {
    std::string cfg = R"({
      "units": {"energy": "meV", "length": "angstrom"},
      "boundaries": [4.0, 3.0],
      "components": [
        {"k": 0, "pseudo_morse": true, "alpha": 1.0, "d": 0.00796, "v": -1.0, "r0": 2.0},
        {"k": 1, "v": -2.0, "d": 2.0, "alpha": 1.0, "r0": 3.0},
        {"k": 2, "tail_zero": true, "alpha": 1.0, "v": 0.1, "r0": 9.0}
      ]
    })";
    CHECK_THROWS_WITH_AS(parse_config(cfg), doctest::Contains("boundaries"), PotentialError);
}
