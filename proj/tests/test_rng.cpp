#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "fbell/errors.hpp"
#include "fbell/rng.hpp"

using fbell::Rng;

TEST_CASE("same seed, same stream") {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next();
        REQUIRE(x == b.next());
        differs |= x != c.next();
    }
    CHECK(differs);
}

TEST_CASE("derived seeds are distinct across streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 4; ++s)
        for (std::uint64_t k = 0; k < 256; ++k) seen.insert(fbell::derive_seed(s, k));
    CHECK(seen.size() == 4 * 256);
}

TEST_CASE("uniform and normal moments") {
    Rng rng(1);
    const int n = 200000;
    double su = 0, su2 = 0, sn = 0, sn2 = 0, sn4 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
        su2 += u * u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
        sn4 += z * z * z * z;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(su2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
    CHECK(std::fabs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.015));
    CHECK(sn4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("poisson mean and variance in both sampling regimes") {
    for (double mean : {0.0, 0.3, 4.0, 9.9, 10.0, 57.0, 1e4, 3e6}) {
        Rng rng(static_cast<std::uint64_t>(mean * 10) + 5);
        const int n = 100000;
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng.poisson(mean));
            s += k;
            s2 += k * k;
        }
        const double m = s / n;
        const double v = s2 / n - m * m;
        INFO("mean = " << mean);
        if (mean == 0.0) {
            CHECK(s == 0.0);
            continue;
        }
        CHECK(std::fabs(m - mean) < 5.0 * std::sqrt(mean / n));
        CHECK(v == doctest::Approx(mean).epsilon(0.03));
    }
}

TEST_CASE("poisson pmf goodness of fit around the regime switch") {
    for (double mean : {3.5, 12.0}) {
        Rng rng(99);
        const int n = 200000;
        std::vector<double> hist(40, 0.0);
        for (int i = 0; i < n; ++i) {
            const auto k = rng.poisson(mean);
            if (k < hist.size()) hist[k] += 1;
        }
        double chi2 = 0.0;
        int dof = 0;
        for (int k = 0; k < 40; ++k) {
            const double p = std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
            const double expected = n * p;
            if (expected < 20) continue;
            chi2 += (hist[k] - expected) * (hist[k] - expected) / expected;
            ++dof;
        }
        INFO("mean = " << mean << " chi2 = " << chi2 << " bins = " << dof);
        // loose 5-sigma bound on a chi-square with ~dof degrees of freedom
        CHECK(chi2 < dof + 5.0 * std::sqrt(2.0 * dof));
    }
}

TEST_CASE("poisson rejects bad means") {
    Rng rng(0);
    CHECK_THROWS_AS(rng.poisson(-1.0), fbell::ContractViolation);
    CHECK_THROWS_AS(rng.poisson(std::nan("")), fbell::ContractViolation);
}
