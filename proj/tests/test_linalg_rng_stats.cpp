#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "qkdmem/linalg.hpp"
#include "qkdmem/rng.hpp"
#include "qkdmem/stats.hpp"

using namespace qkdmem;
using namespace qkdmem::stats;

namespace {

CMat pauli_x() {
    CMat m(2, 2);
    m.at(0, 1) = 1.0;
    m.at(1, 0) = 1.0;
    return m;
}

CMat pauli_z() {
    CMat m(2, 2);
    m.at(0, 0) = 1.0;
    m.at(1, 1) = -1.0;
    return m;
}

CMat random_hermitian(std::size_t n, Rng& rng) {
    CMat m(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r; c < n; ++c) {
            const cplx v{rng.next_double() - 0.5, r == c ? 0.0 : rng.next_double() - 0.5};
            m.at(r, c) = v;
            m.at(c, r) = std::conj(v);
        }
    return m;
}

}  // namespace

TEST_CASE("matrix product, adjoint, trace") {
    const CMat x = pauli_x();
    const CMat z = pauli_z();
    const CMat xz = x * z;
    CHECK(xz.at(0, 1) == cplx(-1.0));
    CHECK(xz.at(1, 0) == cplx(1.0));
    CHECK(std::abs(xz.trace()) == doctest::Approx(0.0));
    CHECK(xz.adjoint().max_abs_diff(z * x) == doctest::Approx(0.0));

    const CMat sum = x + z;
    CHECK(sum.is_hermitian(1e-15));
    CHECK((sum - x).max_abs_diff(z) == doctest::Approx(0.0));
    const CMat scaled = cplx(0.0, 2.0) * x;
    CHECK(scaled.at(0, 1) == cplx(0.0, 2.0));
    CHECK_FALSE(scaled.is_hermitian(1e-15));
    CHECK(CMat::identity(3).trace() == cplx(3.0));
}

TEST_CASE("kron keeps the left factor on the high-order index") {
    const CMat k = kron(pauli_x(), pauli_z());
    REQUIRE(k.rows == 4);
    REQUIRE(k.cols == 4);
    for (std::size_t ia = 0; ia < 2; ++ia)
        for (std::size_t ib = 0; ib < 2; ++ib)
            for (std::size_t ja = 0; ja < 2; ++ja)
                for (std::size_t jb = 0; jb < 2; ++jb)
                    CHECK(k.at(2 * ia + ib, 2 * ja + jb) ==
                          pauli_x().at(ia, ja) * pauli_z().at(ib, jb));
}

TEST_CASE("outer conjugates the bra side") {
    const CMat m = outer({cplx(0.0, 1.0)}, {cplx(0.0, 1.0)});
    CHECK(m.at(0, 0) == cplx(1.0));
    const CMat p = outer({1.0, 0.0}, {0.0, 1.0});
    CHECK(p.at(0, 1) == cplx(1.0));
    CHECK(p.at(1, 0) == cplx(0.0));
}

TEST_CASE("eigendecomposition of known 2x2 matrices") {
    CMat m(2, 2);
    m.at(0, 0) = 2.0;
    m.at(0, 1) = 1.0;
    m.at(1, 0) = 1.0;
    m.at(1, 1) = 2.0;
    const HermitianEig eig = hermitian_eig(m);
    REQUIRE(eig.values.size() == 2);
    CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eig.values[1] == doctest::Approx(3.0).epsilon(1e-12));

    CMat y(2, 2);
    y.at(0, 1) = cplx(0.0, -1.0);
    y.at(1, 0) = cplx(0.0, 1.0);
    const auto yv = hermitian_eigenvalues(y);
    CHECK(yv[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(yv[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigendecomposition reconstructs random hermitian matrices") {
    Rng rng(2024);
    for (int rep = 0; rep < 5; ++rep) {
        const CMat m = random_hermitian(6, rng);
        const HermitianEig eig = hermitian_eig(m);
        // Columns orthonormal.
        CHECK((eig.vectors.adjoint() * eig.vectors).max_abs_diff(CMat::identity(6)) < 1e-10);
        // V diag(values) V^dagger == m.
        CMat d(6, 6);
        for (std::size_t i = 0; i < 6; ++i) d.at(i, i) = eig.values[i];
        CHECK((eig.vectors * d * eig.vectors.adjoint()).max_abs_diff(m) < 1e-10);
        for (std::size_t i = 1; i < 6; ++i) CHECK(eig.values[i - 1] <= eig.values[i]);
    }
}

TEST_CASE("splitmix64 matches the reference vectors") {
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(1) == 0x910a2dec89025cc1ULL);
    CHECK(splitmix64(0xdeadbeefULL) == 0x4adfb90f68c9eb9bULL);
}

TEST_CASE("rng streams are deterministic and counted") {
    Rng a(99);
    Rng b(99);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(a.draw_count() == 100);

    Rng c(7);
    const double d = c.next_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
    const int bit = Rng(7).next_bit();
    CHECK((bit == 0 || bit == 1));

    // trial_rng(s, i) is the stream seeded with splitmix64(s ^ i).
    Rng t = trial_rng(12, 5);
    Rng ref(splitmix64(12 ^ 5));
    for (int i = 0; i < 10; ++i) CHECK(t.next_u64() == ref.next_u64());
}

TEST_CASE("next_index is in range and covers all values") {
    Rng rng(3);
    std::set<std::size_t> seen;
    for (int i = 0; i < 500; ++i) {
        const std::size_t v = rng.next_index(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK(Rng(1).next_index(1) == 0);
}

TEST_CASE("regularized upper incomplete gamma") {
    CHECK(gamma_q(0.5, 1.2) == doctest::Approx(0.12133525035848214653).epsilon(1e-12));
    CHECK(gamma_q(3.0, 0.5) == doctest::Approx(0.98561232203302931336).epsilon(1e-12));
    CHECK(gamma_q(1.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("chi-squared survival function") {
    CHECK(chi2_sf(1.0, 1.0) == doctest::Approx(0.31731050786291410283).epsilon(1e-12));
    CHECK(chi2_sf(5.0, 3.0) == doctest::Approx(0.17179714429673313506).epsilon(1e-12));
    CHECK(chi2_sf(10.0, 4.0) == doctest::Approx(0.04042768199451280258).epsilon(1e-12));
    CHECK(chi2_sf(0.0, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("two-sample chi-squared homogeneity") {
    // Identical count vectors: statistic 0, p-value 1.
    const std::vector<std::uint64_t> same{100, 200, 300, 400};
    const Chi2Result eq = chi2_two_sample(same, same);
    CHECK(eq.statistic == doctest::Approx(0.0));
    CHECK(eq.p_value == doctest::Approx(1.0));

    // Same distribution, sampled: p should not be tiny.
    Rng rng(11);
    std::vector<std::uint64_t> a(8, 0), b(8, 0);
    for (int i = 0; i < 20000; ++i) ++a[rng.next_index(8)];
    for (int i = 0; i < 20000; ++i) ++b[rng.next_index(8)];
    const Chi2Result hom = chi2_two_sample(a, b);
    CHECK(hom.p_value > 0.001);

    // Disjoint supports: p collapses.
    const Chi2Result dis =
        chi2_two_sample({1000, 0, 1000, 0}, {0, 1000, 0, 1000});
    CHECK(dis.p_value < 1e-12);

    // Cells empty in both samples are dropped from the df count.
    const Chi2Result drop = chi2_two_sample({50, 0, 50}, {60, 0, 40});
    CHECK(drop.df == doctest::Approx(1.0));
}

TEST_CASE("wilson score interval") {
    const WilsonInterval w = wilson_interval(37, 100, kWilson99Z);
    CHECK(w.low == doctest::Approx(0.25738629007803337258).epsilon(1e-12));
    CHECK(w.high == doctest::Approx(0.49879108872808059986).epsilon(1e-12));

    const WilsonInterval all = wilson_interval(50, 50, kWilson99Z);
    CHECK(all.high == doctest::Approx(1.0));
    CHECK(all.low > 0.85);
    const WilsonInterval none = wilson_interval(0, 50, kWilson99Z);
    CHECK(none.low == doctest::Approx(0.0));
    CHECK(none.high < 0.15);
    CHECK(wilson_interval(0, 0, kWilson99Z).low == doctest::Approx(0.0));
    CHECK(wilson_interval(0, 0, kWilson99Z).high == doctest::Approx(1.0));
}
