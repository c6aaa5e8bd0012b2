#include "doctest.h"
#include "dyadlab/haar.hpp"

#include <cmath>

using namespace dyadlab;

TEST_CASE("haar fixed shapes") {
    const GridPtr g = make_grid(1, 3, 2);
    // h on [0,1): +1 left, -1 right
    const MeshFunction h = haar_eval(DyadicCube{g, 0, {0, 0}}, 1);
    CHECK(h[32] == 1.0);   // x in [0, 1/2)
    CHECK(h[36] == -1.0);  // x in [1/2, 1)
    CHECK(h.inner(h) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(h.integral() == 0.0);
    // h^0 on [0,2): 2^{-1/2}
    const MeshFunction h0 = haar_eval(DyadicCube{g, -1, {0, 0}}, 0);
    CHECK(h0[40] == doctest::Approx(std::exp2(-0.5)).epsilon(1e-15));
    CHECK(h0.inner(h0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("haar rejects unsplittable cubes") {
    const GridPtr g = make_grid(1, 2, 2);
    CHECK_THROWS_AS(haar_eval(DyadicCube{g, 2, {0, 0}}, 1), ResolutionError);
    CHECK_NOTHROW(haar_eval(DyadicCube{g, 2, {0, 0}}, 0));
}

TEST_CASE("orthonormality by exhaustive inner products (level-3 grid)") {
    const GridPtr g = make_grid(1, 3, 2, 17);
    std::vector<MeshFunction> hs;
    for (int level = -2; level <= 2; ++level)
        for (const DyadicCube& I : level_cubes(g, level)) hs.push_back(haar_eval(I, 1));
    for (std::size_t a = 0; a < hs.size(); ++a)
        for (std::size_t b = a; b < hs.size(); ++b) {
            const double ip = hs[a].inner(hs[b]);
            CHECK(std::fabs(ip - (a == b ? 1.0 : 0.0)) <= 1e-12);
        }
}

TEST_CASE("orthonormality in two dimensions") {
    const GridPtr g = make_grid(2, 2, 1, 5);
    std::vector<MeshFunction> hs;
    for (int level = -1; level <= 1; ++level)
        for (const DyadicCube& I : level_cubes(g, level))
            for (unsigned eta = 1; eta < 4; ++eta) hs.push_back(haar_eval(I, eta));
    for (std::size_t a = 0; a < hs.size(); ++a)
        for (std::size_t b = a; b < hs.size(); ++b) {
            const double ip = hs[a].inner(hs[b]);
            CHECK(std::fabs(ip - (a == b ? 1.0 : 0.0)) <= 1e-12);
        }
}

TEST_CASE("expand of a single haar function") {
    const GridPtr g = make_grid(1, 4, 2);
    const DyadicCube I{g, 0, {0, 0}};
    const HaarExpansion ex = expand(haar_eval(I, 1));
    CHECK(ex.coeffs.get({key_of(I), 1}) == doctest::Approx(1.0).epsilon(1e-14));
    double off = 0.0;
    for (const auto& [k, c] : ex.coeffs.entries())
        if (!(k.cube == key_of(I))) off = std::max(off, std::fabs(c));
    CHECK(off <= 1e-14);
    CHECK(ex.mean.sup_norm() <= 1e-14);
}

TEST_CASE("expand of zero") {
    const GridPtr g = make_grid(1, 4, 2);
    const HaarExpansion ex = expand(MeshFunction(g));
    CHECK(coefficient_energy(ex.coeffs) == 0.0);
    CHECK(ex.mean.sup_norm() == 0.0);
}

TEST_CASE("round trip and Parseval on random functions") {
    for (uint64_t seed : {uint64_t{0}, uint64_t{3}}) {
        const GridPtr g = seed == 0 ? make_grid(1, 6, 3) : make_grid(1, 6, 3, seed);
        Rng rng(seed + 100);
        for (int t = 0; t < 10; ++t) {
            const MeshFunction f = random_mesh(g, rng.bits());
            const HaarExpansion ex = expand(f);
            CHECK(reconstruct(ex.coeffs, ex.mean).max_abs_diff(f) <= 1e-12);
            const double energy = coefficient_energy(ex.coeffs) + ex.mean.inner(ex.mean);
            CHECK(std::fabs(energy - f.inner(f)) <= 1e-10);
        }
    }
}

TEST_CASE("round trip on a shifted 2D grid") {
    const GridPtr g = make_grid(2, 3, 2, 21);
    const MeshFunction f = random_mesh(g, 4);
    const HaarExpansion ex = expand(f);
    CHECK(reconstruct(ex.coeffs, ex.mean).max_abs_diff(f) <= 1e-12);
}

TEST_CASE("martingale block: constants vanish, single-scale survives") {
    const GridPtr g = make_grid(1, 5, 2);
    const DyadicCube Q{g, 0, {0, 0}};
    CHECK(martingale_block(MeshFunction(g, 3.25), Q, 0).sup_norm() == 0.0);
    const MeshFunction h = haar_eval(Q, 1);
    CHECK(martingale_block(h, Q, 0).max_abs_diff(h) <= 1e-14);
    CHECK_THROWS_AS(martingale_block(h, DyadicCube{g, 5, {0, 0}}, 0), ResolutionError);
}

TEST_CASE("martingale block equals the coefficient-side sum") {
    // oracle: Delta_Q^k f = sum over depth-k descendants I and eta of
    // <f, h_I^eta> h_I^eta
    const GridPtr g = make_grid(1, 5, 2, 7);
    const MeshFunction f = random_mesh(g, 9);
    const HaarExpansion ex = expand(f);
    for (int k = 0; k <= 2; ++k) {
        const DyadicCube Q{g, 1, {1, 0}};
        MeshFunction expect(g);
        for (const auto& [key, c] : ex.coeffs.entries()) {
            if (key.cube.level != Q.level + k) continue;
            const DyadicCube I{g, key.cube.level, key.cube.index};
            if (I.corner_units(0) < Q.corner_units(0) ||
                I.corner_units(0) + I.side_units() > Q.corner_units(0) + Q.side_units())
                continue;
            MeshFunction h = haar_eval(I, key.eta);
            h *= c;
            expect += h;
        }
        CHECK(martingale_block(f, Q, k).max_abs_diff(expect) <= 1e-12);
        // block integrates to zero over Q
        CHECK(std::fabs(martingale_block(f, Q, k).integral()) <= 1e-13);
    }
}

TEST_CASE("averages difference identity (standard grid)") {
    const GridPtr g = make_grid(1, 5, 3);
    const MeshFunction f = random_mesh(g, 31);
    for (int side = -4; side <= 3; ++side) {
        MeshFunction lhs = dyadic_average(f, side - 1);
        lhs -= dyadic_average(f, side);
        MeshFunction rhs(g);
        for (const DyadicCube& Q : level_cubes(g, -side)) rhs += martingale_block(f, Q, 0);
        CHECK(lhs.max_abs_diff(rhs) <= 1e-12);
    }
}

TEST_CASE("square function basics") {
    const GridPtr g = make_grid(1, 5, 2);
    CHECK(square_function(MeshFunction(g), 0).sup_norm() == 0.0);
    const DyadicCube I{g, 0, {0, 0}};
    const MeshFunction s = square_function(haar_eval(I, 1), 0);
    // |h_I| = 1_I for the unit cube
    CHECK(s.max_abs_diff(indicator(g, {0.0, 0.0}, {1.0, 0.0})) <= 1e-14);
}

TEST_CASE("square function L2 identity via Parseval") {
    for (uint64_t seed : {uint64_t{0}, uint64_t{13}}) {
        const GridPtr g = seed == 0 ? make_grid(1, 5, 3) : make_grid(1, 5, 3, seed);
        const MeshFunction f = random_mesh(g, seed + 1);
        const HaarExpansion ex = expand(f);
        const MeshFunction s = square_function(f, 0);
        const double lhs = s.inner(s);
        const double rhs = f.inner(f) - ex.mean.inner(ex.mean);
        CHECK(std::fabs(lhs - rhs) <= 1e-10);
    }
}

TEST_CASE("square function L4 ratio stays in the frozen bracket") {
    // bracket measured once for this mesh size (L=5, M=2, 20 seeds) and
    // frozen as a regression bound
    const GridPtr g = make_grid(1, 5, 2);
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        const MeshFunction f = random_mesh(g, seed);
        const double ratio = square_function(f, 0).lp_norm(4.0) / f.lp_norm(4.0);
        CHECK(ratio >= 0.55);
        CHECK(ratio <= 2.6);
    }
}

TEST_CASE("projection basics and idempotence") {
    const GridPtr g = make_grid(1, 6, 3);
    // f = h_I with I inside D(N) is reproduced
    const DyadicCube I{g, 1, {0, 0}};
    const MeshFunction h = haar_eval(I, 1);
    CHECK(project(h, 2).p.max_abs_diff(h) <= 1e-14);
    // f = h_I with l(I) < 2^-N is annihilated
    const DyadicCube fine{g, 4, {0, 0}};
    CHECK(project(haar_eval(fine, 1), 2).p.sup_norm() <= 1e-14);
    // idempotence and self-adjointness on random data
    const MeshFunction f = random_mesh(g, 2);
    const MeshFunction w = random_mesh(g, 3);
    const auto pf = project(f, 2);
    const auto pw = project(w, 2);
    CHECK(project(pf.p, 2).p.max_abs_diff(pf.p) <= 1e-12);
    CHECK(std::fabs(pf.p.inner(w) - f.inner(pw.p)) <= 1e-10);
    MeshFunction sum = pf.p;
    sum += pf.perp;
    CHECK(sum.max_abs_diff(f) <= 1e-14);  // one rounding of the complement
    CHECK_THROWS_AS(project(f, 3), ConfigError);
}

TEST_CASE("projection complement of the unit indicator is exact") {
    const GridPtr g = make_grid(1, 6, 6);
    const MeshFunction f = indicator(g, {0.0, 0.0}, {1.0, 0.0});
    for (int N = 1; N <= 5; ++N) {
        const MeshFunction perp = project(f, N).perp;
        const MeshFunction expect =
            std::exp2(-N) * indicator(g, {0.0, 0.0}, {std::exp2(N), 0.0});
        CHECK(perp.max_abs_diff(expect) == 0.0);
    }
}

TEST_CASE("projection norms stay bounded over N") {
    const GridPtr g = make_grid(1, 6, 3, 23);
    const MeshFunction f = random_mesh(g, 8);
    const double base = f.lp_norm(2.0);
    for (int N = 0; N <= 2; ++N)
        CHECK(project(f, N).perp.lp_norm(2.0) <= 1.001 * base);
}
