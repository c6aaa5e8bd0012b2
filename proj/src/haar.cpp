#include "dyadlab/haar.hpp"

#include <cmath>

namespace dyadlab {

namespace {

// sign of h^eta on child q (bit d of q picks the right half along axis d)
int haar_sign(unsigned eta, unsigned q, int n) {
    int s = 1;
    for (int d = 0; d < n; ++d) {
        const bool cancel = (eta >> d) & 1u;
        const bool right = (q >> d) & 1u;
        if (cancel && right) s = -s;
    }
    return s;
}

void check_eta(const DyadicCube& I, unsigned eta) {
    const int n = I.grid->n();
    require(eta < (1u << n), "haar: eta out of range");
    if (eta != 0)
        require_resolution(I.level + 1 <= I.grid->L(),
                           "haar: cube too small to split at this resolution");
}

// add c * sigma_I^eta to out, where sigma is the +-1 (or 1 for eta = 0)
// pattern on I; the L^2 normalization is folded into c by the caller
void add_pattern(MeshFunction& out, const DyadicCube& I, unsigned eta, double c) {
    const auto& g = *out.grid();
    const int n = g.n();
    const int64_t s = I.side_units();
    const int64_t half = s / 2;
    const int64_t x0 = I.corner_units(0) + g.window_units();
    const int64_t y0 = n == 2 ? I.corner_units(1) + g.window_units() : 0;
    if (n == 1) {
        if (eta == 0) {
            for (int64_t i = 0; i < s; ++i) out[x0 + i] += c;
        } else {
            for (int64_t i = 0; i < half; ++i) out[x0 + i] += c;
            for (int64_t i = half; i < s; ++i) out[x0 + i] -= c;
        }
        return;
    }
    for (int64_t iy = 0; iy < s; ++iy) {
        const unsigned qy = (eta != 0 && iy >= half) ? 2u : 0u;
        for (int64_t ix = 0; ix < s; ++ix) {
            const unsigned qx = (eta != 0 && ix >= half) ? 1u : 0u;
            const int sign = eta == 0 ? 1 : haar_sign(eta, qx | qy, n);
            out.at(x0 + ix, y0 + iy) += c * sign;
        }
    }
}

}  // namespace

MeshFunction haar_eval(const DyadicCube& I, unsigned eta) {
    check_eta(I, eta);
    require(I.in_window(), "haar_eval: cube not inside the window");
    MeshFunction out(I.grid);
    const double norm = std::exp2(0.5 * I.level * I.grid->n());  // |I|^{-1/2}
    add_pattern(out, I, eta, norm);
    return out;
}

double haar_coefficient(const AveragePyramid& pyr, const DyadicCube& I, unsigned eta) {
    check_eta(I, eta);
    const auto& g = *I.grid;
    const int n = g.n();
    const double u = g.cell_size();
    const double vol_cell = n == 2 ? u * u : u;
    const double norm = std::exp2(0.5 * I.level * n);  // |I|^{-1/2}
    if (eta == 0) return norm * pyr.sum(I.level, I.index) * vol_cell;
    double s = 0.0;
    const int child_level = I.level + 1;
    for (unsigned q = 0; q < (1u << n); ++q) {
        std::array<int64_t, 2> ci{0, 0};
        for (int d = 0; d < n; ++d)
            ci[static_cast<std::size_t>(d)] = 2 * I.index[static_cast<std::size_t>(d)] +
                                              g.omega_bit(child_level, d) + ((q >> d) & 1u);
        s += haar_sign(eta, q, n) * pyr.sum(child_level, ci);
    }
    return norm * s * vol_cell;
}

HaarExpansion expand(const MeshFunction& f) {
    const GridPtr& grid = f.grid();
    const auto& g = *grid;
    AveragePyramid pyr(f);
    HaarCoeffs coeffs(grid);
    const unsigned etas = (1u << g.n());
    for (int level = -g.M(); level <= g.L() - 1; ++level) {
        for (const DyadicCube& I : level_cubes(grid, level))
            for (unsigned eta = 1; eta < etas; ++eta)
                coeffs.set({key_of(I), eta}, haar_coefficient(pyr, I, eta));
    }
    MeshFunction synth = reconstruct(coeffs, MeshFunction(grid));
    MeshFunction mean = f;
    mean -= synth;
    return HaarExpansion{std::move(coeffs), std::move(mean)};
}

MeshFunction reconstruct(const HaarCoeffs& coeffs, const MeshFunction& mean) {
    require(coeffs.grid()->same_mesh(*mean.grid()), "reconstruct: mesh mismatch");
    MeshFunction out = mean;
    const GridPtr& grid = coeffs.grid();
    for (const auto& [key, c] : coeffs.entries()) {
        DyadicCube I{grid, key.cube.level, key.cube.index};
        const double norm = std::exp2(0.5 * I.level * grid->n());
        add_pattern(out, I, key.eta, c * norm);
    }
    return out;
}

double coefficient_energy(const HaarCoeffs& coeffs) {
    long double s = 0.0L;
    for (const auto& [key, c] : coeffs.entries()) s += static_cast<long double>(c) * c;
    return static_cast<double>(s);
}

MeshFunction dyadic_average(const MeshFunction& f, int side_exponent) {
    const GridPtr& grid = f.grid();
    const int level = -side_exponent;
    require(level >= -grid->M() && level <= grid->L(),
            "dyadic_average: side outside represented levels");
    AveragePyramid pyr(f);
    MeshFunction out = f;
    const auto& g = *grid;
    for (const DyadicCube& Q : level_cubes(grid, level)) {
        const double avg = pyr.average(level, Q.index);
        const int64_t s = Q.side_units();
        const int64_t x0 = Q.corner_units(0) + g.window_units();
        if (g.n() == 1) {
            for (int64_t i = 0; i < s; ++i) out[x0 + i] = avg;
        } else {
            const int64_t y0 = Q.corner_units(1) + g.window_units();
            for (int64_t iy = 0; iy < s; ++iy)
                for (int64_t ix = 0; ix < s; ++ix) out.at(x0 + ix, y0 + iy) = avg;
        }
    }
    return out;
}

namespace {

// add Delta_I f (child averages minus parent average on I) into out
void add_delta(MeshFunction& out, const AveragePyramid& pyr, const DyadicCube& I,
               double scale = 1.0) {
    const auto& g = *I.grid;
    const int n = g.n();
    const double parent_avg = pyr.average(I.level, I.index);
    const int child_level = I.level + 1;
    for (unsigned q = 0; q < (1u << n); ++q) {
        std::array<int64_t, 2> ci{0, 0};
        for (int d = 0; d < n; ++d)
            ci[static_cast<std::size_t>(d)] = 2 * I.index[static_cast<std::size_t>(d)] +
                                              g.omega_bit(child_level, d) + ((q >> d) & 1u);
        const double dv = scale * (pyr.average(child_level, ci) - parent_avg);
        const int64_t s = g.side_units(child_level);
        const int64_t x0 = ci[0] * s + g.shift_units(child_level, 0) + g.window_units();
        if (n == 1) {
            for (int64_t i = 0; i < s; ++i) out[x0 + i] += dv;
        } else {
            const int64_t y0 = ci[1] * s + g.shift_units(child_level, 1) + g.window_units();
            for (int64_t iy = 0; iy < s; ++iy)
                for (int64_t ix = 0; ix < s; ++ix) out.at(x0 + ix, y0 + iy) += dv;
        }
    }
}

std::vector<DyadicCube> descendants(const DyadicCube& Q, int k) {
    std::vector<DyadicCube> cur{Q};
    const auto& g = *Q.grid;
    for (int step = 0; step < k; ++step) {
        std::vector<DyadicCube> next;
        next.reserve(cur.size() << g.n());
        const int child_level = cur.front().level + 1;
        for (const auto& c : cur) {
            for (unsigned q = 0; q < (1u << g.n()); ++q) {
                DyadicCube child{Q.grid, child_level, {0, 0}};
                for (int d = 0; d < g.n(); ++d)
                    child.index[static_cast<std::size_t>(d)] =
                        2 * c.index[static_cast<std::size_t>(d)] +
                        g.omega_bit(child_level, d) + ((q >> d) & 1u);
                next.push_back(child);
            }
        }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

MeshFunction martingale_block(const MeshFunction& f, const DyadicCube& Q, int k) {
    require(k >= 0, "martingale_block: k must be >= 0");
    require(Q.in_window(), "martingale_block: cube not inside the window");
    require_resolution(Q.level + k + 1 <= Q.grid->L(),
                       "martingale_block: depth exceeds the mesh resolution");
    // cube indices are relative to Q's grid; view f through it
    const MeshFunction fq = f.grid() == Q.grid ? f : rebind(f, Q.grid);
    AveragePyramid pyr(fq);
    MeshFunction out(Q.grid);
    for (const DyadicCube& I : descendants(Q, k)) add_delta(out, pyr, I);
    return out;
}

MeshFunction square_function(const MeshFunction& f, int k) {
    const GridPtr& grid = f.grid();
    const auto& g = *grid;
    require(k >= 0, "square_function: k must be >= 0");
    require_resolution(-g.M() + k + 1 <= g.L(), "square_function: depth exceeds resolution");
    AveragePyramid pyr(f);
    MeshFunction out(grid);
    const int64_t C = g.cells_per_dim();
    const int64_t total = f.size();
    parallel_for(total, [&](int64_t lo, int64_t hi) {
        for (int64_t cell = lo; cell < hi; ++cell) {
            const std::array<int64_t, 2> cc{cell % C, cell / C};
            double acc = 0.0;
            // Delta_Q^k f at x equals Delta_I f at x for the level
            // level(Q)+k cube I containing x, provided Q is in-window.
            for (int qlevel = -g.M(); qlevel <= g.L() - 1 - k; ++qlevel) {
                const auto Q = cube_at_cell(grid, qlevel, cc);
                if (!Q.has_value()) continue;
                const int ilevel = qlevel + k;
                const auto I = cube_at_cell(grid, ilevel, cc);
                if (!I.has_value()) continue;
                const auto child = cube_at_cell(grid, ilevel + 1, cc);
                const double d = pyr.average(ilevel + 1, child->index) -
                                 pyr.average(ilevel, I->index);
                acc += d * d;
            }
            out[cell] = std::sqrt(acc);
        }
    });
    return out;
}

Projection project(const MeshFunction& f, int N) {
    const GridPtr& grid = f.grid();
    require(N >= 0 && N <= std::min(grid->L(), grid->M()) - 1,
            "project: N must satisfy 0 <= N <= min(L, M) - 1");
    AveragePyramid pyr(f);
    MeshFunction p(grid);
    for (const DyadicCube& Q : window_family(grid, N)) add_delta(p, pyr, Q);
    MeshFunction perp = f;
    perp -= p;
    return Projection{std::move(p), std::move(perp)};
}

}  // namespace dyadlab
