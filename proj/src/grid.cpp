#include "dyadlab/grid.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

namespace dyadlab {

GridSpec::GridSpec(int n, int L, int M, std::optional<uint64_t> seed)
    : n_(n), L_(L), M_(M), seed_(seed) {
    require(n >= 1 && n <= 2, "grid: dimension must be 1 or 2");
    require(L >= 0, "grid: L must be >= 0");
    require(M >= 1, "grid: M must be >= 1");
    require(L + M <= 30, "grid: L + M must be <= 30 to keep index arithmetic exact");

    const int band = L + M;  // levels -M+1 .. L
    bits_.assign(band, {0, 0});
    if (seed.has_value()) {
        Rng rng(*seed);
        // draw per level, coarse to fine, one bit per dimension
        for (int i = 0; i < band; ++i)
            for (int d = 0; d < n_; ++d) bits_[static_cast<std::size_t>(i)][d] = rng.bit();
    }
    suffix_.assign(band + 1, {0, 0});
    // suffix over levels j in [-M+1, L]; entry band is the empty sum
    for (int i = band - 1; i >= 0; --i) {
        const int level_j = i - M_ + 1;
        for (int d = 0; d < 2; ++d) {
            suffix_[static_cast<std::size_t>(i)][d] =
                suffix_[static_cast<std::size_t>(i + 1)][d] +
                (int64_t(bits_[static_cast<std::size_t>(i)][d]) << (L_ - level_j));
        }
    }
}

int64_t GridSpec::side_units(int level) const {
    require(level >= -M_ && level <= L_, "grid: level outside represented range");
    return int64_t(1) << (L_ - level);
}

int GridSpec::omega_bit(int level, int dim) const {
    if (level <= -M_ || level > L_) return 0;
    return bits_[static_cast<std::size_t>(level + M_ - 1)][dim];
}

int64_t GridSpec::cell_count() const {
    int64_t c = cells_per_dim();
    if (n_ == 2) c *= cells_per_dim();
    return c;
}

GridPtr make_grid(int n, int L, int M, std::optional<uint64_t> seed) {
    return std::make_shared<const GridSpec>(n, L, M, seed);
}

bool DyadicCube::in_window() const {
    const int64_t W = grid->window_units();
    const int64_t s = side_units();
    for (int d = 0; d < grid->n(); ++d) {
        const int64_t c = corner_units(d);
        if (c < -W || c + s > W) return false;
    }
    return true;
}

bool DyadicCube::clipped() const {
    if (in_window()) return false;
    const int64_t W = grid->window_units();
    const int64_t s = side_units();
    for (int d = 0; d < grid->n(); ++d) {
        const int64_t c = corner_units(d);
        if (c + s <= -W || c >= W) return false;  // fully outside
    }
    return true;
}

std::optional<DyadicCube> cube_at_cell(const GridPtr& grid, int level,
                                       const std::array<int64_t, 2>& cell) {
    const int64_t s = grid->side_units(level);
    const int64_t W = grid->window_units();
    DyadicCube cube{grid, level, {0, 0}};
    for (int d = 0; d < grid->n(); ++d) {
        const int64_t corner = cell[d] - W;  // cell corner in units
        const int64_t sh = grid->shift_units(level, d);
        // floor division of (corner - sh) by s
        int64_t q = (corner - sh) / s;
        if ((corner - sh) % s != 0 && (corner - sh) < 0) --q;
        cube.index[d] = q;
    }
    if (!cube.in_window()) return std::nullopt;
    return cube;
}

std::pair<int64_t, int64_t> level_index_range(const GridSpec& grid, int level, int dim) {
    const int64_t s = grid.side_units(level);
    const int64_t W = grid.window_units();
    const int64_t sh = grid.shift_units(level, dim);
    // corner = m*s + sh must satisfy corner >= -W, corner + s <= W; 0 <= sh < s
    const int64_t lo = -W / s;  // ceil((-W - sh)/s) for sh in [0, s)
    const int64_t hi = W / s - 1 - (sh > 0 ? 1 : 0);
    return {lo, hi};
}

std::vector<DyadicCube> level_cubes(const GridPtr& grid, int level) {
    std::vector<DyadicCube> out;
    const auto [lo0, hi0] = level_index_range(*grid, level, 0);
    if (grid->n() == 1) {
        for (int64_t m = lo0; m <= hi0; ++m) out.push_back({grid, level, {m, 0}});
        return out;
    }
    const auto [lo1, hi1] = level_index_range(*grid, level, 1);
    for (int64_t m1 = lo1; m1 <= hi1; ++m1)
        for (int64_t m0 = lo0; m0 <= hi0; ++m0) out.push_back({grid, level, {m0, m1}});
    return out;
}

namespace {

// gap between [a, a+sa) and [b, b+sb) along one axis, in common units
int64_t interval_gap(int64_t a, int64_t sa, int64_t b, int64_t sb) {
    const int64_t left = b - (a + sa);
    const int64_t right = a - (b + sb);
    return std::max<int64_t>({left, right, 0});
}

struct Box {
    std::array<int64_t, 2> corner;
    int64_t side;
};

// l^inf distance between boxes (max over axes of the per-axis gap)
int64_t box_distance(const Box& A, const Box& B, int n) {
    int64_t d = 0;
    for (int axis = 0; axis < n; ++axis)
        d = std::max(d, interval_gap(A.corner[axis], A.side, B.corner[axis], B.side));
    return d;
}

}  // namespace

Fraction relative_distance(const DyadicCube& I, const DyadicCube& J) {
    require(I.grid->n() == J.grid->n(), "relative_distance: dimension mismatch");
    const int n = I.grid->n();
    // rescale both cubes to units of 2^-Lmax
    const int Lmax = std::max(I.grid->L(), J.grid->L());
    const int64_t fI = int64_t(1) << (Lmax - I.grid->L());
    const int64_t fJ = int64_t(1) << (Lmax - J.grid->L());
    Box A{{I.corner_units(0) * fI, I.corner_units(1) * fI}, I.side_units() * fI};
    Box B{{J.corner_units(0) * fJ, J.corner_units(1) * fJ}, J.side_units() * fJ};
    const int64_t d = box_distance(A, B, n);
    return Fraction(d, std::max(A.side, B.side));
}

Fraction relative_distance_to_reference(const DyadicCube& I, int N) {
    const auto& g = *I.grid;
    const int n = g.n();
    // reference cube 2^N * [-1/2, 1/2)^n in units of 2^-L
    require(N >= 0 && N <= g.L() + g.M(), "reference cube outside representable range");
    const int64_t ref_side = int64_t(1) << (g.L() + N);
    const int64_t ref_corner = -(ref_side / 2);
    Box A{{I.corner_units(0), I.corner_units(1)}, I.side_units()};
    Box R{{ref_corner, ref_corner}, ref_side};
    const int64_t d = box_distance(A, R, n);
    return Fraction(d, std::max(A.side, ref_side));
}

std::vector<DyadicCube> window_family(const GridPtr& grid, int N) {
    require(N >= 0 && N <= std::min(grid->L(), grid->M()),
            "window_family: N must satisfy 0 <= N <= min(L, M)");
    std::vector<DyadicCube> out;
    const int64_t ref_side = int64_t(1) << (grid->L() + N);
    const int64_t ref_corner = -(ref_side / 2);
    const int64_t margin = int64_t(N) * ref_side;  // rd <= N with max side = ref side
    for (int level = -N; level <= N; ++level) {
        const int64_t s = grid->side_units(level);
        std::array<std::pair<int64_t, int64_t>, 2> ranges;
        for (int dim = 0; dim < grid->n(); ++dim) {
            const auto [wlo, whi] = level_index_range(*grid, level, dim);
            const int64_t sh = grid->shift_units(level, dim);
            // corners within [ref_corner - margin - s, ref_corner + ref_side + margin]
            int64_t lo = (ref_corner - margin - s - sh) / s - 2;
            int64_t hi = (ref_corner + ref_side + margin - sh) / s + 2;
            ranges[static_cast<std::size_t>(dim)] = {std::max(lo, wlo), std::min(hi, whi)};
        }
        auto emit = [&](int64_t m0, int64_t m1) {
            DyadicCube cube{grid, level, {m0, m1}};
            if (relative_distance_to_reference(cube, N).leq_int(N)) out.push_back(cube);
        };
        if (grid->n() == 1) {
            for (int64_t m = ranges[0].first; m <= ranges[0].second; ++m) emit(m, 0);
        } else {
            for (int64_t m1 = ranges[1].first; m1 <= ranges[1].second; ++m1)
                for (int64_t m0 = ranges[0].first; m0 <= ranges[0].second; ++m0) emit(m0, m1);
        }
    }
    return out;
}

bool in_window_family(const DyadicCube& I, int N) {
    if (I.level < -N || I.level > N) return false;
    if (!I.in_window()) return false;
    return relative_distance_to_reference(I, N).leq_int(N);
}

namespace {

// d(I, boundary(I')) for I contained in I': the least per-axis distance to a
// face of I'.  For disjoint cubes d(I, bnd I') = d(I, I').
int64_t distance_to_boundary(const Box& inner, const Box& outer, int n) {
    int64_t dmin = INT64_MAX;
    for (int axis = 0; axis < n; ++axis) {
        const int64_t lo = inner.corner[axis] - outer.corner[axis];
        const int64_t hi =
            (outer.corner[axis] + outer.side) - (inner.corner[axis] + inner.side);
        dmin = std::min({dmin, lo, hi});
    }
    return dmin;
}

}  // namespace

GoodnessResult is_good(const DyadicCube& I, int r, double delta) {
    require(r >= 1, "is_good: r must be >= 1");
    require(delta > 0.0 && delta <= 1.0, "is_good: delta must lie in (0, 1]");
    const auto& g = *I.grid;
    const int n = g.n();
    const double gamma = delta / (2.0 * (2.0 * n + delta));
    const Box box{{I.corner_units(0), I.corner_units(1)}, I.side_units()};

    GoodnessResult res;
    for (int lev = I.level - r; lev >= -g.M(); --lev) {
        // threshold 2 * l(I)^gamma * l(I')^(1-gamma), in units of 2^-L
        const double thr_units =
            std::exp2(1.0 - gamma * I.level - (1.0 - gamma) * lev + g.L());
        const int64_t s = g.side_units(lev);
        // ancestor-type candidate: the level-lev cube containing I
        std::array<int64_t, 2> cell{box.corner[0] + g.window_units(),
                                    box.corner[1] + g.window_units()};
        if (auto anc = cube_at_cell(I.grid, lev, cell); anc.has_value()) {
            const Box outer{{anc->corner_units(0), anc->corner_units(1)}, s};
            if (static_cast<double>(distance_to_boundary(box, outer, n)) <= thr_units) {
                res.good = false;
                return res;
            }
        }
        // disjoint candidates with boundary within the threshold
        const int64_t reach = static_cast<int64_t>(std::floor(thr_units)) + 1;
        std::array<std::pair<int64_t, int64_t>, 2> ranges;
        for (int dim = 0; dim < n; ++dim) {
            const auto [wlo, whi] = level_index_range(g, lev, dim);
            const int64_t sh = g.shift_units(lev, dim);
            int64_t lo = (box.corner[dim] - reach - s - sh) / s - 2;
            int64_t hi = (box.corner[dim] + box.side + reach - sh) / s + 2;
            ranges[static_cast<std::size_t>(dim)] = {std::max(lo, wlo), std::min(hi, whi)};
        }
        auto check = [&](int64_t m0, int64_t m1) -> bool {
            DyadicCube cand{I.grid, lev, {m0, m1}};
            const Box other{{cand.corner_units(0), cand.corner_units(1)}, s};
            const int64_t gap = box_distance(box, other, n);
            if (gap == 0 && distance_to_boundary(box, other, n) >= 0) return false;  // ancestor
            return static_cast<double>(gap) <= thr_units;
        };
        bool bad = false;
        if (n == 1) {
            for (int64_t m = ranges[0].first; m <= ranges[0].second && !bad; ++m)
                bad = check(m, 0);
        } else {
            for (int64_t m1 = ranges[1].first; m1 <= ranges[1].second && !bad; ++m1)
                for (int64_t m0 = ranges[0].first; m0 <= ranges[0].second && !bad; ++m0)
                    bad = check(m0, m1);
        }
        if (bad) {
            res.good = false;
            return res;
        }
    }
    // the infinite grid keeps scanning coarser levels; we ran out of window
    res.truncated = true;
    return res;
}

}  // namespace dyadlab
