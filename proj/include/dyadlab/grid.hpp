#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "dyadlab/common.hpp"

namespace dyadlab {

// A grid lives on the window [-2^M, 2^M)^n, partitioned into cells of side
// 2^-L.  All geometry is done in integer "units" of 2^-L, which keeps cube
// corners, side lengths and distances exact.  A cube of level k (side 2^-k)
// has corner  m * 2^(L-k) + shift_units(k)  where the shift collects the
// random translations of all represented levels finer than k; shifts at
// levels outside (-M, L] are truncated to zero.
class GridSpec {
  public:
    GridSpec(int n, int L, int M, std::optional<uint64_t> seed);

    int n() const { return n_; }
    int L() const { return L_; }
    int M() const { return M_; }
    std::optional<uint64_t> seed() const { return seed_; }

    /// half window width, in units of 2^-L
    int64_t window_units() const { return int64_t(1) << (L_ + M_); }
    /// side of a level-k cube in units; requires -M <= k <= L
    int64_t side_units(int level) const;
    /// corner shift of all level-k cubes in units, per dimension
    int64_t shift_units(int level, int dim) const { return suffix_[idx(level + 1)][dim]; }
    /// omega bit for level j (zero outside the represented band)
    int omega_bit(int level, int dim) const;

    int64_t cells_per_dim() const { return int64_t(1) << (L_ + M_ + 1); }
    int64_t cell_count() const;

    int coarsest_level() const { return -M_; }
    int finest_level() const { return L_; }

    double cell_size() const { return std::exp2(-L_); }

    bool same_mesh(const GridSpec& other) const {
        return n_ == other.n_ && L_ == other.L_ && M_ == other.M_;
    }

  private:
    int n_, L_, M_;
    std::optional<uint64_t> seed_;
    // suffix_[i][d] = sum_{j >= level(i)} 2^(L-j) * omega_j[d], indexed so that
    // idx(level) maps level in [-M+1, L+1]; suffix at L+1 is 0.
    std::vector<std::array<int64_t, 2>> suffix_;
    std::size_t idx(int level) const { return static_cast<std::size_t>(level + M_ - 1); }
    std::vector<std::array<int, 2>> bits_;
};

using GridPtr = std::shared_ptr<const GridSpec>;

GridPtr make_grid(int n, int L, int M, std::optional<uint64_t> seed = std::nullopt);

struct DyadicCube {
    GridPtr grid;
    int level = 0;
    std::array<int64_t, 2> index{0, 0};

    int64_t side_units() const { return grid->side_units(level); }
    int64_t corner_units(int dim) const {
        return index[dim] * grid->side_units(level) + grid->shift_units(level, dim);
    }
    double side() const { return std::exp2(-level); }
    double corner(int dim) const { return static_cast<double>(corner_units(dim)) * grid->cell_size(); }
    double center(int dim) const {
        return (static_cast<double>(corner_units(dim)) + 0.5 * static_cast<double>(side_units())) *
               grid->cell_size();
    }
    double volume() const { return std::exp2(-level * grid->n()); }

    bool in_window() const;
    /// true when the cube meets the window but is not contained in it
    bool clipped() const;

    friend bool operator==(const DyadicCube& a, const DyadicCube& b) {
        return a.level == b.level && a.index == b.index;
    }
};

/// cube of the given level containing the given mesh cell; nullopt when that
/// cube is clipped by the window
std::optional<DyadicCube> cube_at_cell(const GridPtr& grid, int level,
                                       const std::array<int64_t, 2>& cell);

/// index range [lo, hi] of in-window cubes of a level, per dimension
std::pair<int64_t, int64_t> level_index_range(const GridSpec& grid, int level, int dim);

/// all in-window cubes of one level, in index order
std::vector<DyadicCube> level_cubes(const GridPtr& grid, int level);

/// rd(I, J) = d(I, J) / max(l(I), l(J)) in the l^inf metric, exact
Fraction relative_distance(const DyadicCube& I, const DyadicCube& J);

/// rd against the reference cube 2^N * [-1/2, 1/2)^n used by D(N)
Fraction relative_distance_to_reference(const DyadicCube& I, int N);

/// D(N): in-window cubes with 2^-N <= l(I) <= 2^N and rd(I, 2^N I) <= N
std::vector<DyadicCube> window_family(const GridPtr& grid, int N);

/// membership test matching window_family
bool in_window_family(const DyadicCube& I, int N);

struct GoodnessResult {
    bool good = true;
    /// set when the scan ran out of represented coarser cubes while the cube
    /// still looked good; the infinite-grid answer could differ
    bool truncated = false;
};

/// good/bad classification; bad iff some represented coarser cube I' with
/// l(I') >= 2^r l(I) has d(I, boundary(I')) <= 2 l(I)^g l(I')^(1-g),
/// g = delta / (2(2n+delta))
GoodnessResult is_good(const DyadicCube& I, int r = 2, double delta = 1.0);

}  // namespace dyadlab
