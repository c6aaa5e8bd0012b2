#pragma once

#include <vector>

#include "dyadlab/grid.hpp"

namespace dyadlab {

// Piecewise-constant function on the finest cells of the window.  The finest
// cells carry no random shift (all represented shifts are multiples of the
// cell size), so every grid over the same (n, L, M) shares this mesh and
// every represented cube is an exact union of cells.
class MeshFunction {
  public:
    explicit MeshFunction(GridPtr grid, double fill = 0.0);

    const GridPtr& grid() const { return grid_; }
    int64_t size() const { return static_cast<int64_t>(v_.size()); }
    int64_t cells_per_dim() const { return grid_->cells_per_dim(); }

    double& operator[](int64_t i) { return v_[static_cast<std::size_t>(i)]; }
    double operator[](int64_t i) const { return v_[static_cast<std::size_t>(i)]; }
    double& at(int64_t ix, int64_t iy) { return v_[static_cast<std::size_t>(flat(ix, iy))]; }
    double at(int64_t ix, int64_t iy) const { return v_[static_cast<std::size_t>(flat(ix, iy))]; }
    int64_t flat(int64_t ix, int64_t iy) const { return ix + cells_per_dim() * iy; }

    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    /// coordinate of the low corner of cell index i along one axis
    double cell_lo(int64_t i) const { return (static_cast<double>(i) - wu()) * grid_->cell_size(); }
    double cell_center(int64_t i) const {
        return (static_cast<double>(i) - wu() + 0.5) * grid_->cell_size();
    }
    double cell_volume() const;

    MeshFunction& operator+=(const MeshFunction& g);
    MeshFunction& operator-=(const MeshFunction& g);
    MeshFunction& operator*=(double a);
    friend MeshFunction operator+(MeshFunction f, const MeshFunction& g) { return f += g; }
    friend MeshFunction operator-(MeshFunction f, const MeshFunction& g) { return f -= g; }
    friend MeshFunction operator*(double a, MeshFunction f) { return f *= a; }

    MeshFunction pointwise_product(const MeshFunction& g) const;
    MeshFunction abs() const;

    double integral() const;
    double inner(const MeshFunction& g) const;
    /// plain L^p norm (0 < p < inf) or sup norm (p = inf)
    double lp_norm(double p) const;
    double sup_norm() const;
    double max_abs_diff(const MeshFunction& g) const;

  private:
    GridPtr grid_;
    std::vector<double> v_;
    double wu() const { return static_cast<double>(grid_->window_units()); }
};

void check_same_mesh(const MeshFunction& f, const MeshFunction& g, const char* where);

/// same cell values viewed through another grid over the same mesh
MeshFunction rebind(const MeshFunction& f, GridPtr grid);

/// pointwise |f|^e (sign dropped; used for weight powers)
MeshFunction power_transform(const MeshFunction& f, double e);

/// indicator of [a, b) per axis (n = 1: one interval; n = 2: a box), where
/// a and b must be multiples of the cell size
MeshFunction indicator(GridPtr grid, const std::array<double, 2>& lo,
                       const std::array<double, 2>& hi);

enum class PowerSampling {
    FarEndpoint,  ///< sample |x|^-beta at the cell corner farthest from 0
    CellAverage,  ///< exact cell average where integrable, far corner at the singular cell
    Midpoint,
};

/// |x|^alpha on the mesh (n = 1), one-sided when positive_side is set
MeshFunction power_function(GridPtr grid, double alpha, bool positive_side,
                            PowerSampling sampling);

MeshFunction random_mesh(GridPtr grid, uint64_t seed);

// Per-level cube sums of cell values; averages divide by exact powers of two.
// Cubes clipped by the window carry no entry.
class AveragePyramid {
  public:
    AveragePyramid(const MeshFunction& f);

    bool valid(int level, const std::array<int64_t, 2>& index) const;
    double sum(int level, const std::array<int64_t, 2>& index) const;
    double average(int level, const std::array<int64_t, 2>& index) const;
    double cube_integral(int level, const std::array<int64_t, 2>& index) const;
    const GridPtr& grid() const { return grid_; }

  private:
    GridPtr grid_;
    // per level (offset by +M): values indexed by (m - lo) flattened
    struct Level {
        std::array<int64_t, 2> lo, hi;
        std::vector<double> sums;
        int64_t count0 = 0;
    };
    std::vector<Level> levels_;
    const Level& level_data(int level) const {
        return levels_[static_cast<std::size_t>(level + grid_->M())];
    }
};

}  // namespace dyadlab
