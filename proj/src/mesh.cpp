#include "dyadlab/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace dyadlab {

namespace {
constexpr int64_t kMaxCells = int64_t(1) << 24;
}

MeshFunction::MeshFunction(GridPtr grid, double fill) : grid_(std::move(grid)) {
    const int64_t count = grid_->cell_count();
    require(count <= kMaxCells, "mesh: cell count exceeds 2^24; reduce L or M");
    v_.assign(static_cast<std::size_t>(count), fill);
}

double MeshFunction::cell_volume() const {
    const double u = grid_->cell_size();
    return grid_->n() == 2 ? u * u : u;
}

MeshFunction& MeshFunction::operator+=(const MeshFunction& g) {
    check_same_mesh(*this, g, "operator+=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += g.v_[i];
    return *this;
}

MeshFunction& MeshFunction::operator-=(const MeshFunction& g) {
    check_same_mesh(*this, g, "operator-=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= g.v_[i];
    return *this;
}

MeshFunction& MeshFunction::operator*=(double a) {
    for (auto& x : v_) x *= a;
    return *this;
}

MeshFunction MeshFunction::pointwise_product(const MeshFunction& g) const {
    check_same_mesh(*this, g, "pointwise_product");
    MeshFunction out(grid_);
    for (std::size_t i = 0; i < v_.size(); ++i) out.v_[i] = v_[i] * g.v_[i];
    return out;
}

MeshFunction MeshFunction::abs() const {
    MeshFunction out(grid_);
    for (std::size_t i = 0; i < v_.size(); ++i) out.v_[i] = std::fabs(v_[i]);
    return out;
}

double MeshFunction::integral() const {
    long double s = 0.0L;
    for (double x : v_) s += x;
    return static_cast<double>(s) * cell_volume();
}

double MeshFunction::inner(const MeshFunction& g) const {
    check_same_mesh(*this, g, "inner");
    long double s = 0.0L;
    for (std::size_t i = 0; i < v_.size(); ++i)
        s += static_cast<long double>(v_[i]) * g.v_[i];
    return static_cast<double>(s) * cell_volume();
}

double MeshFunction::lp_norm(double p) const {
    require(p > 0.0, "lp_norm: p must be positive");
    if (std::isinf(p)) return sup_norm();
    long double s = 0.0L;
    for (double x : v_) s += std::pow(std::fabs(static_cast<long double>(x)), p);
    return static_cast<double>(std::pow(s * cell_volume(), 1.0L / p));
}

double MeshFunction::sup_norm() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::fabs(x));
    return m;
}

double MeshFunction::max_abs_diff(const MeshFunction& g) const {
    check_same_mesh(*this, g, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) m = std::max(m, std::fabs(v_[i] - g.v_[i]));
    return m;
}

void check_same_mesh(const MeshFunction& f, const MeshFunction& g, const char* where) {
    if (!f.grid()->same_mesh(*g.grid()))
        throw GridMismatchError(std::string(where) + ": mesh mismatch");
}

MeshFunction rebind(const MeshFunction& f, GridPtr grid) {
    require(f.grid()->same_mesh(*grid), "rebind: mesh mismatch");
    MeshFunction out(std::move(grid));
    out.values() = f.values();
    return out;
}

MeshFunction power_transform(const MeshFunction& f, double e) {
    MeshFunction out(f.grid());
    for (int64_t i = 0; i < f.size(); ++i) out[i] = std::pow(std::fabs(f[i]), e);
    return out;
}

MeshFunction indicator(GridPtr grid, const std::array<double, 2>& lo,
                       const std::array<double, 2>& hi) {
    MeshFunction out(grid);
    const double u = grid->cell_size();
    const int64_t C = grid->cells_per_dim();
    std::array<int64_t, 2> ilo{0, 0}, ihi{0, 0};
    for (int d = 0; d < grid->n(); ++d) {
        const double a = lo[static_cast<std::size_t>(d)] / u;
        const double b = hi[static_cast<std::size_t>(d)] / u;
        if (std::rint(a) != a || std::rint(b) != b)
            throw AlignmentError("indicator: endpoints must be multiples of the cell size");
        ilo[static_cast<std::size_t>(d)] =
            std::clamp<int64_t>(static_cast<int64_t>(a) + grid->window_units(), 0, C);
        ihi[static_cast<std::size_t>(d)] =
            std::clamp<int64_t>(static_cast<int64_t>(b) + grid->window_units(), 0, C);
    }
    if (grid->n() == 1) {
        for (int64_t i = ilo[0]; i < ihi[0]; ++i) out[i] = 1.0;
    } else {
        for (int64_t iy = ilo[1]; iy < ihi[1]; ++iy)
            for (int64_t ix = ilo[0]; ix < ihi[0]; ++ix) out.at(ix, iy) = 1.0;
    }
    return out;
}

MeshFunction power_function(GridPtr grid, double alpha, bool positive_side,
                            PowerSampling sampling) {
    require(grid->n() == 1, "power_function: only n = 1 supported");
    MeshFunction out(grid);
    const double u = grid->cell_size();
    const int64_t C = grid->cells_per_dim();
    for (int64_t i = 0; i < C; ++i) {
        const double a = out.cell_lo(i);
        const double b = a + u;
        if (positive_side && b <= 0.0) continue;
        double v = 0.0;
        const bool singular = (a < 0.0 && b > 0.0) || a == 0.0 || b == 0.0;
        switch (sampling) {
            case PowerSampling::FarEndpoint: {
                const double far = std::max(std::fabs(a), std::fabs(b));
                v = std::pow(far, alpha);
                break;
            }
            case PowerSampling::Midpoint: {
                if (singular) {
                    const double far = std::max(std::fabs(a), std::fabs(b));
                    v = std::pow(far, alpha);
                } else {
                    v = std::pow(std::fabs(0.5 * (a + b)), alpha);
                }
                break;
            }
            case PowerSampling::CellAverage: {
                const double xlo = std::min(std::fabs(a), std::fabs(b));
                const double xhi = std::max(std::fabs(a), std::fabs(b));
                // integral of |x|^alpha over the cell (one-signed cells)
                if (singular) {
                    if (alpha > -1.0)
                        v = std::pow(xhi, alpha + 1.0) / ((alpha + 1.0) * u);
                    else
                        v = std::pow(xhi, alpha);  // non-integrable: far corner value
                } else if (alpha == -1.0) {
                    v = (std::log(xhi) - std::log(xlo)) / u;
                } else {
                    v = (std::pow(xhi, alpha + 1.0) - std::pow(xlo, alpha + 1.0)) /
                        ((alpha + 1.0) * u);
                }
                break;
            }
        }
        out[i] = v;
    }
    return out;
}

MeshFunction random_mesh(GridPtr grid, uint64_t seed) {
    MeshFunction out(grid);
    Rng rng(seed);
    for (int64_t i = 0; i < out.size(); ++i) out[i] = rng.normal();
    return out;
}

AveragePyramid::AveragePyramid(const MeshFunction& f) : grid_(f.grid()) {
    const auto& g = *grid_;
    levels_.resize(static_cast<std::size_t>(g.L() + g.M() + 1));
    for (int level = g.L(); level >= -g.M(); --level) {
        Level& lv = levels_[static_cast<std::size_t>(level + g.M())];
        for (int d = 0; d < 2; ++d) {
            if (d < g.n()) {
                const auto [lo, hi] = level_index_range(g, level, d);
                lv.lo[static_cast<std::size_t>(d)] = lo;
                lv.hi[static_cast<std::size_t>(d)] = hi;
            } else {
                lv.lo[static_cast<std::size_t>(d)] = 0;
                lv.hi[static_cast<std::size_t>(d)] = 0;
            }
        }
        lv.count0 = lv.hi[0] - lv.lo[0] + 1;
        const int64_t count1 = g.n() == 2 ? lv.hi[1] - lv.lo[1] + 1 : 1;
        lv.sums.assign(static_cast<std::size_t>(lv.count0 * count1), 0.0);

        if (level == g.L()) {
            // base level: one cube per cell (shift at the finest level is 0)
            for (int64_t i = 0; i < lv.count0 * count1; ++i)
                lv.sums[static_cast<std::size_t>(i)] = f[i];
            continue;
        }
        const Level& child = levels_[static_cast<std::size_t>(level + 1 + g.M())];
        // children of (level, m): indices 2m + omega_{level+1} + {0, 1} per dim
        auto child_base = [&](int64_t m, int d) {
            return 2 * m + g.omega_bit(level + 1, d);
        };
        if (g.n() == 1) {
            for (int64_t m = lv.lo[0]; m <= lv.hi[0]; ++m) {
                const int64_t c = child_base(m, 0);
                lv.sums[static_cast<std::size_t>(m - lv.lo[0])] =
                    child.sums[static_cast<std::size_t>(c - child.lo[0])] +
                    child.sums[static_cast<std::size_t>(c + 1 - child.lo[0])];
            }
        } else {
            for (int64_t m1 = lv.lo[1]; m1 <= lv.hi[1]; ++m1) {
                const int64_t c1 = child_base(m1, 1);
                for (int64_t m0 = lv.lo[0]; m0 <= lv.hi[0]; ++m0) {
                    const int64_t c0 = child_base(m0, 0);
                    double s = 0.0;
                    for (int q1 = 0; q1 < 2; ++q1)
                        for (int q0 = 0; q0 < 2; ++q0)
                            s += child.sums[static_cast<std::size_t>(
                                (c0 + q0 - child.lo[0]) +
                                (c1 + q1 - child.lo[1]) * child.count0)];
                    lv.sums[static_cast<std::size_t>((m0 - lv.lo[0]) +
                                                     (m1 - lv.lo[1]) * lv.count0)] = s;
                }
            }
        }
    }
}

bool AveragePyramid::valid(int level, const std::array<int64_t, 2>& index) const {
    if (level < -grid_->M() || level > grid_->L()) return false;
    const Level& lv = level_data(level);
    for (int d = 0; d < grid_->n(); ++d)
        if (index[static_cast<std::size_t>(d)] < lv.lo[static_cast<std::size_t>(d)] ||
            index[static_cast<std::size_t>(d)] > lv.hi[static_cast<std::size_t>(d)])
            return false;
    return true;
}

double AveragePyramid::sum(int level, const std::array<int64_t, 2>& index) const {
    const Level& lv = level_data(level);
    const int64_t i0 = index[0] - lv.lo[0];
    const int64_t i1 = grid_->n() == 2 ? index[1] - lv.lo[1] : 0;
    return lv.sums[static_cast<std::size_t>(i0 + i1 * lv.count0)];
}

double AveragePyramid::average(int level, const std::array<int64_t, 2>& index) const {
    const int64_t per_dim = grid_->side_units(level);
    const double cells =
        static_cast<double>(per_dim) * (grid_->n() == 2 ? static_cast<double>(per_dim) : 1.0);
    return sum(level, index) / cells;
}

double AveragePyramid::cube_integral(int level, const std::array<int64_t, 2>& index) const {
    const double u = grid_->cell_size();
    const double vol = grid_->n() == 2 ? u * u : u;
    return sum(level, index) * vol;
}

}  // namespace dyadlab
