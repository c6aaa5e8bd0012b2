#pragma once

#include <map>
#include <tuple>

#include "dyadlab/mesh.hpp"

namespace dyadlab {

// Key for coefficient maps: fixed iteration order (level, index, eta) keeps
// sums reproducible.
struct CubeKey {
    int level = 0;
    std::array<int64_t, 2> index{0, 0};

    friend bool operator<(const CubeKey& a, const CubeKey& b) {
        return std::tie(a.level, a.index) < std::tie(b.level, b.index);
    }
    friend bool operator==(const CubeKey& a, const CubeKey& b) {
        return a.level == b.level && a.index == b.index;
    }
};
inline CubeKey key_of(const DyadicCube& c) { return CubeKey{c.level, c.index}; }

struct HaarKey {
    CubeKey cube;
    unsigned eta = 1;  // 1 .. 2^n - 1; the non-cancellative eta = 0 is separate

    friend bool operator<(const HaarKey& a, const HaarKey& b) {
        return std::tie(a.cube, a.eta) < std::tie(b.cube, b.eta);
    }
};

/// map (cube, eta != 0) -> <f, h_I^eta>
class HaarCoeffs {
  public:
    explicit HaarCoeffs(GridPtr grid) : grid_(std::move(grid)) {}

    const GridPtr& grid() const { return grid_; }
    void set(const HaarKey& k, double v) { m_[k] = v; }
    double get(const HaarKey& k) const {
        auto it = m_.find(k);
        return it == m_.end() ? 0.0 : it->second;
    }
    const std::map<HaarKey, double>& entries() const { return m_; }
    std::size_t size() const { return m_.size(); }

  private:
    GridPtr grid_;
    std::map<HaarKey, double> m_;
};

/// expansion with the window remainder needed for an exact round trip; on the
/// standard grid the remainder is the level -M averages
struct HaarExpansion {
    HaarCoeffs coeffs;
    MeshFunction mean;
};

/// L^2-normalized Haar function h_I^eta; eta = 0 gives |I|^{-1/2} 1_I
MeshFunction haar_eval(const DyadicCube& I, unsigned eta);

/// <f, h_I^eta> straight from the pyramid (eta != 0 wants children at a
/// represented level)
double haar_coefficient(const AveragePyramid& pyr, const DyadicCube& I, unsigned eta);

HaarExpansion expand(const MeshFunction& f);
MeshFunction reconstruct(const HaarCoeffs& coeffs, const MeshFunction& mean);

/// sum of squared coefficients (all eta)
double coefficient_energy(const HaarCoeffs& coeffs);

/// E_{2^m} f: averages over the in-window cubes of side 2^m; cells under no
/// such cube are passed through unchanged
MeshFunction dyadic_average(const MeshFunction& f, int side_exponent);

/// martingale difference Delta_Q f (k = 0) and the depth-k block Delta_Q^k f
MeshFunction martingale_block(const MeshFunction& f, const DyadicCube& Q, int k);

/// S_D^k f = (sum_Q |Delta_Q^k f|^2)^{1/2}
MeshFunction square_function(const MeshFunction& f, int k);

struct Projection {
    MeshFunction p;     ///< P_N f
    MeshFunction perp;  ///< f - P_N f
};

/// Haar-coefficient restriction to D(N); exact on dyadic data (computed via
/// child/parent averages, no square roots)
Projection project(const MeshFunction& f, int N);

}  // namespace dyadlab
