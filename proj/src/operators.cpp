#include "dyadlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace dyadlab {

double BilinearOperator::pairing(const MeshFunction& f1, const MeshFunction& f2,
                                 const MeshFunction& g) const {
    return apply(f1, f2).inner(g);
}

// ---------------------------------------------------------------- sequences

void CoeffSequence::set(const DyadicCube& I, double v) {
    require(I.in_window(), "coeff sequence: cube not inside the window");
    b_[key_of(I)] = v;
}

double CoeffSequence::get(const CubeKey& k) const {
    auto it = b_.find(k);
    return it == b_.end() ? 0.0 : it->second;
}

CoeffSequence CoeffSequence::tower(const GridPtr& grid) {
    require(grid->n() == 1, "tower sequence: n = 1 only");
    CoeffSequence b(grid);
    // b on [0, 2^k) for -L <= k <= M, i.e. levels -M .. L; the level-L cube
    // has no cancellative Haar, stop at L-1
    for (int k = -(grid->L() - 1); k <= grid->M(); ++k) {
        DyadicCube I{grid, -k, {0, 0}};
        if (!I.in_window()) continue;
        b.set(I, std::exp2(0.5 * k));
    }
    return b;
}

CoeffSequence CoeffSequence::compact(const GridPtr& grid, int N0, uint64_t seed) {
    CoeffSequence b(grid);
    Rng rng(seed);
    for (const DyadicCube& I : window_family(grid, N0)) {
        if (I.level > grid->L() - 1) continue;
        b.set(I, rng.symmetric());
    }
    return b;
}

namespace {

// does I lie inside Q (same grid, dyadic nesting)?
bool cube_inside(const GridSpec& g, const CubeKey& I, const CubeKey& Q) {
    if (I.level < Q.level) return false;
    for (int d = 0; d < g.n(); ++d) {
        const int64_t ci = I.index[static_cast<std::size_t>(d)] * g.side_units(I.level) +
                           g.shift_units(I.level, d);
        const int64_t cq = Q.index[static_cast<std::size_t>(d)] * g.side_units(Q.level) +
                           g.shift_units(Q.level, d);
        if (ci < cq || ci + g.side_units(I.level) > cq + g.side_units(Q.level)) return false;
    }
    return true;
}

}  // namespace

double bmo_dyadic_norm(const CoeffSequence& b) {
    const auto& g = *b.grid();
    double best = 0.0;
    // candidate Q: ancestors of support cubes suffice, but the support is
    // small; scan all in-window cubes containing at least one entry
    for (int level = -g.M(); level <= g.L(); ++level) {
        for (const DyadicCube& Q : level_cubes(b.grid(), level)) {
            const CubeKey qk = key_of(Q);
            long double s = 0.0L;
            for (const auto& [ik, bv] : b.entries())
                if (cube_inside(g, ik, qk)) s += static_cast<long double>(bv) * bv;
            if (s > 0.0L) {
                const double ratio = static_cast<double>(s) / Q.volume();
                best = std::max(best, ratio);
            }
        }
    }
    return std::sqrt(best);
}

double cmo_tail(const CoeffSequence& b, int N) {
    const auto& g = *b.grid();
    double best = 0.0;
    for (int level = -g.M(); level <= g.L(); ++level) {
        for (const DyadicCube& Q : level_cubes(b.grid(), level)) {
            const CubeKey qk = key_of(Q);
            long double s = 0.0L;
            for (const auto& [ik, bv] : b.entries()) {
                if (!cube_inside(g, ik, qk)) continue;
                DyadicCube I{b.grid(), ik.level, ik.index};
                if (in_window_family(I, N)) continue;
                s += static_cast<long double>(bv) * bv;
            }
            if (s > 0.0L) best = std::max(best, static_cast<double>(s) / Q.volume());
        }
    }
    return best;
}

// ------------------------------------------------------------------- shifts

int family_index(const DyadicCube& Q) {
    const auto& g = *Q.grid;
    const int cap = 2 * (g.L() + g.M() + 2);
    for (int N = std::abs(Q.level); N <= cap; ++N)
        if (relative_distance_to_reference(Q, std::min(N, g.L() + g.M())).leq_int(N))
            return N;
    return cap;
}

double EnvelopeSpec::eval(const DyadicCube& Q) const {
    switch (kind) {
        case Kind::Zero:
            return 0.0;
        case Kind::One:
            return 1.0;
        case Kind::Compact:
            return std::exp2(-std::max(0, family_index(Q) - offset));
    }
    return 0.0;
}

namespace {

// index of the depth-d descendant of Q with local offset o per dimension
std::array<int64_t, 2> descendant_index(const GridSpec& g, const CubeKey& Q, int depth,
                                        const std::array<int64_t, 2>& local) {
    std::array<int64_t, 2> m{0, 0};
    for (int dim = 0; dim < g.n(); ++dim) {
        int64_t base = Q.index[static_cast<std::size_t>(dim)];
        for (int t = 1; t <= depth; ++t)
            base = 2 * base + g.omega_bit(Q.level + t, dim);
        m[static_cast<std::size_t>(dim)] = base + local[static_cast<std::size_t>(dim)];
    }
    return m;
}

int64_t local_count(int n, int depth) { return int64_t(1) << (n * depth); }

std::array<int64_t, 2> local_of(int n, int depth, int64_t flat) {
    if (n == 1) return {flat, 0};
    const int64_t per = int64_t(1) << depth;
    return {flat % per, flat / per};
}

constexpr int64_t kMaxShiftEntries = int64_t(1) << 24;

}  // namespace

ShiftTensor make_shift(const GridPtr& grid, int i, int j, int k, ShiftFlavor flavor,
                       const EnvelopeSpec& envelope, uint64_t seed) {
    require(i >= 0 && j >= 0 && k >= 0, "make_shift: depths must be nonnegative");
    const auto& g = *grid;
    ShiftTensor S{grid, i, j, k, flavor, envelope, seed, {}};
    // cancellative slots need children one level below the leaf cubes
    const int need_i = i + (flavor == ShiftFlavor::H0H ? 0 : 1);
    const int need_j = j + (flavor == ShiftFlavor::HH0 ? 0 : 1);
    const int max_level =
        g.L() - std::max({need_i, need_j, k + 1});
    require_resolution(max_level >= -g.M(), "make_shift: depths exceed the mesh resolution");

    const int n = g.n();
    const int64_t per_block = local_count(n, i) * local_count(n, j) * local_count(n, k);
    Rng rng(seed);
    int64_t total = 0;
    for (int level = -g.M(); level <= max_level; ++level) {
        for (const DyadicCube& Q : level_cubes(grid, level)) {
            const double F = envelope.eval(Q);
            ShiftTensor::Block blk;
            blk.q = key_of(Q);
            blk.envelope_value = F;
            if (F != 0.0) {
                total += per_block;
                require_resolution(total <= kMaxShiftEntries,
                                   "make_shift: tensor too large; reduce depths or the grid");
                blk.a.resize(static_cast<std::size_t>(per_block));
                // |I|^1/2 |J|^1/2 |K|^1/2 / |Q|^2 with sides 2^-(level+depth)
                const double scale =
                    std::exp2(-0.5 * n * (3.0 * level + i + j + k) + 2.0 * n * level);
                const double bound = F * scale;
                for (auto& a : blk.a) a = bound * rng.symmetric();
            }
            if (!blk.a.empty()) S.blocks.push_back(std::move(blk));
        }
    }
    return S;
}

namespace {

// <f, h~> for one slot: cancellative all-ones eta or the h^0 average form
double slot_coefficient(const AveragePyramid& pyr, const GridPtr& grid, const CubeKey& I,
                        bool cancellative) {
    DyadicCube cube{grid, I.level, I.index};
    const unsigned eta = cancellative ? (1u << grid->n()) - 1u : 0u;
    return haar_coefficient(pyr, cube, eta);
}

void add_haar_multiple(MeshFunction& out, const DyadicCube& K, double coef) {
    // coef * h_K with the all-ones eta; done via the sign pattern so powers
    // of two stay exact
    const auto& g = *out.grid();
    const double norm = std::exp2(0.5 * K.level * g.n());
    const int64_t s = K.side_units();
    const int64_t half = s / 2;
    const int64_t x0 = K.corner_units(0) + g.window_units();
    const double v = coef * norm;
    if (g.n() == 1) {
        for (int64_t t = 0; t < half; ++t) out[x0 + t] += v;
        for (int64_t t = half; t < s; ++t) out[x0 + t] -= v;
        return;
    }
    const int64_t y0 = K.corner_units(1) + g.window_units();
    for (int64_t ty = 0; ty < s; ++ty)
        for (int64_t tx = 0; tx < s; ++tx) {
            const int sx = tx >= half ? -1 : 1;
            const int sy = ty >= half ? -1 : 1;
            out.at(x0 + tx, y0 + ty) += v * sx * sy;
        }
}

}  // namespace

MeshFunction apply_shift(const ShiftTensor& S, const MeshFunction& f1,
                         const MeshFunction& f2) {
    check_same_mesh(f1, f2, "apply_shift");
    require(S.grid->same_mesh(*f1.grid()), "apply_shift: mesh mismatch");
    const auto& g = *S.grid;
    const int n = g.n();
    const AveragePyramid p1(rebind(f1, S.grid));
    const AveragePyramid p2(rebind(f2, S.grid));
    MeshFunction out(S.grid);
    const int64_t ni = local_count(n, S.i);
    const int64_t nj = local_count(n, S.j);
    const int64_t nk = local_count(n, S.k);
    const bool canc1 = S.flavor != ShiftFlavor::H0H;
    const bool canc2 = S.flavor != ShiftFlavor::HH0;
    for (const auto& blk : S.blocks) {
        std::vector<double> c1(static_cast<std::size_t>(ni));
        std::vector<double> c2(static_cast<std::size_t>(nj));
        for (int64_t a = 0; a < ni; ++a) {
            const CubeKey I{blk.q.level + S.i,
                            descendant_index(g, blk.q, S.i, local_of(n, S.i, a))};
            c1[static_cast<std::size_t>(a)] = slot_coefficient(p1, S.grid, I, canc1);
        }
        for (int64_t b = 0; b < nj; ++b) {
            const CubeKey J{blk.q.level + S.j,
                            descendant_index(g, blk.q, S.j, local_of(n, S.j, b))};
            c2[static_cast<std::size_t>(b)] = slot_coefficient(p2, S.grid, J, canc2);
        }
        for (int64_t c = 0; c < nk; ++c) {
            double s = 0.0;
            for (int64_t a = 0; a < ni; ++a)
                for (int64_t b = 0; b < nj; ++b)
                    s += blk.a[static_cast<std::size_t>((a * nj + b) * nk + c)] *
                         c1[static_cast<std::size_t>(a)] * c2[static_cast<std::size_t>(b)];
            if (s == 0.0) continue;
            const CubeKey K{blk.q.level + S.k,
                            descendant_index(g, blk.q, S.k, local_of(n, S.k, c))};
            add_haar_multiple(out, DyadicCube{S.grid, K.level, K.index}, s);
        }
    }
    return out;
}

double shift_block_excess(const ShiftTensor& S, const MeshFunction& f1,
                          const MeshFunction& f2) {
    const auto& g = *S.grid;
    const AveragePyramid pa1(rebind(f1.abs(), S.grid));
    const AveragePyramid pa2(rebind(f2.abs(), S.grid));
    double worst = -INFINITY;
    for (const auto& blk : S.blocks) {
        // assemble A_Q(f1, f2) on a scratch mesh restricted to Q
        ShiftTensor one = S;
        one.blocks.assign(1, blk);
        const MeshFunction block_out = apply_shift(one, f1, f2);
        const double bound = blk.envelope_value * pa1.average(blk.q.level, blk.q.index) *
                             pa2.average(blk.q.level, blk.q.index);
        const DyadicCube Q{S.grid, blk.q.level, blk.q.index};
        const int64_t s = Q.side_units();
        const int64_t x0 = Q.corner_units(0) + g.window_units();
        if (g.n() == 1) {
            for (int64_t t = 0; t < s; ++t)
                worst = std::max(worst, std::fabs(block_out[x0 + t]) - bound);
        } else {
            const int64_t y0 = Q.corner_units(1) + g.window_units();
            for (int64_t ty = 0; ty < s; ++ty)
                for (int64_t tx = 0; tx < s; ++tx)
                    worst = std::max(worst,
                                     std::fabs(block_out.at(x0 + tx, y0 + ty)) - bound);
        }
    }
    return worst;
}

double shift_coefficient_ratio(const ShiftTensor& S) {
    const auto& g = *S.grid;
    const int n = g.n();
    double worst = 0.0;
    for (const auto& blk : S.blocks) {
        const double scale =
            std::exp2(-0.5 * n * (3.0 * blk.q.level + S.i + S.j + S.k) + 2.0 * n * blk.q.level);
        const double bound = blk.envelope_value * scale;
        for (double a : blk.a)
            if (bound > 0.0) worst = std::max(worst, std::fabs(a) / bound);
    }
    return worst;
}

// ---------------------------------------------------------------- operators

namespace {

class ZeroOp final : public BilinearOperator {
  public:
    explicit ZeroOp(GridPtr grid) : grid_(std::move(grid)) {}
    MeshFunction apply(const MeshFunction& f1, const MeshFunction& f2) const override {
        check_same_mesh(f1, f2, "zero");
        return MeshFunction(grid_);
    }
    const GridPtr& grid() const override { return grid_; }
    std::string kind() const override { return "zero"; }

  private:
    GridPtr grid_;
};

class ShiftOp final : public BilinearOperator {
  public:
    explicit ShiftOp(ShiftTensor S) : S_(std::move(S)) {}
    MeshFunction apply(const MeshFunction& f1, const MeshFunction& f2) const override {
        return apply_shift(S_, f1, f2);
    }
    const GridPtr& grid() const override { return S_.grid; }
    std::string kind() const override { return "shift"; }
    const ShiftTensor& tensor() const { return S_; }

  private:
    ShiftTensor S_;
};

class ParaproductOp final : public BilinearOperator {
  public:
    ParaproductOp(CoeffSequence b, ParaproductVariant variant)
        : b_(std::move(b)), variant_(variant) {}

    MeshFunction apply(const MeshFunction& f1, const MeshFunction& f2) const override {
        check_same_mesh(f1, f2, "paraproduct");
        require(b_.grid()->same_mesh(*f1.grid()), "paraproduct: mesh mismatch");
        const AveragePyramid p1(rebind(f1, b_.grid()));
        const AveragePyramid p2(rebind(f2, b_.grid()));
        MeshFunction out(b_.grid());
        for (const auto& [ik, bv] : b_.entries()) {
            if (bv == 0.0) continue;
            const DyadicCube I{b_.grid(), ik.level, ik.index};
            switch (variant_) {
                case ParaproductVariant::Pi:
                    add_haar_multiple(out, I,
                                      bv * p1.average(ik.level, ik.index) *
                                          p2.average(ik.level, ik.index));
                    break;
                case ParaproductVariant::Star1: {
                    const double c = bv * slot_coefficient(p1, b_.grid(), ik, true) *
                                     p2.average(ik.level, ik.index);
                    add_indicator_over_volume(out, I, c);
                    break;
                }
                case ParaproductVariant::Star2: {
                    const double c = bv * p1.average(ik.level, ik.index) *
                                     slot_coefficient(p2, b_.grid(), ik, true);
                    add_indicator_over_volume(out, I, c);
                    break;
                }
            }
        }
        return out;
    }
    const GridPtr& grid() const override { return b_.grid(); }
    std::string kind() const override {
        switch (variant_) {
            case ParaproductVariant::Pi:
                return "paraproduct";
            case ParaproductVariant::Star1:
                return "paraproduct_star1";
            default:
                return "paraproduct_star2";
        }
    }

  private:
    CoeffSequence b_;
    ParaproductVariant variant_;

    static void add_indicator_over_volume(MeshFunction& out, const DyadicCube& I, double c) {
        const auto& g = *out.grid();
        const double v = c / I.volume();
        const int64_t s = I.side_units();
        const int64_t x0 = I.corner_units(0) + g.window_units();
        if (g.n() == 1) {
            for (int64_t t = 0; t < s; ++t) out[x0 + t] += v;
            return;
        }
        const int64_t y0 = I.corner_units(1) + g.window_units();
        for (int64_t ty = 0; ty < s; ++ty)
            for (int64_t tx = 0; tx < s; ++tx) out.at(x0 + tx, y0 + ty) += v;
    }
};

class RankOneOp final : public BilinearOperator {
  public:
    explicit RankOneOp(DyadicCube I0) : I0_(std::move(I0)) {
        require(I0_.in_window(), "rank_one: cube not inside the window");
        require_resolution(I0_.level + 1 <= I0_.grid->L(), "rank_one: cube has no children");
    }
    MeshFunction apply(const MeshFunction& f1, const MeshFunction& f2) const override {
        check_same_mesh(f1, f2, "rank_one");
        const AveragePyramid p1(rebind(f1, I0_.grid));
        const AveragePyramid p2(rebind(f2, I0_.grid));
        const CubeKey k0 = key_of(I0_);
        const double c = slot_coefficient(p1, I0_.grid, k0, true) *
                         slot_coefficient(p2, I0_.grid, k0, true);
        MeshFunction out(I0_.grid);
        const auto& g = *I0_.grid;
        const int64_t s = I0_.side_units();
        const int64_t x0 = I0_.corner_units(0) + g.window_units();
        if (g.n() == 1) {
            for (int64_t t = 0; t < s; ++t) out[x0 + t] = c;
        } else {
            const int64_t y0 = I0_.corner_units(1) + g.window_units();
            for (int64_t ty = 0; ty < s; ++ty)
                for (int64_t tx = 0; tx < s; ++tx) out.at(x0 + tx, y0 + ty) = c;
        }
        return out;
    }
    const GridPtr& grid() const override { return I0_.grid; }
    std::string kind() const override { return "rank_one"; }

  private:
    DyadicCube I0_;
};

class KernelOp final : public BilinearOperator {
  public:
    KernelOp(GridPtr grid, KernelFn kernel, double epsilon, std::string name)
        : grid_(std::move(grid)), kernel_(std::move(kernel)), eps_(epsilon),
          name_(std::move(name)) {
        require(grid_->n() == 1, "kernel_operator: n = 1 only");
        require_resolution(eps_ >= grid_->cell_size(),
                           "kernel_operator: epsilon below one cell diameter");
    }

    MeshFunction apply(const MeshFunction& f1, const MeshFunction& f2) const override {
        check_same_mesh(f1, f2, "kernel");
        MeshFunction out(grid_);
        const auto [y_lo, y_hi] = support(f1);
        const auto [z_lo, z_hi] = support(f2);
        if (y_lo > y_hi || z_lo > z_hi) return out;
        const double u = grid_->cell_size();
        const double vol2 = u * u;
        parallel_for(out.size(), [&](int64_t lo, int64_t hi) {
            for (int64_t ix = lo; ix < hi; ++ix) {
                const double x = out.cell_center(ix);
                long double acc = 0.0L;
                for (int64_t iy = y_lo; iy <= y_hi; ++iy) {
                    const double fy = f1[iy];
                    if (fy == 0.0) continue;
                    const double y = out.cell_center(iy);
                    const double dy = std::fabs(x - y);
                    for (int64_t iz = z_lo; iz <= z_hi; ++iz) {
                        const double fz = f2[iz];
                        if (fz == 0.0) continue;
                        const double z = out.cell_center(iz);
                        if (dy + std::fabs(x - z) <= eps_) continue;
                        acc += kernel_(x, y, z) * fy * fz;
                    }
                }
                out[ix] = static_cast<double>(acc) * vol2;
            }
        });
        return out;
    }

    double pairing(const MeshFunction& f1, const MeshFunction& f2,
                   const MeshFunction& g) const override {
        check_same_mesh(f1, f2, "kernel");
        const auto [x_lo, x_hi] = support(g);
        const auto [y_lo, y_hi] = support(f1);
        const auto [z_lo, z_hi] = support(f2);
        if (x_lo > x_hi || y_lo > y_hi || z_lo > z_hi) return 0.0;
        const double u = grid_->cell_size();
        long double acc = 0.0L;
        for (int64_t ix = x_lo; ix <= x_hi; ++ix) {
            const double gx = g[ix];
            if (gx == 0.0) continue;
            const double x = g.cell_center(ix);
            for (int64_t iy = y_lo; iy <= y_hi; ++iy) {
                const double fy = f1[iy];
                if (fy == 0.0) continue;
                const double y = g.cell_center(iy);
                const double dy = std::fabs(x - y);
                for (int64_t iz = z_lo; iz <= z_hi; ++iz) {
                    const double fz = f2[iz];
                    if (fz == 0.0) continue;
                    const double z = g.cell_center(iz);
                    if (dy + std::fabs(x - z) <= eps_) continue;
                    acc += kernel_(x, y, z) * fy * fz * gx;
                }
            }
        }
        return static_cast<double>(acc) * u * u * u;
    }

    const GridPtr& grid() const override { return grid_; }
    std::string kind() const override { return "kernel:" + name_; }

  private:
    GridPtr grid_;
    KernelFn kernel_;
    double eps_;
    std::string name_;

    static std::pair<int64_t, int64_t> support(const MeshFunction& f) {
        int64_t lo = f.size(), hi = -1;
        for (int64_t i = 0; i < f.size(); ++i)
            if (f[i] != 0.0) {
                lo = std::min(lo, i);
                hi = std::max(hi, i);
            }
        return {lo, hi};
    }
};

class PseudoDiffOp final : public BilinearOperator {
  public:
    PseudoDiffOp(GridPtr grid, SymbolSpec symbol, double Xi)
        : grid_(std::move(grid)), sym_(std::move(symbol)), xi_(Xi) {
        require(grid_->n() == 1, "pseudodiff_operator: n = 1 only");
        period_ = std::exp2(grid_->M() + 1);
        const int64_t C = grid_->cells_per_dim();
        m_max_ = static_cast<int64_t>(std::floor(xi_ * period_ + 1e-9));
        require(m_max_ <= C / 2, "pseudodiff_operator: cutoff above the mesh Nyquist");
        m_lo_ = -m_max_;
        m_hi_ = m_max_ == C / 2 ? m_max_ - 1 : m_max_;  // full lattice: exact inversion
    }

    MeshFunction apply(const MeshFunction& f1, const MeshFunction& f2) const override {
        check_same_mesh(f1, f2, "pseudodiff");
        const auto h1 = transform(f1);
        const auto h2 = transform(f2);
        MeshFunction out(grid_);
        const double dxi = 1.0 / period_;
        if (sym_.separable) {
            const auto g1 = inverse_with_multiplier(h1, sym_.in_xi);
            const auto g2 = inverse_with_multiplier(h2, sym_.in_eta);
            for (int64_t i = 0; i < out.size(); ++i)
                out[i] = sym_.in_x(out.cell_center(i)) * g1[static_cast<std::size_t>(i)] *
                         g2[static_cast<std::size_t>(i)];
            return out;
        }
        parallel_for(out.size(), [&](int64_t lo, int64_t hi) {
            for (int64_t i = lo; i < hi; ++i) {
                const double x = out.cell_center(i);
                std::complex<double> acc = 0.0;
                for (int64_t mx = m_lo_; mx <= m_hi_; ++mx) {
                    const double xi = static_cast<double>(mx) / period_;
                    const auto fx = h1[static_cast<std::size_t>(mx - m_lo_)];
                    for (int64_t me = m_lo_; me <= m_hi_; ++me) {
                        const double eta = static_cast<double>(me) / period_;
                        const double phase = 2.0 * kPi * x * (xi + eta);
                        acc += sym_.eval(x, xi, eta) * fx *
                               h2[static_cast<std::size_t>(me - m_lo_)] *
                               std::complex<double>(std::cos(phase), std::sin(phase));
                    }
                }
                out[i] = acc.real() * dxi * dxi;
            }
        });
        return out;
    }

    const GridPtr& grid() const override { return grid_; }
    std::string kind() const override { return "pseudodiff:" + sym_.name; }

  private:
    GridPtr grid_;
    SymbolSpec sym_;
    double xi_;
    double period_ = 0.0;
    int64_t m_lo_ = 0, m_hi_ = 0, m_max_ = 0;
    static constexpr double kPi = 3.14159265358979323846;

    std::vector<std::complex<double>> transform(const MeshFunction& f) const {
        std::vector<std::complex<double>> out(static_cast<std::size_t>(m_hi_ - m_lo_ + 1));
        const double u = grid_->cell_size();
        parallel_for(static_cast<int64_t>(out.size()), [&](int64_t lo, int64_t hi) {
            for (int64_t t = lo; t < hi; ++t) {
                const double xi = static_cast<double>(m_lo_ + t) / period_;
                std::complex<double> acc = 0.0;
                for (int64_t i = 0; i < f.size(); ++i) {
                    if (f[i] == 0.0) continue;
                    const double phase = -2.0 * kPi * f.cell_center(i) * xi;
                    acc += f[i] * std::complex<double>(std::cos(phase), std::sin(phase));
                }
                out[static_cast<std::size_t>(t)] = acc * u;
            }
        });
        return out;
    }

    std::vector<double> inverse_with_multiplier(
        const std::vector<std::complex<double>>& h,
        const std::function<double(double)>& mult) const {
        std::vector<double> out(static_cast<std::size_t>(grid_->cell_count()));
        const double dxi = 1.0 / period_;
        parallel_for(static_cast<int64_t>(out.size()), [&](int64_t lo, int64_t hi) {
            for (int64_t i = lo; i < hi; ++i) {
                const double x =
                    (static_cast<double>(i) - static_cast<double>(grid_->window_units()) + 0.5) *
                    grid_->cell_size();
                std::complex<double> acc = 0.0;
                for (int64_t m = m_lo_; m <= m_hi_; ++m) {
                    const double xi = static_cast<double>(m) / period_;
                    const double phase = 2.0 * kPi * x * xi;
                    acc += h[static_cast<std::size_t>(m - m_lo_)] *
                           std::complex<double>(std::cos(phase), std::sin(phase)) * mult(xi);
                }
                out[static_cast<std::size_t>(i)] = acc.real() * dxi;
            }
        });
        return out;
    }
};

class CommutatorOp final : public BilinearOperator {
  public:
    CommutatorOp(MeshFunction b, OpPtr inner, int slot)
        : b_(std::move(b)), inner_(std::move(inner)), slot_(slot) {
        require(slot_ == 1 || slot_ == 2, "commutator: slot must be 1 or 2");
    }
    MeshFunction apply(const MeshFunction& f1, const MeshFunction& f2) const override {
        MeshFunction first = inner_->apply(f1, f2).pointwise_product(b_);
        MeshFunction second = slot_ == 1 ? inner_->apply(b_.pointwise_product(f1), f2)
                                         : inner_->apply(f1, b_.pointwise_product(f2));
        first -= second;
        return first;
    }
    const GridPtr& grid() const override { return inner_->grid(); }
    std::string kind() const override { return "commutator"; }

  private:
    MeshFunction b_;
    OpPtr inner_;
    int slot_;
};

class ProjectedOp final : public BilinearOperator {
  public:
    ProjectedOp(int N, OpPtr inner) : N_(N), inner_(std::move(inner)) {}
    MeshFunction apply(const MeshFunction& f1, const MeshFunction& f2) const override {
        return project(inner_->apply(f1, f2), N_).perp;
    }
    const GridPtr& grid() const override { return inner_->grid(); }
    std::string kind() const override { return "projected"; }

  private:
    int N_;
    OpPtr inner_;
};

class CombinationOp final : public BilinearOperator {
  public:
    CombinationOp(std::vector<OpPtr> ops, std::vector<double> coefs, std::string label)
        : ops_(std::move(ops)), coefs_(std::move(coefs)), label_(std::move(label)) {
        require(!ops_.empty() && ops_.size() == coefs_.size(),
                "combination: need matching operators and coefficients");
    }
    MeshFunction apply(const MeshFunction& f1, const MeshFunction& f2) const override {
        MeshFunction out = ops_[0]->apply(f1, f2);
        out *= coefs_[0];
        for (std::size_t t = 1; t < ops_.size(); ++t) {
            MeshFunction term = ops_[t]->apply(f1, f2);
            term *= coefs_[t];
            out += term;
        }
        return out;
    }
    const GridPtr& grid() const override { return ops_[0]->grid(); }
    std::string kind() const override { return label_; }

  private:
    std::vector<OpPtr> ops_;
    std::vector<double> coefs_;
    std::string label_;
};

}  // namespace

OpPtr zero_operator(GridPtr grid) { return std::make_shared<ZeroOp>(std::move(grid)); }
OpPtr shift_operator(ShiftTensor S) { return std::make_shared<ShiftOp>(std::move(S)); }
OpPtr paraproduct_operator(CoeffSequence b, ParaproductVariant variant) {
    return std::make_shared<ParaproductOp>(std::move(b), variant);
}
OpPtr rank_one_operator(const DyadicCube& I0) { return std::make_shared<RankOneOp>(I0); }
OpPtr kernel_operator(GridPtr grid, KernelFn kernel, double epsilon, std::string name) {
    return std::make_shared<KernelOp>(std::move(grid), std::move(kernel), epsilon,
                                      std::move(name));
}
OpPtr pseudodiff_operator(GridPtr grid, SymbolSpec symbol, double Xi) {
    return std::make_shared<PseudoDiffOp>(std::move(grid), std::move(symbol), Xi);
}
OpPtr commutator_operator(MeshFunction b, OpPtr inner, int slot) {
    return std::make_shared<CommutatorOp>(std::move(b), std::move(inner), slot);
}
OpPtr projected_operator(int N, OpPtr inner) {
    return std::make_shared<ProjectedOp>(N, std::move(inner));
}
OpPtr combination_operator(std::vector<OpPtr> ops, std::vector<double> coefs,
                           std::string kind_label) {
    return std::make_shared<CombinationOp>(std::move(ops), std::move(coefs),
                                           std::move(kind_label));
}

KernelFn riesz_kernel_1d() {
    return [](double x, double y, double z) {
        const double a = x - y, b = x - z;
        const double denom = std::pow(a * a + b * b, 1.5);
        return (a + b) / denom;
    };
}

KernelFn gaussian_damped_kernel_1d() {
    return [](double x, double y, double z) {
        const double s = std::fabs(x - y) + std::fabs(x - z);
        return std::exp(-(x * x + y * y + z * z)) / (s * s);
    };
}

SymbolSpec SymbolSpec::one() {
    SymbolSpec s;
    s.name = "one";
    s.class_tag = "S^0_{1,0}";
    return s;
}

SymbolSpec SymbolSpec::gaussian_compact() {
    SymbolSpec s;
    s.name = "gaussian_compact";
    s.class_tag = "K^0_{1,0}";
    s.in_x = [](double x) { return std::exp(-x * x); };
    s.in_xi = [](double v) { return std::exp(-v * v); };
    s.in_eta = [](double v) { return std::exp(-v * v); };
    return s;
}

SymbolSpec SymbolSpec::gaussian_multiplier() {
    SymbolSpec s;
    s.name = "gaussian_multiplier";
    s.class_tag = "S^0_{1,0}";
    s.in_xi = [](double v) { return std::exp(-v * v); };
    s.in_eta = [](double v) { return std::exp(-v * v); };
    return s;
}

}  // namespace dyadlab
