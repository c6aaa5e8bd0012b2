#include "dyadlab/weights.hpp"

#include <algorithm>
#include <cmath>

namespace dyadlab {

Weight::Weight(MeshFunction w) : w_(std::move(w)) {
    for (int64_t i = 0; i < w_.size(); ++i)
        require(w_[i] > 0.0 && std::isfinite(w_[i]),
                "weight: values must be strictly positive and finite");
}

std::vector<std::pair<double, double>> Weight::integrability_report(
    const std::vector<double>& lambdas) const {
    std::vector<std::pair<double, double>> out;
    out.reserve(lambdas.size());
    for (double lam : lambdas) {
        long double s = 0.0L;
        for (int64_t i = 0; i < w_.size(); ++i)
            s += std::pow(static_cast<long double>(w_[i]), -lam);
        out.emplace_back(lam, static_cast<double>(s) * w_.cell_volume());
    }
    return out;
}

Weight power_weight(GridPtr grid, double alpha, PowerSampling sampling) {
    return Weight(power_function(std::move(grid), alpha, /*positive_side=*/false, sampling));
}

Weight product_weight(const Weight& a, const Weight& b) {
    return Weight(a.mesh().pointwise_product(b.mesh()));
}

namespace {

int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}
int64_t ceil_div(int64_t a, int64_t b) { return -floor_div(-a, b); }

// One dyadic cube family over the mesh: either the grid itself or one of the
// {0, 1/3}^n translated lattices D_alpha = {2^-k([0,1)^n + m + (-1)^k a)}.
// Geometry is carried in "tripled units" (thirds of a mesh cell), exact for
// both kinds.
struct CubeFamily {
    GridPtr grid;
    bool shifted = false;
    std::array<int, 2> alpha{0, 0};  // thirds, per dimension

    int sigma(int level) const { return (level % 2 == 0) ? 1 : -1; }

    int64_t side3(int level) const { return 3 * grid->side_units(level); }

    int64_t corner3(int level, int64_t m, int dim) const {
        const int64_t s = grid->side_units(level);
        if (!shifted) return 3 * (m * s + grid->shift_units(level, dim));
        return s * (3 * m + sigma(level) * alpha[static_cast<std::size_t>(dim)]);
    }

    // base index of the two children along one axis
    int64_t child_base(int parent_level, int64_t m, int dim) const {
        if (!shifted) return 2 * m + grid->omega_bit(parent_level + 1, dim);
        return 2 * m + sigma(parent_level) * alpha[static_cast<std::size_t>(dim)];
    }

    // in-window index range along one axis
    std::pair<int64_t, int64_t> index_range(int level, int dim) const {
        if (!shifted) return level_index_range(*grid, level, dim);
        const int64_t s = grid->side_units(level);
        const int64_t W3 = 3 * grid->window_units();
        const int sa = sigma(level) * alpha[static_cast<std::size_t>(dim)];
        // corner3 = s(3m + sa) in [-W3, W3 - 3s]
        const int64_t lo = ceil_div(-W3 / s - sa, 3);
        const int64_t hi = floor_div(W3 / s - sa, 3) - 1;
        return {lo, hi};
    }

    // cube fully inside the sub-window [-2^Mp, 2^Mp)^n?
    bool inside_subwindow(int level, const std::array<int64_t, 2>& m, int Mp) const {
        const int64_t half3 = 3 * (int64_t(1) << (grid->L() + Mp));
        const int64_t s3 = side3(level);
        for (int d = 0; d < grid->n(); ++d) {
            const int64_t c = corner3(level, m[static_cast<std::size_t>(d)], d);
            if (c < -half3 || c + s3 > half3) return false;
        }
        return true;
    }
};

std::vector<CubeFamily> make_families(const GridPtr& grid, const ApOptions& opts) {
    std::vector<CubeFamily> fams;
    fams.push_back(CubeFamily{grid, false, {0, 0}});
    if (opts.include_shifted_families) {
        const int n = grid->n();
        for (int mask = 0; mask < (1 << n); ++mask)
            fams.push_back(CubeFamily{grid, true, {mask & 1, (mask >> 1) & 1}});
    }
    return fams;
}

// Per-level aggregates of a value array over one family: sum weighted by the
// covered cell fraction, true min and max over meeting cells.
struct FamilyStats {
    struct Level {
        std::array<int64_t, 2> lo{0, 0}, hi{0, 0};
        int64_t count0 = 0;
        std::vector<double> sum, mn, mx;
        std::size_t at(const std::array<int64_t, 2>& m) const {
            return static_cast<std::size_t>((m[0] - lo[0]) + (m[1] - lo[1]) * count0);
        }
    };
    std::vector<Level> levels;  // index level + M
    const Level& of(int level, int M) const {
        return levels[static_cast<std::size_t>(level + M)];
    }
};

FamilyStats build_stats(const CubeFamily& fam, const std::vector<double>& vals) {
    const auto& g = *fam.grid;
    const int n = g.n();
    const int64_t C = g.cells_per_dim();
    FamilyStats st;
    st.levels.resize(static_cast<std::size_t>(g.L() + g.M() + 1));
    for (int level = g.L(); level >= -g.M(); --level) {
        auto& lv = st.levels[static_cast<std::size_t>(level + g.M())];
        for (int d = 0; d < 2; ++d) {
            if (d < n) {
                const auto [lo, hi] = fam.index_range(level, d);
                lv.lo[static_cast<std::size_t>(d)] = lo;
                lv.hi[static_cast<std::size_t>(d)] = hi;
            }
        }
        lv.count0 = lv.hi[0] - lv.lo[0] + 1;
        const int64_t count1 = n == 2 ? lv.hi[1] - lv.lo[1] + 1 : 1;
        const std::size_t total = static_cast<std::size_t>(lv.count0 * count1);
        lv.sum.assign(total, 0.0);
        lv.mn.assign(total, 0.0);
        lv.mx.assign(total, 0.0);

        if (level == g.L()) {
            // base cubes overlap at most two cells per axis
            auto axis_cover = [&](int64_t m, int dim) {
                const int64_t c3 = fam.corner3(level, m, dim) + 3 * g.window_units();
                const int64_t j = floor_div(c3, 3);
                const int64_t rem = c3 - 3 * j;  // 0, 1 or 2
                // (cell, fraction) pairs covering [c3, c3 + 3)
                std::array<std::pair<int64_t, double>, 2> cov{
                    std::pair<int64_t, double>{j, (3.0 - rem) / 3.0},
                    std::pair<int64_t, double>{j + 1, rem / 3.0}};
                return cov;
            };
            auto visit = [&](const std::array<int64_t, 2>& m) {
                const auto cx = axis_cover(m[0], 0);
                double s = 0.0, mnv = 0.0, mxv = 0.0;
                bool first = true;
                auto absorb = [&](int64_t cell, double frac) {
                    if (frac <= 0.0 || cell < 0) return;
                    const double v = vals[static_cast<std::size_t>(cell)];
                    s += v * frac;
                    if (first) {
                        mnv = mxv = v;
                        first = false;
                    } else {
                        mnv = std::min(mnv, v);
                        mxv = std::max(mxv, v);
                    }
                };
                if (n == 1) {
                    for (const auto& [j, frac] : cx)
                        if (j < C) absorb(j, frac);
                } else {
                    const auto cy = axis_cover(m[1], 1);
                    for (const auto& [jy, fy] : cy)
                        for (const auto& [jx, fx] : cx)
                            if (jx < C && jy < C && fx > 0.0 && fy > 0.0)
                                absorb(jx + C * jy, fx * fy);
                }
                const std::size_t k = lv.at(m);
                lv.sum[k] = s;
                lv.mn[k] = mnv;
                lv.mx[k] = mxv;
            };
            if (n == 1) {
                for (int64_t m = lv.lo[0]; m <= lv.hi[0]; ++m) visit({m, 0});
            } else {
                for (int64_t m1 = lv.lo[1]; m1 <= lv.hi[1]; ++m1)
                    for (int64_t m0 = lv.lo[0]; m0 <= lv.hi[0]; ++m0) visit({m0, m1});
            }
            continue;
        }
        const auto& child = st.levels[static_cast<std::size_t>(level + 1 + g.M())];
        auto combine = [&](const std::array<int64_t, 2>& m) {
            const int64_t b0 = fam.child_base(level, m[0], 0);
            const int64_t b1 = n == 2 ? fam.child_base(level, m[1], 1) : 0;
            double s = 0.0, mnv = 0.0, mxv = 0.0;
            bool first = true;
            for (int q = 0; q < (1 << n); ++q) {
                const std::array<int64_t, 2> cm{b0 + (q & 1), b1 + ((q >> 1) & 1)};
                const std::size_t k = child.at(cm);
                s += child.sum[k];
                if (first) {
                    mnv = child.mn[k];
                    mxv = child.mx[k];
                    first = false;
                } else {
                    mnv = std::min(mnv, child.mn[k]);
                    mxv = std::max(mxv, child.mx[k]);
                }
            }
            const std::size_t k = lv.at(m);
            lv.sum[k] = s;
            lv.mn[k] = mnv;
            lv.mx[k] = mxv;
        };
        if (n == 1) {
            for (int64_t m = lv.lo[0]; m <= lv.hi[0]; ++m) combine({m, 0});
        } else {
            for (int64_t m1 = lv.lo[1]; m1 <= lv.hi[1]; ++m1)
                for (int64_t m0 = lv.lo[0]; m0 <= lv.hi[0]; ++m0) combine({m0, m1});
        }
    }
    return st;
}

double cube_cells(const GridSpec& g, int level) {
    const double per = static_cast<double>(g.side_units(level));
    return g.n() == 2 ? per * per : per;
}

std::vector<double> pow_values(const MeshFunction& w, double e) {
    std::vector<double> out(w.values().size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(w.values()[i], e);
    return out;
}

// Evaluate sup over all cubes (optionally restricted to a sub-window) of a
// per-cube functional assembled from several family stats.
template <typename Fn>
double family_sup(const std::vector<CubeFamily>& fams,
                  const std::vector<std::vector<FamilyStats>>& stats, int Mp, Fn&& fn) {
    double best = 0.0;
    for (std::size_t fi = 0; fi < fams.size(); ++fi) {
        const auto& fam = fams[fi];
        const auto& g = *fam.grid;
        for (int level = -g.M(); level <= g.L(); ++level) {
            const auto& lv0 = stats[fi][0].of(level, g.M());
            auto visit = [&](const std::array<int64_t, 2>& m) {
                if (Mp < g.M() && !fam.inside_subwindow(level, m, Mp)) return;
                best = std::max(best, fn(stats[fi], level, m, cube_cells(g, level)));
            };
            if (g.n() == 1) {
                for (int64_t m = lv0.lo[0]; m <= lv0.hi[0]; ++m) visit({m, 0});
            } else {
                for (int64_t m1 = lv0.lo[1]; m1 <= lv0.hi[1]; ++m1)
                    for (int64_t m0 = lv0.lo[0]; m0 <= lv0.hi[0]; ++m0) visit({m0, m1});
            }
        }
    }
    return best;
}

ApReport classify(std::vector<double> by_window, int M, const ApOptions& opts) {
    ApReport rep;
    rep.by_window = std::move(by_window);
    rep.constant = rep.by_window.back();
    rep.window_exponent = M;
    double ratio = 1.0;
    for (std::size_t i = 1; i < rep.by_window.size(); ++i)
        if (rep.by_window[i - 1] > 0.0)
            ratio = std::max(ratio, rep.by_window[i] / rep.by_window[i - 1]);
    rep.growth_ratio = ratio;
    rep.finite = ratio < opts.growth_threshold;
    return rep;
}

// shared harness: compute the per-cube functional sup at the growth windows
template <typename Fn>
ApReport windowed_sup_report(const GridPtr& grid, const ApOptions& opts,
                             const std::vector<std::vector<FamilyStats>>& stats,
                             const std::vector<CubeFamily>& fams, Fn&& fn) {
    const int M = grid->M();
    std::vector<double> by_window;
    const int k0 = std::max(1, M - opts.growth_windows + 1);
    for (int Mp = k0; Mp <= M; ++Mp)
        by_window.push_back(family_sup(fams, stats, Mp, fn));
    return classify(std::move(by_window), M, opts);
}

}  // namespace

ApReport ap_constant(const Weight& w, double p, const ApOptions& opts) {
    require(p >= 1.0 && std::isfinite(p), "ap_constant: p must lie in [1, inf)");
    const GridPtr& grid = w.grid();
    const auto fams = make_families(grid, opts);
    std::vector<std::vector<FamilyStats>> stats(fams.size());
    const bool endpoint = p == 1.0;
    const double dual = endpoint ? 0.0 : 1.0 - p / (p - 1.0);  // 1 - p'
    for (std::size_t fi = 0; fi < fams.size(); ++fi) {
        stats[fi].push_back(build_stats(fams[fi], w.mesh().values()));
        if (!endpoint) stats[fi].push_back(build_stats(fams[fi], pow_values(w.mesh(), dual)));
    }
    auto fn = [&](const std::vector<FamilyStats>& st, int level,
                  const std::array<int64_t, 2>& m, double cells) {
        const auto& a = st[0].of(level, grid->M());
        const double avg_w = a.sum[a.at(m)] / cells;
        if (endpoint) {
            const double mn = a.mn[a.at(m)];
            return avg_w / mn;
        }
        const auto& b = st[1].of(level, grid->M());
        const double avg_dual = b.sum[b.at(m)] / cells;
        return avg_w * std::pow(avg_dual, p - 1.0);
    };
    return windowed_sup_report(grid, opts, stats, fams, fn);
}

ApReport multilinear_ap_constant(const std::vector<Weight>& ws, const std::vector<double>& ps,
                                 const ApOptions& opts) {
    require(!ws.empty() && ws.size() == ps.size(),
            "multilinear_ap_constant: need matching weights and exponents");
    const GridPtr& grid = ws[0].grid();
    const std::size_t m = ws.size();
    double inv_p = 0.0;
    for (double pi : ps) {
        require(pi >= 1.0, "multilinear_ap_constant: exponents must lie in [1, inf]");
        if (!std::isinf(pi)) inv_p += 1.0 / pi;
    }
    const bool p_infinite = inv_p == 0.0;
    const double p = p_infinite ? INFINITY : 1.0 / inv_p;

    MeshFunction wprod = ws[0].mesh();
    for (std::size_t i = 1; i < m; ++i) wprod = wprod.pointwise_product(ws[i].mesh());

    const auto fams = make_families(grid, opts);
    // slot 0: w^p (or w itself when p = inf, used through the max stat);
    // slot 1+i: w_i^{-p_i'} (unused for p_i = 1, which reads the min stat of w_i)
    std::vector<std::vector<FamilyStats>> stats(fams.size());
    for (std::size_t fi = 0; fi < fams.size(); ++fi) {
        stats[fi].push_back(build_stats(
            fams[fi], p_infinite ? wprod.values() : pow_values(wprod, p)));
        for (std::size_t i = 0; i < m; ++i) {
            if (ps[i] == 1.0) {
                stats[fi].push_back(build_stats(fams[fi], ws[i].mesh().values()));
            } else {
                const double pi_dual = std::isinf(ps[i]) ? 1.0 : ps[i] / (ps[i] - 1.0);
                stats[fi].push_back(
                    build_stats(fams[fi], pow_values(ws[i].mesh(), -pi_dual)));
            }
        }
    }
    auto fn = [&, p_infinite, p](const std::vector<FamilyStats>& st, int level,
                                 const std::array<int64_t, 2>& mm, double cells) {
        const auto& lead = st[0].of(level, grid->M());
        double acc;
        if (p_infinite)
            acc = lead.mx[lead.at(mm)];
        else
            acc = std::pow(lead.sum[lead.at(mm)] / cells, 1.0 / p);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& si = st[1 + i].of(level, grid->M());
            if (ps[i] == 1.0) {
                acc /= si.mn[si.at(mm)];
            } else {
                const double pi_dual = std::isinf(ps[i]) ? 1.0 : ps[i] / (ps[i] - 1.0);
                acc *= std::pow(si.sum[si.at(mm)] / cells, 1.0 / pi_dual);
            }
        }
        return acc;
    };
    return windowed_sup_report(grid, opts, stats, fams, fn);
}

FactorizationReport factorization_check(const std::vector<Weight>& ws,
                                        const std::vector<double>& ps, const ApOptions& opts) {
    FactorizationReport rep;
    rep.joint = multilinear_ap_constant(ws, ps, opts);
    const double m = static_cast<double>(ws.size());
    double inv_p = 0.0;
    for (double pi : ps)
        if (!std::isinf(pi)) inv_p += 1.0 / pi;

    MeshFunction wprod = ws[0].mesh();
    for (std::size_t i = 1; i < ws.size(); ++i) wprod = wprod.pointwise_product(ws[i].mesh());

    auto push = [&](MeshFunction values, double q, std::string label) {
        rep.constituents.push_back(ap_constant(Weight(std::move(values)), q, opts));
        rep.labels.push_back(std::move(label));
    };
    if (inv_p == 0.0) {
        // p = inf reading: w^{-1/m} in A_1
        push(power_transform(wprod, -1.0 / m), 1.0, "w^(-1/m) in A_1");
    } else {
        const double p = 1.0 / inv_p;
        push(power_transform(wprod, p), m * p, "w^p in A_(mp)");
    }
    for (std::size_t i = 0; i < ws.size(); ++i) {
        if (ps[i] == 1.0) {
            push(power_transform(ws[i].mesh(), 1.0 / m), 1.0, "w_i^(1/m) in A_1");
        } else {
            const double dual = std::isinf(ps[i]) ? 1.0 : ps[i] / (ps[i] - 1.0);
            push(power_transform(ws[i].mesh(), -dual), m * dual,
                 "w_i^(-p_i') in A_(m p_i')");
        }
    }
    rep.all_constituents_finite = true;
    for (const auto& c : rep.constituents) rep.all_constituents_finite &= c.finite;
    rep.agreement = rep.joint.finite == rep.all_constituents_finite;
    return rep;
}

MeshFunction bilinear_maximal(const MeshFunction& f1, const MeshFunction& f2,
                              const ApOptions& opts) {
    check_same_mesh(f1, f2, "bilinear_maximal");
    const GridPtr& grid = f1.grid();
    const auto& g = *grid;
    const auto fams = make_families(grid, opts);
    MeshFunction out(grid);
    const int64_t C = g.cells_per_dim();
    std::vector<double> a1(f1.values().size()), a2(f2.values().size());
    for (std::size_t i = 0; i < a1.size(); ++i) {
        a1[i] = std::fabs(f1.values()[i]);
        a2[i] = std::fabs(f2.values()[i]);
    }
    for (const auto& fam : fams) {
        const FamilyStats s1 = build_stats(fam, a1);
        const FamilyStats s2 = build_stats(fam, a2);
        for (int level = -g.M(); level <= g.L(); ++level) {
            const auto& l1 = s1.of(level, g.M());
            const auto& l2 = s2.of(level, g.M());
            const double cells = cube_cells(g, level);
            const int64_t s3 = fam.side3(level);
            auto visit = [&](const std::array<int64_t, 2>& m) {
                const double v =
                    (l1.sum[l1.at(m)] / cells) * (l2.sum[l2.at(m)] / cells);
                // paint the covered cells
                const int64_t cx0 = fam.corner3(level, m[0], 0) + 3 * g.window_units();
                const int64_t x_lo = floor_div(cx0, 3);
                const int64_t x_hi = floor_div(cx0 + s3 - 1, 3);
                if (g.n() == 1) {
                    for (int64_t x = std::max<int64_t>(x_lo, 0);
                         x <= std::min(x_hi, C - 1); ++x)
                        out[x] = std::max(out[x], v);
                } else {
                    const int64_t cy0 = fam.corner3(level, m[1], 1) + 3 * g.window_units();
                    const int64_t y_lo = floor_div(cy0, 3);
                    const int64_t y_hi = floor_div(cy0 + s3 - 1, 3);
                    for (int64_t y = std::max<int64_t>(y_lo, 0);
                         y <= std::min(y_hi, C - 1); ++y)
                        for (int64_t x = std::max<int64_t>(x_lo, 0);
                             x <= std::min(x_hi, C - 1); ++x)
                            out.at(x, y) = std::max(out.at(x, y), v);
                }
            };
            auto visit_all = [&]() {
                if (g.n() == 1) {
                    for (int64_t m = l1.lo[0]; m <= l1.hi[0]; ++m) visit({m, 0});
                } else {
                    for (int64_t m1 = l1.lo[1]; m1 <= l1.hi[1]; ++m1)
                        for (int64_t m0 = l1.lo[0]; m0 <= l1.hi[0]; ++m0) visit({m0, m1});
                }
            };
            visit_all();
        }
    }
    return out;
}

MeshFunction sharp_maximal(const MeshFunction& f, double lambda, const ApOptions& opts) {
    if (lambda > 1.0)
        throw UnsupportedError("sharp_maximal: lambda > 1 is not supported (exact inner "
                               "minimization needs lambda <= 1)");
    require(lambda > 0.0, "sharp_maximal: lambda must be positive");
    const GridPtr& grid = f.grid();
    const auto& g = *grid;
    const auto fams = make_families(grid, opts);
    MeshFunction out(grid);
    const int64_t C = g.cells_per_dim();
    for (const auto& fam : fams) {
        for (int level = -g.M(); level <= g.L(); ++level) {
            const auto [lo0, hi0] = fam.index_range(level, 0);
            const auto [lo1, hi1] =
                g.n() == 2 ? fam.index_range(level, 1) : std::pair<int64_t, int64_t>{0, 0};
            const int64_t s3 = fam.side3(level);
            auto visit = [&](const std::array<int64_t, 2>& m) {
                // gather (value, cell-fraction) pairs on the cube
                std::vector<std::pair<double, double>> vals;
                const int64_t cx0 = fam.corner3(level, m[0], 0) + 3 * g.window_units();
                const int64_t x_lo = floor_div(cx0, 3);
                const int64_t x_hi = floor_div(cx0 + s3 - 1, 3);
                auto frac = [&](int64_t j, int64_t c0) {
                    const int64_t cell_lo = 3 * j, cell_hi = 3 * j + 3;
                    const int64_t olo = std::max(cell_lo, c0);
                    const int64_t ohi = std::min(cell_hi, c0 + s3);
                    return static_cast<double>(ohi - olo) / 3.0;
                };
                if (g.n() == 1) {
                    for (int64_t x = std::max<int64_t>(x_lo, 0);
                         x <= std::min(x_hi, C - 1); ++x)
                        vals.emplace_back(f[x], frac(x, cx0));
                } else {
                    const int64_t cy0 = fam.corner3(level, m[1], 1) + 3 * g.window_units();
                    const int64_t y_lo = floor_div(cy0, 3);
                    const int64_t y_hi = floor_div(cy0 + s3 - 1, 3);
                    for (int64_t y = std::max<int64_t>(y_lo, 0);
                         y <= std::min(y_hi, C - 1); ++y)
                        for (int64_t x = std::max<int64_t>(x_lo, 0);
                             x <= std::min(x_hi, C - 1); ++x)
                            vals.emplace_back(f.at(x, y), frac(x, cx0) * frac(y, cy0));
                }
                double total = 0.0;
                for (const auto& [v, fr] : vals) total += fr;
                // inf over c of the lambda-oscillation, attained at a data value
                double best = INFINITY;
                for (const auto& [c, fr_c] : vals) {
                    (void)fr_c;
                    double acc = 0.0;
                    for (const auto& [v, fr] : vals)
                        if (v != c) acc += std::pow(std::fabs(v - c), lambda) * fr;
                    best = std::min(best, acc / total);
                }
                const double osc = std::pow(best, 1.0 / lambda);
                // paint
                if (g.n() == 1) {
                    for (int64_t x = std::max<int64_t>(x_lo, 0);
                         x <= std::min(x_hi, C - 1); ++x)
                        out[x] = std::max(out[x], osc);
                } else {
                    const int64_t cy0 = fam.corner3(level, m[1], 1) + 3 * g.window_units();
                    const int64_t y_lo = floor_div(cy0, 3);
                    const int64_t y_hi = floor_div(cy0 + s3 - 1, 3);
                    for (int64_t y = std::max<int64_t>(y_lo, 0);
                         y <= std::min(y_hi, C - 1); ++y)
                        for (int64_t x = std::max<int64_t>(x_lo, 0);
                             x <= std::min(x_hi, C - 1); ++x)
                            out.at(x, y) = std::max(out.at(x, y), osc);
                }
            };
            if (g.n() == 1) {
                for (int64_t m = lo0; m <= hi0; ++m) visit({m, 0});
            } else {
                for (int64_t m1 = lo1; m1 <= hi1; ++m1)
                    for (int64_t m0 = lo0; m0 <= hi0; ++m0) visit({m0, m1});
            }
        }
    }
    return out;
}

double bmo_lambda_norm(const MeshFunction& f, const Weight& w, double lambda) {
    const MeshFunction sharp = sharp_maximal(f, lambda);
    double best = 0.0;
    for (int64_t i = 0; i < sharp.size(); ++i)
        best = std::max(best, sharp[i] * w.mesh()[i]);
    return best;
}

InterpolationResult interpolate_weights(const std::vector<Weight>& ws,
                                        const std::vector<double>& ps,
                                        const std::vector<Weight>& vs,
                                        const std::vector<double>& ss, double theta,
                                        const ApOptions& opts) {
    require(theta > 0.0 && theta < 1.0, "interpolate_weights: theta must lie in (0, 1)");
    require(ws.size() == vs.size() && ws.size() == ps.size() && ps.size() == ss.size(),
            "interpolate_weights: mismatched inputs");
    InterpolationResult res;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        // w_i = u_i^{1-theta} v_i^theta  =>  u_i = (w_i v_i^-theta)^{1/(1-theta)}
        MeshFunction u(ws[i].grid());
        for (int64_t c = 0; c < u.size(); ++c)
            u[c] = std::pow(ws[i].mesh()[c] * std::pow(vs[i].mesh()[c], -theta),
                            1.0 / (1.0 - theta));
        res.us.emplace_back(std::move(u));
        // 1/p_i = (1-theta)/r_i + theta/s_i
        const double inv_s = std::isinf(ss[i]) ? 0.0 : 1.0 / ss[i];
        const double inv_p = std::isinf(ps[i]) ? 0.0 : 1.0 / ps[i];
        const double inv_r = (inv_p - theta * inv_s) / (1.0 - theta);
        if (inv_r < 0.0 || inv_r >= 1.0)
            throw ConfigError("interpolate_weights: exponent relation has no r in (1, inf]");
        res.rs.push_back(inv_r == 0.0 ? INFINITY : 1.0 / inv_r);
    }
    res.report = multilinear_ap_constant(res.us, res.rs, opts);
    return res;
}

AInfinityProbe a_infinity_probe(const Weight& w, const ApOptions& opts) {
    AInfinityProbe probe;
    for (double p : {1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0}) {
        const ApReport rep = ap_constant(w, p, opts);
        probe.lattice.emplace_back(p, rep.finite);
        if (rep.finite && probe.p_min == 0.0) probe.p_min = p;
    }
    return probe;
}

ReverseHolderReport reverse_holder_search(const Weight& w, const ApOptions& opts) {
    ReverseHolderReport rep;
    const GridPtr& grid = w.grid();
    const auto fams = make_families(grid, opts);
    for (double r : {1.1, 1.25, 1.5, 2.0, 3.0}) {
        std::vector<std::vector<FamilyStats>> stats(fams.size());
        for (std::size_t fi = 0; fi < fams.size(); ++fi) {
            stats[fi].push_back(build_stats(fams[fi], w.mesh().values()));
            stats[fi].push_back(build_stats(fams[fi], pow_values(w.mesh(), r)));
        }
        auto fn = [&](const std::vector<FamilyStats>& st, int level,
                      const std::array<int64_t, 2>& m, double cells) {
            const auto& a = st[0].of(level, grid->M());
            const auto& b = st[1].of(level, grid->M());
            const double avg_w = a.sum[a.at(m)] / cells;
            const double avg_r = std::pow(b.sum[b.at(m)] / cells, 1.0 / r);
            return avg_r / avg_w;
        };
        ApReport rrep = windowed_sup_report(grid, opts, stats, fams, fn);
        if (rrep.finite) rep.best_r = std::max(rep.best_r, r);
        rep.lattice.emplace_back(r, std::move(rrep));
    }
    return rep;
}

}  // namespace dyadlab
