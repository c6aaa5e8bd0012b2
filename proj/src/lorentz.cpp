#include "dyadlab/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dyadlab {

MeasureSpec::MeasureSpec(MeshFunction w) : w_(std::move(w)) {
    for (int64_t i = 0; i < w_->size(); ++i)
        require((*w_)[i] > 0.0 && std::isfinite((*w_)[i]),
                "measure: weight must be strictly positive and finite on every cell");
}

double distribution(const MeshFunction& f, double t, const MeasureSpec& mu) {
    require(t > 0.0, "distribution: t must be positive");
    long double s = 0.0L;
    for (int64_t i = 0; i < f.size(); ++i)
        if (std::fabs(f[i]) > t) s += mu.cell_measure(f, i);
    return static_cast<double>(s);
}

namespace {

// distinct |values| in decreasing order with cumulated measures:
// out[k] = (v_k, mu(|f| >= v_k))
std::vector<std::pair<double, double>> rearrangement_steps(const MeshFunction& f,
                                                           const MeasureSpec& mu) {
    std::vector<std::pair<double, double>> cells;
    cells.reserve(static_cast<std::size_t>(f.size()));
    for (int64_t i = 0; i < f.size(); ++i) {
        const double v = std::fabs(f[i]);
        if (v > 0.0) cells.emplace_back(v, mu.cell_measure(f, i));
    }
    std::sort(cells.begin(), cells.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::pair<double, double>> steps;
    long double cum = 0.0L;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        cum += cells[i].second;
        if (i + 1 == cells.size() || cells[i + 1].first != cells[i].first)
            steps.emplace_back(cells[i].first, static_cast<double>(cum));
    }
    return steps;
}

}  // namespace

NormResult lorentz_norm(const MeshFunction& f, double p, double q, const MeasureSpec& mu) {
    require(p > 0.0 && std::isfinite(p), "lorentz_norm: need 0 < p < inf");
    require(q > 0.0, "lorentz_norm: need 0 < q <= inf");
    NormResult res;
    res.p = p;
    res.q = q;
    const auto steps = rearrangement_steps(f, mu);
    if (steps.empty()) return res;
    if (std::isinf(q)) {
        // sup over the jump points of the step distribution function
        double best = 0.0;
        for (const auto& [v, m] : steps) best = std::max(best, v * std::pow(m, 1.0 / p));
        res.value = best;
        return res;
    }
    // int_0^inf [t d(t)^{1/p}]^q dt/t pieced over value intervals
    // (v_{k+1}, v_k), where d = mu(|f| >= v_k)
    long double acc = 0.0L;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const double v_hi = steps[k].first;
        const double v_lo = k + 1 < steps.size() ? steps[k + 1].first : 0.0;
        const long double m = steps[k].second;
        acc += std::pow(m, static_cast<long double>(q / p)) *
               (std::pow(static_cast<long double>(v_hi), static_cast<long double>(q)) -
                std::pow(static_cast<long double>(v_lo), static_cast<long double>(q))) /
               q;
    }
    res.value = static_cast<double>(std::pow(static_cast<long double>(p), 1.0L / p) *
                                    std::pow(acc, 1.0L / q));
    return res;
}

MeshFunction translate(const MeshFunction& f, const std::array<int64_t, 2>& h_cells) {
    MeshFunction out(f.grid());
    const int64_t C = f.cells_per_dim();
    if (f.grid()->n() == 1) {
        for (int64_t i = 0; i < C; ++i) {
            const int64_t j = i - h_cells[0];
            if (j >= 0 && j < C) out[i] = f[j];
        }
        return out;
    }
    for (int64_t iy = 0; iy < C; ++iy) {
        const int64_t jy = iy - h_cells[1];
        if (jy < 0 || jy >= C) continue;
        for (int64_t ix = 0; ix < C; ++ix) {
            const int64_t jx = ix - h_cells[0];
            if (jx >= 0 && jx < C) out.at(ix, iy) = f.at(jx, jy);
        }
    }
    return out;
}

MeshFunction translate_real(const MeshFunction& f, const std::array<double, 2>& h) {
    const double u = f.grid()->cell_size();
    std::array<int64_t, 2> hc{0, 0};
    for (int d = 0; d < f.grid()->n(); ++d) {
        const double cells = h[static_cast<std::size_t>(d)] / u;
        if (std::rint(cells) != cells)
            throw AlignmentError("translate: shift must be a lattice vector");
        hc[static_cast<std::size_t>(d)] = static_cast<int64_t>(cells);
    }
    return translate(f, hc);
}

MeshFunction tail_restrict(const MeshFunction& f, double A) {
    require(A > 0.0, "tail_restrict: A must be positive");
    MeshFunction out = f;
    const int64_t C = f.cells_per_dim();
    if (f.grid()->n() == 1) {
        for (int64_t i = 0; i < C; ++i)
            if (std::fabs(f.cell_center(i)) < A) out[i] = 0.0;
        return out;
    }
    for (int64_t iy = 0; iy < C; ++iy)
        for (int64_t ix = 0; ix < C; ++ix)
            if (std::max(std::fabs(f.cell_center(ix)), std::fabs(f.cell_center(iy))) < A)
                out.at(ix, iy) = 0.0;
    return out;
}

namespace {

// integral of g over [a, b] intersected with the window, from prefix sums:
// prefix[i] = sum of the first i cell values
double range_integral_1d(const std::vector<double>& prefix, const MeshFunction& f, double a,
                         double b) {
    const double u = f.grid()->cell_size();
    const double W = static_cast<double>(f.grid()->window_units()) * u;
    a = std::max(a, -W);
    b = std::min(b, W);
    if (b <= a) return 0.0;
    const double ca = (a + W) / u;
    const double cb = (b + W) / u;
    const int64_t ia = static_cast<int64_t>(std::floor(ca));
    const int64_t ib = static_cast<int64_t>(std::floor(cb));
    const int64_t n = f.size();
    auto cell_val = [&](int64_t i) { return (i >= 0 && i < n) ? f[i] : 0.0; };
    if (ia == ib) return cell_val(ia) * (b - a);
    double s = cell_val(ia) * (static_cast<double>(ia + 1) * u - (a + W));
    s += (prefix[static_cast<std::size_t>(std::min(ib, n))] -
          prefix[static_cast<std::size_t>(std::min(ia + 1, n))]) *
         u;
    if (ib < n) s += cell_val(ib) * ((b + W) - static_cast<double>(ib) * u);
    return s;
}

}  // namespace

MeshFunction ball_average(const MeshFunction& f, double r) {
    const auto& g = *f.grid();
    require_resolution(r >= g.cell_size(), "ball_average: r below the mesh resolution");
    MeshFunction out(f.grid());
    const double u = g.cell_size();
    const double W = static_cast<double>(g.window_units()) * u;
    if (g.n() == 1) {
        std::vector<double> prefix(static_cast<std::size_t>(f.size()) + 1, 0.0);
        long double acc = 0.0L;
        for (int64_t i = 0; i < f.size(); ++i) {
            acc += f[i];
            prefix[static_cast<std::size_t>(i + 1)] = static_cast<double>(acc);
        }
        for (int64_t i = 0; i < f.size(); ++i) {
            const double x = f.cell_center(i);
            const double a = std::max(x - r, -W);
            const double b = std::min(x + r, W);
            out[i] = range_integral_1d(prefix, f, a, b) / (b - a);
        }
        return out;
    }
    // 2D: balls are axis cubes, so the overlap integral factors per axis
    const int64_t C = g.cells_per_dim();
    auto box_sum = [&](double ax, double bx, double ay, double by) {
        auto line = [&](double a, double b, auto&& fn) {
            const int64_t ia = static_cast<int64_t>(std::floor((a + W) / u));
            const int64_t ib = static_cast<int64_t>(std::floor((b + W) / u));
            double s = 0.0;
            for (int64_t i = std::max<int64_t>(ia, 0); i <= std::min<int64_t>(ib, C - 1); ++i) {
                const double lo = std::max(a, static_cast<double>(i) * u - W);
                const double hi = std::min(b, static_cast<double>(i + 1) * u - W);
                if (hi > lo) s += fn(i) * (hi - lo);
            }
            return s;
        };
        return line(ay, by, [&](int64_t iy) {
            return line(ax, bx, [&](int64_t ix) { return f.at(ix, iy); });
        });
    };
    parallel_for(f.size(), [&](int64_t lo, int64_t hi) {
        for (int64_t cell = lo; cell < hi; ++cell) {
            const int64_t ix = cell % C, iy = cell / C;
            const double x = f.cell_center(ix), y = f.cell_center(iy);
            const double ax = std::max(x - r, -W), bx = std::min(x + r, W);
            const double ay = std::max(y - r, -W), by = std::min(y + r, W);
            out[cell] = box_sum(ax, bx, ay, by) / ((bx - ax) * (by - ay));
        }
    });
    return out;
}

MeshFunction averaged_modulus(const MeshFunction& f, double r, double a) {
    const auto& g = *f.grid();
    require_resolution(r >= g.cell_size(), "averaged_modulus: r below the mesh resolution");
    require(a > 0.0 && a <= 1.0, "averaged_modulus: exponent a must lie in (0, 1]");
    require(g.n() == 1, "averaged_modulus: only n = 1 supported");
    MeshFunction out(f.grid());
    const double u = g.cell_size();
    const int64_t n = f.size();
    // support range of f, to skip the all-zero region quickly
    int64_t first_nz = n, last_nz = -1;
    for (int64_t i = 0; i < n; ++i)
        if (f[i] != 0.0) {
            first_nz = std::min(first_nz, i);
            last_nz = std::max(last_nz, i);
        }
    const int64_t reach = static_cast<int64_t>(std::ceil(r / u)) + 1;
    parallel_for(n, [&](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i < hi; ++i) {
            const double vi = f[i];
            if (vi == 0.0 && (i + reach < first_nz || i - reach > last_nz)) {
                out[i] = 0.0;
                continue;
            }
            const double x = f.cell_center(i);
            // y-intervals on which f(x - y) is the value of one source cell
            long double acc = 0.0L;
            const int64_t jlo = std::max<int64_t>(-1, i - reach);
            const int64_t jhi = std::min<int64_t>(n, i + reach);
            for (int64_t j = jlo; j <= jhi; ++j) {
                // x - y in cell j (or outside the window for j = -1, n)
                double ya, yb;
                if (j < 0) {
                    ya = x + static_cast<double>(f.grid()->window_units()) * u;
                    yb = r;
                } else if (j >= n) {
                    ya = -r;
                    yb = x - static_cast<double>(f.grid()->window_units()) * u;
                    // note: x - y >= W  <=>  y <= x - W
                } else {
                    ya = x - (f.cell_lo(j) + u);
                    yb = x - f.cell_lo(j);
                }
                const double lo_y = std::max(ya, -r);
                const double hi_y = std::min(yb, r);
                if (hi_y <= lo_y) continue;
                const double fv = (j >= 0 && j < n) ? f[j] : 0.0;
                const double d = std::fabs(fv - vi);
                if (d != 0.0) acc += std::pow(d, a) * (hi_y - lo_y);
            }
            out[i] = static_cast<double>(std::pow(acc / (2.0L * r), 1.0L / a));
        }
    });
    return out;
}

KolmogorovSides kolmogorov_sides(const MeshFunction& f, const MeshFunction& mask, double s,
                                 double t, const MeasureSpec& mu) {
    require(0.0 < s && s < t && std::isfinite(t), "kolmogorov: need 0 < s < t < inf");
    check_same_mesh(f, mask, "kolmogorov");
    MeshFunction restricted(f.grid());
    long double measure = 0.0L;
    long double lhs_acc = 0.0L;
    for (int64_t i = 0; i < f.size(); ++i) {
        if (mask[i] == 0.0) continue;
        const double m = mu.cell_measure(f, i);
        measure += m;
        lhs_acc += std::pow(std::fabs(static_cast<long double>(f[i])), s) * m;
        restricted[i] = f[i];
    }
    KolmogorovSides out;
    if (measure <= 0.0L) return out;
    out.lhs = static_cast<double>(std::pow(lhs_acc / measure, 1.0L / s));
    const double weak = lorentz_norm(restricted, t, INFINITY, mu).value;
    out.rhs = std::pow(t / (t - s), 1.0 / s) *
              std::pow(static_cast<double>(measure), -1.0 / t) * weak;
    return out;
}

}  // namespace dyadlab
