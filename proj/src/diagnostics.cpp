#include "dyadlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace dyadlab {

namespace {

std::vector<DyadicCube> haar_atom_cubes(const GridPtr& grid, const ProbeOptions& opts) {
    const auto& g = *grid;
    std::vector<DyadicCube> cubes;
    const int lo = -std::min(g.M(), opts.haar_level_cap);
    const int hi = std::min({g.L() - 1, opts.haar_level_cap});
    for (int level = lo; level <= hi; ++level)
        for (const DyadicCube& I : level_cubes(grid, level)) cubes.push_back(I);
    if (static_cast<int>(cubes.size()) > opts.max_haar_atoms) {
        // deterministic stride subsample keeping both ends of the list
        std::vector<DyadicCube> picked;
        const double stride =
            static_cast<double>(cubes.size()) / static_cast<double>(opts.max_haar_atoms);
        for (int t = 0; t < opts.max_haar_atoms; ++t)
            picked.push_back(cubes[static_cast<std::size_t>(t * stride)]);
        cubes = std::move(picked);
    }
    return cubes;
}

}  // namespace

double input_norm(const MeshFunction& f, double p, const std::optional<Weight>& w) {
    const MeshFunction fw = w.has_value() ? f.pointwise_product(w->mesh()) : f;
    return std::isinf(p) ? fw.sup_norm() : fw.lp_norm(p);
}

MeshFunction normalize_probe(const MeshFunction& f, double p,
                             const std::optional<Weight>& w) {
    const double n = input_norm(f, p, w);
    require(n > 0.0, "normalize_probe: zero probe");
    MeshFunction out = f;
    out *= 1.0 / n;
    return out;
}

double output_norm(const MeshFunction& g, const Exponents& e, const WeightTriple& w) {
    const MeshFunction gw = w.w.has_value() ? g.pointwise_product(w.w->mesh()) : g;
    if (!std::isinf(e.q) && e.q == e.p) return gw.lp_norm(e.p);
    return lorentz_norm(gw, e.p, e.q).value;
}

ProbeSet ProbeSet::build(const GridPtr& grid, const Exponents& e, const WeightTriple& w,
                         const ProbeOptions& opts, uint64_t seed) {
    ProbeSet set;
    auto push = [&](const MeshFunction& f1, const MeshFunction& f2, std::string label) {
        set.pairs.emplace_back(normalize_probe(f1, e.p1, w.w1),
                               normalize_probe(f2, e.p2, w.w2));
        set.labels.push_back(std::move(label));
    };
    const unsigned eta_all = (1u << grid->n()) - 1u;
    for (const DyadicCube& I : haar_atom_cubes(grid, opts)) {
        const MeshFunction h = haar_eval(I, eta_all);
        push(h, h, "haar l=" + std::to_string(I.level) + " m=" + std::to_string(I.index[0]));
    }
    // dyadic indicators across scales and positions
    const auto& g = *grid;
    int made = 0;
    for (int level = -g.M(); level <= g.L() && made < opts.indicator_count; ++level) {
        const auto cubes = level_cubes(grid, level);
        if (cubes.empty()) continue;
        const DyadicCube& I = cubes[cubes.size() / 2];
        MeshFunction f(grid);
        const int64_t s = I.side_units();
        const int64_t x0 = I.corner_units(0) + g.window_units();
        if (g.n() == 1) {
            for (int64_t t = 0; t < s; ++t) f[x0 + t] = 1.0;
        } else {
            const int64_t y0 = I.corner_units(1) + g.window_units();
            for (int64_t ty = 0; ty < s; ++ty)
                for (int64_t tx = 0; tx < s; ++tx) f.at(x0 + tx, y0 + ty) = 1.0;
        }
        push(f, f, "indicator l=" + std::to_string(level));
        ++made;
    }
    Rng rng(seed);
    for (int t = 0; t < opts.random_count; ++t) {
        const MeshFunction f1 = random_mesh(grid, rng.bits());
        const MeshFunction f2 = random_mesh(grid, rng.bits());
        push(f1, f2, "random " + std::to_string(t));
    }
    return set;
}

double opnorm_lower(const OpPtr& T, const Exponents& e, const WeightTriple& w, int budget,
                    uint64_t seed, OpNormInfo* info) {
    require(budget >= 1, "opnorm_lower: budget must be >= 1");
    ProbeOptions popts;
    ProbeSet probes = ProbeSet::build(T->grid(), e, w, popts, seed);
    const int base = std::min<int>(static_cast<int>(probes.pairs.size()), budget);
    std::vector<double> vals(static_cast<std::size_t>(base), 0.0);
    parallel_for(base, [&](int64_t lo, int64_t hi) {
        for (int64_t t = lo; t < hi; ++t)
            vals[static_cast<std::size_t>(t)] = output_norm(
                T->apply(probes.pairs[static_cast<std::size_t>(t)].first,
                         probes.pairs[static_cast<std::size_t>(t)].second),
                e, w);
    });
    double best = 0.0;
    std::size_t best_idx = 0;
    for (std::size_t t = 0; t < vals.size(); ++t)
        if (vals[t] > best) {
            best = vals[t];
            best_idx = t;
        }
    int evals = base;
    std::string label = vals.empty() ? "" : probes.labels[best_idx];

    // greedy coordinate ascent around the best probe
    if (evals < budget && best > 0.0) {
        MeshFunction f1 = probes.pairs[best_idx].first;
        MeshFunction f2 = probes.pairs[best_idx].second;
        Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
        const double steps[2] = {0.5, 0.25};
        while (evals < budget) {
            const MeshFunction dir = random_mesh(T->grid(), rng.bits());
            const bool slot1 = rng.bit() == 0;
            bool improved = false;
            for (double step : steps) {
                if (evals >= budget) break;
                MeshFunction cand = slot1 ? f1 : f2;
                MeshFunction scaled = dir;
                scaled *= step;
                cand += scaled;
                const MeshFunction candn =
                    normalize_probe(cand, slot1 ? e.p1 : e.p2, slot1 ? w.w1 : w.w2);
                const double v =
                    output_norm(slot1 ? T->apply(candn, f2) : T->apply(f1, candn), e, w);
                ++evals;
                if (v > best) {
                    best = v;
                    (slot1 ? f1 : f2) = candn;
                    label += "+";
                    improved = true;
                    break;
                }
            }
            if (!improved && evals >= budget) break;
        }
    }
    if (info != nullptr) {
        info->value = best;
        info->best_probe = label;
        info->evaluations = evals;
    }
    return best;
}

std::vector<double> DecayCurve::monotone_envelope() const {
    std::vector<double> env = values;
    for (std::size_t i = env.size(); i-- > 1;) env[i - 1] = std::max(env[i - 1], env[i]);
    return env;
}

std::string DecayCurve::classify(double threshold) const {
    if (values.empty()) return "decaying";
    const auto env = monotone_envelope();
    if (env.front() == 0.0) return "decaying";
    return env.back() <= threshold * env.front() ? "decaying" : "flat";
}

DecayCurve projection_tail_curve(const OpPtr& T, const std::vector<int>& Ns,
                                 const Exponents& e, const WeightTriple& w, int budget,
                                 uint64_t seed) {
    DecayCurve curve;
    for (int N : Ns) {
        curve.xs.push_back(static_cast<double>(N));
        curve.values.push_back(opnorm_lower(projected_operator(N, T), e, w, budget, seed));
    }
    return curve;
}

KrProfile kr_profile(const OpPtr& T, const Exponents& e, const WeightTriple& w,
                     const ProbeOptions& popts, uint64_t seed, const std::vector<double>& As,
                     const std::vector<int64_t>& h_cells, const std::vector<double>& rs,
                     double modulus_a) {
    ProbeSet probes = ProbeSet::build(T->grid(), e, w, popts, seed);
    const int count = static_cast<int>(probes.pairs.size());
    std::vector<MeshFunction> outputs;
    outputs.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t)
        outputs.push_back(
            T->apply(probes.pairs[static_cast<std::size_t>(t)].first,
                     probes.pairs[static_cast<std::size_t>(t)].second));

    KrProfile prof;
    for (const auto& out : outputs) prof.bound = std::max(prof.bound, output_norm(out, e, w));
    for (double A : As) {
        double v = 0.0;
        for (const auto& out : outputs)
            v = std::max(v, output_norm(tail_restrict(out, A), e, w));
        prof.tail.xs.push_back(A);
        prof.tail.values.push_back(v);
    }
    for (int64_t h : h_cells) {
        double v = 0.0;
        for (const auto& out : outputs) {
            MeshFunction diff = translate(out, {h, 0});
            diff -= out;
            v = std::max(v, output_norm(diff, e, w));
        }
        prof.shift.xs.push_back(static_cast<double>(h) * T->grid()->cell_size());
        prof.shift.values.push_back(v);
    }
    for (double r : rs) {
        double v = 0.0;
        for (const auto& out : outputs)
            v = std::max(v, output_norm(averaged_modulus(out, r, modulus_a), e, w));
        prof.modulus.xs.push_back(r);
        prof.modulus.values.push_back(v);
    }
    return prof;
}

WcpCurves weak_compactness_curve(const OpPtr& T) {
    const GridPtr& grid = T->grid();
    const auto& g = *grid;
    WcpCurves curves;
    auto fhat = [&](const DyadicCube& Q) {
        MeshFunction ind(grid);
        const int64_t s = Q.side_units();
        const int64_t x0 = Q.corner_units(0) + g.window_units();
        if (g.n() == 1) {
            for (int64_t t = 0; t < s; ++t) ind[x0 + t] = 1.0;
        } else {
            const int64_t y0 = Q.corner_units(1) + g.window_units();
            for (int64_t ty = 0; ty < s; ++ty)
                for (int64_t tx = 0; tx < s; ++tx) ind.at(x0 + tx, y0 + ty) = 1.0;
        }
        return std::fabs(T->pairing(ind, ind, ind)) / Q.volume();
    };
    // shrinking and growing cubes at the origin cell
    const std::array<int64_t, 2> origin{g.window_units(), g.n() == 2 ? g.window_units() : 0};
    for (int level = 0; level <= g.L(); ++level) {
        const auto Q = cube_at_cell(grid, level, origin);
        if (!Q.has_value()) continue;
        curves.small_scale.xs.push_back(Q->side());
        curves.small_scale.values.push_back(fhat(*Q));
    }
    for (int level = 0; level >= -g.M(); --level) {
        const auto Q = cube_at_cell(grid, level, origin);
        if (!Q.has_value()) continue;
        curves.large_scale.xs.push_back(Q->side());
        curves.large_scale.values.push_back(fhat(*Q));
    }
    // translated unit cubes: |c_Q| growing
    for (int64_t t = 0; (int64_t(1) << t) <= g.window_units() / std::max<int64_t>(g.side_units(0), 1);
         ++t) {
        const int64_t offset = (t == 0) ? 0 : (int64_t(1) << (t - 1));
        DyadicCube Q{grid, 0, {offset, 0}};
        if (!Q.in_window()) break;
        curves.far_center.xs.push_back(std::fabs(Q.center(0)));
        curves.far_center.values.push_back(fhat(Q));
    }
    return curves;
}

EnvelopeReport kernel_envelope(const KernelFn& K, int n, const EnvelopeSampleSpec& spec) {
    require(n == 1, "kernel_envelope: n = 1 only");
    EnvelopeReport rep;
    Rng rng(spec.seed);
    const double twon = 2.0 * n;
    auto sample_shell = [&](double s, double center) {
        // triples with |x-y| + |x-z| = s and x near the requested center
        double sup = 0.0;
        for (int t = 0; t < spec.samples_per_shell; ++t) {
            const double x = center + (rng.unit() - 0.5) * std::min(s, 1.0);
            const double split = rng.unit();
            const double sy = rng.bit() ? 1.0 : -1.0;
            const double sz = rng.bit() ? 1.0 : -1.0;
            const double y = x - sy * split * s;
            const double z = x - sz * (1.0 - split) * s;
            const double dist = std::fabs(x - y) + std::fabs(x - z);
            if (dist <= 0.0) continue;
            const double G = std::fabs(K(x, y, z)) * std::pow(dist, twon);
            sup = std::max(sup, G);
        }
        return sup;
    };
    for (int t = 0; t < spec.shells; ++t) {
        const double s = std::exp2(-t);
        rep.small_s.xs.push_back(s);
        rep.small_s.values.push_back(sample_shell(s, 0.0));
    }
    for (int t = 0; t < spec.shells; ++t) {
        const double s = std::exp2(t);
        rep.large_s.xs.push_back(s);
        rep.large_s.values.push_back(sample_shell(s, 0.0));
    }
    for (int t = 0; t < spec.shells; ++t) {
        const double c = std::exp2(t);
        if (c > spec.domain_radius) break;
        rep.far_field.xs.push_back(2.0 * c);
        rep.far_field.values.push_back(sample_shell(1.0, c));
    }
    return rep;
}

MeshFunction smooth_bump(const GridPtr& grid, double scale) {
    MeshFunction out(grid);
    auto ramp = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    auto bump = [&](double r) {
        if (r <= 1.0) return 1.0;
        if (r >= 2.0) return 0.0;
        const double t = 2.0 - r;  // in (0, 1)
        return ramp(t) / (ramp(t) + ramp(1.0 - t));
    };
    const int64_t C = grid->cells_per_dim();
    if (grid->n() == 1) {
        for (int64_t i = 0; i < C; ++i) out[i] = bump(std::fabs(out.cell_center(i)) / scale);
    } else {
        for (int64_t iy = 0; iy < C; ++iy)
            for (int64_t ix = 0; ix < C; ++ix)
                out.at(ix, iy) =
                    bump(std::max(std::fabs(out.cell_center(ix)), std::fabs(out.cell_center(iy))) /
                         scale);
    }
    return out;
}

T11Report t11_probe(const OpPtr& T, int level_lo, int level_hi, int kmax) {
    const GridPtr& grid = T->grid();
    const auto& g = *grid;
    require(kmax >= 1 && (int64_t(2) << kmax) <= (int64_t(1) << g.M()),
            "t11_probe: cutoff does not fit the window");
    const MeshFunction phi_k = smooth_bump(grid, std::exp2(kmax));
    const MeshFunction phi_prev = smooth_bump(grid, std::exp2(kmax - 1));
    const MeshFunction out_k = T->apply(phi_k, phi_k);
    const MeshFunction out_prev = T->apply(phi_prev, phi_prev);
    const AveragePyramid pyr_k(out_k);
    const AveragePyramid pyr_prev(out_prev);
    T11Report rep{CoeffSequence(grid), {}, 0.0, kmax};
    const unsigned eta_all = (1u << g.n()) - 1u;
    for (int level = std::max(level_lo, -g.M()); level <= std::min({level_hi, g.L() - 1});
         ++level) {
        for (const DyadicCube& I : level_cubes(grid, level)) {
            const double beta = haar_coefficient(pyr_k, I, eta_all);
            const double beta_prev = haar_coefficient(pyr_prev, I, eta_all);
            if (beta != 0.0) rep.beta.set(I, beta);
            rep.convergence_diff = std::max(rep.convergence_diff, std::fabs(beta - beta_prev));
        }
    }
    for (int N = 0; N <= std::min(g.L(), g.M()); ++N) {
        rep.cmo_curve.xs.push_back(static_cast<double>(N));
        rep.cmo_curve.values.push_back(cmo_tail(rep.beta, N));
    }
    return rep;
}

namespace {

nlohmann::json curve_json(const DecayCurve& c, double threshold) {
    nlohmann::json out;
    out["x"] = c.xs;
    out["values"] = c.values;
    out["envelope"] = c.monotone_envelope();
    out["classification"] = c.classify(threshold);
    return out;
}

}  // namespace

nlohmann::json compactness_report(const OpPtr& T, const ReportConfig& cfg) {
    nlohmann::json rep;
    rep["operator"] = T->kind();
    rep["seed"] = cfg.seed;
    rep["exponents"] = {{"p1", cfg.exponents.p1},
                        {"p2", cfg.exponents.p2},
                        {"p", cfg.exponents.p},
                        {"q", std::isinf(cfg.exponents.q) ? -1.0 : cfg.exponents.q}};
    rep["decay_threshold"] = cfg.decay_threshold;
    if (cfg.run_projection) {
        std::vector<int> Ns = cfg.Ns;
        if (Ns.empty()) {
            const int nmax = std::min(T->grid()->L(), T->grid()->M()) - 1;
            for (int N = 0; N <= nmax; ++N) Ns.push_back(N);
        }
        const DecayCurve curve = projection_tail_curve(T, Ns, cfg.exponents, cfg.weights,
                                                       cfg.budget, cfg.seed);
        rep["projection_tail"] = curve_json(curve, cfg.decay_threshold);
        // the flat endpoint caveat: a flat curve at a weak-type endpoint does
        // not decide non-compactness (the projection criterion is one-sided
        // there)
        if (std::isinf(cfg.exponents.q))
            rep["projection_tail"]["note"] =
                "one-sided at weak-type endpoints: flat does not imply non-compact";
    }
    if (cfg.run_kr) {
        const KrProfile prof =
            kr_profile(T, cfg.exponents, cfg.weights, cfg.probes, cfg.seed, cfg.As,
                       cfg.h_cells, cfg.rs, cfg.modulus_a);
        rep["kr"] = {{"bound", prof.bound},
                     {"tail", curve_json(prof.tail, cfg.decay_threshold)},
                     {"shift", curve_json(prof.shift, cfg.decay_threshold)},
                     {"modulus", curve_json(prof.modulus, cfg.decay_threshold)}};
    }
    if (cfg.run_wcp) {
        const WcpCurves wcp = weak_compactness_curve(T);
        rep["weak_compactness"] = {
            {"small_scale", curve_json(wcp.small_scale, cfg.decay_threshold)},
            {"large_scale", curve_json(wcp.large_scale, cfg.decay_threshold)},
            {"far_center", curve_json(wcp.far_center, cfg.decay_threshold)}};
    }
    if (cfg.run_t11) {
        const T11Report t11 = t11_probe(T, -2, 2, cfg.t11_kmax);
        rep["t11"] = {{"kmax", t11.kmax},
                      {"convergence_diff", t11.convergence_diff},
                      {"cmo_tail", curve_json(t11.cmo_curve, cfg.decay_threshold)}};
    }
    return rep;
}

}  // namespace dyadlab
