#include "dyadlab/config.hpp"

#include <cmath>
#include <fstream>

namespace dyadlab {

void validate_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                   const std::string& context) {
    require(j.is_object(), context + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        require(ok, context + ": unknown key '" + key + "'");
    }
}

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: parse error in " + path + ": " + e.what());
    }
    return j;
}

namespace {

std::array<int64_t, 2> index_from_json(const nlohmann::json& j) {
    std::array<int64_t, 2> idx{0, 0};
    if (j.is_number_integer()) {
        idx[0] = j.get<int64_t>();
    } else {
        require(j.is_array() && j.size() >= 1 && j.size() <= 2, "index: need 1 or 2 entries");
        idx[0] = j[0].get<int64_t>();
        if (j.size() == 2) idx[1] = j[1].get<int64_t>();
    }
    return idx;
}

PowerSampling sampling_from_json(const nlohmann::json& j, const char* def) {
    const std::string s = j.value("sampling", def);
    if (s == "far_endpoint") return PowerSampling::FarEndpoint;
    if (s == "cell_average") return PowerSampling::CellAverage;
    if (s == "midpoint") return PowerSampling::Midpoint;
    throw ConfigError("sampling: unknown mode '" + s + "'");
}

double exponent_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        require(j.get<std::string>() == "inf", "exponent: only 'inf' is accepted as text");
        return INFINITY;
    }
    return j.get<double>();
}

}  // namespace

MeshFunction function_from_json(const nlohmann::json& j, const GridPtr& grid) {
    require(j.is_object() && j.contains("kind"), "function: need a kind");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "power") {
        validate_keys(j, {"kind", "alpha", "side", "sampling"}, "function.power");
        const bool positive = j.value("side", std::string("positive")) == "positive";
        return power_function(grid, j.at("alpha").get<double>(), positive,
                              sampling_from_json(j, "far_endpoint"));
    }
    if (kind == "indicator") {
        validate_keys(j, {"kind", "lo", "hi"}, "function.indicator");
        std::array<double, 2> lo{0, 0}, hi{0, 0};
        const auto& jl = j.at("lo");
        const auto& jh = j.at("hi");
        if (jl.is_number()) {
            lo[0] = jl.get<double>();
            hi[0] = jh.get<double>();
        } else {
            for (std::size_t d = 0; d < jl.size(); ++d) {
                lo[d] = jl[d].get<double>();
                hi[d] = jh[d].get<double>();
            }
        }
        return indicator(grid, lo, hi);
    }
    if (kind == "haar") {
        validate_keys(j, {"kind", "level", "index", "eta"}, "function.haar");
        DyadicCube I{grid, j.at("level").get<int>(), index_from_json(j.at("index"))};
        const unsigned eta = j.value("eta", (1u << grid->n()) - 1u);
        return haar_eval(I, eta);
    }
    if (kind == "random") {
        validate_keys(j, {"kind", "seed"}, "function.random");
        return random_mesh(grid, j.value("seed", uint64_t{0}));
    }
    if (kind == "constant") {
        validate_keys(j, {"kind", "value"}, "function.constant");
        return MeshFunction(grid, j.at("value").get<double>());
    }
    if (kind == "bump") {
        validate_keys(j, {"kind", "scale"}, "function.bump");
        return smooth_bump(grid, j.value("scale", 1.0));
    }
    if (kind == "mesh") {
        validate_keys(j, {"kind", "file"}, "function.mesh");
        MeshFunction f = read_mesh(j.at("file").get<std::string>());
        require(f.grid()->same_mesh(*grid), "function.mesh: stored mesh does not match grid");
        return f;
    }
    throw ConfigError("function: unknown kind '" + kind + "'");
}

Weight weight_from_json(const nlohmann::json& j, const GridPtr& grid) {
    require(j.is_object() && j.contains("kind"), "weight: need a kind");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "one") {
        validate_keys(j, {"kind"}, "weight.one");
        return Weight(MeshFunction(grid, 1.0));
    }
    if (kind == "power") {
        validate_keys(j, {"kind", "alpha", "sampling"}, "weight.power");
        return power_weight(grid, j.at("alpha").get<double>(),
                            sampling_from_json(j, "cell_average"));
    }
    if (kind == "product") {
        validate_keys(j, {"kind", "factors"}, "weight.product");
        const auto& factors = j.at("factors");
        require(factors.is_array() && !factors.empty(), "weight.product: need factors");
        Weight w = weight_from_json(factors[0], grid);
        for (std::size_t t = 1; t < factors.size(); ++t)
            w = product_weight(w, weight_from_json(factors[t], grid));
        return w;
    }
    if (kind == "mesh") {
        validate_keys(j, {"kind", "file"}, "weight.mesh");
        MeshFunction f = read_mesh(j.at("file").get<std::string>());
        require(f.grid()->same_mesh(*grid), "weight.mesh: stored mesh does not match grid");
        return Weight(std::move(f));
    }
    throw ConfigError("weight: unknown kind '" + kind + "'");
}

namespace {

CoeffSequence coeffs_from_json(const nlohmann::json& j, const GridPtr& grid) {
    require(j.is_object() && j.contains("kind"), "coefficients: need a kind");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "tower") {
        validate_keys(j, {"kind"}, "coefficients.tower");
        return CoeffSequence::tower(grid);
    }
    if (kind == "compact") {
        validate_keys(j, {"kind", "N0", "seed"}, "coefficients.compact");
        return CoeffSequence::compact(grid, j.value("N0", 2), j.value("seed", uint64_t{0}));
    }
    if (kind == "entries") {
        validate_keys(j, {"kind", "items"}, "coefficients.entries");
        CoeffSequence b(grid);
        for (const auto& item : j.at("items")) {
            validate_keys(item, {"level", "index", "value"}, "coefficients.entries.item");
            DyadicCube I{grid, item.at("level").get<int>(),
                         index_from_json(item.at("index"))};
            b.set(I, item.at("value").get<double>());
        }
        return b;
    }
    throw ConfigError("coefficients: unknown kind '" + kind + "'");
}

SymbolSpec symbol_from_json(const nlohmann::json& j) {
    const std::string name = j.get<std::string>();
    if (name == "one") return SymbolSpec::one();
    if (name == "gaussian_compact") return SymbolSpec::gaussian_compact();
    if (name == "gaussian_multiplier") return SymbolSpec::gaussian_multiplier();
    throw ConfigError("symbol: unknown name '" + name + "'");
}

EnvelopeSpec envelope_from_json(const nlohmann::json& j) {
    validate_keys(j, {"kind", "offset"}, "envelope");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return EnvelopeSpec::zero();
    if (kind == "one") return EnvelopeSpec::one();
    if (kind == "compact") return EnvelopeSpec::compact(j.value("offset", 0));
    throw ConfigError("envelope: unknown kind '" + kind + "'");
}

}  // namespace

OpPtr operator_from_json(const nlohmann::json& j, const GridPtr& grid) {
    require(j.is_object() && j.contains("kind"), "operator: need a kind");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "zero") {
        validate_keys(j, {"kind"}, "operator.zero");
        return zero_operator(grid);
    }
    if (kind == "rank_one") {
        validate_keys(j, {"kind", "level", "index"}, "operator.rank_one");
        return rank_one_operator(DyadicCube{grid, j.value("level", 0),
                                            index_from_json(j.value("index", nlohmann::json(0)))});
    }
    if (kind == "paraproduct") {
        validate_keys(j, {"kind", "variant", "b"}, "operator.paraproduct");
        const std::string variant = j.value("variant", std::string("pi"));
        ParaproductVariant v = ParaproductVariant::Pi;
        if (variant == "star1")
            v = ParaproductVariant::Star1;
        else if (variant == "star2")
            v = ParaproductVariant::Star2;
        else
            require(variant == "pi", "operator.paraproduct: unknown variant");
        return paraproduct_operator(coeffs_from_json(j.at("b"), grid), v);
    }
    if (kind == "shift") {
        validate_keys(j, {"kind", "i", "j", "k", "flavor", "envelope", "seed"},
                      "operator.shift");
        const std::string flavor = j.value("flavor", std::string("hh"));
        ShiftFlavor fl = ShiftFlavor::HH;
        if (flavor == "hh0")
            fl = ShiftFlavor::HH0;
        else if (flavor == "h0h")
            fl = ShiftFlavor::H0H;
        else
            require(flavor == "hh", "operator.shift: unknown flavor");
        return shift_operator(make_shift(
            grid, j.value("i", 0), j.value("j", 0), j.value("k", 0), fl,
            j.contains("envelope") ? envelope_from_json(j["envelope"])
                                   : EnvelopeSpec::compact(0),
            j.value("seed", uint64_t{0})));
    }
    if (kind == "kernel") {
        validate_keys(j, {"kind", "name", "epsilon"}, "operator.kernel");
        const std::string name = j.at("name").get<std::string>();
        const double eps = j.value("epsilon", 2.0 * grid->cell_size());
        if (name == "riesz") return kernel_operator(grid, riesz_kernel_1d(), eps, name);
        if (name == "gaussian_damped")
            return kernel_operator(grid, gaussian_damped_kernel_1d(), eps, name);
        if (name == "zero")
            return kernel_operator(
                grid, [](double, double, double) { return 0.0; }, eps, name);
        throw ConfigError("operator.kernel: unknown kernel '" + name + "'");
    }
    if (kind == "pseudodiff") {
        validate_keys(j, {"kind", "symbol", "Xi"}, "operator.pseudodiff");
        return pseudodiff_operator(grid, symbol_from_json(j.at("symbol")),
                                   j.value("Xi", 1.0));
    }
    if (kind == "commutator") {
        validate_keys(j, {"kind", "slot", "b", "inner"}, "operator.commutator");
        return commutator_operator(function_from_json(j.at("b"), grid),
                                   operator_from_json(j.at("inner"), grid),
                                   j.value("slot", 1));
    }
    if (kind == "projected") {
        validate_keys(j, {"kind", "N", "inner"}, "operator.projected");
        return projected_operator(j.at("N").get<int>(),
                                  operator_from_json(j.at("inner"), grid));
    }
    if (kind == "montecarlo") {
        validate_keys(j, {"kind", "seeds", "inner"}, "operator.montecarlo");
        const auto& seeds = j.at("seeds");
        require(seeds.is_array() && !seeds.empty(), "operator.montecarlo: need seeds");
        std::vector<OpPtr> ops;
        std::vector<double> coefs;
        for (const auto& s : seeds) {
            // rebuild the inner operator over a reseeded grid on the same mesh
            GridPtr shifted = make_grid(grid->n(), grid->L(), grid->M(), s.get<uint64_t>());
            ops.push_back(operator_from_json(j.at("inner"), shifted));
            coefs.push_back(1.0 / static_cast<double>(seeds.size()));
        }
        return combination_operator(std::move(ops), std::move(coefs), "montecarlo");
    }
    if (kind == "sum") {
        validate_keys(j, {"kind", "terms"}, "operator.sum");
        std::vector<OpPtr> ops;
        std::vector<double> coefs;
        for (const auto& term : j.at("terms")) {
            validate_keys(term, {"coef", "op"}, "operator.sum.term");
            ops.push_back(operator_from_json(term.at("op"), grid));
            coefs.push_back(term.value("coef", 1.0));
        }
        return combination_operator(std::move(ops), std::move(coefs), "sum");
    }
    throw ConfigError("operator: unknown kind '" + kind + "'");
}

ReportConfig report_config_from_json(const nlohmann::json& j, const GridPtr& grid) {
    ReportConfig cfg;
    validate_keys(j,
                  {"exponents", "weights", "probes", "seed", "budget", "Ns", "As", "hs",
                   "rs", "modulus_a", "threshold", "run", "t11_kmax"},
                  "diagnostics");
    if (j.contains("exponents")) {
        const auto& e = j["exponents"];
        validate_keys(e, {"p1", "p2", "p", "q", "weak"}, "diagnostics.exponents");
        cfg.exponents.p1 = exponent_from_json(e.value("p1", nlohmann::json(4.0)));
        cfg.exponents.p2 = exponent_from_json(e.value("p2", nlohmann::json(4.0)));
        cfg.exponents.p = e.value("p", 2.0);
        cfg.exponents.q = e.value("weak", false) ? INFINITY
                                                 : exponent_from_json(e.value(
                                                       "q", nlohmann::json(cfg.exponents.p)));
    }
    if (j.contains("weights")) {
        const auto& w = j["weights"];
        validate_keys(w, {"w1", "w2", "w"}, "diagnostics.weights");
        if (w.contains("w1")) cfg.weights.w1 = weight_from_json(w["w1"], grid);
        if (w.contains("w2")) cfg.weights.w2 = weight_from_json(w["w2"], grid);
        if (w.contains("w")) cfg.weights.w = weight_from_json(w["w"], grid);
    }
    if (j.contains("probes")) {
        const auto& p = j["probes"];
        validate_keys(p, {"haar_level_cap", "max_haar_atoms", "indicator_count", "random_count"},
                      "diagnostics.probes");
        cfg.probes.haar_level_cap = p.value("haar_level_cap", cfg.probes.haar_level_cap);
        cfg.probes.max_haar_atoms = p.value("max_haar_atoms", cfg.probes.max_haar_atoms);
        cfg.probes.indicator_count = p.value("indicator_count", cfg.probes.indicator_count);
        cfg.probes.random_count = p.value("random_count", cfg.probes.random_count);
    }
    cfg.seed = j.value("seed", uint64_t{0});
    cfg.budget = j.value("budget", 64);
    if (j.contains("Ns")) cfg.Ns = j["Ns"].get<std::vector<int>>();
    if (j.contains("As")) cfg.As = j["As"].get<std::vector<double>>();
    if (j.contains("hs")) cfg.h_cells = j["hs"].get<std::vector<int64_t>>();
    if (j.contains("rs")) cfg.rs = j["rs"].get<std::vector<double>>();
    cfg.modulus_a = j.value("modulus_a", 0.5);
    cfg.decay_threshold = j.value("threshold", 0.1);
    if (j.contains("run")) {
        cfg.run_projection = cfg.run_kr = cfg.run_wcp = cfg.run_t11 = false;
        for (const auto& r : j["run"]) {
            const std::string s = r.get<std::string>();
            if (s == "projection")
                cfg.run_projection = true;
            else if (s == "kr")
                cfg.run_kr = true;
            else if (s == "wcp")
                cfg.run_wcp = true;
            else if (s == "t11")
                cfg.run_t11 = true;
            else
                throw ConfigError("diagnostics.run: unknown entry '" + s + "'");
        }
    }
    cfg.t11_kmax = j.value("t11_kmax", 2);
    if (cfg.As.empty()) cfg.As = {1.0, 2.0, 4.0};
    if (cfg.h_cells.empty()) cfg.h_cells = {1, 2, 4, 8};
    if (cfg.rs.empty()) cfg.rs = {4.0 * grid->cell_size(), 16.0 * grid->cell_size()};
    return cfg;
}

}  // namespace dyadlab
