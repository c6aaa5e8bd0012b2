#pragma once

#include <vector>

#include "dyadlab/lorentz.hpp"

namespace dyadlab {

/// strictly positive, finite mesh density
class Weight {
  public:
    explicit Weight(MeshFunction w);
    const MeshFunction& mesh() const { return w_; }
    const GridPtr& grid() const { return w_.grid(); }
    /// window integrals of w and w^-lambda (reported, not classified)
    std::vector<std::pair<double, double>> integrability_report(
        const std::vector<double>& lambdas) const;

  private:
    MeshFunction w_;
};

Weight power_weight(GridPtr grid, double alpha,
                    PowerSampling sampling = PowerSampling::CellAverage);
Weight product_weight(const Weight& a, const Weight& b);

struct ApOptions {
    bool include_shifted_families = true;  ///< add the {0, 1/3}^n translated grids
    int growth_windows = 3;                ///< constants at exponents M-2, M-1, M
    double growth_threshold = 1.25;        ///< ratio per doubling that flags divergence
};

struct ApReport {
    double constant = 0.0;             ///< sup over the full cube family
    int window_exponent = 0;           ///< M at which `constant` was computed
    std::vector<double> by_window;     ///< constants at exponents M-k+1 .. M
    double growth_ratio = 1.0;         ///< max ratio between consecutive windows
    bool finite = true;                ///< growth classifier verdict
};

/// classical Muckenhoupt constant, p in [1, inf); sup over the grid's cubes
/// plus the shifted families
ApReport ap_constant(const Weight& w, double p, const ApOptions& opts = {});

/// multilinear constant with the endpoint conventions: p_i = 1 uses
/// (essinf_Q w_i)^{-1}, total p = inf uses esssup_Q w
ApReport multilinear_ap_constant(const std::vector<Weight>& ws, const std::vector<double>& ps,
                                 const ApOptions& opts = {});

struct FactorizationReport {
    ApReport joint;                        ///< [w_vec]_{A_p_vec}
    std::vector<ApReport> constituents;    ///< w^p (or w^{-1/m}) first, then each w_i side
    std::vector<std::string> labels;
    bool all_constituents_finite = true;
    bool agreement = true;                 ///< joint and constituent classifications match
};

FactorizationReport factorization_check(const std::vector<Weight>& ws,
                                        const std::vector<double>& ps,
                                        const ApOptions& opts = {});

/// M(f1, f2)(x) = sup over cubes containing x of prod avg |f_i|, over the
/// grid and shifted dyadic families
MeshFunction bilinear_maximal(const MeshFunction& f1, const MeshFunction& f2,
                              const ApOptions& opts = {});

/// M_lambda^sharp f, 0 < lambda <= 1; the inner inf over c is exact (scan
/// over the cell values of f on Q)
MeshFunction sharp_maximal(const MeshFunction& f, double lambda, const ApOptions& opts = {});

/// || (M_lambda^sharp f) w ||_inf
double bmo_lambda_norm(const MeshFunction& f, const Weight& w, double lambda);

struct InterpolationResult {
    std::vector<Weight> us;
    std::vector<double> rs;
    ApReport report;
};

/// u_i = (w_i v_i^-theta)^{1/(1-theta)} with exponents 1/p_i =
/// (1-theta)/r_i + theta/s_i solved for r_i, plus the A_{r_vec} report of u
InterpolationResult interpolate_weights(const std::vector<Weight>& ws,
                                        const std::vector<double>& ps,
                                        const std::vector<Weight>& vs,
                                        const std::vector<double>& ss, double theta,
                                        const ApOptions& opts = {});

struct AInfinityProbe {
    double p_min = 0.0;     ///< least lattice p classified finite; 0 = none
    bool heuristic = true;  ///< always: finite-window surrogate
    std::vector<std::pair<double, bool>> lattice;
};
AInfinityProbe a_infinity_probe(const Weight& w, const ApOptions& opts = {});

struct ReverseHolderReport {
    double best_r = 1.0;  ///< largest lattice exponent whose constant stays bounded
    std::vector<std::pair<double, ApReport>> lattice;  ///< r -> sup (avg w^r)^{1/r} / avg w
};
ReverseHolderReport reverse_holder_search(const Weight& w, const ApOptions& opts = {});

}  // namespace dyadlab
