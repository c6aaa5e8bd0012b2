#pragma once

#include <optional>

#include "dyadlab/operators.hpp"
#include "dyadlab/weights.hpp"

#include "json.hpp"

namespace dyadlab {

/// input/output exponents; q is the second output index (inf = weak target)
struct Exponents {
    double p1 = 4.0, p2 = 4.0;
    double p = 2.0, q = 2.0;

    static Exponents strong(double p1, double p2, double p) { return {p1, p2, p, p}; }
    static Exponents weak(double p1, double p2, double p) { return {p1, p2, p, INFINITY}; }
};

/// optional weights in the multiply convention ||f w||_p
struct WeightTriple {
    std::optional<Weight> w1, w2, w;
};

struct ProbeOptions {
    int haar_level_cap = 6;   ///< atoms up to level min(L, cap)
    int max_haar_atoms = 40;  ///< stride-subsampled cap per set
    int indicator_count = 12;
    int random_count = 32;
};

struct ProbeSet {
    std::vector<std::pair<MeshFunction, MeshFunction>> pairs;
    std::vector<std::string> labels;

    static ProbeSet build(const GridPtr& grid, const Exponents& e, const WeightTriple& w,
                          const ProbeOptions& opts, uint64_t seed);
};

/// ||f w||_{L^p} (p < inf) or ||f w||_inf
double input_norm(const MeshFunction& f, double p, const std::optional<Weight>& w);
MeshFunction normalize_probe(const MeshFunction& f, double p, const std::optional<Weight>& w);
/// ||g w||_{L^{p,q}}; q = p gives the plain L^p norm
double output_norm(const MeshFunction& g, const Exponents& e, const WeightTriple& w);

struct OpNormInfo {
    double value = 0.0;
    std::string best_probe;
    int evaluations = 0;
};

/// certified lower bound: max over normalized probes of the output norm,
/// then greedy coordinate-ascent refinement of the best probe; deterministic
/// per seed and nondecreasing in budget
double opnorm_lower(const OpPtr& T, const Exponents& e, const WeightTriple& w, int budget,
                    uint64_t seed, OpNormInfo* info = nullptr);

struct DecayCurve {
    std::vector<double> xs;
    std::vector<double> values;

    /// least nonincreasing majorant (idempotent)
    std::vector<double> monotone_envelope() const;
    /// "decaying" when the envelope at the last abscissa is <= threshold
    /// times its first value
    std::string classify(double threshold) const;
};

DecayCurve projection_tail_curve(const OpPtr& T, const std::vector<int>& Ns,
                                 const Exponents& e, const WeightTriple& w, int budget,
                                 uint64_t seed);

struct KrProfile {
    double bound = 0.0;   ///< sup over probes of the plain output norm
    DecayCurve tail;      ///< vs A
    DecayCurve shift;     ///< vs |h| (lattice cells)
    DecayCurve modulus;   ///< vs r at fixed a
};

KrProfile kr_profile(const OpPtr& T, const Exponents& e, const WeightTriple& w,
                     const ProbeOptions& popts, uint64_t seed, const std::vector<double>& As,
                     const std::vector<int64_t>& h_cells, const std::vector<double>& rs,
                     double modulus_a);

struct WcpCurves {
    DecayCurve small_scale;  ///< F_hat over shrinking centered cubes, vs l(Q)
    DecayCurve large_scale;  ///< vs l(Q) growing
    DecayCurve far_center;   ///< vs |c_Q| at l(Q) = 1
};

WcpCurves weak_compactness_curve(const OpPtr& T);

struct EnvelopeReport {
    DecayCurve small_s;    ///< sup G over shells s = |x-y| + |x-z| -> 0
    DecayCurve large_s;    ///< s -> inf
    DecayCurve far_field;  ///< |x+y| + |x+z| -> inf at s ~ 1
};

struct EnvelopeSampleSpec {
    int shells = 8;
    int samples_per_shell = 200;
    uint64_t seed = 0;
    double domain_radius = 64.0;
};

EnvelopeReport kernel_envelope(const KernelFn& K, int n, const EnvelopeSampleSpec& spec);

/// smooth cutoff with 1_{B(0,1)} <= Phi <= 1_{B(0,2)} (l^inf balls)
MeshFunction smooth_bump(const GridPtr& grid, double scale);

struct T11Report {
    CoeffSequence beta;
    DecayCurve cmo_curve;        ///< cmo_tail(beta, N) over N
    double convergence_diff = 0.0;  ///< sup_I |beta at kmax - beta at kmax-1|
    int kmax = 0;
};

T11Report t11_probe(const OpPtr& T, int level_lo, int level_hi, int kmax);

struct ReportConfig {
    Exponents exponents;
    WeightTriple weights;
    ProbeOptions probes;
    uint64_t seed = 0;
    int budget = 64;
    std::vector<int> Ns;
    std::vector<double> As;
    std::vector<int64_t> h_cells;
    std::vector<double> rs;
    double modulus_a = 0.5;
    double decay_threshold = 0.1;
    bool run_projection = true;
    bool run_kr = true;
    bool run_wcp = true;
    bool run_t11 = false;
    int t11_kmax = 2;
};

/// aggregate JSON report; deterministic per seed, byte-identical across job
/// counts
nlohmann::json compactness_report(const OpPtr& T, const ReportConfig& cfg);

}  // namespace dyadlab
