#pragma once

#include <functional>
#include <memory>
#include <string>

#include "dyadlab/haar.hpp"

namespace dyadlab {

class BilinearOperator {
  public:
    virtual ~BilinearOperator() = default;
    virtual MeshFunction apply(const MeshFunction& f1, const MeshFunction& f2) const = 0;
    /// <T(f1, f2), g>; kernel operators override this with a
    /// support-restricted quadrature
    virtual double pairing(const MeshFunction& f1, const MeshFunction& f2,
                           const MeshFunction& g) const;
    virtual const GridPtr& grid() const = 0;
    virtual std::string kind() const = 0;
};
using OpPtr = std::shared_ptr<const BilinearOperator>;

// ---------------------------------------------------------------- sequences

/// dyadic coefficient family {b_I} on a grid
class CoeffSequence {
  public:
    explicit CoeffSequence(GridPtr grid) : grid_(std::move(grid)) {}

    const GridPtr& grid() const { return grid_; }
    void set(const DyadicCube& I, double v);
    double get(const CubeKey& k) const;
    const std::map<CubeKey, double>& entries() const { return b_; }

    /// b_{[0, 2^k)} = 2^{k/2} for -M <= -level, all representable k; a
    /// BMO-normalizable sequence with no CMO tail decay
    static CoeffSequence tower(const GridPtr& grid);
    /// seeded coefficients supported inside D(N0); vanishing CMO tail
    static CoeffSequence compact(const GridPtr& grid, int N0, uint64_t seed);

  private:
    GridPtr grid_;
    std::map<CubeKey, double> b_;
};

/// sup_Q ( |Q|^{-1} sum_{I subset Q} |b_I|^2 )^{1/2}
double bmo_dyadic_norm(const CoeffSequence& b);
/// sup_Q |Q|^{-1} sum_{I subset Q, I not in D(N)} |b_I|^2 (no square root,
/// matching the CMO condition); nonincreasing in N
double cmo_tail(const CoeffSequence& b, int N);

// ------------------------------------------------------------------- shifts

enum class ShiftFlavor { HH, HH0, H0H };  // (h_I, h_J), (h_I, h0_J), (h0_I, h_J)

/// envelope F(Q) in [0, 1] attached to a shift
struct EnvelopeSpec {
    enum class Kind { Zero, One, Compact } kind = Kind::Compact;
    int offset = 0;  ///< Compact: F(Q) = 2^-max(0, N(Q) - offset)

    double eval(const DyadicCube& Q) const;
    static EnvelopeSpec zero() { return {Kind::Zero, 0}; }
    static EnvelopeSpec one() { return {Kind::One, 0}; }
    static EnvelopeSpec compact(int offset) { return {Kind::Compact, offset}; }
};

/// smallest N with Q in D(N); the scale-and-position index driving envelopes
int family_index(const DyadicCube& Q);

struct ShiftTensor {
    GridPtr grid;
    int i = 0, j = 0, k = 0;
    ShiftFlavor flavor = ShiftFlavor::HH;
    EnvelopeSpec envelope;
    uint64_t seed = 0;

    struct Block {
        CubeKey q;
        double envelope_value = 0.0;
        std::vector<double> a;  ///< dense over (I, J, K) local offsets
    };
    std::vector<Block> blocks;
};

ShiftTensor make_shift(const GridPtr& grid, int i, int j, int k, ShiftFlavor flavor,
                       const EnvelopeSpec& envelope, uint64_t seed);

MeshFunction apply_shift(const ShiftTensor& S, const MeshFunction& f1,
                         const MeshFunction& f2);

/// max over blocks and cells of |A_Q(f1,f2)| - F(Q) <|f1|>_Q <|f2|>_Q
/// (the per-block bound; nonpositive up to rounding)
double shift_block_excess(const ShiftTensor& S, const MeshFunction& f1,
                          const MeshFunction& f2);

/// largest |a| / bound ratio over all stored entries (should be <= 1)
double shift_coefficient_ratio(const ShiftTensor& S);

// ---------------------------------------------------------------- operators

OpPtr zero_operator(GridPtr grid);
OpPtr shift_operator(ShiftTensor S);

enum class ParaproductVariant { Pi, Star1, Star2 };
OpPtr paraproduct_operator(CoeffSequence b, ParaproductVariant variant);

OpPtr rank_one_operator(const DyadicCube& I0);

/// n = 1 kernel K(x, y, z), principal value truncated at
/// |x-y| + |x-z| <= epsilon (cell midpoints)
using KernelFn = std::function<double(double, double, double)>;
OpPtr kernel_operator(GridPtr grid, KernelFn kernel, double epsilon, std::string name);

KernelFn riesz_kernel_1d();
KernelFn gaussian_damped_kernel_1d();

struct SymbolSpec {
    std::string name = "one";
    std::string class_tag = "S^0_{1,0}";  ///< declared metadata, not computed
    bool separable = true;
    std::function<double(double)> in_x = [](double) { return 1.0; };
    std::function<double(double)> in_xi = [](double) { return 1.0; };
    std::function<double(double)> in_eta = [](double) { return 1.0; };
    std::function<double(double, double, double)> full;  ///< used when !separable

    double eval(double x, double xi, double eta) const {
        return separable ? in_x(x) * in_xi(xi) * in_eta(eta) : full(x, xi, eta);
    }

    static SymbolSpec one();
    /// e^{-x^2 - xi^2 - eta^2}: coefficients vanish at infinity (class K)
    static SymbolSpec gaussian_compact();
    /// e^{-xi^2 - eta^2}: x-independent multiplier (class S)
    static SymbolSpec gaussian_multiplier();
};

/// frequency-truncated bilinear pseudo-differential operator, n = 1;
/// integer frequency lattice m / (window length), |xi| <= Xi
OpPtr pseudodiff_operator(GridPtr grid, SymbolSpec symbol, double Xi);

/// [b, T]_slot
OpPtr commutator_operator(MeshFunction b, OpPtr inner, int slot);

/// P_N^perp after the inner operator
OpPtr projected_operator(int N, OpPtr inner);

/// sum_k coef_k T_k; with coef = 1/K this is the finite Monte Carlo average
/// over seeded grids
OpPtr combination_operator(std::vector<OpPtr> ops, std::vector<double> coefs,
                           std::string kind_label = "combination");

}  // namespace dyadlab
