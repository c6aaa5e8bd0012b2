#pragma once

#include <optional>

#include "dyadlab/mesh.hpp"

namespace dyadlab {

/// Lebesgue measure or a strictly positive weight density on the mesh
class MeasureSpec {
  public:
    MeasureSpec() = default;  // Lebesgue
    explicit MeasureSpec(MeshFunction w);

    bool weighted() const { return w_.has_value(); }
    const MeshFunction& weight() const { return *w_; }
    /// measure of one mesh cell
    double cell_measure(const MeshFunction& f, int64_t cell) const {
        return w_.has_value() ? (*w_)[cell] * f.cell_volume() : f.cell_volume();
    }

    static MeasureSpec lebesgue() { return MeasureSpec(); }

  private:
    std::optional<MeshFunction> w_;
};

struct NormResult {
    double value = 0.0;
    bool exact = true;  ///< closed form from the step rearrangement
    double p = 0.0;
    double q = 0.0;
};

/// d_f(t) = mu({|f| > t}), exact sum of cell measures
double distribution(const MeshFunction& f, double t, const MeasureSpec& mu = {});

/// Lorentz quasi-norm ||f||_{L^{p,q}(mu)}; q = inf gives sup_t t d_f(t)^{1/p},
/// finite q gives p^{1/p} (int_0^inf [t d(t)^{1/p}]^q dt/t)^{1/q}, both in
/// closed form for step functions
NormResult lorentz_norm(const MeshFunction& f, double p, double q,
                        const MeasureSpec& mu = {});

/// tau_h f = f(. - h) for a lattice shift (cells); entering cells are zero
MeshFunction translate(const MeshFunction& f, const std::array<int64_t, 2>& h_cells);

/// lattice check + translate, h given in coordinates
MeshFunction translate_real(const MeshFunction& f, const std::array<double, 2>& h);

/// zero all cells whose center lies in the open l^inf ball B(0, A)
MeshFunction tail_restrict(const MeshFunction& f, double A);

/// x -> average of f over window ∩ B(x, r), cell-exact overlap quadrature
MeshFunction ball_average(const MeshFunction& f, double r);

/// S_r f(x) = (avg over |y| < r of |f(x-y) - f(x)|^a)^{1/a}, zero-fill
/// outside the window
MeshFunction averaged_modulus(const MeshFunction& f, double r, double a);

struct KolmogorovSides {
    double lhs = 0.0;  ///< (avg_E |f|^s dmu)^{1/s}
    double rhs = 0.0;  ///< (t/(t-s))^{1/s} mu(E)^{-1/t} ||f||_{L^{t,inf}(E)}
};

/// both sides of Kolmogorov's inequality on the set {mask != 0}
KolmogorovSides kolmogorov_sides(const MeshFunction& f, const MeshFunction& mask, double s,
                                 double t, const MeasureSpec& mu = {});

}  // namespace dyadlab
