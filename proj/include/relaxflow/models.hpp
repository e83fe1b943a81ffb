#pragma once

#include "relaxflow/littlewood_paley.hpp"
#include "relaxflow/spectral_field.hpp"

#include <span>
#include <utility>
#include <vector>

namespace relaxflow {

/// E-NS state: a = rho - 1, Euler-phase velocity w, incompressible velocity u.
struct EnsState {
    SpectralField a;
    SpectralField w;
    SpectralField u;
    double epsilon = 0.1;
    double mu = 1.0;

    /// Zero state on the grid.
    static EnsState zero(const Grid& grid, double epsilon, double mu);
    const Grid& grid() const { return a.grid(); }
};

/// KS-NS state: a = rho* - 1 and u*.
struct KsnsState {
    SpectralField a;
    SpectralField u;
    double mu = 1.0;

    static KsnsState zero(const Grid& grid, double mu);
    const Grid& grid() const { return a.grid(); }
};

/// Switches for the reduced and control variants of the E-NS dynamics.
struct EnsOptions {
    /// Hold u fixed (damped isothermal Euler reduction when u = 0).
    bool freeze_u = false;
    /// Drop every nonlinear term.
    bool disable_nonlinear = false;
    /// Replace the relaxation symbols by their eps -> 0 limits (heat flow for a
    /// and u, w slaved to the linear Darcy relation). Only the stepper honours it.
    bool limit_symbols = false;
};

/// Throws DensityFloorError if min(1 + a) < 1/2 on the physical grid.
void check_density_floor(const RealArray& a_phys);

/// h(a) = -a/(1+a), pointwise then dealiased.
SpectralField closure_h(const SpectralField& a);

/// Full right-hand side; the returned state holds time derivatives.
EnsState rhs_ens(const EnsState& s, const EnsOptions& opt = {});
/// Stiff linear part: (-div w/eps, -grad a/eps - (w - eps u)/eps^2, mu Lap u + (w - eps u)/eps projected).
EnsState rhs_ens_linear(const EnsState& s, const EnsOptions& opt = {});
/// Nonlinear remainder: (-div(a w)/eps, -(h grad a + w.grad w)/eps, P[-u.grad u + a(w - eps u)/eps]).
EnsState rhs_ens_nonlinear(const EnsState& s, const EnsOptions& opt = {});
/// u-tendency in the damped-mode form mu Lap u - P(u.grad u) + P(a(Z + R))/eps + R/eps.
SpectralField rhs_ens_u_damped_form(const EnsState& s);

KsnsState rhs_ksns(const KsnsState& s);
KsnsState rhs_ksns_linear(const KsnsState& s);
/// (-div(a u), -P(u.grad u)).
KsnsState rhs_ksns_nonlinear(const KsnsState& s);

/// Z = P^T w + eps(1 + h(a)) grad a, R = P w - eps u.
std::pair<SpectralField, SpectralField> damped_modes(const EnsState& s);

/// Y = -div((1 + a)(Z + R)).
SpectralField source_Y(const EnsState& s);
/// Y = -w.grad a - (1 + a) div w - eps Lap a + eps u.grad a.
SpectralField source_Y_direct(const EnsState& s);

/// W* = u* - grad(rho*)/rho*.
SpectralField darcy_velocity(const KsnsState& s);

/// v . grad f for scalar f (result scalar) or vector f (componentwise), dealiased.
SpectralField advect(const SpectralField& v, const SpectralField& f);
/// Pointwise product of a scalar with a scalar or vector field, dealiased.
SpectralField multiply(const SpectralField& scalar, const SpectralField& f);

/// E0 = ||a*_0||_{B^0 cap B^1} + ||u*_0||_{B^0} (d = 2 indices).
double initial_energy(const DyadicDecomposition& lp, const KsnsState& limit0);
/// Initial error functional dE0 for E-NS data against limit data.
double initial_error_energy(const DyadicDecomposition& lp, const EnsState& ens0, const KsnsState& limit0,
                            const ThresholdConfig& threshold);

/// One emitted snapshot of the diagnostic functionals. Running quantities
/// (sup or time integral) cover [0, time].
struct DiagnosticsSample {
    double time = 0.0;
    double E_eps = 0.0;
    double D_eps = 0.0;
    double D_eps_increment = 0.0;
    /// ||Z||_{B^1}, ||R||_{B^0 cap B^1}, and their running time integrals.
    double Z_norm = 0.0;
    double R_norm = 0.0;
    double Z_integral = 0.0;
    double R_integral = 0.0;
    /// ||w/eps - W*||_{B^1 + B^2} and its running time integral.
    double darcy_residual_norm = 0.0;
    double darcy_integral = 0.0;
    /// ||da||_{B^0} + ||du||_{B^0} and its running sup.
    double error_norm = 0.0;
    double error_sup = 0.0;
    /// int ||da||_{B^2} + ||du||_{B^2} dt.
    double error_dissipation = 0.0;
    /// int ||d_t da||_{B^0} + ||d_t du||_{B^2} dt, time derivatives from the right-hand sides.
    double dt_error_integral = 0.0;
    /// ||Y||_{B^0}.
    double Y_norm = 0.0;
};

/// Incremental evaluation of the diagnostics along paired E-NS / KS-NS
/// snapshots; integrals use the trapezoidal rule between successive calls.
class DiagnosticsAccumulator {
public:
    DiagnosticsAccumulator(const Grid& grid, ThresholdConfig threshold);

    DiagnosticsSample push(double t, const EnsState& ens, const KsnsState& ksns);
    const std::vector<DiagnosticsSample>& samples() const { return samples_; }
    const DyadicDecomposition& decomposition() const { return lp_; }

private:
    struct Integrands {
        double D = 0.0;
        double w_sq = 0.0;
        double Z = 0.0;
        double R = 0.0;
        double darcy = 0.0;
        double err_diss = 0.0;
        double dt_err = 0.0;
    };

    DyadicDecomposition lp_;
    ThresholdConfig threshold_;
    std::vector<DiagnosticsSample> samples_;
    Integrands prev_;
    double w_sq_integral_ = 0.0;
    double D_other_integral_ = 0.0;
    double E_sup_[5] = {0, 0, 0, 0, 0};
};

/// Batch form over matching series.
std::vector<DiagnosticsSample> diagnostics(std::span<const double> times, std::span<const EnsState> ens,
                                           std::span<const KsnsState> ksns, const ThresholdConfig& threshold);

} // namespace relaxflow
