#pragma once

#include "folab/estimators.hpp"
#include "folab/foliated.hpp"

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace folab {

/// One mode a · cos(2π k·(u, v) + θ) of a trigonometric field on T^4.
struct FourierMode {
    std::array<int, 4> k{};
    double amp = 0.0;
    double phase = 0.0;
};

/// F(u, v) = Σ a_m cos(2π k_m · (u, v) + θ_m), smooth and 1-periodic in
/// every coordinate by construction.
class TorusFourierField {
public:
    TorusFourierField() = default;
    explicit TorusFourierField(std::vector<FourierMode> modes) : modes_(std::move(modes)) {}

    double operator()(const std::array<double, 2>& u, const std::array<double, 2>& v) const;

    /// Σ |a_m| · 2π · max_i |k_m,i|, the recorded Lipschitz certificate.
    double lipschitz_bound() const;

    const std::vector<FourierMode>& modes() const { return modes_; }
    bool empty() const { return modes_.empty(); }

private:
    std::vector<FourierMode> modes_;
};

/// Scalar equation x' = f(t, x) with f(t, x) = F(t·α, x·β) + ε,
/// α = (1, α₁). The screening of (1, α₁, β₁, β₂) for bounded integer
/// relations (zero entries skipped) is reported, never proven.
struct ODESpec {
    TorusFourierField field;
    double alpha1 = 0.0;
    std::array<double, 2> beta{};
    double epsilon = 0.0;

    std::array<double, 2> alpha() const { return {1.0, alpha1}; }
};

bool frequencies_screened(const ODESpec& spec, int K = 20, double tol = 1e-9);

/// Classical fixed-step 4th-order scheme; tolerance drives the
/// step-halving validation only.
struct IntegratorConfig {
    double step = 1e-3;
    double tolerance = 1e-8;
};

struct TorusState {
    std::array<double, 2> u{};
    std::array<double, 2> v{};
    double accumulated_xi = 0.0;
};

/// Solution value of x' = g(s, x) over [0, t] with g the field seen from
/// hull phase (u, v): g(s, x) = F(u + s·α, v + x·β) + ε, x(0) = x_init.
double integrate_ode(const ODESpec& spec, const IntegratorConfig& cfg,
                     const std::array<double, 2>& u, const std::array<double, 2>& v,
                     double x_init, double t);

/// ξ(t): solution of x' = f(t, x), x(0) = x0.
/// Throws NumericOverflowError with the blow-up time on non-finite values.
double integrate_xi(const ODESpec& spec, const IntegratorConfig& cfg, double t, double x0);

struct XiResult {
    double value = 0.0;
    double halfstep_gap = 0.0; // |ξ_h − ξ_{h/2}|
    bool step_warning = false; // gap > tolerance · (1 + t)
};

XiResult integrate_xi_checked(const ODESpec& spec, const IntegratorConfig& cfg, double t,
                              double x0);

/// (u, v) ↦ (u + tα, v + τ_t(z)·β) with the cocycle value accumulated.
TorusState torus_flow(const ODESpec& spec, const IntegratorConfig& cfg, const TorusState& z,
                      double t);

/// Time-1 section map Ψ(θ, ξ) = (θ + α₁, ξ + τ₁(0, θ, ξ)·β) on T³.
std::array<double, 3> poincare_map(const ODESpec& spec, const IntegratorConfig& cfg,
                                   const std::array<double, 3>& zeta);

struct BoundednessReport {
    double rho_hat = 0.0;
    double sup_abs_xi = 0.0;             // raw sup |ξ(t)| over samples
    double sup_abs_xi_minus_drift = 0.0; // sup |ξ(t) − x0 − t ρ̂|
    DeviationProfile profile;
};

/// Diagnoses both the raw solution bound and the drift-corrected one;
/// the corollary's criterion concerns |ξ| in the drift-free normalization,
/// so both are reported.
BoundednessReport boundedness_check(const ODESpec& spec, const IntegratorConfig& cfg,
                                    double horizon, double x0 = 0.0);

struct ScanRow {
    double epsilon = 0.0;
    double rho_hat = 0.0;
    double cauchy_gap = 0.0;
    double deviation_max = 0.0;
    bool blowup = false;
};

struct EpsilonScanResult {
    std::vector<ScanRow> rows;
    /// rows[i+1].rho_hat ≥ rows[i].rho_hat − 2·max(gap_i, gap_{i+1})
    std::vector<bool> nondecreasing_within_gap;
    /// maximal index runs with rho spread ≤ 2·(max cauchy gap in the run)
    std::vector<std::pair<std::size_t, std::size_t>> plateaus;
};

/// Per-ε translation number table for the perturbed field x' = f + ε.
/// Blow-ups are recorded per point and the scan continues. Exploratory
/// data for the mode-locking question; never a claim either way.
EpsilonScanResult epsilon_scan(const ODESpec& spec, const IntegratorConfig& cfg,
                               std::span<const double> eps_grid, double horizon,
                               std::size_t threads = 0);

/// Numerical probe of rotation-number dependence on the initial fiber
/// phase: estimates from `count` seeded v-phases. Disagreement is
/// reported, not failed.
struct PhaseProbe {
    std::vector<double> rho_hats;
    double spread = 0.0;
    double max_cauchy_gap = 0.0;
};

PhaseProbe initial_phase_probe(const ODESpec& spec, const IntegratorConfig& cfg, double horizon,
                               int count, unsigned long seed);

/// Dispersion (max − min) of Birkhoff averages of cos(2π v₁) across seeded
/// initial states. Exploratory output for the unique-ergodicity question.
double birkhoff_dispersion(const ODESpec& spec, const IntegratorConfig& cfg, double horizon,
                           int count, unsigned long seed);

/// Foliated view on T^4: the leaf flow shifts v along β, the transversal
/// action shifts u along α, τ over one sample step integrates the ODE
/// from the current phase.
class ApOdeFoliation final : public FoliatedSystem {
public:
    ApOdeFoliation(ODESpec spec, IntegratorConfig cfg, double sample_step = 1.0)
        : spec_(std::move(spec)), cfg_(cfg), step_(sample_step) {}

    TimeDomain time_domain() const override { return TimeDomain::continuous(step_); }
    Point leaf_translate(const Point& x, double s) const override {
        return Point{x[0], x[1], wrap01(x[2] + s * spec_.beta[0]), wrap01(x[3] + s * spec_.beta[1])};
    }
    Point transversal(const Point& x, double t) const override {
        return Point{wrap01(x[0] + t), wrap01(x[1] + t * spec_.alpha1), x[2], x[3]};
    }
    double translation_step(const Point& x) const override {
        return integrate_ode(spec_, cfg_, {x[0], x[1]}, {x[2], x[3]}, 0.0, step_);
    }
    double distance(const Point& x, const Point& y) const override {
        double m = 0.0;
        for (std::size_t i = 0; i < 4; ++i) m = std::max(m, circle_dist(x[i], y[i]));
        return m;
    }

    const ODESpec& spec() const { return spec_; }
    const IntegratorConfig& config() const { return cfg_; }

private:
    ODESpec spec_;
    IntegratorConfig cfg_;
    double step_;
};

} // namespace folab
