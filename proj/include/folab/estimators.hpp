#pragma once

#include "folab/errors.hpp"
#include "folab/foliated.hpp"

#include <functional>
#include <span>
#include <vector>

namespace folab {

/// Which sample times a trace records. The walk itself always visits every
/// step; the schedule only selects what is kept. The final time (the
/// horizon) is always included.
struct SampleSchedule {
    enum class Kind { Linear, Geometric };
    Kind kind = Kind::Linear;
    std::size_t count = 256; // target sample count for linear schedules
    double ratio = 2.0;      // step ratio for geometric schedules

    static SampleSchedule linear(std::size_t n) { return {Kind::Linear, n, 2.0}; }
    static SampleSchedule geometric(double r = 2.0) { return {Kind::Geometric, 0, r}; }
};

struct EvolveResult {
    Point state;
    double tau = 0.0; // accumulated translation over the requested time
};

/// Sampled cocycle t ↦ τ_t(x) along one orbit.
struct CocycleTrace {
    Point base_point;
    std::vector<double> times;      // strictly increasing, > 0
    std::vector<double> tau_values; // tau_values[k] = τ_{times[k]}(base_point)
    Point final_state;

    double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

struct TranslationEstimate {
    double rho_hat = 0.0;
    double cauchy_gap = 0.0; // |estimate at T − estimate near T/2|
    double horizon = 0.0;
};

enum class Boundedness { Bounded, Unbounded, Inconclusive };

/// Growth record of sup_{t ≤ T} |τ_t − tρ| on a geometric checkpoint grid.
struct DeviationProfile {
    std::vector<double> checkpoints;
    std::vector<double> deviations; // nondecreasing in j
    Boundedness classification = Boundedness::Inconclusive;
    double loglog_slope = 0.0;

    double max_deviation() const { return deviations.empty() ? 0.0 : deviations.back(); }
};

/// Pointwise coboundary estimates γ̂ over a set of sample states.
struct GammaEstimate {
    std::vector<Point> sample_points;
    std::vector<double> gamma_values;
    double burn_in_T0 = 0.0;
    double horizon_T = 0.0;
    double convergence_delta = 0.0; // max_i |γ̂_i at T − γ̂_i at T/2|
};

struct SemiconjugacyReport {
    double rho_used = 0.0;
    double residual_sup = 0.0;
    std::vector<double> t_tested;
    std::vector<double> per_sample_residuals;
    GammaEstimate gamma_ref;
};

/// Φ_t(x) = ω_t(x) ⊙ τ_t(x), computed by chaining one-step evolutions.
/// t ≥ 0 and, for continuous time, a multiple of the sample step.
/// Throws NumericOverflowError naming the offending step if the state or
/// the cocycle stops being finite.
EvolveResult evolve(const FoliatedSystem& sys, const Point& x, double t);

/// Walk the orbit up to `horizon`, recording τ at scheduled times.
CocycleTrace accumulate_trace(const FoliatedSystem& sys, const Point& x, double horizon,
                              const SampleSchedule& schedule = {});

/// Endpoint estimate τ_T / T at the largest sampled time, with a Cauchy
/// gap against the sample nearest T/2. Throws InvalidTraceError on an
/// empty or zero-horizon trace.
TranslationEstimate estimate_rho(const CocycleTrace& trace);

/// Cesàro variant: mean of τ_{t_k}/t_k over the recorded samples.
TranslationEstimate estimate_rho_cesaro(const CocycleTrace& trace);

/// Deviation growth D(T_j) = max_{t ≤ T_j} |τ_t − tρ| on a ratio-2
/// checkpoint grid, classified by the least-squares slope of
/// log D vs log T (< 0.05 bounded, > 0.2 unbounded, else inconclusive).
DeviationProfile deviation_profile(const CocycleTrace& trace, double rho);

/// Classify an already-assembled (checkpoints, deviations) record, e.g.
/// after max-merging profiles from several initial states.
DeviationProfile make_profile(std::vector<double> checkpoints, std::vector<double> deviations);

/// Finite-window surrogate of γ(x) = limsup_t (τ_t(x) − tρ): the running
/// max over sampled t in [T0, T]. Monotone nondecreasing in T for fixed T0.
double estimate_gamma(const FoliatedSystem& sys, const Point& x, double rho, double T0,
                      double T);

/// Batch γ̂ over sample points; convergence_delta compares horizons T and T/2.
/// burn_in_T0 < 0 selects the default T/10.
GammaEstimate estimate_gamma_batch(const FoliatedSystem& sys, std::span<const Point> samples,
                                   double rho, double T, double burn_in_T0 = -1.0);

using GammaFn = std::function<double(const Point&)>;

/// Residual of h ∘ Φ_t = T^ρ_t ∘ h with h(x) = x ⊙ γ(x) and
/// T^ρ_t(x) = ω_t(x) ⊙ tρ, maximized over samples and times.
SemiconjugacyReport semiconjugacy_residual(const FoliatedSystem& sys, double rho,
                                           const GammaFn& gamma_fn,
                                           std::span<const Point> samples,
                                           std::span<const double> times);

/// |τ_{s+t}(x) − τ_s(Φ_t(x)) − τ_t(x)|.
double check_cocycle_identity(const FoliatedSystem& sys, const Point& x, double s, double t);

/// distance(ω_s(x ⊙ t), ω_s(x) ⊙ t).
double check_commutation(const FoliatedSystem& sys, const Point& x, double s, double t);

/// min over the grid of t + τ(x ⊙ t) − τ(x), τ taken over one step.
/// Nonnegative (up to tolerance) certifies order preservation on samples.
double check_order_preservation(const FoliatedSystem& sys, const Point& x,
                                std::span<const double> t_grid);

} // namespace folab
