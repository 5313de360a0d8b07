#include "folab/estimators.hpp"

#include "folab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>

namespace folab {

namespace {

long long steps_for(const FoliatedSystem& sys, double t, const char* what) {
    if (!(t >= 0.0)) throw Error(std::string(what) + ": time must be nonnegative");
    const double h = sys.time_domain().sample_step;
    if (!(h > 0.0)) throw Error(std::string(what) + ": sample step must be positive");
    const double r = t / h;
    const long long n = std::llround(r);
    if (std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, std::abs(r)))
        throw Error(std::string(what) + ": time is not a multiple of the sample step");
    return n;
}

// One-step chaining of Φ_h(x) = ω_h(x) ⊙ τ_h(x); obs(k, t_k, τ_k, x_k)
// sees the orbit after each step, with τ accumulated by compensated sums.
template <class Observer>
EvolveResult walk(const FoliatedSystem& sys, Point x, long long nsteps, Observer&& obs) {
    const double h = sys.time_domain().sample_step;
    KahanSum tau;
    for (long long k = 0; k < nsteps; ++k) {
        const double step_tau = sys.translation_step(x);
        if (!std::isfinite(step_tau)) {
            std::ostringstream msg;
            msg << "non-finite translation at step " << k + 1 << " (t = " << (k + 1) * h << ")";
            throw NumericOverflowError(msg.str());
        }
        x = sys.leaf_translate(sys.transversal(x, h), step_tau);
        if (!x.finite()) {
            std::ostringstream msg;
            msg << "non-finite state at step " << k + 1 << " (t = " << (k + 1) * h << ")";
            throw NumericOverflowError(msg.str());
        }
        tau.add(step_tau);
        obs(k + 1, (k + 1) * h, tau.value(), x);
    }
    return {x, tau.value()};
}

struct NullObserver {
    void operator()(long long, double, double, const Point&) const {}
};

double fit_loglog_slope(const std::vector<double>& ts, const std::vector<double>& ds) {
    // least squares on points with positive deviation
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ds[i] <= 1e-15) continue;
        const double lx = std::log(ts[i]);
        const double ly = std::log(ds[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return 0.0;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (n * sxy - sx * sy) / denom;
}

} // namespace

std::size_t default_thread_count(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FOLIATION_LAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

EvolveResult evolve(const FoliatedSystem& sys, const Point& x, double t) {
    const long long n = steps_for(sys, t, "evolve");
    return walk(sys, x, n, NullObserver{});
}

CocycleTrace accumulate_trace(const FoliatedSystem& sys, const Point& x, double horizon,
                              const SampleSchedule& schedule) {
    const long long n = steps_for(sys, horizon, "accumulate_trace");
    if (n <= 0) throw Error("accumulate_trace: horizon must be positive");

    long long stride = 1;
    if (schedule.kind == SampleSchedule::Kind::Linear && schedule.count > 0)
        stride = std::max<long long>(1, n / static_cast<long long>(schedule.count));

    CocycleTrace trace;
    trace.base_point = x;
    long long next_record = (schedule.kind == SampleSchedule::Kind::Linear) ? stride : 1;
    auto obs = [&](long long k, double tk, double tauk, const Point&) {
        if (k == n || k >= next_record) {
            trace.times.push_back(tk);
            trace.tau_values.push_back(tauk);
            if (schedule.kind == SampleSchedule::Kind::Linear) {
                next_record = k + stride;
            } else {
                const double grown = static_cast<double>(k) * schedule.ratio;
                next_record = std::max(k + 1, static_cast<long long>(std::ceil(grown)));
            }
        }
    };
    auto end = walk(sys, x, n, obs);
    trace.final_state = end.state;
    return trace;
}

TranslationEstimate estimate_rho(const CocycleTrace& trace) {
    if (trace.times.empty() || trace.horizon() <= 0.0)
        throw InvalidTraceError("estimate_rho: empty trace or zero horizon");
    const double T = trace.times.back();
    const double rho = trace.tau_values.back() / T;

    // sample nearest to T/2 for the Cauchy diagnostic
    const double half = T / 2.0;
    auto it = std::lower_bound(trace.times.begin(), trace.times.end(), half);
    if (it == trace.times.end()) --it;
    if (it != trace.times.begin()) {
        auto prev = std::prev(it);
        if (std::abs(*prev - half) < std::abs(*it - half)) it = prev;
    }
    const std::size_t i = static_cast<std::size_t>(it - trace.times.begin());
    const double rho_half = trace.tau_values[i] / trace.times[i];

    TranslationEstimate est;
    est.rho_hat = rho;
    est.cauchy_gap = (trace.times.size() > 1) ? std::abs(rho - rho_half) : 0.0;
    est.horizon = T;
    return est;
}

TranslationEstimate estimate_rho_cesaro(const CocycleTrace& trace) {
    if (trace.times.empty() || trace.horizon() <= 0.0)
        throw InvalidTraceError("estimate_rho_cesaro: empty trace or zero horizon");
    KahanSum all;
    KahanSum half;
    std::size_t n_half = 0;
    const double half_T = trace.horizon() / 2.0;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double r = trace.tau_values[i] / trace.times[i];
        all.add(r);
        if (trace.times[i] <= half_T) {
            half.add(r);
            ++n_half;
        }
    }
    TranslationEstimate est;
    est.rho_hat = all.value() / static_cast<double>(trace.times.size());
    est.cauchy_gap = n_half > 0 ? std::abs(est.rho_hat - half.value() / static_cast<double>(n_half)) : 0.0;
    est.horizon = trace.horizon();
    return est;
}

DeviationProfile make_profile(std::vector<double> checkpoints, std::vector<double> deviations) {
    DeviationProfile profile;
    profile.checkpoints = std::move(checkpoints);
    profile.deviations = std::move(deviations);
    if (profile.deviations.empty() || profile.deviations.back() <= 1e-12) {
        profile.classification = Boundedness::Bounded;
        profile.loglog_slope = 0.0;
        return profile;
    }
    profile.loglog_slope = fit_loglog_slope(profile.checkpoints, profile.deviations);
    if (profile.loglog_slope < 0.05)
        profile.classification = Boundedness::Bounded;
    else if (profile.loglog_slope > 0.2)
        profile.classification = Boundedness::Unbounded;
    else
        profile.classification = Boundedness::Inconclusive;
    return profile;
}

DeviationProfile deviation_profile(const CocycleTrace& trace, double rho) {
    if (!std::isfinite(rho)) throw Error("deviation_profile: rho must be finite");
    if (trace.times.empty()) throw InvalidTraceError("deviation_profile: empty trace");

    const double T = trace.times.back();
    const double t0 = trace.times.front();
    int levels = 1;
    while (levels < 12 && T / std::pow(2.0, levels) >= t0) ++levels;

    std::vector<double> checkpoints(levels);
    for (int j = 0; j < levels; ++j) checkpoints[j] = T / std::pow(2.0, levels - 1 - j);
    std::vector<double> deviations(levels, 0.0);

    double running = 0.0;
    std::size_t i = 0;
    for (int j = 0; j < levels; ++j) {
        const double tj = checkpoints[j] * (1.0 + 1e-12);
        while (i < trace.times.size() && trace.times[i] <= tj) {
            running = std::max(running, std::abs(trace.tau_values[i] - trace.times[i] * rho));
            ++i;
        }
        deviations[j] = running;
    }
    return make_profile(std::move(checkpoints), std::move(deviations));
}

double estimate_gamma(const FoliatedSystem& sys, const Point& x, double rho, double T0, double T) {
    if (!(T > T0 && T0 >= 0.0)) throw Error("estimate_gamma: need T > T0 >= 0");
    const long long n = steps_for(sys, T, "estimate_gamma");
    double best = -std::numeric_limits<double>::infinity();
    walk(sys, x, n, [&](long long, double tk, double tauk, const Point&) {
        if (tk >= T0) best = std::max(best, tauk - tk * rho);
    });
    return best;
}

GammaEstimate estimate_gamma_batch(const FoliatedSystem& sys, std::span<const Point> samples,
                                   double rho, double T, double burn_in_T0) {
    if (burn_in_T0 < 0.0) burn_in_T0 = T / 10.0;
    if (!(T > burn_in_T0)) throw Error("estimate_gamma_batch: need T > T0");

    GammaEstimate out;
    out.sample_points.assign(samples.begin(), samples.end());
    out.gamma_values.assign(samples.size(), 0.0);
    out.burn_in_T0 = burn_in_T0;
    out.horizon_T = T;

    std::vector<double> deltas(samples.size(), 0.0);
    const long long n = steps_for(sys, T, "estimate_gamma_batch");
    const double half_T = T / 2.0;
    parallel_for(samples.size(), [&](std::size_t i) {
        double best = -std::numeric_limits<double>::infinity();
        double best_half = best;
        walk(sys, samples[i], n, [&](long long, double tk, double tauk, const Point&) {
            if (tk < burn_in_T0) return;
            const double v = tauk - tk * rho;
            if (v > best) best = v;
            if (tk <= half_T && v > best_half) best_half = v;
        });
        out.gamma_values[i] = best;
        deltas[i] = std::isfinite(best_half) ? best - best_half : 0.0;
    });
    out.convergence_delta = *std::max_element(deltas.begin(), deltas.end());
    return out;
}

SemiconjugacyReport semiconjugacy_residual(const FoliatedSystem& sys, double rho,
                                           const GammaFn& gamma_fn,
                                           std::span<const Point> samples,
                                           std::span<const double> times) {
    if (samples.empty()) throw Error("semiconjugacy_residual: no sample states");
    SemiconjugacyReport report;
    report.rho_used = rho;
    report.t_tested.assign(times.begin(), times.end());
    report.per_sample_residuals.assign(samples.size(), 0.0);

    parallel_for(samples.size(), [&](std::size_t i) {
        const Point& x = samples[i];
        const Point hx = sys.leaf_translate(x, gamma_fn(x));
        double worst = 0.0;
        for (double t : times) {
            const Point phi_tx = evolve(sys, x, t).state;
            const Point lhs = sys.leaf_translate(phi_tx, gamma_fn(phi_tx));
            const Point rhs = sys.leaf_translate(sys.transversal(hx, t), t * rho);
            worst = std::max(worst, sys.distance(lhs, rhs));
        }
        report.per_sample_residuals[i] = worst;
    });
    report.residual_sup =
        *std::max_element(report.per_sample_residuals.begin(), report.per_sample_residuals.end());
    return report;
}

double check_cocycle_identity(const FoliatedSystem& sys, const Point& x, double s, double t) {
    const EvolveResult at_t = evolve(sys, x, t);
    const EvolveResult then_s = evolve(sys, at_t.state, s);
    const EvolveResult direct = evolve(sys, x, s + t);
    return std::abs(direct.tau - then_s.tau - at_t.tau);
}

double check_commutation(const FoliatedSystem& sys, const Point& x, double s, double t) {
    const Point a = sys.transversal(sys.leaf_translate(x, t), s);
    const Point b = sys.leaf_translate(sys.transversal(x, s), t);
    return sys.distance(a, b);
}

double check_order_preservation(const FoliatedSystem& sys, const Point& x,
                                std::span<const double> t_grid) {
    const double tau_x = sys.translation_step(x);
    double min_slack = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        const double slack = t + sys.translation_step(sys.leaf_translate(x, t)) - tau_x;
        min_slack = std::min(min_slack, slack);
    }
    return min_slack;
}

} // namespace folab
