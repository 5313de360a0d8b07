#include "folab/apode.hpp"

#include "folab/apline.hpp" // shared integer-relation screening
#include "folab/errors.hpp"
#include "folab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace folab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

} // namespace

double TorusFourierField::operator()(const std::array<double, 2>& u,
                                     const std::array<double, 2>& v) const {
    double s = 0.0;
    for (const auto& m : modes_) {
        const double arg = m.k[0] * u[0] + m.k[1] * u[1] + m.k[2] * v[0] + m.k[3] * v[1];
        s += m.amp * std::cos(two_pi * arg + m.phase);
    }
    return s;
}

double TorusFourierField::lipschitz_bound() const {
    double s = 0.0;
    for (const auto& m : modes_) {
        int kmax = 0;
        for (int ki : m.k) kmax = std::max(kmax, std::abs(ki));
        s += std::abs(m.amp) * two_pi * kmax;
    }
    return s;
}

bool frequencies_screened(const ODESpec& spec, int K, double tol) {
    std::vector<double> values{1.0};
    if (spec.alpha1 != 0.0) values.push_back(spec.alpha1);
    if (spec.beta[0] != 0.0) values.push_back(spec.beta[0]);
    if (spec.beta[1] != 0.0) values.push_back(spec.beta[1]);
    return screen_rational_independence(values, K, tol);
}

double integrate_ode(const ODESpec& spec, const IntegratorConfig& cfg,
                     const std::array<double, 2>& u, const std::array<double, 2>& v,
                     double x_init, double t) {
    if (!(t >= 0.0)) throw Error("integrate_ode: time must be nonnegative");
    if (!(cfg.step > 0.0)) throw Error("integrate_ode: step must be positive");
    if (t == 0.0) return x_init;

    const auto alpha = spec.alpha();
    auto f = [&](double s, double x) {
        const std::array<double, 2> uu{u[0] + s * alpha[0], u[1] + s * alpha[1]};
        const std::array<double, 2> vv{v[0] + x * spec.beta[0], v[1] + x * spec.beta[1]};
        return spec.field(uu, vv) + spec.epsilon;
    };

    const long long n = std::max<long long>(1, std::llround(std::ceil(t / cfg.step - 1e-12)));
    const double h = t / static_cast<double>(n);

    double x = x_init;
    double comp = 0.0; // compensation for the state accumulation
    for (long long i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) * h;
        const double k1 = f(s, x);
        const double k2 = f(s + 0.5 * h, x + 0.5 * h * k1);
        const double k3 = f(s + 0.5 * h, x + 0.5 * h * k2);
        const double k4 = f(s + h, x + h * k3);
        const double incr = h * (k1 + 2.0 * (k2 + k3) + k4) / 6.0;
        const double y = incr - comp;
        const double xt = x + y;
        comp = (xt - x) - y;
        x = xt;
        if (!std::isfinite(x)) {
            std::ostringstream msg;
            msg << "integrate_ode: solution blew up at t = " << (i + 1) * h;
            throw NumericOverflowError(msg.str());
        }
    }
    return x;
}

double integrate_xi(const ODESpec& spec, const IntegratorConfig& cfg, double t, double x0) {
    return integrate_ode(spec, cfg, {0.0, 0.0}, {0.0, 0.0}, x0, t);
}

XiResult integrate_xi_checked(const ODESpec& spec, const IntegratorConfig& cfg, double t,
                              double x0) {
    XiResult r;
    r.value = integrate_xi(spec, cfg, t, x0);
    IntegratorConfig half = cfg;
    half.step = cfg.step / 2.0;
    const double fine = integrate_xi(spec, half, t, x0);
    r.halfstep_gap = std::abs(r.value - fine);
    r.step_warning = r.halfstep_gap > cfg.tolerance * (1.0 + t);
    return r;
}

TorusState torus_flow(const ODESpec& spec, const IntegratorConfig& cfg, const TorusState& z,
                      double t) {
    const double tau = integrate_ode(spec, cfg, z.u, z.v, 0.0, t);
    const auto alpha = spec.alpha();
    TorusState out;
    out.u = {wrap01(z.u[0] + t * alpha[0]), wrap01(z.u[1] + t * alpha[1])};
    out.v = {wrap01(z.v[0] + tau * spec.beta[0]), wrap01(z.v[1] + tau * spec.beta[1])};
    out.accumulated_xi = z.accumulated_xi + tau;
    return out;
}

std::array<double, 3> poincare_map(const ODESpec& spec, const IntegratorConfig& cfg,
                                   const std::array<double, 3>& zeta) {
    const double tau = integrate_ode(spec, cfg, {0.0, zeta[0]}, {zeta[1], zeta[2]}, 0.0, 1.0);
    return {wrap01(zeta[0] + spec.alpha1), wrap01(zeta[1] + tau * spec.beta[0]),
            wrap01(zeta[2] + tau * spec.beta[1])};
}

BoundednessReport boundedness_check(const ODESpec& spec, const IntegratorConfig& cfg,
                                    double horizon, double x0) {
    if (!(horizon > 0.0)) throw Error("boundedness_check: horizon must be positive");
    const ApOdeFoliation sys(spec, cfg, 1.0);
    const Point z0{0.0, 0.0, wrap01(x0 * spec.beta[0]), wrap01(x0 * spec.beta[1])};
    const double T = std::floor(horizon);
    const CocycleTrace trace = accumulate_trace(sys, z0, T, SampleSchedule::linear(512));

    BoundednessReport report;
    const TranslationEstimate est = estimate_rho(trace);
    report.rho_hat = est.rho_hat;
    report.profile = deviation_profile(trace, est.rho_hat);
    report.sup_abs_xi_minus_drift = report.profile.max_deviation();
    report.sup_abs_xi = std::abs(x0); // t = 0 sample
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        report.sup_abs_xi = std::max(report.sup_abs_xi, std::abs(x0 + trace.tau_values[i]));
    return report;
}

EpsilonScanResult epsilon_scan(const ODESpec& spec, const IntegratorConfig& cfg,
                               std::span<const double> eps_grid, double horizon,
                               std::size_t threads) {
    if (eps_grid.empty()) throw Error("epsilon_scan: empty grid");
    for (std::size_t i = 1; i < eps_grid.size(); ++i)
        if (eps_grid[i] < eps_grid[i - 1]) throw Error("epsilon_scan: grid must be sorted");

    EpsilonScanResult result;
    result.rows.resize(eps_grid.size());
    parallel_for(
        eps_grid.size(),
        [&](std::size_t i) {
            ScanRow row;
            row.epsilon = eps_grid[i];
            ODESpec pert = spec;
            pert.epsilon = spec.epsilon + eps_grid[i];
            try {
                const ApOdeFoliation sys(pert, cfg, 1.0);
                const Point z0{0.0, 0.0, 0.0, 0.0};
                const CocycleTrace trace =
                    accumulate_trace(sys, z0, std::floor(horizon), SampleSchedule::linear(256));
                const TranslationEstimate est = estimate_rho(trace);
                row.rho_hat = est.rho_hat;
                row.cauchy_gap = est.cauchy_gap;
                row.deviation_max = deviation_profile(trace, est.rho_hat).max_deviation();
            } catch (const NumericOverflowError&) {
                row.blowup = true;
                row.rho_hat = std::numeric_limits<double>::quiet_NaN();
                row.cauchy_gap = std::numeric_limits<double>::quiet_NaN();
                row.deviation_max = std::numeric_limits<double>::quiet_NaN();
            }
            result.rows[i] = row;
        },
        threads);

    for (std::size_t i = 0; i + 1 < result.rows.size(); ++i) {
        const ScanRow& a = result.rows[i];
        const ScanRow& b = result.rows[i + 1];
        if (a.blowup || b.blowup) {
            result.nondecreasing_within_gap.push_back(false);
            continue;
        }
        const double slack = 2.0 * std::max(a.cauchy_gap, b.cauchy_gap);
        result.nondecreasing_within_gap.push_back(b.rho_hat >= a.rho_hat - slack);
    }

    std::size_t i = 0;
    while (i < result.rows.size()) {
        if (result.rows[i].blowup) {
            ++i;
            continue;
        }
        std::size_t j = i;
        double lo = result.rows[i].rho_hat;
        double hi = lo;
        double gap = result.rows[i].cauchy_gap;
        while (j + 1 < result.rows.size() && !result.rows[j + 1].blowup) {
            const double r = result.rows[j + 1].rho_hat;
            const double nlo = std::min(lo, r);
            const double nhi = std::max(hi, r);
            const double ngap = std::max(gap, result.rows[j + 1].cauchy_gap);
            if (nhi - nlo > 2.0 * ngap) break;
            lo = nlo;
            hi = nhi;
            gap = ngap;
            ++j;
        }
        if (j > i) result.plateaus.emplace_back(i, j);
        i = j + 1;
    }
    return result;
}

PhaseProbe initial_phase_probe(const ODESpec& spec, const IntegratorConfig& cfg, double horizon,
                               int count, unsigned long seed) {
    if (count < 1) throw Error("initial_phase_probe: count must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const ApOdeFoliation sys(spec, cfg, 1.0);

    PhaseProbe probe;
    for (int i = 0; i < count; ++i) {
        const Point z0{0.0, 0.0, unif(rng), unif(rng)};
        const CocycleTrace trace =
            accumulate_trace(sys, z0, std::floor(horizon), SampleSchedule::linear(128));
        const TranslationEstimate est = estimate_rho(trace);
        probe.rho_hats.push_back(est.rho_hat);
        probe.max_cauchy_gap = std::max(probe.max_cauchy_gap, est.cauchy_gap);
    }
    const auto [lo, hi] = std::minmax_element(probe.rho_hats.begin(), probe.rho_hats.end());
    probe.spread = *hi - *lo;
    return probe;
}

double birkhoff_dispersion(const ODESpec& spec, const IntegratorConfig& cfg, double horizon,
                           int count, unsigned long seed) {
    if (count < 1) throw Error("birkhoff_dispersion: count must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const ApOdeFoliation sys(spec, cfg, 1.0);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const long long n = static_cast<long long>(std::floor(horizon));
    for (int i = 0; i < count; ++i) {
        Point z{unif(rng), unif(rng), unif(rng), unif(rng)};
        KahanSum avg;
        for (long long k = 0; k < n; ++k) {
            avg.add(std::cos(two_pi * z[2]));
            z = sys.leaf_translate(sys.transversal(z, 1.0), sys.translation_step(z));
        }
        const double mean = avg.value() / static_cast<double>(n);
        lo = std::min(lo, mean);
        hi = std::max(hi, mean);
    }
    return hi - lo;
}

} // namespace folab
