#include "folab/skew.hpp"

#include "folab/apline.hpp" // shared integer-relation screening
#include "folab/errors.hpp"
#include "folab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace folab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

bool check_fiber(const FiberLift& lift, const std::vector<double>& w, int grid, bool& periodic_ok,
                 bool& monotone) {
    periodic_ok = true;
    monotone = true;
    const std::size_t d = w.size();
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> x0(d);
    for (int rep = 0; rep < 16; ++rep) {
        for (auto& c : x0) c = unif(rng);
        double prev = lift(x0, 0.0);
        if (std::abs(lift(x0, 1.0) - prev - 1.0) > 1e-9) periodic_ok = false;
        for (int i = 1; i <= grid; ++i) {
            const double xp = static_cast<double>(i) / grid;
            const double v = lift(x0, xp);
            if (v < prev - 1e-12) monotone = false;
            prev = v;
            if (std::abs(lift(x0, xp + 1.0) - v - 1.0) > 1e-9) periodic_ok = false;
        }
    }
    return periodic_ok && monotone;
}

} // namespace

SkewProduct::SkewProduct(std::string name, std::vector<double> w, FiberLift lift, bool periodic_ok,
                         bool monotone)
    : name_(std::move(name)), base_freq_(std::move(w)), lift_(std::move(lift)),
      periodic_ok_(periodic_ok), monotone_(monotone) {
    if (base_freq_.empty()) throw Error("SkewProduct: base dimension must be >= 1");
    if (base_freq_.size() + 1 > Point::max_dim)
        throw Error("SkewProduct: base dimension exceeds the state capacity");
    std::vector<double> screened{1.0};
    screened.insert(screened.end(), base_freq_.begin(), base_freq_.end());
    base_screened_ = screen_rational_independence(screened, 20, 1e-9);
}

SkewProduct SkewProduct::qpf_arnold(double Omega, double K, double A,
                                    std::vector<double> base_freq) {
    auto lift = [Omega, K, A](std::span<const double> x0, double xp) {
        return xp + Omega + (K / two_pi) * std::sin(two_pi * xp) + A * std::sin(two_pi * x0[0]);
    };
    return SkewProduct("qpf-arnold", std::move(base_freq), std::move(lift),
                       /*periodic_ok=*/true, /*monotone=*/K >= 0.0 && K <= 1.0);
}

SkewProduct SkewProduct::sheared_product(double rho, double c, std::vector<double> base_freq) {
    const double w1 = base_freq.at(0);
    auto lift = [rho, c, w1](std::span<const double> x0, double xp) {
        return xp + rho + c * (std::sin(two_pi * (x0[0] + w1)) - std::sin(two_pi * x0[0]));
    };
    return SkewProduct("sheared-product", std::move(base_freq), std::move(lift), true, true);
}

SkewProduct SkewProduct::custom(std::string name, std::vector<double> base_freq, FiberLift lift,
                                int check_grid) {
    bool periodic_ok = true;
    bool monotone = true;
    check_fiber(lift, base_freq, check_grid, periodic_ok, monotone);
    return SkewProduct(std::move(name), std::move(base_freq), std::move(lift), periodic_ok,
                       monotone);
}

SkewFoliation as_foliated(const SkewProduct& system) {
    if (!system.fiber_periodic_ok())
        throw InvalidSystemError("as_foliated: fiber lift is not 1-periodic in x'");
    if (!system.fiber_monotone())
        throw InvalidSystemError("as_foliated: fiber lift is not monotone in x'");
    if (!system.base_screened())
        throw InvalidSystemError(
            "as_foliated: base frequencies failed rational-independence screening");
    return SkewFoliation(system);
}

TranslationEstimate fiber_rotation_number(const SkewProduct& system, const Point& x, long long N) {
    if (N < 1) throw Error("fiber_rotation_number: N must be >= 1");
    if (!system.base_screened())
        throw InvalidSystemError(
            "fiber_rotation_number: base frequencies failed independence screening");
    if (!system.fiber_monotone())
        throw InvalidSystemError("fiber_rotation_number: fiber lift is not monotone");

    const auto& w = system.base_frequency();
    const std::size_t d = w.size();
    std::vector<double> x0(d);
    for (std::size_t i = 0; i < d; ++i) x0[i] = wrap01(x[i]);
    double xp = wrap01(x[d]);

    KahanSum tau;
    double tau_half = 0.0;
    const long long half = N / 2;
    for (long long k = 0; k < N; ++k) {
        const double next = system.fiber_lift(x0, xp);
        tau.add(next - xp);
        xp = wrap01(next);
        for (std::size_t i = 0; i < d; ++i) x0[i] = wrap01(x0[i] + w[i]);
        if (k + 1 == half) tau_half = tau.value();
    }
    TranslationEstimate est;
    est.rho_hat = tau.value() / static_cast<double>(N);
    est.horizon = static_cast<double>(N);
    est.cauchy_gap =
        half > 0 ? std::abs(est.rho_hat - tau_half / static_cast<double>(half)) : 0.0;
    return est;
}

double fiber_rho_spread(const SkewProduct& system, long long N, int count, unsigned long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Point> starts(count);
    for (Point& x : starts)
        for (int c = 0; c <= system.base_dim(); ++c) x.push_back(unif(rng));

    std::vector<double> rhos(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
        rhos[i] = fiber_rotation_number(system, starts[i], N).rho_hat;
    });
    const auto [lo, hi] = std::minmax_element(rhos.begin(), rhos.end());
    return *hi - *lo;
}

DeviationProfile bmm_test(const SkewProduct& system, double rho, double horizon, int sample_count,
                          unsigned long seed) {
    if (!std::isfinite(rho)) throw Error("bmm_test: rho must be finite");
    if (sample_count < 1) throw Error("bmm_test: sample_count must be >= 1");
    const SkewFoliation sys = as_foliated(system);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Point> starts(sample_count);
    for (Point& x : starts)
        for (int c = 0; c <= system.base_dim(); ++c) x.push_back(unif(rng));

    std::vector<DeviationProfile> profiles(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
        const CocycleTrace trace =
            accumulate_trace(sys, starts[i], horizon, SampleSchedule::linear(512));
        profiles[i] = deviation_profile(trace, rho);
    });

    std::vector<double> checkpoints = profiles.front().checkpoints;
    std::vector<double> merged = profiles.front().deviations;
    for (std::size_t i = 1; i < profiles.size(); ++i)
        for (std::size_t j = 0; j < merged.size(); ++j)
            merged[j] = std::max(merged[j], profiles[i].deviations[j]);
    return make_profile(std::move(checkpoints), std::move(merged));
}

SemiconjugacyReport fiber_semiconjugacy(const SkewProduct& system, double rho, int base_grid,
                                        int fiber_grid, double horizon) {
    if (base_grid < 1 || fiber_grid < 1)
        throw Error("fiber_semiconjugacy: grid sizes must be >= 1");
    const SkewFoliation sys = as_foliated(system);

    std::vector<Point> grid;
    grid.reserve(static_cast<std::size_t>(base_grid) * fiber_grid);
    for (int b = 0; b < base_grid; ++b) {
        for (int f = 0; f < fiber_grid; ++f) {
            Point x;
            x.push_back(static_cast<double>(b) / base_grid);
            for (int c = 1; c < system.base_dim(); ++c) x.push_back(0.0);
            x.push_back(static_cast<double>(f) / fiber_grid);
            grid.push_back(x);
        }
    }

    GammaEstimate gamma = estimate_gamma_batch(sys, grid, rho, horizon);
    const double T0 = gamma.burn_in_T0;
    GammaFn gamma_fn = [&sys, rho, T0, horizon](const Point& x) {
        return estimate_gamma(sys, x, rho, T0, horizon);
    };
    const double times[] = {1.0};
    SemiconjugacyReport report = semiconjugacy_residual(sys, rho, gamma_fn, grid, times);
    report.gamma_ref = std::move(gamma);
    return report;
}

} // namespace folab
