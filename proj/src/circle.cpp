#include "folab/circle.hpp"

#include "folab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

namespace folab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

bool grid_monotone(const std::function<double(double)>& disp, int grid) {
    // F(x_{i+1}) >= F(x_i) on consecutive grid points, wrapping once
    double prev = 0.0 + disp(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double x = static_cast<double>(i) / grid;
        const double fx = x + disp(wrap01(x));
        if (fx < prev) return false;
        prev = fx;
    }
    return true;
}

} // namespace

CircleLift CircleLift::rigid(double rho0) {
    return CircleLift("rigid", [rho0](double) { return rho0; }, true);
}

CircleLift CircleLift::arnold(double Omega, double K) {
    auto disp = [Omega, K](double x) { return Omega + (K / two_pi) * std::sin(two_pi * x); };
    return CircleLift("arnold", std::move(disp), K >= 0.0 && K <= 1.0);
}

CircleLift CircleLift::custom(std::string name, std::function<double(double)> displacement,
                              int monotonicity_grid) {
    const bool mono = grid_monotone(displacement, monotonicity_grid);
    return CircleLift(std::move(name), std::move(displacement), mono);
}

TranslationEstimate rotation_number(const CircleLift& lift, double x0, long long N) {
    if (N < 1) throw Error("rotation_number: N must be >= 1");
    if (!lift.monotone())
        throw InvalidLiftError("rotation_number: lift '" + lift.name() + "' is not monotone");

    const long long half = N / 2;
    double y = wrap01(x0);
    KahanSum tau;
    double tau_half = 0.0;
    for (long long k = 0; k < N; ++k) {
        const double d = lift.displacement(y);
        tau.add(d);
        y = wrap01(y + d);
        if (k + 1 == half) tau_half = tau.value();
    }
    TranslationEstimate est;
    est.rho_hat = tau.value() / static_cast<double>(N);
    est.horizon = static_cast<double>(N);
    est.cauchy_gap =
        half > 0 ? std::abs(est.rho_hat - tau_half / static_cast<double>(half)) : 0.0;
    return est;
}

double rotation_number_weighted(const CircleLift& lift, double x0, long long N) {
    if (N < 2) throw Error("rotation_number_weighted: N must be >= 2");
    if (!lift.monotone())
        throw InvalidLiftError("rotation_number_weighted: lift '" + lift.name() +
                               "' is not monotone");
    // bump weight w(s) = exp(-1/(s(1-s))), vanishing to all orders at 0 and 1
    double y = wrap01(x0);
    KahanSum num;
    KahanSum den;
    for (long long k = 0; k < N; ++k) {
        const double s = (static_cast<double>(k) + 0.5) / static_cast<double>(N);
        const double w = std::exp(-1.0 / (s * (1.0 - s)));
        const double d = lift.displacement(y);
        num.add(w * d);
        den.add(w);
        y = wrap01(y + d);
    }
    return num.value() / den.value();
}

std::optional<PeriodicOrbitWitness> detect_periodic_orbit(const CircleLift& lift, long q_max,
                                                          double tol) {
    if (q_max < 1 || tol <= 0.0) throw Error("detect_periodic_orbit: need q_max >= 1, tol > 0");

    auto iterate_q = [&](double x, long q) {
        double y = wrap01(x);
        KahanSum tau;
        for (long k = 0; k < q; ++k) {
            const double d = lift.displacement(y);
            tau.add(d);
            y = wrap01(y + d);
        }
        return tau.value(); // F^q(x) - x
    };

    for (long q = 1; q <= q_max; ++q) {
        const int grid = std::max(64L, 8 * q);
        std::vector<double> g(grid + 1);
        double gmin = std::numeric_limits<double>::infinity();
        double gmax = -gmin;
        for (int i = 0; i <= grid; ++i) {
            const double x = static_cast<double>(i) / grid;
            g[i] = iterate_q(x, q);
            gmin = std::min(gmin, g[i]);
            gmax = std::max(gmax, g[i]);
        }
        const long p_lo = static_cast<long>(std::ceil(gmin - tol));
        const long p_hi = static_cast<long>(std::floor(gmax + tol));
        for (long p = p_lo; p <= p_hi; ++p) {
            if (std::gcd(std::abs(p), q) != 1) continue;
            // a grid point may already be (numerically) periodic
            for (int i = 0; i <= grid; ++i) {
                if (std::abs(g[i] - p) <= tol) {
                    return PeriodicOrbitWitness{p, q, static_cast<double>(i) / grid,
                                                std::abs(g[i] - p)};
                }
            }
            for (int i = 0; i < grid; ++i) {
                if ((g[i] - p) * (g[i + 1] - p) >= 0.0) continue;
                double lo = static_cast<double>(i) / grid;
                double hi = static_cast<double>(i + 1) / grid;
                double glo = g[i] - p;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = iterate_q(mid, q) - p;
                    if (std::abs(gm) <= tol) {
                        return PeriodicOrbitWitness{p, q, mid, std::abs(gm)};
                    }
                    if ((gm > 0) == (glo > 0)) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
            }
        }
    }
    return std::nullopt;
}

double tune_omega_to_rho(double K, double rho_target, double tol, long long N, int max_iter) {
    if (!(K >= 0.0 && K < 1.0)) throw Error("tune_omega_to_rho: need 0 <= K < 1");
    if (!(rho_target >= 0.0 && rho_target < 1.0))
        throw Error("tune_omega_to_rho: need rho_target in [0, 1)");
    if (K == 0.0) return rho_target; // rigid family: rho(Omega) = Omega

    auto measured = [&](double Omega) {
        return rotation_number_weighted(CircleLift::arnold(Omega, K), 0.0, N);
    };

    double lo = rho_target - K;
    double hi = rho_target + K;
    double glo = measured(lo) - rho_target;
    double ghi = measured(hi) - rho_target;
    if (glo > 0.0 || ghi < 0.0)
        throw TuningFailureError("tune_omega_to_rho: target not bracketed");

    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = measured(mid) - rho_target;
        if (std::abs(gm) <= 0.5 * tol) {
            return mid;
        }
        if (gm < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15) {
            const double final_gap = std::abs(measured(0.5 * (lo + hi)) - rho_target);
            if (final_gap <= tol) return 0.5 * (lo + hi);
            break;
        }
    }
    std::ostringstream msg;
    msg << "tune_omega_to_rho: no Omega within tol " << tol << " after " << max_iter
        << " bisection steps (K = " << K << ", target = " << rho_target << ")";
    throw TuningFailureError(msg.str());
}

SemiconjugacyReport circle_semiconjugacy(const CircleLift& lift, double rho, int grid_size,
                                         double horizon, long q_max_check) {
    if (grid_size < 1) throw Error("circle_semiconjugacy: grid_size must be >= 1");
    if (auto orbit = detect_periodic_orbit(lift, q_max_check, 1e-10)) {
        std::ostringstream msg;
        msg << "circle_semiconjugacy: periodic orbit " << orbit->p << "/" << orbit->q
            << " found; rho is not irrational up to q_max " << q_max_check;
        throw NotApplicableError(msg.str());
    }

    const CircleFoliation sys(lift);
    std::vector<Point> grid;
    grid.reserve(grid_size);
    for (int i = 0; i < grid_size; ++i)
        grid.push_back(Point{static_cast<double>(i) / grid_size});

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
