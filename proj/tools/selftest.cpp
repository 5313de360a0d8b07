#include "cli.hpp"

#include "folab/apline.hpp"
#include "folab/apode.hpp"
#include "folab/circle.hpp"
#include "folab/estimators.hpp"
#include "folab/quasicrystal.hpp"
#include "folab/skew.hpp"

#include <cmath>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>

namespace folab::cli {

namespace {

const double golden = (std::sqrt(5.0) - 1.0) / 2.0;

struct SelfTest {
    int failures = 0;

    void check(const std::string& name, bool ok, const std::string& detail = "") {
        if (ok) {
            std::cout << "[ok]   " << name << "\n";
        } else {
            std::cout << "[FAIL] " << name << (detail.empty() ? "" : ": " + detail) << "\n";
            ++failures;
        }
    }

    void close(const std::string& name, double got, double want, double tol) {
        std::ostringstream detail;
        detail << "got " << got << ", want " << want << " +- " << tol;
        check(name, std::abs(got - want) <= tol, detail.str());
    }
};

} // namespace

int cmd_selftest() {
    SelfTest t;

    try {
        {
            const CircleFoliation rigid(CircleLift::rigid(0.25));
            const EvolveResult r = evolve(rigid, Point{0.0}, 4.0);
            t.close("rigid rotation: tau after t=4", r.tau, 1.0, 1e-14);
            t.close("rigid rotation: state returns to 0", r.state[0], 0.0, 1e-14);
            const EvolveResult id = evolve(rigid, Point{0.42}, 0.0);
            t.check("flow identity at t=0", id.state[0] == 0.42 && id.tau == 0.0);
            t.check("cocycle identity at s=t=0",
                    check_cocycle_identity(rigid, Point{0.6}, 0.0, 0.0) == 0.0);
            t.check("rigid cocycle identity exact",
                    check_cocycle_identity(rigid, Point{0.6}, 17.0, 23.0) <= 1e-12);
            const double grid[] = {0.25, 0.5, 1.0};
            t.close("order preservation slack = t", check_order_preservation(rigid, Point{0.1}, grid),
                    0.25, 1e-14);

            const CocycleTrace trace = accumulate_trace(rigid, Point{0.0}, 1000.0);
            t.close("rigid rho", estimate_rho(trace).rho_hat, 0.25, 1e-14);
            const DeviationProfile exact = deviation_profile(trace, 0.25);
            t.check("rigid deviations identically zero",
                    exact.max_deviation() <= 1e-12 &&
                        exact.classification == Boundedness::Bounded);
            const DeviationProfile drift = deviation_profile(trace, 0.35);
            t.check("wrong rho classified unbounded",
                    drift.classification == Boundedness::Unbounded);
        }
        {
            t.close("arnold(0,0.5) fixed point rho",
                    rotation_number(CircleLift::arnold(0.0, 0.5), 0.0, 10000).rho_hat, 0.0, 0.0);
            const auto w13 = detect_periodic_orbit(CircleLift::rigid(1.0 / 3.0), 5, 1e-12);
            t.check("rigid 1/3 periodic witness", w13 && w13->p == 1 && w13->q == 3);
            const auto none = detect_periodic_orbit(CircleLift::rigid(golden), 50, 1e-10);
            t.check("irrational rigid rotation has no periodic orbit", !none.has_value());
            t.check("tune with K=0 is exact", tune_omega_to_rho(0.0, 0.37, 1e-10) == 0.37);
        }
        {
            const SubstitutionRule fib = SubstitutionRule::fibonacci();
            t.check("fibonacci L -> LS", iterate_substitution(fib, "L", 1) == "LS");
            t.check("fibonacci three steps", iterate_substitution(fib, "L", 3) == "LSLLS");
            t.check("fibonacci length 144", iterate_substitution(fib, "L", 10).size() == 144);
            const DeloneSegment seg = word_to_delone("LS", fib, 0.0);
            const double tau_len = (1.0 + std::sqrt(5.0)) / 2.0;
            t.check("tile prefix sums", seg.points.size() == 3 &&
                                            std::abs(seg.points[1] - tau_len) < 1e-14 &&
                                            std::abs(seg.points[2] - tau_len - 1.0) < 1e-14);
            const std::string w = iterate_substitution(fib, "L", 12);
            const DeloneSegment X = word_to_delone(w, fib, 0.0);
            t.check("gap alphabet {1, tau}",
                    X.gap_alphabet.size() == 2 && std::abs(X.gap_alphabet[0] - 1.0) < 1e-12 &&
                        std::abs(X.gap_alphabet[1] - tau_len) < 1e-12);
            const Patch P = patch_at(X, X.points[40], 1.2);
            t.check("patch self equivalence", patch_equivalent(P, P, 1e-9));
        }
        {
            t.close("constant trig poly mean", TrigPoly(3.0, {}).mean_value(), 3.0, 0.0);
            t.close("cosine mean", TrigPoly(0.0, {{1.0, 1.0, 0.0}}).mean_value(), 0.0, 0.0);
            t.close("kwapisz rho of unit displacement",
                    kwapisz_rho(TrigPoly(1.0, {}), 0.0, 1000).rho_hat, 1.0, 0.0);
            const auto half = rational_independence(0.5, FrequencyModule{{1.0}}, 10, 1e-9);
            t.check("0.5 dependent on Z",
                    half.kind == IndependenceVerdict::Kind::Dependent && half.k == 2);
            const auto rt2 = rational_independence(std::numbers::sqrt2, FrequencyModule{{1.0}},
                                                   50, 1e-9);
            t.check("sqrt2 independent of Z up to 50",
                    rt2.kind == IndependenceVerdict::Kind::IndependentUpTo);
            const auto rel = rational_independence((1.0 + std::numbers::sqrt2) / 3.0,
                                                   FrequencyModule{{1.0, std::numbers::sqrt2}},
                                                   10, 1e-9);
            t.check("3x = 1 + sqrt2 detected",
                    rel.kind == IndependenceVerdict::Kind::Dependent && rel.k == 3);
        }
        {
            const SkewProduct prod = SkewProduct::qpf_arnold(0.3, 0.0, 0.0, {golden});
            const SkewFoliation f = as_foliated(prod);
            const EvolveResult r = evolve(f, Point{0.2, 0.7}, 20.0);
            t.close("product skew tau = t Omega", r.tau, 6.0, 1e-13);
            t.check("skew commutation exact",
                    check_commutation(f, Point{0.2, 0.7}, 9.0, 0.31) == 0.0);
        }
        {
            ODESpec spec;
            spec.alpha1 = golden;
            spec.beta = {std::numbers::sqrt2 - 1.0, std::numbers::sqrt3 - 1.0};
            spec.epsilon = 0.3;
            const IntegratorConfig cfg;
            t.close("constant field solution", integrate_xi(spec, cfg, 10.0, 0.5),
                    0.5 + 3.0, 1e-12);
            TorusState z;
            const TorusState w = torus_flow(spec, cfg, z, 5.0);
            t.close("constant field torus flow u1", w.u[1], wrap01(5.0 * golden), 1e-12);
            const auto psi = poincare_map(spec, cfg, {0.1, 0.2, 0.3});
            t.close("constant field section theta", psi[0], wrap01(0.1 + golden), 1e-12);
            std::vector<double> grid{0.0, 0.1, 0.2};
            spec.epsilon = 0.0;
            const EpsilonScanResult scan = epsilon_scan(spec, cfg, grid, 50.0);
            bool ok = true;
            for (std::size_t i = 0; i < grid.size(); ++i)
                ok = ok && std::abs(scan.rows[i].rho_hat - grid[i]) <= 1e-12;
            t.check("zero-field scan returns rho = epsilon", ok);
        }
    } catch (const std::exception& e) {
        t.check("selftest completed without exception", false, e.what());
    }

    if (t.failures == 0) {
        std::cout << "selftest: all checks passed\n";
        return 0;
    }
    std::cout << "selftest: " << t.failures << " check(s) failed\n";
    return 3;
}

} // namespace folab::cli
