#include "cli.hpp"

#include "folab/apline.hpp"
#include "folab/apode.hpp"
#include "folab/circle.hpp"
#include "folab/estimators.hpp"
#include "folab/quasicrystal.hpp"
#include "folab/skew.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>

namespace folab::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- config

json load_config(const std::string& path) {
    if (path.empty()) throw ConfigError("missing --config");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    return doc;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

const json& need(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(std::string("missing key '") + key + "' in " + where);
    return obj.at(key);
}

double need_num(const json& obj, const char* key, const std::string& where) {
    const json& v = need(obj, key, where);
    if (!v.is_number()) throw ConfigError(std::string("'") + key + "' in " + where + " must be a number");
    return v.get<double>();
}

double opt_num(const json& obj, const char* key, double fallback) {
    return obj.contains(key) ? obj.at(key).get<double>() : fallback;
}

void check_top_level(const json& doc) {
    reject_unknown(doc,
                   {"family", "system", "seed", "out", "rho", "deviation", "gamma", "semiconj",
                    "scan", "qc_build", "qc_freq"},
                   "config");
    need(doc, "family", "config");
    need(doc, "system", "config");
}

// ---------------------------------------------------------------- families

struct FamilyContext {
    std::unique_ptr<FoliatedSystem> system;
    std::string description;
    std::size_t state_dim = 1;
    std::function<Point(double)> state_from_scalar;
    std::function<Point(std::mt19937_64&)> random_state;
};

CircleLift circle_lift_from(const json& sys) {
    const std::string type = need(sys, "type", "system").get<std::string>();
    if (type == "rigid") {
        reject_unknown(sys, {"type", "rho0"}, "system");
        return CircleLift::rigid(need_num(sys, "rho0", "system"));
    }
    if (type == "arnold") {
        reject_unknown(sys, {"type", "omega", "k"}, "system");
        return CircleLift::arnold(need_num(sys, "omega", "system"), need_num(sys, "k", "system"));
    }
    throw ConfigError("circle system type must be 'rigid' or 'arnold'");
}

SkewProduct skew_from(const json& sys) {
    const std::string type = need(sys, "type", "system").get<std::string>();
    std::vector<double> w = need(sys, "base_freq", "system").get<std::vector<double>>();
    if (w.empty()) throw ConfigError("base_freq must be nonempty");
    if (type == "qpf-arnold") {
        reject_unknown(sys, {"type", "omega", "k", "a", "base_freq"}, "system");
        return SkewProduct::qpf_arnold(need_num(sys, "omega", "system"),
                                       need_num(sys, "k", "system"), need_num(sys, "a", "system"),
                                       std::move(w));
    }
    if (type == "sheared-product") {
        reject_unknown(sys, {"type", "rho", "c", "base_freq"}, "system");
        return SkewProduct::sheared_product(need_num(sys, "rho", "system"),
                                            need_num(sys, "c", "system"), std::move(w));
    }
    throw ConfigError("skew system type must be 'qpf-arnold' or 'sheared-product'");
}

TrigPoly trigpoly_from(const json& sys) {
    reject_unknown(sys, {"mean", "terms"}, "system");
    std::vector<TrigTerm> terms;
    if (sys.contains("terms")) {
        for (const auto& t : sys.at("terms")) {
            reject_unknown(t, {"freq", "amp", "phase"}, "system.terms");
            terms.push_back({need_num(t, "freq", "system.terms"),
                             need_num(t, "amp", "system.terms"), opt_num(t, "phase", 0.0)});
        }
    }
    return TrigPoly(need_num(sys, "mean", "system"), std::move(terms));
}

struct QcSetup {
    SubstitutionRule rule;
    std::string word;
    std::shared_ptr<const DeloneSegment> segment;
    KernelDisplacement kernel;
    bool has_kernel = false;
};

QcSetup qc_from(const json& sys) {
    reject_unknown(sys, {"rule", "iterations", "seed_word", "anchor", "kernel"}, "system");
    QcSetup qc;
    const std::string rule = sys.contains("rule") ? sys.at("rule").get<std::string>() : "fibonacci";
    if (rule != "fibonacci") throw ConfigError("only the 'fibonacci' rule is built in");
    qc.rule = SubstitutionRule::fibonacci();
    const int n = static_cast<int>(need_num(sys, "iterations", "system"));
    const std::string seed_word =
        sys.contains("seed_word") ? sys.at("seed_word").get<std::string>() : "L";
    qc.word = iterate_substitution(qc.rule, seed_word, n);
    qc.segment = std::make_shared<DeloneSegment>(
        word_to_delone(qc.word, qc.rule, opt_num(sys, "anchor", -10.0)));
    if (sys.contains("kernel")) {
        const json& k = sys.at("kernel");
        reject_unknown(k, {"type", "amp", "radius", "offset"}, "system.kernel");
        const std::string type = need(k, "type", "system.kernel").get<std::string>();
        if (type != "tent") throw ConfigError("kernel type must be 'tent'");
        qc.kernel = KernelDisplacement::tent(need_num(k, "amp", "system.kernel"),
                                             need_num(k, "radius", "system.kernel"),
                                             need_num(k, "offset", "system.kernel"));
        qc.has_kernel = true;
    }
    return qc;
}

ODESpec apode_from(const json& sys, IntegratorConfig& cfg) {
    reject_unknown(sys, {"alpha1", "beta", "epsilon", "modes", "integrator"}, "system");
    ODESpec spec;
    spec.alpha1 = need_num(sys, "alpha1", "system");
    const auto beta = need(sys, "beta", "system").get<std::vector<double>>();
    if (beta.size() != 2) throw ConfigError("beta must have exactly two entries");
    spec.beta = {beta[0], beta[1]};
    spec.epsilon = opt_num(sys, "epsilon", 0.0);
    std::vector<FourierMode> modes;
    if (sys.contains("modes")) {
        for (const auto& m : sys.at("modes")) {
            reject_unknown(m, {"k", "amp", "phase"}, "system.modes");
            const auto k = need(m, "k", "system.modes").get<std::vector<int>>();
            if (k.size() != 4) throw ConfigError("mode frequency vector must have four entries");
            modes.push_back(
                {{k[0], k[1], k[2], k[3]}, need_num(m, "amp", "system.modes"), opt_num(m, "phase", 0.0)});
        }
    }
    spec.field = TorusFourierField(std::move(modes));
    if (sys.contains("integrator")) {
        const json& ic = sys.at("integrator");
        reject_unknown(ic, {"step", "tolerance"}, "system.integrator");
        cfg.step = opt_num(ic, "step", cfg.step);
        cfg.tolerance = opt_num(ic, "tolerance", cfg.tolerance);
        if (!(cfg.step > 0.0)) throw ConfigError("integrator step must be positive");
    }
    return spec;
}

FamilyContext build_family(const json& doc) {
    const std::string family = need(doc, "family", "config").get<std::string>();
    const json& sys = need(doc, "system", "config");
    FamilyContext ctx;

    if (family == "circle") {
        auto lift = circle_lift_from(sys);
        ctx.description = "circle:" + lift.name();
        ctx.system = std::make_unique<CircleFoliation>(std::move(lift));
        ctx.state_dim = 1;
        ctx.state_from_scalar = [](double x) { return Point{wrap01(x)}; };
        ctx.random_state = [](std::mt19937_64& rng) {
            return Point{std::uniform_real_distribution<double>(0.0, 1.0)(rng)};
        };
        return ctx;
    }
    if (family == "skew") {
        auto sp = skew_from(sys);
        const std::size_t dim = static_cast<std::size_t>(sp.base_dim()) + 1;
        ctx.description = "skew:" + sp.name();
        ctx.system = std::make_unique<SkewFoliation>(as_foliated(sp));
        ctx.state_dim = dim;
        ctx.state_from_scalar = [dim](double x) {
            Point p;
            for (std::size_t i = 0; i + 1 < dim; ++i) p.push_back(0.0);
            p.push_back(wrap01(x));
            return p;
        };
        ctx.random_state = [dim](std::mt19937_64& rng) {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            Point p;
            for (std::size_t i = 0; i < dim; ++i) p.push_back(unif(rng));
            return p;
        };
        return ctx;
    }
    if (family == "ap-line") {
        auto phi = trigpoly_from(sys);
        ctx.description = "ap-line:trigpoly";
        ctx.system = std::make_unique<TrigLineFoliation>(std::move(phi));
        ctx.state_dim = 1;
        ctx.state_from_scalar = [](double x) { return Point{x}; };
        ctx.random_state = [](std::mt19937_64& rng) {
            return Point{std::uniform_real_distribution<double>(0.0, 10.0)(rng)};
        };
        return ctx;
    }
    if (family == "quasicrystal") {
        QcSetup qc = qc_from(sys);
        if (!qc.has_kernel)
            throw ConfigError("quasicrystal dynamics need a 'kernel' in the system block");
        ctx.description = "quasicrystal:fibonacci";
        ctx.system = std::make_unique<DeloneFoliation>(qc.segment, qc.kernel);
        ctx.state_dim = 1;
        ctx.state_from_scalar = [](double x) { return Point{x}; };
        ctx.random_state = [](std::mt19937_64& rng) {
            return Point{std::uniform_real_distribution<double>(0.0, 10.0)(rng)};
        };
        return ctx;
    }
    if (family == "ap-ode") {
        IntegratorConfig cfg;
        ODESpec spec = apode_from(sys, cfg);
        const auto beta = spec.beta;
        ctx.description = "ap-ode:fourier";
        ctx.system = std::make_unique<ApOdeFoliation>(std::move(spec), cfg, 1.0);
        ctx.state_dim = 4;
        ctx.state_from_scalar = [beta](double x0) {
            return Point{0.0, 0.0, wrap01(x0 * beta[0]), wrap01(x0 * beta[1])};
        };
        ctx.random_state = [](std::mt19937_64& rng) {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            return Point{unif(rng), unif(rng), unif(rng), unif(rng)};
        };
        return ctx;
    }
    throw ConfigError("unknown family '" + family + "'");
}

// ---------------------------------------------------------------- output

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(out_path);
    const fs::path tmp = target.string() + ".tmp";
    try {
        {
            std::ofstream out(tmp, std::ios::trunc);
            if (!out) throw ConfigError("cannot write to " + tmp.string());
            out << content;
        }
        fs::rename(tmp, target);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
}

std::string classification_name(Boundedness b) {
    switch (b) {
    case Boundedness::Bounded: return "bounded";
    case Boundedness::Unbounded: return "unbounded";
    case Boundedness::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

struct Prepared {
    json doc;
    FamilyContext ctx;
    unsigned long seed = 1;
    std::string out;
};

Prepared prepare(const Options& opt) {
    Prepared p;
    p.doc = load_config(opt.config_path);
    check_top_level(p.doc);
    p.ctx = build_family(p.doc);
    p.seed = static_cast<unsigned long>(opt_num(p.doc, "seed", 1.0));
    p.out = opt.out_path;
    if (p.out.empty() && p.doc.contains("out")) p.out = p.doc.at("out").get<std::string>();
    return p;
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

// ---------------------------------------------------------------- commands

int cmd_rho(const Options& opt) {
    return run_guarded([&] {
        Prepared p = prepare(opt);
        const json& sec = need(p.doc, "rho", "config");
        reject_unknown(sec, {"n", "x0", "starts"}, "rho");
        const double n = need_num(sec, "n", "rho");
        const int starts = static_cast<int>(opt_num(sec, "starts", 1.0));

        std::ostringstream csv;
        csv << "family,start_index,rho_hat,cauchy_gap,horizon\n";
        std::mt19937_64 rng(p.seed);
        for (int s = 0; s < starts; ++s) {
            const Point x0 = (s == 0 && sec.contains("x0"))
                                 ? p.ctx.state_from_scalar(sec.at("x0").get<double>())
                                 : p.ctx.random_state(rng);
            const CocycleTrace trace = accumulate_trace(*p.ctx.system, x0, n);
            const TranslationEstimate est = estimate_rho(trace);
            csv << p.ctx.description << "," << s << "," << fmt17(est.rho_hat) << ","
                << fmt17(est.cauchy_gap) << "," << fmt17(est.horizon) << "\n";
        }
        write_text(csv.str(), p.out);
        return 0;
    });
}

int cmd_deviation(const Options& opt) {
    return run_guarded([&] {
        Prepared p = prepare(opt);
        const json& sec = need(p.doc, "deviation", "config");
        reject_unknown(sec, {"horizon", "rho", "samples"}, "deviation");
        const double horizon = need_num(sec, "horizon", "deviation");
        const int samples = static_cast<int>(opt_num(sec, "samples", 1.0));

        std::mt19937_64 rng(p.seed);
        std::vector<double> checkpoints;
        std::vector<double> merged;
        double rho = 0.0;
        bool have_rho = sec.contains("rho");
        if (have_rho) rho = sec.at("rho").get<double>();
        for (int s = 0; s < samples; ++s) {
            const Point x0 = p.ctx.random_state(rng);
            const CocycleTrace trace =
                accumulate_trace(*p.ctx.system, x0, horizon, SampleSchedule::linear(512));
            if (!have_rho) {
                rho = estimate_rho(trace).rho_hat;
                have_rho = true;
            }
            const DeviationProfile prof = deviation_profile(trace, rho);
            if (merged.empty()) {
                checkpoints = prof.checkpoints;
                merged = prof.deviations;
            } else {
                for (std::size_t j = 0; j < merged.size(); ++j)
                    merged[j] = std::max(merged[j], prof.deviations[j]);
            }
        }
        const DeviationProfile prof = make_profile(std::move(checkpoints), std::move(merged));

        std::ostringstream csv;
        csv << "checkpoint,deviation,loglog_slope,classification\n";
        for (std::size_t j = 0; j < prof.checkpoints.size(); ++j)
            csv << fmt17(prof.checkpoints[j]) << "," << fmt17(prof.deviations[j]) << ","
                << fmt17(prof.loglog_slope) << "," << classification_name(prof.classification)
                << "\n";
        write_text(csv.str(), p.out);
        return 0;
    });
}

int cmd_gamma(const Options& opt) {
    return run_guarded([&] {
        Prepared p = prepare(opt);
        const json& sec = need(p.doc, "gamma", "config");
        reject_unknown(sec, {"horizon", "t0", "rho", "grid"}, "gamma");
        const double horizon = need_num(sec, "horizon", "gamma");
        const double t0 = opt_num(sec, "t0", -1.0);
        const int grid = static_cast<int>(opt_num(sec, "grid", 16.0));

        double rho;
        if (sec.contains("rho")) {
            rho = sec.at("rho").get<double>();
        } else {
            const CocycleTrace trace =
                accumulate_trace(*p.ctx.system, p.ctx.state_from_scalar(0.0), horizon);
            rho = estimate_rho(trace).rho_hat;
        }

        std::mt19937_64 rng(p.seed);
        std::vector<Point> pts;
        for (int i = 0; i < grid; ++i) {
            if (p.ctx.state_dim == 1)
                pts.push_back(p.ctx.state_from_scalar(static_cast<double>(i) / grid));
            else
                pts.push_back(p.ctx.random_state(rng));
        }
        const GammaEstimate g = estimate_gamma_batch(*p.ctx.system, pts, rho, horizon, t0);

        std::ostringstream csv;
        csv << "sample_index";
        for (std::size_t d = 0; d < p.ctx.state_dim; ++d) csv << ",coord" << d;
        csv << ",gamma_hat,convergence_delta\n";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            csv << i;
            for (std::size_t d = 0; d < p.ctx.state_dim; ++d) csv << "," << fmt17(pts[i][d]);
            csv << "," << fmt17(g.gamma_values[i]) << "," << fmt17(g.convergence_delta) << "\n";
        }
        write_text(csv.str(), p.out);
        return 0;
    });
}

int cmd_semiconj(const Options& opt) {
    return run_guarded([&] {
        Prepared p = prepare(opt);
        const json& sec = need(p.doc, "semiconj", "config");
        reject_unknown(sec, {"horizon", "rho", "grid", "times"}, "semiconj");
        const double horizon = need_num(sec, "horizon", "semiconj");
        const int grid = static_cast<int>(opt_num(sec, "grid", 16.0));
        std::vector<double> times{1.0};
        if (sec.contains("times")) times = sec.at("times").get<std::vector<double>>();

        double rho;
        if (sec.contains("rho")) {
            rho = sec.at("rho").get<double>();
        } else {
            const CocycleTrace trace =
                accumulate_trace(*p.ctx.system, p.ctx.state_from_scalar(0.0), horizon);
            rho = estimate_rho(trace).rho_hat;
        }

        std::mt19937_64 rng(p.seed);
        std::vector<Point> pts;
        for (int i = 0; i < grid; ++i) {
            if (p.ctx.state_dim == 1)
                pts.push_back(p.ctx.state_from_scalar(static_cast<double>(i) / grid));
            else
                pts.push_back(p.ctx.random_state(rng));
        }

        const FoliatedSystem& sys = *p.ctx.system;
        const double T0 = horizon / 10.0;
        GammaFn gamma_fn = [&sys, rho, T0, horizon](const Point& x) {
            return estimate_gamma(sys, x, rho, T0, horizon);
        };
        const SemiconjugacyReport report = semiconjugacy_residual(sys, rho, gamma_fn, pts, times);

        std::ostringstream csv;
        csv << "sample_index,residual,residual_sup,horizon\n";
        for (std::size_t i = 0; i < report.per_sample_residuals.size(); ++i)
            csv << i << "," << fmt17(report.per_sample_residuals[i]) << ","
                << fmt17(report.residual_sup) << "," << fmt17(horizon) << "\n";
        write_text(csv.str(), p.out);
        return 0;
    });
}

int cmd_scan_eps(const Options& opt) {
    return run_guarded([&] {
        Prepared p = prepare(opt);
        if (p.doc.at("family").get<std::string>() != "ap-ode")
            throw ConfigError("scan-eps requires the ap-ode family");
        const json& sec = need(p.doc, "scan", "config");
        reject_unknown(sec, {"eps_start", "eps_stop", "eps_count", "horizon"}, "scan");
        const double start = need_num(sec, "eps_start", "scan");
        const double stop = need_num(sec, "eps_stop", "scan");
        const int count = static_cast<int>(need_num(sec, "eps_count", "scan"));
        const double horizon = need_num(sec, "horizon", "scan");
        if (count < 1) throw ConfigError("eps_count must be >= 1");
        if (stop < start) throw ConfigError("eps_stop must be >= eps_start");

        IntegratorConfig cfg;
        const ODESpec spec = apode_from(p.doc.at("system"), cfg);
        std::vector<double> grid(count);
        for (int i = 0; i < count; ++i)
            grid[i] = count == 1 ? start
                                 : start + (stop - start) * static_cast<double>(i) / (count - 1);
        const EpsilonScanResult scan = epsilon_scan(spec, cfg, grid, horizon, opt.threads);

        std::ostringstream csv;
        csv << "epsilon,rho_hat,cauchy_gap,deviation_max,blowup_flag\n";
        for (const ScanRow& row : scan.rows)
            csv << fmt17(row.epsilon) << "," << fmt17(row.rho_hat) << "," << fmt17(row.cauchy_gap)
                << "," << fmt17(row.deviation_max) << "," << (row.blowup ? 1 : 0) << "\n";
        write_text(csv.str(), p.out);
        return 0;
    });
}

int cmd_qc_build(const Options& opt) {
    return run_guarded([&] {
        const json doc = load_config(opt.config_path);
        check_top_level(doc);
        if (doc.at("family").get<std::string>() != "quasicrystal")
            throw ConfigError("qc-build requires the quasicrystal family");
        const QcSetup qc = qc_from(doc.at("system"));
        std::string out = opt.out_path;
        if (out.empty() && doc.contains("out")) out = doc.at("out").get<std::string>();
        if (out.empty()) throw ConfigError("qc-build needs --out (used as a filename prefix)");

        write_text(qc.word + "\n", out + ".word.txt");
        std::ostringstream delone;
        for (std::size_t i = 0; i < qc.segment->points.size(); ++i)
            delone << i << "\t" << fmt17(qc.segment->points[i]) << "\n";
        write_text(delone.str(), out + ".delone.tsv");
        return 0;
    });
}

int cmd_qc_freq(const Options& opt) {
    return run_guarded([&] {
        const json doc = load_config(opt.config_path);
        check_top_level(doc);
        if (doc.at("family").get<std::string>() != "quasicrystal")
            throw ConfigError("qc-freq requires the quasicrystal family");
        const QcSetup qc = qc_from(doc.at("system"));
        const json& sec = need(doc, "qc_freq", "config");
        reject_unknown(sec, {"radius", "window", "anchors"}, "qc_freq");
        const double radius = need_num(sec, "radius", "qc_freq");
        const double window = need_num(sec, "window", "qc_freq");
        const int n_anchors = static_cast<int>(opt_num(sec, "anchors", 5.0));
        if (n_anchors < 1) throw ConfigError("anchors must be >= 1");

        const DeloneSegment& X = *qc.segment;
        const double mid = 0.5 * (X.window_lo() + X.window_hi());
        const double at = *std::lower_bound(X.points.begin(), X.points.end(), mid);
        const Patch P = patch_at(X, at, radius);
        std::vector<double> anchors;
        const double spreadable =
            (X.window_hi() - X.window_lo()) / 2.0 - window - radius - 1.0;
        for (int i = 0; i < n_anchors; ++i) {
            const double frac = n_anchors == 1
                                    ? 0.0
                                    : -1.0 + 2.0 * static_cast<double>(i) / (n_anchors - 1);
            anchors.push_back(mid + frac * std::max(0.0, spreadable));
        }
        const PatchFrequencyReport rep = patch_frequency(X, P, window, anchors);

        std::string out = opt.out_path;
        if (out.empty() && doc.contains("out")) out = doc.at("out").get<std::string>();
        std::ostringstream csv;
        csv << "anchor,count,frequency,radius,window_N,uniformity_spread\n";
        for (std::size_t i = 0; i < rep.anchors.size(); ++i)
            csv << fmt17(rep.anchors[i]) << "," << rep.counts[i] << ","
                << fmt17(rep.frequencies[i]) << "," << fmt17(radius) << "," << fmt17(window)
                << "," << fmt17(rep.uniformity_spread) << "\n";
        write_text(csv.str(), out);
        return 0;
    });
}

} // namespace folab::cli
