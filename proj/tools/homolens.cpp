#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "homolens/complexes.hpp"
#include "homolens/error.hpp"
#include "homolens/homology.hpp"

using namespace homolens;
using namespace homolens::cli;

namespace {

enum Exit { ok = 0, unexpected = 1, usage = 2, hypothesis = 3, all_failed = 4 };

// Flags write into the configuration tree at a JSON pointer, after the config file is loaded.
struct Overrides {
    std::vector<std::function<void(json&)>> apply;

    template <class T>
    CLI::Option* bind(CLI::App* app, const std::string& flag, const std::string& pointer, const std::string& help) {
        auto value = std::make_shared<T>();
        auto* opt = app->add_option(flag, *value, help);
        apply.push_back([opt, value, pointer](json& cfg) {
            if (opt->count() > 0) cfg[json::json_pointer(pointer)] = *value;
        });
        return opt;
    }
};

struct Command {
    CLI::App* app = nullptr;
    Overrides overrides;
    std::string config_path;
    int verbosity = 0;

    json load() const {
        json cfg = config_path.empty() ? json::object() : load_config(config_path);
        for (const auto& f : overrides.apply) f(cfg);
        return cfg;
    }
};

void add_common(Command& c) {
    c.app->add_option("-c,--config", c.config_path, "JSON configuration file; flags override its values")
        ->check(CLI::ExistingFile);
    c.app->add_flag("-v,--verbose", c.verbosity, "Diagnostics on standard error (repeatable)");
    c.overrides.bind<std::uint64_t>(c.app, "--seed", "/seed", "Seed for all randomness");
}

void add_manifold_flags(Command& c, const std::string& tau_flag) {
    c.overrides.bind<std::string>(c.app, "--manifold", "/manifold/family", "circle, sphere, torus, m1, m2");
    c.overrides.bind<double>(c.app, tau_flag, "/manifold/tau", "Reach of the manifold");
    c.overrides.bind<std::size_t>(c.app, "--dim", "/manifold/intrinsic_dim", "Intrinsic dimension d");
    c.overrides.bind<std::size_t>(c.app, "--ambient", "/manifold/ambient_dim", "Ambient dimension D");
    c.overrides.bind<std::vector<double>>(c.app, "--center", "/manifold/center", "Center coordinates");
}

void add_noise_flags(Command& c) {
    c.overrides.bind<std::string>(c.app, "--noise", "/noise/model",
                                  "none, clutter, tubular, gaussian, additive");
    c.overrides.bind<double>(c.app, "--pi", "/noise/pi", "Clutter: probability of a manifold draw");
    c.overrides.bind<double>(c.app, "--sigma", "/noise/sigma", "Tubular width or Gaussian scale");
    c.overrides.bind<std::string>(c.app, "--phi", "/noise/phi/kind", "Additive law: point_mass, gaussian, laplace, uniform");
    c.overrides.bind<double>(c.app, "--phi-scale", "/noise/phi/scale", "Scale of the additive law");
}

void add_estimator_flags(Command& c, const std::string& tau_flag) {
    c.overrides.bind<double>(c.app, tau_flag, "/estimator/tau", "Reach assumed by the estimator");
    c.overrides.bind<double>(c.app, "--a", "/estimator/a", "Density lower bound");
    c.overrides.bind<std::size_t>(c.app, "--d", "/estimator/d", "Intrinsic dimension assumed by the estimator");
    c.overrides.bind<double>(c.app, "--volume", "/estimator/volume", "vol(M), for deconvolution");
    c.overrides.bind<double>(c.app, "--clean-radius", "/estimator/clean_radius", "Override the cleaning radius");
    c.overrides.bind<double>(c.app, "--clean-threshold", "/estimator/clean_threshold", "Override the cleaning threshold");
    c.overrides.bind<double>(c.app, "--ball-radius", "/estimator/ball_radius", "Override the union-of-balls radius");
    c.overrides.bind<std::size_t>(c.app, "--top-dim", "/estimator/top_dim", "Override the complex dimension");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    return out;
}

template <class T>
T get_or(const json& cfg, const char* key, T fallback) {
    if (!cfg.contains(key)) return fallback;
    try {
        return cfg[key].get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("key '") + key + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------

int run_sample(const Command& c, const std::string& output) {
    const json cfg = c.load();
    if (!cfg.contains("manifold")) throw ConfigError("sample: --tau (or a manifold section) is required");
    const auto spec = manifold_from_json(cfg["manifold"]);
    const NoiseSpec noise = cfg.contains("noise") ? noise_from_json(cfg["noise"]) : NoiseSpec{};
    if (!cfg.contains("n")) throw ConfigError("sample: --n is required");
    const auto n = get_or<std::size_t>(cfg, "n", 0);
    const auto seed = get_or<std::uint64_t>(cfg, "seed", 0);
    const auto manifold = make_manifold(spec);
    const auto cloud = apply_noise(sample_manifold(spec, n, seed), noise, *manifold, seed);
    auto out = open_out(output);
    write_point_cloud(out, cloud, cloud.empty());
    std::cout << "n=" << cloud.size() << " D=" << cloud.ambient_dim() << " seed=" << seed << "\n";
    return ok;
}

int run_clean(const Command& c, const std::string& input, const std::string& output) {
    const json cfg = c.load();
    const json sec = cfg.value("clean", json::object());
    if (!sec.contains("radius") || !sec.contains("threshold"))
        throw ConfigError("clean: --radius and --threshold are required");
    CleanParams p{sec["radius"].get<double>(), sec["threshold"].get<double>()};
    const auto rep = clean(read_point_cloud_file(input), p);
    if (!output.empty()) open_out(output) << to_json(rep).dump(2) << "\n";
    std::cout << "kept=" << rep.kept.size() << " removed=" << rep.removed.size() << "\n";
    return ok;
}

std::string counts_string(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

int run_cech(const Command& c, const std::string& input, const std::string& output) {
    const json cfg = c.load();
    if (!cfg.contains("epsilon")) throw ConfigError("cech: --epsilon is required");
    const double eps = cfg["epsilon"].get<double>();
    const auto top = get_or<std::size_t>(cfg, "top_dim", 2);
    const auto cx = cech_complex(read_point_cloud_file(input), eps, top);
    auto out = open_out(output);
    write_complex(out, cx);
    std::cout << "simplices=" << counts_string(cx.counts()) << "\n";
    return ok;
}

int run_betti(const Command& c, const std::string& complex_path, const std::string& cloud_path) {
    const json cfg = c.load();
    if (complex_path.empty() == cloud_path.empty())
        throw ConfigError("betti: give exactly one of --complex or --cloud");
    if (!complex_path.empty()) {
        std::ifstream in(complex_path);
        if (!in) throw ConfigError("cannot open complex file '" + complex_path + "'");
        const auto cx = read_complex(in);
        const std::size_t top = cx.top_dim();
        const auto max_p = get_or<std::size_t>(cfg, "top_dim", top == 0 ? 0 : top - 1);
        std::cout << to_string(betti_numbers(cx, max_p)) << "\n";
        return ok;
    }
    if (!cfg.contains("epsilon")) throw ConfigError("betti: --epsilon is required with --cloud");
    const auto max_p = get_or<std::size_t>(cfg, "top_dim", 1);
    const auto h = cech_homology(read_point_cloud_file(cloud_path), cfg["epsilon"].get<double>(), max_p);
    if (c.verbosity > 0) std::cerr << "route=" << h.route << " complex=" << counts_string(h.complex_size) << "\n";
    std::cout << to_string(h.profile) << "\n";
    return ok;
}

int run_estimate(const Command& c, const std::string& input, const std::string& output, const std::string& emit_complex,
                 const std::string& emit_kernel) {
    const json cfg = c.load();
    const auto cloud = read_point_cloud_file(input);
    const auto spec = estimator_from_config(cfg, cloud.ambient_dim());
    const auto res = estimate(cloud, spec);
    if (!output.empty()) open_out(output) << to_json(res).dump(2) << "\n";
    if (c.verbosity > 0)
        for (const auto& [k, v] : res.parameters_used) std::cerr << k << "=" << v << "\n";
    if (!emit_complex.empty()) {
        const auto& base = res.resampled ? *res.resampled : cloud;
        const auto kept = base.subset(res.kept_indices);
        const auto top = static_cast<std::size_t>(res.parameter("top_dim"));
        auto out = open_out(emit_complex);
        write_complex(out, cech_complex(kept, res.parameter("ball_radius"), top));
    }
    if (!emit_kernel.empty()) {
        if (spec.noise_model != NoiseModel::additive_known)
            throw ConfigError("--emit-kernel applies only to the deconvolution estimator");
        const auto kp = build_kernel_pair(spec.phi, res.parameter("epsilon"), res.parameter("gamma"), spec.D,
                                          res.parameter("sigma_psi"));
        open_out(emit_kernel) << to_json(kp).dump(2) << "\n";
    }
    if (res.unstable) {
        std::cerr << "warning: fewer than d+2 points survived cleaning; no profile\n";
        std::cout << "none\n";
    } else {
        std::cout << to_string(res.profile) << "\n";
    }
    return ok;
}

void print_curve(const RiskCurve& curve) {
    std::printf("%10s %10s %22s %9s\n", "n", "risk", "95% interval", "failures");
    for (const auto& p : curve.points)
        std::printf("%10zu %10.4f     [%6.4f, %6.4f] %9zu\n", p.n, p.risk, p.lo, p.hi, p.failures);
}

int run_experiment_cmd(const Command& c, const std::string& dir, std::string records, std::string curve_path) {
    const json cfg = c.load();
    const auto spec = experiment_from_config(cfg);
    std::filesystem::create_directories(dir);
    if (records.empty()) records = (std::filesystem::path(dir) / "records.txt").string();
    if (curve_path.empty()) curve_path = (std::filesystem::path(dir) / "curve.csv").string();
    const auto res = run_experiment(spec, get_or<std::size_t>(cfg, "threads", 0));
    {
        auto out = open_out(records);
        for (const auto& r : res.records) out << format_record(r) << "\n";
    }
    open_out(curve_path) << format_curve_csv(res.curve);
    print_curve(res.curve);
    if (!res.abort_reason.empty()) {
        std::cerr << "error: estimator cannot run: " << res.abort_reason << "\n";
        return all_failed;
    }
    std::size_t failed_points = 0;
    for (const auto& p : res.curve.points) {
        if (p.failures == 0) continue;
        std::cerr << "warning: n=" << p.n << ": " << p.failures << " of " << p.trials
                  << " trials failed: " << p.failure << "\n";
        if (p.failures == p.trials) ++failed_points;
    }
    return failed_points == res.curve.points.size() ? all_failed : ok;
}

int run_tvcheck(const Command& c, const std::string& output, bool empirical) {
    const json cfg = c.load();
    const json sec = cfg.value("tvcheck", json::object());
    LowerBoundCheck check;
    check.d = get_or<std::size_t>(sec, "d", 1);
    check.D = get_or<std::size_t>(sec, "D", check.d + 1);
    check.a = get_or<double>(sec, "a", 0.2);
    check.tau_grid = get_or<std::vector<double>>(sec, "tau_grid", {0.02, 0.04, 0.08});
    check.n_grid = get_or<std::vector<std::size_t>>(sec, "n_grid", {10, 50, 200});
    check.trials = get_or<std::size_t>(sec, "trials", 50);
    check.base_seed = get_or<std::uint64_t>(cfg, "seed", 0);

    std::ostringstream table;
    if (!empirical) {
        table << "tau,tv,tv_over_tau\n";
        for (double tau : check.tau_grid) {
            const auto tv = tv_distance_numeric(build_lower_bound_pair(check.d, check.D, tau, check.a)).tv;
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%.6g,%.10f,%.10f\n", tau, tv, tv / tau);
            table << buf;
        }
    } else {
        check.estimators = shipped_lower_bound_estimators();
        const auto rep = check_lower_vs_empirical(check, get_or<std::size_t>(cfg, "threads", 0));
        table << "tau,estimator,n,tv,floor,risk,se,ok\n";
        for (const auto& r : rep.rows) {
            char buf[256];
            std::snprintf(buf, sizeof(buf), "%.6g,%s,%zu,%.10f,%.10f,%.6f,%.6f,%d\n", r.tau, r.estimator.c_str(), r.n,
                          r.tv, r.floor, r.risk, r.se, r.ok ? 1 : 0);
            table << buf;
        }
        table << "# all_rows_ok=" << (rep.ok() ? 1 : 0) << "\n";
    }
    if (!output.empty()) open_out(output) << table.str();
    std::cout << table.str();
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homolens: homology inference from noisy samples"};
    app.require_subcommand(1);

    std::string input, output, records, curve, emit_complex, emit_kernel, complex_path, cloud_path;
    bool empirical = false;

    Command sample{app.add_subcommand("sample", "Sample a manifold with noise and write a point cloud")};
    add_common(sample);
    add_manifold_flags(sample, "--tau");
    add_noise_flags(sample);
    sample.overrides.bind<std::size_t>(sample.app, "--n", "/n", "Number of points");
    sample.app->add_option("-o,--output", output, "Point-cloud file")->required();

    Command cl{app.add_subcommand("clean", "Remove low-degree points from a cloud")};
    add_common(cl);
    cl.app->add_option("-i,--input", input, "Point-cloud file")->required()->check(CLI::ExistingFile);
    cl.overrides.bind<double>(cl.app, "--radius", "/clean/radius", "Neighborhood radius");
    cl.overrides.bind<double>(cl.app, "--threshold", "/clean/threshold", "Degree fraction t");
    cl.app->add_option("-o,--output", output, "Result file (kept/removed indices)");

    Command cech{app.add_subcommand("cech", "Build the Čech complex of a cloud")};
    add_common(cech);
    cech.app->add_option("-i,--input", input, "Point-cloud file")->required()->check(CLI::ExistingFile);
    cech.overrides.bind<double>(cech.app, "--epsilon", "/epsilon", "Ball radius");
    cech.overrides.bind<std::size_t>(cech.app, "--top-dim", "/top_dim", "Largest simplex dimension (default 2)");
    cech.app->add_option("-o,--output", output, "Complex file")->required();

    Command betti{app.add_subcommand("betti", "Betti numbers of a complex file or a union of balls")};
    add_common(betti);
    betti.app->add_option("--complex", complex_path, "Complex file")->check(CLI::ExistingFile);
    betti.app->add_option("--cloud", cloud_path, "Point-cloud file")->check(CLI::ExistingFile);
    betti.overrides.bind<double>(betti.app, "--epsilon", "/epsilon", "Ball radius (with --cloud)");
    betti.overrides.bind<std::size_t>(betti.app, "--max-p", "/top_dim", "Largest homology degree");

    Command est{app.add_subcommand("estimate", "Estimate the homology of the manifold behind a cloud")};
    add_common(est);
    est.app->add_option("-i,--input", input, "Point-cloud file")->required()->check(CLI::ExistingFile);
    add_noise_flags(est);
    add_estimator_flags(est, "--tau");
    est.overrides.bind<std::string>(est.app, "--manifold", "/manifold/family", "Manifold family (for defaults)");
    est.overrides.bind<double>(est.app, "--manifold-tau", "/manifold/tau", "Manifold reach (for a and volume)");
    est.app->add_option("-o,--output", output, "Result file");
    est.app->add_option("--emit-complex", emit_complex, "Also write the Čech complex of the kept points");
    est.app->add_option("--emit-kernel", emit_kernel, "Also write the deconvolution kernel table");

    Command exp{app.add_subcommand("experiment", "Monte Carlo risk curve over a grid of sample sizes")};
    add_common(exp);
    add_manifold_flags(exp, "--tau");
    add_noise_flags(exp);
    add_estimator_flags(exp, "--est-tau");
    exp.overrides.bind<std::vector<std::size_t>>(exp.app, "--n-grid", "/experiment/n_grid", "Sample sizes");
    exp.overrides.bind<std::size_t>(exp.app, "--trials", "/experiment/trials", "Trials per sample size");
    exp.overrides.bind<std::uint64_t>(exp.app, "--base-seed", "/experiment/seed", "Experiment seed");
    std::string dir = ".";
    exp.app->add_option("-o,--output-dir", dir, "Directory for records.txt and curve.csv");
    exp.app->add_option("--records", records, "Trial records file");
    exp.app->add_option("--curve", curve, "Risk curve file (n,risk,lo,hi)");

    Command tv{app.add_subcommand("tvcheck", "TV distance of the lower-bound pair and the Le Cam floor")};
    add_common(tv);
    tv.overrides.bind<std::size_t>(tv.app, "--d", "/tvcheck/d", "Intrinsic dimension");
    tv.overrides.bind<std::size_t>(tv.app, "--ambient", "/tvcheck/D", "Ambient dimension");
    tv.overrides.bind<double>(tv.app, "--a", "/tvcheck/a", "Density lower bound");
    tv.overrides.bind<std::vector<double>>(tv.app, "--tau-grid", "/tvcheck/tau_grid", "Reaches");
    tv.overrides.bind<std::vector<std::size_t>>(tv.app, "--n-grid", "/tvcheck/n_grid", "Sample sizes");
    tv.overrides.bind<std::size_t>(tv.app, "--trials", "/tvcheck/trials", "Trials per point");
    tv.app->add_flag("--empirical", empirical, "Also run every shipped estimator on the pair");
    tv.app->add_option("-o,--output", output, "Table file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (*sample.app) return run_sample(sample, output);
        if (*cl.app) return run_clean(cl, input, output);
        if (*cech.app) return run_cech(cech, input, output);
        if (*betti.app) return run_betti(betti, complex_path, cloud_path);
        if (*est.app) return run_estimate(est, input, output, emit_complex, emit_kernel);
        if (*exp.app) return run_experiment_cmd(exp, dir, records, curve);
        if (*tv.app) return run_tvcheck(tv, output, empirical);
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis violated: " << e.what() << "\n";
        return hypothesis;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return usage;
    } catch (const PreconditionError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return usage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return usage;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return unexpected;
    }
    return unexpected;
}
