#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "homolens/error.hpp"

namespace homolens::cli {

namespace {

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    try {
        return j[key].get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("key '") + key + "': " + e.what());
    }
}

const json& section(const json& cfg, const char* name) {
    static const json empty = json::object();
    return cfg.contains(name) ? cfg[name] : empty;
}

}  // namespace

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json cfg;
    try {
        cfg = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    check_keys(cfg, "config",
               {"manifold", "noise", "estimator", "experiment", "tvcheck", "clean", "seed", "n", "epsilon", "top_dim",
                "threads"});
    return cfg;
}

json to_json(const ManifoldSpec& m) {
    json j = {{"family", to_string(m.family)},
              {"intrinsic_dim", m.intrinsic_dim},
              {"ambient_dim", m.ambient_dim},
              {"tau", m.tau},
              {"density_floor", m.density_floor}};
    if (!m.center.empty()) j["center"] = m.center;
    return j;
}

ManifoldSpec manifold_from_json(const json& j) {
    check_keys(j, "manifold", {"family", "intrinsic_dim", "ambient_dim", "tau", "density_floor", "center"});
    if (!j.contains("tau")) throw ConfigError("manifold: tau is required");
    ManifoldSpec m;
    m.family = parse_manifold_family(get_or<std::string>(j, "family", "circle"));
    const double tau = get_or<double>(j, "tau", 0.0);
    switch (m.family) {
        case ManifoldFamily::circle: m = circle_spec(tau, get_or<std::size_t>(j, "ambient_dim", 2)); break;
        case ManifoldFamily::sphere: {
            const auto d = get_or<std::size_t>(j, "intrinsic_dim", 2);
            m = sphere_spec(d, tau, get_or<std::size_t>(j, "ambient_dim", d + 1));
            break;
        }
        case ManifoldFamily::torus: m = torus_spec(tau, get_or<std::size_t>(j, "ambient_dim", 3)); break;
        default:
            m.intrinsic_dim = get_or<std::size_t>(j, "intrinsic_dim", 1);
            m.ambient_dim = get_or<std::size_t>(j, "ambient_dim", m.intrinsic_dim + 1);
            m.tau = tau;
    }
    m.density_floor = get_or<double>(j, "density_floor", m.density_floor);
    m.center = get_or<std::vector<double>>(j, "center", {});
    m.validate();
    return m;
}

json to_json(const NoiseDistribution& phi) {
    switch (phi.kind) {
        case NoiseDistribution::Kind::point_mass: return {{"kind", "point_mass"}};
        case NoiseDistribution::Kind::gaussian: return {{"kind", "gaussian"}, {"scale", phi.scale}};
        case NoiseDistribution::Kind::laplace: return {{"kind", "laplace"}, {"scale", phi.scale}};
        case NoiseDistribution::Kind::uniform_box: return {{"kind", "uniform"}, {"scale", phi.scale}};
    }
    return {};
}

NoiseDistribution noise_distribution_from_json(const json& j) {
    check_keys(j, "phi", {"kind", "scale"});
    return parse_noise_distribution(get_or<std::string>(j, "kind", "point_mass"), get_or<double>(j, "scale", 0.0));
}

json to_json(const NoiseSpec& n) {
    return {{"model", to_string(n.model)},
            {"pi", n.pi},
            {"sigma", n.sigma},
            {"exact_tube", n.exact_tube},
            {"phi", to_json(n.phi)}};
}

NoiseSpec noise_from_json(const json& j) {
    check_keys(j, "noise", {"model", "pi", "sigma", "exact_tube", "phi"});
    NoiseSpec n;
    n.model = parse_noise_model(get_or<std::string>(j, "model", "noiseless"));
    n.pi = get_or<double>(j, "pi", 1.0);
    n.sigma = get_or<double>(j, "sigma", 0.0);
    n.exact_tube = get_or<bool>(j, "exact_tube", true);
    if (j.contains("phi")) n.phi = noise_distribution_from_json(j["phi"]);
    n.validate();
    return n;
}

EstimatorSpec estimator_from_config(const json& cfg, std::size_t ambient_dim) {
    const json& e = section(cfg, "estimator");
    check_keys(e, "estimator",
               {"noise_model", "tau", "sigma", "pi", "a", "d", "volume", "c2", "decon_delta", "seed", "phi",
                "clean_radius", "clean_threshold", "ball_radius", "top_dim"});
    const NoiseSpec noise = cfg.contains("noise") ? noise_from_json(cfg["noise"]) : NoiseSpec{};
    std::optional<ManifoldSpec> m;
    if (cfg.contains("manifold")) m = manifold_from_json(cfg["manifold"]);

    EstimatorSpec s;
    s.noise_model = e.contains("noise_model") ? parse_noise_model(e["noise_model"].get<std::string>()) : noise.model;
    s.tau = get_or<double>(e, "tau", m ? m->tau : 0.0);
    if (!(s.tau > 0.0)) throw ConfigError("estimator: tau is required (set --tau or a manifold section)");
    s.sigma = get_or<double>(e, "sigma", noise.sigma);
    s.pi = get_or<double>(e, "pi", noise.pi);
    s.d = get_or<std::size_t>(e, "d", m ? m->intrinsic_dim : 1);
    s.D = ambient_dim;
    double volume = 0.0;
    if (m) volume = make_manifold(*m)->volume();
    s.volume = get_or<double>(e, "volume", volume);
    const double default_a = m && m->density_floor > 0.0 ? m->density_floor : (volume > 0.0 ? 1.0 / volume : 0.0);
    s.a = get_or<double>(e, "a", default_a);
    s.c2 = get_or<double>(e, "c2", 2.0);
    s.decon_delta = get_or<double>(e, "decon_delta", 1e-3);
    s.seed = get_or<std::uint64_t>(e, "seed", get_or<std::uint64_t>(cfg, "seed", 0));
    s.phi = e.contains("phi") ? noise_distribution_from_json(e["phi"]) : noise.phi;
    if (e.contains("clean_radius")) s.overrides.clean_radius = get_or<double>(e, "clean_radius", 0.0);
    if (e.contains("clean_threshold")) s.overrides.clean_threshold = get_or<double>(e, "clean_threshold", 0.0);
    if (e.contains("ball_radius")) s.overrides.ball_radius = get_or<double>(e, "ball_radius", 0.0);
    if (e.contains("top_dim")) s.overrides.top_dim = get_or<std::size_t>(e, "top_dim", 1);
    return s;
}

ExperimentSpec experiment_from_config(const json& cfg) {
    if (!cfg.contains("manifold")) throw ConfigError("experiment: a manifold section is required");
    const json& x = section(cfg, "experiment");
    check_keys(x, "experiment", {"n_grid", "trials", "seed", "max_simplices"});
    ExperimentSpec s;
    s.manifold = manifold_from_json(cfg["manifold"]);
    if (cfg.contains("noise")) s.noise = noise_from_json(cfg["noise"]);
    s.estimator = estimator_from_config(cfg, s.manifold.ambient_dim);
    s.n_grid = get_or<std::vector<std::size_t>>(x, "n_grid", {});
    s.trials = get_or<std::size_t>(x, "trials", 1);
    s.base_seed = get_or<std::uint64_t>(x, "seed", get_or<std::uint64_t>(cfg, "seed", 0));
    s.cech.max_simplices = get_or<std::size_t>(x, "max_simplices", s.cech.max_simplices);
    if (s.n_grid.empty()) throw ConfigError("experiment: n_grid must be a nonempty list");
    return s;
}

json to_json(const CleanReport& r) {
    return {{"kept", r.kept}, {"removed", r.removed}};
}

json to_json(const EstimateResult& r) {
    json params = json::object();
    for (const auto& [k, v] : r.parameters_used) params[k] = v;
    json j = {{"profile", r.profile.betti.empty() ? "none" : to_string(r.profile)},
              {"unstable", r.unstable},
              {"route", r.route},
              {"complex_size", r.complex_size},
              {"parameters_used", params},
              {"kept", r.kept_indices}};
    if (r.resampled) j["resampled_count"] = r.resampled->size();
    return j;
}

json to_json(const KernelPair& kp, std::size_t table_points) {
    std::string preset;
    switch (kp.kind()) {
        case KernelPair::Kind::identity: preset = "identity"; break;
        case KernelPair::Kind::gaussian: preset = "gaussian"; break;
        case KernelPair::Kind::lattice: preset = "lattice"; break;
    }
    json j = {{"preset", preset},
              {"description", kp.describe()},
              {"phi", to_json(kp.phi())},
              {"sigma_psi", kp.sigma_psi()},
              {"epsilon", kp.epsilon()},
              {"gamma", kp.gamma()},
              {"residual", kp.residual()},
              {"dim", kp.dim()}};
    if (kp.kind() != KernelPair::Kind::lattice) j["sigma_k"] = kp.sigma_k();
    if (kp.kind() != KernelPair::Kind::identity && table_points > 1) {
        const double L = kp.support_radius();
        const double h = L / static_cast<double>(table_points - 1);
        std::vector<double> values(table_points);
        for (std::size_t i = 0; i < table_points; ++i) values[i] = kp.k1(h * static_cast<double>(i));
        j["k1_table"] = {{"step", h}, {"values", values}};
    }
    return j;
}

}  // namespace homolens::cli
