#include "homolens/risk.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/special_functions/beta.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include "homolens/error.hpp"
#include "homolens/rng.hpp"

namespace homolens {

void ExperimentSpec::validate() const {
    if (trials < 1) throw PreconditionError("experiment: trials must be at least 1");
    if (n_grid.empty()) throw PreconditionError("experiment: n_grid must be nonempty");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1]) throw PreconditionError("experiment: n_grid must be strictly increasing");
    if (!sampler) manifold.validate();
    noise.validate();
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t trial) {
    return derive_seed(derive_seed(base, n), trial);
}

std::size_t harness_threads() {
    if (const char* env = std::getenv("HOMOLENS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
    threads = std::min(std::max<std::size_t>(threads, 1), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, std::size_t threads) {
    spec.validate();
    if (threads == 0) threads = harness_threads();
    const auto geometry = spec.geometry ? spec.geometry : std::shared_ptr<const Manifold>(make_manifold(spec.manifold));
    const HomologyProfile truth = spec.truth.value_or(spec.manifold.true_homology());
    ExperimentResult out;
    try {
        spec.estimator.validate();
    } catch (const std::exception& e) {
        out.abort_reason = e.what();
    }

    const std::size_t per = spec.trials;
    out.records.resize(spec.n_grid.size() * per);
    std::atomic<bool> cancelled{false};
    std::mutex progress_mutex;
    std::size_t finished = 0;
    auto report = [&] {
        if (!spec.progress) return;
        std::lock_guard lock(progress_mutex);
        if (!spec.progress(++finished, out.records.size())) cancelled = true;
    };
    auto run_one = [&](std::size_t job) {
        TrialRecord& r = out.records[job];
        r.n = spec.n_grid[job / per];
        r.trial_index = job % per;
        r.seed = trial_seed(spec.base_seed, r.n, r.trial_index);
        r.truth = truth;
        if (!out.abort_reason.empty()) {
            r.failure = out.abort_reason;
            return;
        }
        if (cancelled) {
            r.failure = "cancelled";
            return;
        }
        if (r.n == 0) {
            r.unstable = true;
            r.failure = "no data";
            report();
            return;
        }
        const auto start = std::chrono::steady_clock::now();
        try {
            const PointCloud clean = spec.sampler ? spec.sampler(r.n, r.seed) : sample_manifold(spec.manifold, r.n, r.seed);
            const PointCloud noisy = apply_noise(clean, spec.noise, *geometry, r.seed);
            EstimatorSpec est = spec.estimator;
            est.seed = derive_seed(r.seed, stream::estimator);
            const auto res = estimate(noisy, est, spec.cech);
            r.unstable = res.unstable;
            r.estimated = res.profile;
            r.hit = !res.unstable && homology_equal(res.profile, truth);
        } catch (const PreconditionError& e) {
            r.failure = e.what();
        } catch (const HypothesisError& e) {
            r.failure = e.what();
        } catch (const NumericalError& e) {
            r.failure = e.what();
        } catch (const ResourceLimitError& e) {
            r.failure = e.what();
        }
        r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report();
    };
    parallel_for(out.records.size(), threads, run_one);
    out.cancelled = cancelled;

    for (std::size_t g = 0; g < spec.n_grid.size(); ++g) {
        RiskPoint p;
        p.n = spec.n_grid[g];
        p.trials = per;
        for (std::size_t t = 0; t < per; ++t) {
            const auto& r = out.records[g * per + t];
            if (!r.hit) ++p.misses;
            if (!r.failure.empty()) {
                if (p.failure.empty()) p.failure = r.failure;
                ++p.failures;
            }
        }
        p.risk = static_cast<double>(p.misses) / static_cast<double>(per);
        std::tie(p.lo, p.hi) = clopper_pearson(p.misses, per);
        out.curve.points.push_back(p);
    }
    return out;
}

std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double level) {
    if (n == 0 || k > n) throw PreconditionError("clopper_pearson: requires 0 <= k <= n, n >= 1");
    const double alpha = 1.0 - level;
    const double kd = static_cast<double>(k), nd = static_cast<double>(n);
    const double lo = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1.0, alpha / 2.0);
    const double hi = k == n ? 1.0 : boost::math::ibeta_inv(kd + 1.0, nd - kd, 1.0 - alpha / 2.0);
    return {lo, hi};
}

std::optional<std::size_t> sample_complexity(const RiskCurve& curve, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("sample_complexity: eps must lie in (0,1)");
    for (const auto& p : curve.points)
        if (p.hi <= eps) return p.n;
    return std::nullopt;
}

double lecam_floor(double tv, std::size_t n) {
    if (!(tv >= 0.0 && tv <= 1.0)) throw PreconditionError("lecam_floor: tv must lie in [0,1]");
    return std::pow(1.0 - tv, 2.0 * static_cast<double>(n)) / 8.0;
}

namespace {

struct Overlap {
    double overlap = 0.0, mass1 = 0.0, mass2 = 0.0;
};

Overlap pair_overlap(const LowerBoundPair& pair, std::size_t cells) {
    Overlap o;
    const auto q1 = profile_quadrature(*pair.m1, cells);
    for (std::size_t i = 0; i < q1.weights.size(); ++i) {
        const auto x = q1.points.point(i);
        const double a = pair.p1(x), b = pair.p2(x);
        o.mass1 += a * q1.weights[i];
        o.overlap += std::min(a, b) * q1.weights[i];
    }
    const auto q2 = profile_quadrature(*pair.m2, cells);
    for (std::size_t i = 0; i < q2.weights.size(); ++i) o.mass2 += pair.p2(q2.points.point(i)) * q2.weights[i];
    return o;
}

}  // namespace

TvResult tv_distance_numeric(const LowerBoundPair& pair, double tol) {
    const std::size_t pieces = std::max(pair.m1->pieces().size(), pair.m2->pieces().size());
    const std::size_t cap = std::size_t{1} << 22;
    TvResult r;
    double prev = -1.0;
    for (std::size_t cells = 64;; cells *= 2) {
        if (cells * pieces > cap)
            throw NumericalError("tv_distance_numeric: refinement reached the 2^22-cell cap without converging");
        const auto o = pair_overlap(pair, cells);
        if (std::abs(o.mass1 - 1.0) > 1e-3 || std::abs(o.mass2 - 1.0) > 1e-3) {
            std::ostringstream os;
            os << "tv_distance_numeric: densities are not normalized (masses " << o.mass1 << ", " << o.mass2 << ")";
            throw NumericalError(os.str());
        }
        const double tv = std::clamp(1.0 - o.overlap, 0.0, 1.0);
        if (prev >= 0.0 && std::abs(tv - prev) < tol) {
            r.tv = tv;
            r.change = std::abs(tv - prev);
            r.cells = cells;
            return r;
        }
        prev = tv;
    }
}

double tv_discrete(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw PreconditionError("tv_discrete: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

std::vector<double> convolve_discrete(const std::vector<double>& p, const std::vector<double>& k, std::size_t side_p,
                                      std::size_t side_k, std::size_t dims) {
    if (dims == 1) {
        if (p.size() != side_p || k.size() != side_k) throw PreconditionError("convolve_discrete: size mismatch");
        std::vector<double> out(side_p + side_k - 1, 0.0);
        for (std::size_t i = 0; i < side_p; ++i)
            for (std::size_t j = 0; j < side_k; ++j) out[i + j] += p[i] * k[j];
        return out;
    }
    if (dims != 2) throw PreconditionError("convolve_discrete: dims must be 1 or 2");
    if (p.size() != side_p * side_p || k.size() != side_k * side_k)
        throw PreconditionError("convolve_discrete: size mismatch");
    const std::size_t so = side_p + side_k - 1;
    std::vector<double> out(so * so, 0.0);
    for (std::size_t i0 = 0; i0 < side_p; ++i0)
        for (std::size_t i1 = 0; i1 < side_p; ++i1) {
            const double v = p[i0 * side_p + i1];
            if (v == 0.0) continue;
            for (std::size_t j0 = 0; j0 < side_k; ++j0)
                for (std::size_t j1 = 0; j1 < side_k; ++j1) out[(i0 + j0) * so + i1 + j1] += v * k[j0 * side_k + j1];
        }
    return out;
}

bool LowerBoundReport::ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const LowerBoundRow& r) { return r.ok; });
}

LowerBoundReport check_lower_vs_empirical(const LowerBoundCheck& check, std::size_t threads) {
    if (check.trials < 1) throw PreconditionError("check_lower_vs_empirical: trials must be at least 1");
    LowerBoundReport rep;
    for (double tau : check.tau_grid) {
        const auto pair = build_lower_bound_pair(check.d, check.D, tau, check.a);
        const double tv = tv_distance_numeric(pair).tv;
        rep.tv_by_tau.emplace_back(tau, tv);
        for (std::size_t e = 0; e < check.estimators.size(); ++e) {
            const auto& est = check.estimators[e];
            EstimatorSpec tmpl = est.spec;
            NoiseSpec noise = est.noise;
            if (est.sigma_per_tau > 0.0) tmpl.sigma = noise.sigma = est.sigma_per_tau * tau;
            std::vector<ExperimentResult> runs;
            for (int which = 0; which < 2; ++which) {
                ExperimentSpec x;
                x.manifold = which == 0 ? pair.spec1 : pair.spec2;
                x.noise = noise;
                x.estimator = tmpl;
                x.estimator.tau = tau;
                x.estimator.d = check.d;
                x.estimator.D = check.D;
                x.estimator.a = check.a;
                x.estimator.volume = which == 0 ? pair.m1->volume() : pair.m2->volume();
                x.n_grid = check.n_grid;
                x.trials = check.trials;
                x.base_seed = derive_seed(check.base_seed, 1000 * e + static_cast<std::uint64_t>(which));
                x.geometry = which == 0 ? pair.m1 : pair.m2;
                x.truth = x.manifold.true_homology();
                if (which == 0)
                    x.sampler = [&pair](std::size_t n, std::uint64_t s) { return pair.sample_p1(n, s); };
                else
                    x.sampler = [&pair](std::size_t n, std::uint64_t s) { return pair.sample_p2(n, s); };
                runs.push_back(run_experiment(x, threads));
            }
            for (std::size_t g = 0; g < check.n_grid.size(); ++g) {
                LowerBoundRow row;
                row.tau = tau;
                row.estimator = to_string(tmpl.noise_model);
                row.n = check.n_grid[g];
                row.tv = tv;
                row.floor = lecam_floor(tv, row.n);
                row.risk = std::max(runs[0].curve.points[g].risk, runs[1].curve.points[g].risk);
                // Agresti-Coull: the plug-in error is 0 at risk 0, which would fail any positive floor.
                const double t = static_cast<double>(check.trials) + 4.0;
                const double adj = (row.risk * static_cast<double>(check.trials) + 2.0) / t;
                row.se = std::sqrt(adj * (1.0 - adj) / t);
                row.ok = row.risk >= row.floor - 3.0 * row.se;
                rep.rows.push_back(row);
            }
        }
    }
    return rep;
}

std::vector<LowerBoundEstimator> shipped_lower_bound_estimators() {
    std::vector<LowerBoundEstimator> v(5);
    v[0].spec.noise_model = v[0].noise.model = NoiseModel::noiseless;
    v[1].spec.noise_model = v[1].noise.model = NoiseModel::clutter;
    v[1].spec.pi = v[1].noise.pi = 0.7;
    v[2].spec.noise_model = v[2].noise.model = NoiseModel::tubular;
    v[2].sigma_per_tau = 1.0 / 48.0;
    v[3].spec.noise_model = v[3].noise.model = NoiseModel::gaussian;
    v[3].sigma_per_tau = 1.0 / 100.0;
    v[4].spec.noise_model = v[4].noise.model = NoiseModel::additive_known;
    return v;
}

std::string format_record(const TrialRecord& r) {
    std::ostringstream os;
    std::string failure = r.failure;
    std::replace(failure.begin(), failure.end(), '"', '\'');
    std::replace(failure.begin(), failure.end(), '\n', ' ');
    os << "n=" << r.n << " trial=" << r.trial_index << " seed=" << r.seed
       << " estimated=" << (r.estimated.betti.empty() ? "none" : to_string(r.estimated))
       << " truth=" << to_string(r.truth) << " hit=" << (r.hit ? 1 : 0) << " unstable=" << (r.unstable ? 1 : 0)
       << " failure=\"" << failure << "\"";
    return os.str();
}

std::string format_curve_csv(const RiskCurve& c) {
    std::ostringstream os;
    os.precision(17);
    os << "n,risk,lo,hi\n";
    for (const auto& p : c.points) os << p.n << "," << p.risk << "," << p.lo << "," << p.hi << "\n";
    return os.str();
}

}  // namespace homolens
