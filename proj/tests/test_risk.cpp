#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "homolens/error.hpp"
#include "homolens/risk.hpp"

using namespace homolens;

namespace {

double binom_cdf(std::size_t k, std::size_t n, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i <= k; ++i)
        s += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p) +
                      (n - i) * std::log1p(-p));
    return s;
}

// Upper bound: the p with P(X <= k) = 0.025, by bisection.
double cp_upper(std::size_t k, std::size_t n) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (binom_cdf(k, n, mid) > 0.025 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ExperimentSpec noiseless_circle(std::vector<std::size_t> grid, std::size_t trials) {
    ExperimentSpec x;
    x.manifold = circle_spec(1.0, 2);
    x.estimator.noise_model = NoiseModel::noiseless;
    x.estimator.tau = 1.0;
    x.estimator.a = 1.0 / (2 * std::numbers::pi);
    x.n_grid = std::move(grid);
    x.trials = trials;
    x.base_seed = 42;
    return x;
}

}  // namespace

TEST_CASE("Clopper-Pearson intervals") {
    auto [lo, hi] = clopper_pearson(0, 1);
    CHECK(lo == 0.0);
    CHECK(hi == doctest::Approx(0.975));
    for (std::size_t n : {5u, 20u, 100u})
        for (std::size_t k = 0; k < n; k += n / 5) {
            const auto [l, h] = clopper_pearson(k, n);
            CHECK(h == doctest::Approx(cp_upper(k, n)).epsilon(1e-8));
            CHECK(l <= double(k) / n);
            CHECK(h >= double(k) / n);
        }
    CHECK(clopper_pearson(10, 10).second == 1.0);
    CHECK(clopper_pearson(10, 10).first == doctest::Approx(std::pow(0.025, 0.1)));
}

TEST_CASE("single trial experiment") {
    const auto res = run_experiment(noiseless_circle({2000}, 1));
    REQUIRE(res.curve.points.size() == 1);
    CHECK(res.curve.points[0].risk == 0.0);
    CHECK(res.curve.points[0].lo == 0.0);
    CHECK(res.curve.points[0].hi == doctest::Approx(0.975));
    CHECK(res.records[0].hit);
}

TEST_CASE("experiments are reproducible and records sorted") {
    const auto spec = noiseless_circle({10, 20, 40}, 6);
    const auto a = run_experiment(spec, 1), b = run_experiment(spec, 3);
    REQUIRE(a.records.size() == 18);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(format_record(a.records[i]) == format_record(b.records[i]));
        if (i > 0) {
            const auto& p = a.records[i - 1];
            const auto& q = a.records[i];
            CHECK((p.n < q.n || (p.n == q.n && p.trial_index < q.trial_index)));
        }
    }
    CHECK(format_curve_csv(a.curve) == format_curve_csv(b.curve));
    // Distinct derived seeds.
    for (std::size_t i = 1; i < a.records.size(); ++i) CHECK(a.records[i].seed != a.records[i - 1].seed);
    for (const auto& p : a.curve.points) {
        CHECK(p.risk >= 0.0);
        CHECK(p.risk <= 1.0);
        CHECK(p.lo <= p.risk);
        CHECK(p.hi >= p.risk);
    }

    std::istringstream csv(format_curve_csv(a.curve));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "n,risk,lo,hi");
    while (std::getline(csv, line)) {
        std::istringstream row(line);
        long n;
        double r, l, h;
        char c1, c2, c3;
        CHECK(static_cast<bool>(row >> n >> c1 >> r >> c2 >> l >> c3 >> h));
    }
}

TEST_CASE("progress callback can cancel remaining trials") {
    auto spec = noiseless_circle({50, 100}, 4);
    std::size_t calls = 0;
    spec.progress = [&](std::size_t done, std::size_t total) {
        ++calls;
        CHECK(total == 8);
        return done < 3;
    };
    const auto res = run_experiment(spec, 1);
    CHECK(res.cancelled);
    CHECK(calls == 3);
    std::size_t cancelled = 0;
    for (const auto& r : res.records) cancelled += r.failure == "cancelled";
    CHECK(cancelled == 5);
    CHECK(res.curve.points[1].failures == 4);

    spec.progress = [](std::size_t, std::size_t) { return true; };
    const auto full = run_experiment(spec, 1);
    CHECK(!full.cancelled);
    spec.progress = nullptr;
    const auto plain = run_experiment(spec, 1);
    for (std::size_t i = 0; i < plain.records.size(); ++i)
        CHECK(format_record(plain.records[i]) == format_record(full.records[i]));
}

TEST_CASE("failed construction aborts every grid point") {
    auto spec = noiseless_circle({100, 200}, 3);
    spec.estimator.noise_model = NoiseModel::tubular;
    spec.estimator.sigma = 0.1;
    const auto res = run_experiment(spec);
    CHECK(res.abort_reason.find("σ < τ/24") != std::string::npos);
    for (const auto& p : res.curve.points) {
        CHECK(p.risk == 1.0);
        CHECK(p.failures == 3);
    }
    spec.n_grid = {200, 100};
    CHECK_THROWS_AS(run_experiment(spec), PreconditionError);
}

TEST_CASE("sample complexity and Le Cam floor") {
    RiskCurve c;
    c.points = {{100, 1000, 500, 0.5, 0.47, 0.53}, {200, 1000, 200, 0.2, 0.18, 0.23}, {400, 1000, 30, 0.03, 0.02, 0.043}};
    CHECK(sample_complexity(c, 0.05) == std::optional<std::size_t>(400));
    CHECK(!sample_complexity(c, 0.01).has_value());

    CHECK(lecam_floor(0.0, 17) == 0.125);
    CHECK(lecam_floor(1.0, 1) == 0.0);
    CHECK(lecam_floor(0.01, 100) == doctest::Approx(0.01674).epsilon(1e-3));
    CHECK(lecam_floor(0.3, 0) == 0.125);
}

TEST_CASE("numeric TV of the lower-bound pair") {
    std::vector<double> ratio;
    for (double tau : {0.02, 0.04, 0.08}) {
        const auto pair = build_lower_bound_pair(1, 2, tau, 0.2);
        const auto r = tv_distance_numeric(pair);
        CHECK(r.change < 1e-3);
        CHECK(std::abs(r.tv - pair.tv_closed_form()) <= 2e-3);
        ratio.push_back(r.tv / tau);
    }
    const auto [mn, mx] = std::minmax_element(ratio.begin(), ratio.end());
    CHECK(*mx / *mn <= 1.1);

    auto same = build_lower_bound_pair(1, 2, 0.05, 0.2);
    same.m2 = same.m1;
    same.p2 = same.p1;
    CHECK(tv_distance_numeric(same).tv == doctest::Approx(0.0).epsilon(1e-12));

    // Disjoint supports on one manifold: all mass on W1 versus all mass off it.
    auto split = build_lower_bound_pair(1, 2, 0.05, 0.2);
    split.m2 = split.m1;
    const auto m = split.m1;
    const double vw = m->label_volume(RegionLabel::w1), vc = m->label_volume(RegionLabel::common);
    split.p1 = [m, vw](std::span<const double> x) {
        const auto [k, dist] = m->nearest_piece(x);
        return dist < 1e-9 && m->pieces()[k].label == RegionLabel::w1 ? 1.0 / vw : 0.0;
    };
    split.p2 = [m, vc](std::span<const double> x) {
        const auto [k, dist] = m->nearest_piece(x);
        return dist < 1e-9 && m->pieces()[k].label == RegionLabel::common ? 1.0 / vc : 0.0;
    };
    CHECK(tv_distance_numeric(split).tv == doctest::Approx(1.0));

    auto bad = build_lower_bound_pair(1, 2, 0.05, 0.2);
    bad.p2 = [](std::span<const double>) { return 0.5; };
    CHECK_THROWS_AS(tv_distance_numeric(bad), NumericalError);
}

TEST_CASE("convolution does not increase total variation") {
    Rng rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto random_dist = [&](std::size_t size) {
        std::vector<double> v(size);
        double s = 0.0;
        for (auto& x : v) s += (x = u(rng) < 0.3 ? 0.0 : u(rng));
        for (auto& x : v) x /= s;
        return v;
    };
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t dims = 1 + trial % 2;
        const std::size_t side = dims == 1 ? 64 : 12, ks = dims == 1 ? 9 : 5;
        const std::size_t cells = dims == 1 ? side : side * side;
        const auto p = random_dist(cells), q = random_dist(cells);
        const auto k = random_dist(dims == 1 ? ks : ks * ks);
        const auto pk = convolve_discrete(p, k, side, ks, dims), qk = convolve_discrete(q, k, side, ks, dims);
        double mass = 0.0;
        for (double x : pk) mass += x;
        CHECK(mass == doctest::Approx(1.0));
        CHECK(tv_discrete(pk, qk) <= tv_discrete(p, q) + 1e-6);
    }
}

TEST_CASE("empirical risk on the lower-bound pair stays above the floor") {
    LowerBoundCheck check;
    check.tau_grid = {0.05};
    check.n_grid = {0, 50};
    check.trials = 20;
    check.base_seed = 3;
    EstimatorSpec e;
    e.noise_model = NoiseModel::noiseless;
    check.estimators.push_back({e, NoiseSpec{}, 0.0});
    const auto rep = check_lower_vs_empirical(check);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].floor == 0.125);
    CHECK(rep.rows[0].risk == 1.0);
    CHECK(rep.rows[1].floor == doctest::Approx(lecam_floor(rep.tv_by_tau[0].second, 50)));
    // Adjusted error: risk 1 over 20 trials gives p = 22/24.
    CHECK(rep.rows[0].se == doctest::Approx(std::sqrt(22.0 / 24 * 2.0 / 24 / 24)));
    CHECK(rep.ok());
}
