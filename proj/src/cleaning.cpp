#include "homolens/cleaning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "homolens/error.hpp"
#include "homolens/numeric.hpp"

namespace homolens {

namespace {

const double sqrt9_minus_sqrt8 = 3.0 - std::sqrt(8.0);

// Planar degree counting on a fine grid: cells entirely inside the query disk
// are counted from per-row prefix sums; only boundary cells are scanned.
std::vector<std::size_t> planar_degree_counts(const PointCloud& cloud, double radius, double cell) {
    const std::size_t n = cloud.size();
    double lo[2] = {cloud.point(0)[0], cloud.point(0)[1]}, hi[2] = {lo[0], lo[1]};
    for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < 2; ++a) {
            lo[a] = std::min(lo[a], cloud.point(i)[a]);
            hi[a] = std::max(hi[a], cloud.point(i)[a]);
        }
    const auto gx = static_cast<std::size_t>(std::floor((hi[0] - lo[0]) / cell)) + 1;
    const auto gy = static_cast<std::size_t>(std::floor((hi[1] - lo[1]) / cell)) + 1;
    auto cell_of = [&](std::span<const double> p) {
        auto cx = std::min(static_cast<std::size_t>((p[0] - lo[0]) / cell), gx - 1);
        auto cy = std::min(static_cast<std::size_t>((p[1] - lo[1]) / cell), gy - 1);
        return cy * gx + cx;
    };
    // Counting sort of points by cell.
    std::vector<std::size_t> start(gx * gy + 1, 0);
    std::vector<std::size_t> cell_id(n);
    for (std::size_t i = 0; i < n; ++i) {
        cell_id[i] = cell_of(cloud.point(i));
        ++start[cell_id[i] + 1];
    }
    std::partial_sum(start.begin(), start.end(), start.begin());
    std::vector<double> xs(2 * n);
    std::vector<std::size_t> slot_point(n);
    {
        std::vector<std::size_t> fill(start.begin(), start.end() - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t slot = fill[cell_id[i]]++;
            xs[2 * slot] = cloud.point(i)[0];
            xs[2 * slot + 1] = cloud.point(i)[1];
            slot_point[slot] = i;
        }
    }
    // start[] doubles as the row prefix sum: points in cells [row*gx + a, row*gx + b) = start[..b] - start[..a].
    const double r2 = radius * radius;
    const double shrink = 1.0 - 1e-9;  // keeps the "fully inside" shortcut strictly conservative
    std::vector<std::size_t> deg(n, 0);
    // Queries run in cell order for locality.
    for (std::size_t q = 0; q < n; ++q) {
        const double px = xs[2 * q], py = xs[2 * q + 1];
        const long ylo = std::max(0L, static_cast<long>(std::floor((py - radius - lo[1]) / cell)));
        const long yhi = std::min(static_cast<long>(gy) - 1, static_cast<long>(std::floor((py + radius - lo[1]) / cell)));
        std::size_t count = 0;
        for (long row = ylo; row <= yhi; ++row) {
            const double y0 = lo[1] + static_cast<double>(row) * cell, y1 = y0 + cell;
            const double dy_near = py < y0 ? y0 - py : (py > y1 ? py - y1 : 0.0);
            if (dy_near > radius) continue;
            const double dy_far = std::max(std::abs(py - y0), std::abs(py - y1));
            const double w_out = std::sqrt(std::max(0.0, r2 - dy_near * dy_near));
            long cx_lo = std::max(0L, static_cast<long>(std::floor((px - w_out - lo[0]) / cell)));
            long cx_hi = std::min(static_cast<long>(gx) - 1, static_cast<long>(std::floor((px + w_out - lo[0]) / cell)));
            if (cx_lo > cx_hi) continue;
            long in_lo = cx_hi + 1, in_hi = cx_hi;  // empty unless set below
            if (dy_far < radius * shrink) {
                const double w_in = std::sqrt(r2 * shrink * shrink - dy_far * dy_far);
                // Cells whose x-extent lies within [px - w_in, px + w_in].
                in_lo = static_cast<long>(std::ceil((px - w_in - lo[0]) / cell));
                in_hi = static_cast<long>(std::floor((px + w_in - lo[0]) / cell)) - 1;
                in_lo = std::max(in_lo, cx_lo);
                in_hi = std::min(in_hi, cx_hi);
                if (in_lo > in_hi) {
                    in_lo = cx_hi + 1;
                    in_hi = cx_hi;
                }
            }
            const std::size_t base = static_cast<std::size_t>(row) * gx;
            auto scan = [&](long a, long b) {  // inclusive cell range, exact test
                if (a > b) return;
                for (std::size_t s = start[base + a]; s < start[base + b + 1]; ++s) {
                    const double dx = xs[2 * s] - px, dy = xs[2 * s + 1] - py;
                    if (dx * dx + dy * dy <= r2) ++count;
                }
            };
            if (in_lo <= in_hi) {
                scan(cx_lo, in_lo - 1);
                count += start[base + in_hi + 1] - start[base + in_lo];
                scan(in_hi + 1, cx_hi);
            } else {
                scan(cx_lo, cx_hi);
            }
        }
        deg[slot_point[q]] = count - 1;  // the point itself
    }
    return deg;
}

}  // namespace

std::vector<std::size_t> degree_counts(const PointCloud& cloud, double radius) {
    if (radius < 0.0) throw PreconditionError("degree_counts: radius must be nonnegative");
    const std::size_t n = cloud.size();
    if (cloud.ambient_dim() == 2 && n >= 2000 && radius > 0.0) {
        double lo[2] = {cloud.point(0)[0], cloud.point(0)[1]}, hi[2] = {lo[0], lo[1]};
        for (std::size_t i = 0; i < n; ++i)
            for (int a = 0; a < 2; ++a) {
                lo[a] = std::min(lo[a], cloud.point(i)[a]);
                hi[a] = std::max(hi[a], cloud.point(i)[a]);
            }
        const double area = std::max((hi[0] - lo[0]) * (hi[1] - lo[1]), 1e-300);
        const double cell = std::max(radius / 32.0, std::sqrt(area / (2.0 * static_cast<double>(n) + 1024.0)));
        if (cell <= radius / 2.0) return planar_degree_counts(cloud, radius, cell);
    }
    return neighbor_counts(cloud, radius);
}

CleanReport clean(const PointCloud& cloud, const CleanParams& params) {
    if (cloud.empty()) throw PreconditionError("clean: cloud must be nonempty");
    if (!(params.radius > 0.0)) throw PreconditionError("clean: radius must be positive");
    if (!(params.threshold >= 0.0 && params.threshold <= 1.0))
        throw PreconditionError("clean: threshold must lie in [0,1]");
    CleanReport rep;
    rep.degrees = degree_counts(cloud, params.radius);
    const double cut = static_cast<double>(cloud.size() - 1) * params.threshold;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (static_cast<double>(rep.degrees[i]) <= cut)
            rep.removed.push_back(static_cast<Index>(i));
        else
            rep.kept.push_back(static_cast<Index>(i));
    }
    return rep;
}

double clutter_default_r(double tau) { return sqrt9_minus_sqrt8 * tau / 4.0; }

ClutterCleanParams clutter_threshold(double pi, double a, double r, double tau, std::size_t d, std::size_t D) {
    if (!(tau > 0.0)) throw PreconditionError("clutter_threshold: tau must be positive");
    if (!(pi > 0.0 && pi <= 1.0)) throw PreconditionError("clutter_threshold: requires 0 < pi <= 1");
    if (!(r > 0.0 && r < sqrt9_minus_sqrt8 * tau / 2.0))
        throw HypothesisError("clutter cleaning requires 0 < r < (√9−√8)τ/2 = " +
                              std::to_string(sqrt9_minus_sqrt8 * tau / 2.0) + ", got r=" + std::to_string(r));
    ClutterCleanParams c;
    c.r = r;
    c.theta = std::asin(r / (2.0 * tau));
    const double s = 2.0 * r;
    const double on_manifold =
        pi * a * unit_ball_volume(d) * std::pow(r, double(d)) * std::pow(std::cos(c.theta), double(d));
    c.beta = unit_ball_volume(D) * std::pow(s, double(D)) * (1.0 - pi);  // vol(Box) = 1
    c.alpha = c.beta + on_manifold;
    c.params.radius = s;
    c.params.threshold = c.beta + on_manifold / 2.0;
    c.t_midpoint = 0.5 * (c.alpha + c.beta);
    return c;
}

ClutterSampleSize clutter_sample_size(double pi, double a, double r, double tau, std::size_t d, double volume,
                                      double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("clutter_sample_size: delta must lie in (0,1)");
    ClutterSampleSize s;
    const double theta = std::asin(r / (2.0 * tau));
    const double cap = std::pow(std::cos(theta), double(d)) * unit_ball_volume(d) * std::pow(r, double(d));
    s.zeta = pi * a * cap;
    s.kappa = std::max(1.0 + 200.0 / (3.0 * s.zeta) * std::log(2.0 / delta), 4.0);
    s.n1 = 4.0 * s.kappa * std::log(s.kappa);
    s.n2 = (std::log(volume / cap) + std::log(2.0 / delta)) / s.zeta;
    s.n = static_cast<std::size_t>(std::floor(std::max(s.n1, s.n2))) + 1;
    return s;
}

GaussianCleanParams gaussian_clean_params(double sigma, double tau, double a, std::size_t d, std::size_t D) {
    if (!(sigma >= 0.0) || !(tau > 0.0)) throw PreconditionError("gaussian_clean_params: invalid sigma or tau");
    const double root_d_sigma = std::sqrt(double(D)) * sigma;
    if (!(8.0 * root_d_sigma < tau))
        throw HypothesisError("Gaussian noise requires 8√Dσ < τ (8√Dσ = " + std::to_string(8.0 * root_d_sigma) +
                              ", τ = " + std::to_string(tau) + ")");
    GaussianCleanParams g;
    const double cap = sqrt9_minus_sqrt8 * tau / 8.0;
    if (root_d_sigma < cap) {
        g.r = cap;
        g.nsw_radius_certified = true;
    } else {
        g.r = 1.25 * root_d_sigma;
        g.nsw_radius_certified = false;
    }
    g.theta = std::asin(std::min(1.0, g.r / (2.0 * tau)));
    g.gamma = std::pow(4.0 * std::exp(-3.0), 0.5 * double(D));
    g.t_const = std::pow(16.0 * std::exp(-15.0), 0.5 * double(D));
    g.alpha = a * unit_ball_volume(d) * std::pow(g.r, double(d)) * std::pow(std::cos(g.theta), double(d)) *
              (1.0 - g.gamma);
    g.beta = unit_ball_volume(D) * std::pow(8.0 * g.r, double(D)) * g.t_const;
    if (!(g.beta < g.alpha / 2.0))
        throw HypothesisError("Gaussian cleaning requires β < α/2 (β = " + std::to_string(g.beta) +
                              ", α = " + std::to_string(g.alpha) + ")");
    g.params.radius = 4.0 * g.r;
    g.params.threshold = 0.5 * (g.alpha + g.beta);
    return g;
}

std::size_t bernstein_sample_size(double alpha, double delta) {
    if (!(alpha > 0.0)) throw PreconditionError("bernstein_sample_size: alpha must be positive");
    if (!(delta > 0.0 && delta < 0.5))
        throw PreconditionError("bernstein_sample_size: requires 0 < δ < 1/2");
    const double kappa = std::max(1.0 + 200.0 / (3.0 * alpha) * std::log(1.0 / delta), 4.0);
    const double bound = 4.0 * kappa * std::log(kappa);
    return static_cast<std::size_t>(std::floor(bound)) + 1;
}

}  // namespace homolens
