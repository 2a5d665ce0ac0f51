#include "homolens/deconvolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "homolens/error.hpp"
#include "homolens/numeric.hpp"

namespace homolens {

namespace {

constexpr double floor_min = 1e-12;
constexpr double residual_max = 1e-3;
constexpr double amplification_max = 1e8;
constexpr std::size_t lattice_nodes = 8193;
constexpr double lattice_halfwidth = 24.0;  // in units of sigma_psi

// |t| beyond which exp(-sigma^2 t^2 / 2) < 1e-12
double psi_band(double sigma_psi) { return std::sqrt(2.0 * std::log(1.0 / floor_min)) / sigma_psi; }

double gauss1(double x, double s) {
    return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi));
}

// Radial quadrature of the isotropic Gaussian density over {r0 <= |x| <= r0 + 40 sigma}.
double radial_gaussian_mass(std::size_t D, double r0, double sigma) {
    const double norm = unit_sphere_area(D) / std::pow(2.0 * std::numbers::pi * sigma * sigma, 0.5 * double(D));
    auto f = [&](double r) { return norm * std::pow(r, double(D) - 1.0) * std::exp(-0.5 * r * r / (sigma * sigma)); };
    double total = 0.0;
    const double step = sigma;
    for (double a = r0; a < r0 + 40.0 * sigma; a += step)
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, a + step, 5, 1e-14);
    return total;
}

// Convolution c(x) = integral k(u) phi(x - u) du at lattice nodes x = j h,
// where k is given by its even table on [0, (N-1) h].
std::vector<double> convolve_with_phi(const std::vector<double>& table, double h, const NoiseDistribution& phi,
                                      const std::vector<std::size_t>& nodes) {
    const long N = static_cast<long>(table.size());
    auto kv = [&](long j) { return std::abs(j) < N ? table[static_cast<std::size_t>(std::abs(j))] : 0.0; };
    std::vector<double> out;
    switch (phi.kind) {
        case NoiseDistribution::Kind::point_mass:
            for (std::size_t j : nodes) out.push_back(kv(static_cast<long>(j)));
            break;
        case NoiseDistribution::Kind::gaussian:
        case NoiseDistribution::Kind::laplace:
            for (std::size_t j : nodes) {
                double s = 0.0;
                for (long u = -(N - 1); u <= N - 1; ++u)
                    s += kv(u) * phi.density_1d((static_cast<double>(j) - static_cast<double>(u)) * h);
                s *= h;
                // The Laplace kink sits on node j; remove the trapezoid's leading error from the slope jump.
                if (phi.kind == NoiseDistribution::Kind::laplace)
                    s -= h * h / 12.0 * 2.0 * kv(static_cast<long>(j)) * phi.density_1d(0.0) / phi.scale;
                out.push_back(s);
            }
            break;
        case NoiseDistribution::Kind::uniform_box: {
            // Exact integral of the piecewise-linear interpolant between the box edges.
            std::vector<double> cum(static_cast<std::size_t>(2 * N), 0.0);  // cum[i] = integral from -(N-1)h to node i-(N-1)
            for (long i = 1; i < 2 * N - 1; ++i)
                cum[static_cast<std::size_t>(i)] =
                    cum[static_cast<std::size_t>(i - 1)] + 0.5 * h * (kv(i - N) + kv(i - N + 1));
            auto prim = [&](double x) {
                const double pos = x / h + static_cast<double>(N - 1);
                if (pos <= 0.0) return 0.0;
                if (pos >= static_cast<double>(2 * N - 2)) return cum[static_cast<std::size_t>(2 * N - 2)];
                const long i = static_cast<long>(std::floor(pos));
                const double f = pos - static_cast<double>(i);
                const double k0 = kv(i - (N - 1)), k1 = kv(i - (N - 1) + 1);
                return cum[static_cast<std::size_t>(i)] + h * (k0 * f + 0.5 * (k1 - k0) * f * f);
            };
            const double w = phi.scale;
            for (std::size_t j : nodes) {
                const double x = static_cast<double>(j) * h;
                out.push_back((prim(x + w) - prim(x - w)) / (2.0 * w));
            }
            break;
        }
    }
    return out;
}

}  // namespace

double gaussian_tail_mass(std::size_t D, double eps, double sigma) {
    if (D == 0 || !(sigma > 0.0) || !(eps >= 0.0)) throw PreconditionError("gaussian_tail_mass: invalid arguments");
    return boost::math::gamma_q(0.5 * double(D), 0.5 * eps * eps / (sigma * sigma));
}

DeconParameters solve_decon_parameters(double a, std::size_t d, std::size_t D, double tau, double volume,
                                       std::size_t n, double c2, double delta) {
    if (!(a > 0.0) || !(tau > 0.0) || !(volume > 0.0) || d == 0 || d >= D)
        throw PreconditionError("solve_decon_parameters: invalid density floor, reach, volume or dimensions");
    if (!(c2 > 0.0) || !(delta > 0.0 && delta < 1.0))
        throw PreconditionError("solve_decon_parameters: requires c2 > 0 and 0 < delta < 1");
    DeconParameters p;
    p.epsilon = 0.9 * (3.0 - std::sqrt(8.0)) * tau / 5.0;
    const double e = p.epsilon;
    const double cap = a * unit_ball_volume(d) * std::pow(e, double(d)) *
                       std::pow(std::cos(std::asin(e / (2.0 * tau))), double(d));
    p.sigma_psi = e / 4.0;
    for (int it = 0;; ++it) {
        p.gamma = gaussian_tail_mass(D, e, p.sigma_psi);
        p.omega = cap * (1.0 - p.gamma) - p.gamma;
        if (p.omega >= 2.0 * p.gamma) break;
        if (it == 200) throw NumericalError("solve_decon_parameters: no sigma_psi gives omega >= 2 gamma");
        p.sigma_psi *= 0.8;
    }
    p.cover = volume / (std::pow(std::cos(std::asin(e / tau)), double(d)) * unit_ball_volume(d) *
                        std::pow(2.0 * e, double(d)));
    const double bound = (std::log(std::max(p.cover, 1.0)) + std::log(2.0 / delta)) / p.omega;
    p.m = std::max(static_cast<std::size_t>(std::ceil(bound)),
                   static_cast<std::size_t>(std::ceil(c2 * static_cast<double>(n))));
    return p;
}

double verify_fourier_floor(const NoiseDistribution& phi, double R, std::size_t D) {
    if (!(R > 0.0)) throw PreconditionError("verify_fourier_floor: R must be positive");
    if (D == 0) throw PreconditionError("verify_fourier_floor: dimension must be positive");
    // Phi* factors over coordinates, so its minimum over the box is the per-axis minimum to the D-th power.
    const std::size_t steps = 256;
    double m = 1.0;
    for (std::size_t i = 0; i <= steps; ++i)
        m = std::min(m, std::abs(phi.char_fn_1d(R * static_cast<double>(i) / static_cast<double>(steps))));
    if (phi.first_fourier_zero() <= R) m = 0.0;
    const double rho = std::pow(m, double(D));
    if (rho < floor_min) {
        std::ostringstream os;
        os << "Fourier floor condition fails: inf of |Phi*(t)| over |t|_inf <= " << R << " is " << rho
           << " < 1e-12 for " << phi.describe();
        throw HypothesisError(os.str());
    }
    return rho;
}

double KernelPair::psi1(double x) const { return gauss1(x, sigma_psi_); }

double KernelPair::k1(double x) const {
    switch (kind_) {
        case Kind::identity:
        case Kind::gaussian:
            return gauss1(x, sigma_k_);
        case Kind::lattice: {
            // Cubic Lagrange through nodes i-1..i+2 (the table is even, so node -1 mirrors node 1).
            const double pos = std::abs(x) / table_h_;
            const auto i = static_cast<std::size_t>(pos);
            if (i + 2 >= table_.size()) return 0.0;
            const double f = pos - static_cast<double>(i);
            const double km = table_[i == 0 ? 1 : i - 1], k0 = table_[i], kp = table_[i + 1], kq = table_[i + 2];
            return -f * (f - 1) * (f - 2) / 6.0 * km + (f + 1) * (f - 1) * (f - 2) / 2.0 * k0 -
                   (f + 1) * f * (f - 2) / 2.0 * kp + (f + 1) * f * (f - 1) / 6.0 * kq;
        }
    }
    return 0.0;
}

double KernelPair::k(std::span<const double> x) const {
    double v = 1.0;
    for (double xi : x) v *= k1(xi);
    return v;
}

double KernelPair::k1_positive_mass() const {
    if (kind_ != Kind::lattice) return 1.0;
    double s = 0.0;
    for (std::size_t i = 0; i < table_.size(); ++i) s += (i == 0 ? 0.5 : 1.0) * std::max(table_[i], 0.0);
    return 2.0 * s * table_h_;
}

int KernelPair::sample_abs_k1(Rng& rng, double& x) const {
    if (kind_ != Kind::lattice) {
        x = std::normal_distribution<double>(0.0, sigma_k_)(rng);
        return 1;
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double target = u(rng) * abs_cdf_.back();
    const auto it = std::upper_bound(abs_cdf_.begin(), abs_cdf_.end(), target);
    const std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - abs_cdf_.begin()), 1,
                                                  abs_cdf_.size() - 1);
    const double lo = abs_cdf_[i - 1];
    const double frac = abs_cdf_[i] > lo ? (target - lo) / (abs_cdf_[i] - lo) : 0.5;
    const double mag = (static_cast<double>(i - 1) + frac) * table_h_;
    x = u(rng) < 0.5 ? -mag : mag;
    return k1(x) >= 0.0 ? 1 : -1;
}

std::string KernelPair::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::identity: os << "identity(sigma_psi=" << sigma_psi_ << ")"; break;
        case Kind::gaussian: os << "gaussian(sigma_phi=" << phi_.scale << ", sigma_psi=" << sigma_psi_ << ")"; break;
        case Kind::lattice:
            os << "lattice(" << phi_.describe() << ", sigma_psi=" << sigma_psi_ << ", nodes=" << table_.size()
               << ", h=" << table_h_ << ")";
            break;
    }
    return os.str();
}

double kernel_residual(const KernelPair& kp) {
    if (kp.kind() == KernelPair::Kind::identity && kp.phi().kind == NoiseDistribution::Kind::point_mass) return 0.0;
    const double s = kp.sigma_psi();
    const std::size_t probes_per_side = 12;
    const double span = 6.0 * s;
    // Probe nodes sit on a fine lattice so the trapezoid rule sees any density kink on a node.
    const double h = lattice_halfwidth * s / static_cast<double>(lattice_nodes - 1);
    const auto stride = static_cast<std::size_t>(std::ceil(span / static_cast<double>(probes_per_side) / h));
    std::vector<double> table(lattice_nodes);
    for (std::size_t j = 0; j < lattice_nodes; ++j) table[j] = kp.k1(static_cast<double>(j) * h);
    std::vector<std::size_t> nodes;
    for (std::size_t q = 0; q <= probes_per_side; ++q) nodes.push_back(q * stride);
    const auto conv = convolve_with_phi(table, h, kp.phi(), nodes);
    std::vector<double> c, p;  // one-dimensional values at probe offsets -span..span
    for (long q = -static_cast<long>(probes_per_side); q <= static_cast<long>(probes_per_side); ++q) {
        const auto qi = static_cast<std::size_t>(std::abs(q));
        c.push_back(conv[qi]);
        p.push_back(kp.psi1(static_cast<double>(nodes[qi]) * h));
    }
    const std::size_t D = kp.dim();
    const std::size_t per_axis = c.size();
    std::size_t total = 1;
    for (std::size_t a = 0; a < D; ++a) total *= per_axis;
    if (total > 2'000'000) throw ResourceLimitError("kernel_residual: probe grid too large for this dimension");
    double worst = 0.0;
    std::vector<std::size_t> idx(D, 0);
    for (std::size_t n = 0; n < total; ++n) {
        double cv = 1.0, pv = 1.0;
        for (std::size_t a = 0; a < D; ++a) {
            cv *= c[idx[a]];
            pv *= p[idx[a]];
        }
        worst = std::max(worst, std::abs(cv - pv));
        for (std::size_t a = 0; a < D && ++idx[a] == per_axis; ++a) idx[a] = 0;
    }
    return worst;
}

KernelPair build_kernel_pair(const NoiseDistribution& phi, double epsilon, double gamma, std::size_t D,
                             std::optional<double> sigma_psi, bool force_lattice) {
    if (!(epsilon > 0.0)) throw PreconditionError("build_kernel_pair: epsilon must be positive");
    if (!(gamma > 0.0 && gamma < 1.0)) throw PreconditionError("build_kernel_pair: gamma must lie in (0,1)");
    if (D == 0) throw PreconditionError("build_kernel_pair: dimension must be positive");
    KernelPair kp;
    kp.dim_ = D;
    kp.phi_ = phi;
    kp.epsilon_ = epsilon;
    kp.gamma_ = gamma;
    kp.sigma_psi_ = sigma_psi.value_or(epsilon / 4.0);
    if (!(kp.sigma_psi_ > 0.0)) throw PreconditionError("build_kernel_pair: sigma_psi must be positive");
    const double s = kp.sigma_psi_;

    kp.psi_tail_ = gaussian_tail_mass(D, epsilon, s);
    const double tail_quad = radial_gaussian_mass(D, epsilon, s);
    const double total_quad = radial_gaussian_mass(D, 0.0, s);
    if (std::abs(tail_quad - kp.psi_tail_) > 1e-3 || std::abs(total_quad - 1.0) > 1e-4)
        throw NumericalError("build_kernel_pair: Psi quadrature disagrees with its closed form");
    if (kp.psi_tail_ > gamma) {
        std::ostringstream os;
        os << "build_kernel_pair: Psi tail mass beyond epsilon is " << kp.psi_tail_ << " > gamma = " << gamma;
        throw PreconditionError(os.str());
    }

    const double band = psi_band(s);
    if (phi.kind != NoiseDistribution::Kind::point_mass) verify_fourier_floor(phi, band, D);

    if (!force_lattice && phi.kind == NoiseDistribution::Kind::point_mass) {
        kp.kind_ = KernelPair::Kind::identity;
        kp.sigma_k_ = s;
    } else if (!force_lattice && phi.kind == NoiseDistribution::Kind::gaussian && phi.scale < s) {
        kp.kind_ = KernelPair::Kind::gaussian;
        kp.sigma_k_ = std::sqrt(s * s - phi.scale * phi.scale);
    } else {
        // k* = psi* / phi* on [0, t_max], inverse cosine transform by DCT-I:
        // k(x_m) = (1/pi) integral_0^tmax k*(t) cos(t x_m) dt ~ (dt / 2pi) Y_m.
        const std::size_t N = lattice_nodes;
        const double L = lattice_halfwidth * s;
        const double h = L / static_cast<double>(N - 1);
        const double dt = std::numbers::pi / L;
        std::vector<double> spec(N), out(N);
        double peak = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            const double t = static_cast<double>(j) * dt;
            if (t > band) {
                spec[j] = 0.0;
                continue;
            }
            spec[j] = std::exp(-0.5 * s * s * t * t) / phi.char_fn_1d(t);
            peak = std::max(peak, std::abs(spec[j]));
        }
        if (!(peak <= amplification_max)) {
            std::ostringstream os;
            os << "build_kernel_pair: kernel spectrum psi*/phi* reaches " << peak << " on the band |t| <= " << band
               << " (limit " << amplification_max << ")";
            throw NumericalError(os.str());
        }
        fftw_plan plan = fftw_plan_r2r_1d(static_cast<int>(N), spec.data(), out.data(), FFTW_REDFT00, FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
        kp.kind_ = KernelPair::Kind::lattice;
        kp.table_h_ = h;
        kp.table_.resize(N);
        for (std::size_t m = 0; m < N; ++m) kp.table_[m] = out[m] * dt / (2.0 * std::numbers::pi);
    }

    // Support radius and sampling table.
    if (kp.kind_ == KernelPair::Kind::lattice) {
        double peak = 0.0;
        for (double v : kp.table_) peak = std::max(peak, std::abs(v));
        std::size_t last = 0;
        for (std::size_t i = 0; i < kp.table_.size(); ++i)
            if (std::abs(kp.table_[i]) > floor_min * peak) last = i;
        kp.support_ = static_cast<double>(last + 1) * kp.table_h_;
        kp.abs_cdf_.assign(kp.table_.size(), 0.0);
        for (std::size_t i = 1; i < kp.table_.size(); ++i)
            kp.abs_cdf_[i] = kp.abs_cdf_[i - 1] +
                             0.5 * kp.table_h_ * (std::abs(kp.table_[i - 1]) + std::abs(kp.table_[i]));
    } else {
        kp.support_ = std::sqrt(2.0 * std::log(1.0 / floor_min)) * kp.sigma_k_;
    }

    kp.residual_ = kernel_residual(kp);
    if (!(kp.residual_ <= residual_max)) {
        std::ostringstream os;
        os << "build_kernel_pair: residual |K*Phi - Psi|_inf = " << kp.residual_ << " exceeds " << residual_max;
        throw NumericalError(os.str());
    }
    return kp;
}

DeconvolvedMeasure::DeconvolvedMeasure(PointCloud data, KernelPair kernel)
    : data_(std::move(data)), kernel_(std::move(kernel)) {
    if (data_.empty()) throw PreconditionError("DeconvolvedMeasure: data must be nonempty");
    if (data_.ambient_dim() != kernel_.dim())
        throw PreconditionError("DeconvolvedMeasure: data dimension differs from the kernel dimension");
    const std::size_t n = data_.size();
    const std::size_t g = std::min<std::size_t>(data_.ambient_dim(), 3);
    lo_.assign(g, 0.0);
    std::vector<double> hi(g, 0.0);
    for (std::size_t a = 0; a < g; ++a) lo_[a] = hi[a] = data_.point(0)[a];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < g; ++a) {
            lo_[a] = std::min(lo_[a], data_.point(i)[a]);
            hi[a] = std::max(hi[a], data_.point(i)[a]);
        }
    cell_ = std::max(kernel_.support_radius(), 1e-12);
    // Keep the bucket count near the point count.
    double cells = 1.0;
    for (std::size_t a = 0; a < g; ++a) cells *= std::max(1.0, (hi[a] - lo_[a]) / cell_);
    if (cells > 4.0 * double(n) + 64.0) cell_ *= std::pow(cells / (4.0 * double(n) + 64.0), 1.0 / double(g));
    dims_.resize(g);
    std::size_t total = 1;
    for (std::size_t a = 0; a < g; ++a) {
        dims_[a] = static_cast<std::size_t>(std::floor((hi[a] - lo_[a]) / cell_)) + 1;
        total *= dims_[a];
    }
    auto cell_of = [&](std::size_t i) {
        std::size_t id = 0;
        for (std::size_t a = g; a-- > 0;) {
            const auto c = std::min(static_cast<std::size_t>((data_.point(i)[a] - lo_[a]) / cell_), dims_[a] - 1);
            id = id * dims_[a] + c;
        }
        return id;
    };
    start_.assign(total + 1, 0);
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = cell_of(i);
        ++start_[ids[i] + 1];
    }
    for (std::size_t c = 0; c < total; ++c) start_[c + 1] += start_[c];
    order_.resize(n);
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) order_[fill[ids[i]]++] = static_cast<Index>(i);
}

void DeconvolvedMeasure::gather(std::span<const double> center, double reach, std::vector<Index>& out) const {
    out.clear();
    const std::size_t g = dims_.size();
    std::vector<std::size_t> lo(g), hi(g), idx(g);
    for (std::size_t a = 0; a < g; ++a) {
        const double l = (center[a] - reach - lo_[a]) / cell_, h = (center[a] + reach - lo_[a]) / cell_;
        if (h < 0.0 || l >= static_cast<double>(dims_[a])) return;
        lo[a] = l < 0.0 ? 0 : static_cast<std::size_t>(l);
        hi[a] = std::min(static_cast<std::size_t>(h), dims_[a] - 1);
        idx[a] = lo[a];
    }
    for (;;) {
        std::size_t id = 0;
        for (std::size_t a = g; a-- > 0;) id = id * dims_[a] + idx[a];
        for (std::size_t s = start_[id]; s < start_[id + 1]; ++s) {
            const Index i = order_[s];
            const auto p = data_.point(i);
            bool near = true;
            for (std::size_t a = 0; a < p.size() && near; ++a) near = std::abs(p[a] - center[a]) <= reach;
            if (near) out.push_back(i);
        }
        std::size_t a = 0;
        for (; a < g; ++a) {
            if (idx[a] < hi[a]) {
                ++idx[a];
                break;
            }
            idx[a] = lo[a];
        }
        if (a == g) break;
    }
}

double DeconvolvedMeasure::eval_on_ball(std::span<const double> center, double radius) const {
    if (!(radius > 0.0)) throw PreconditionError("eval_on_ball: radius must be positive");
    const std::size_t D = data_.ambient_dim();
    if (center.size() != D) throw PreconditionError("eval_on_ball: center dimension mismatch");
    constexpr int half = 16;  // cells per radius
    constexpr int side = 2 * half;
    const double pitch = radius / half;
    const double cell_volume = std::pow(pitch, double(D));
    // Offsets of cell centers from the ball center, in pitch units: j + 1/2 for j in [-half, half).
    std::array<double, side> off{};
    for (int j = 0; j < side; ++j) off[j] = (j - half + 0.5);
    const double lim = double(half) * double(half);

    std::vector<Index> near;
    gather(center, radius + kernel_.support_radius(), near);
    std::vector<double> v(D * side);
    std::vector<double> prefix(side + 1);
    double total = 0.0;
    for (Index i : near) {
        const auto y = data_.point(i);
        for (std::size_t a = 0; a < D; ++a)
            for (int j = 0; j < side; ++j) v[a * side + j] = kernel_.k1(center[a] + off[j] * pitch - y[a]);
        const double* last = &v[(D - 1) * side];
        prefix[0] = 0.0;
        for (int j = 0; j < side; ++j) prefix[j + 1] = prefix[j] + last[j];
        // Walk the leading D-1 axes; along the last axis the included cells form a contiguous run.
        double sum = 0.0;
        auto rec = [&](auto&& self, std::size_t a, double used, double weight) -> void {
            if (a + 1 == D) {
                const double rem = lim - used;
                if (rem < 0.25) return;
                // |j - half + 1/2| <= sqrt(rem)
                const double w = std::sqrt(rem);
                const int jlo = std::max(0, static_cast<int>(std::ceil(half - 0.5 - w)));
                const int jhi = std::min(side - 1, static_cast<int>(std::floor(half - 0.5 + w)));
                if (jlo <= jhi) sum += weight * (prefix[jhi + 1] - prefix[jlo]);
                return;
            }
            for (int j = 0; j < side; ++j) {
                const double u = used + off[j] * off[j];
                if (u > lim) continue;
                self(self, a + 1, u, weight * v[a * side + j]);
            }
        };
        rec(rec, 0, 0.0, 1.0);
        total += sum;
    }
    return total * cell_volume / static_cast<double>(data_.size());
}

PointCloud DeconvolvedMeasure::resample(std::size_t count, std::uint64_t seed) const {
    if (count == 0) throw PreconditionError("resample: count must be at least 1");
    const std::size_t D = data_.ambient_dim();
    const double pos = kernel_.k1_positive_mass();
    Rng rng = make_rng(seed, stream::estimator);
    std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
    PointCloud out(D);
    std::vector<double> x(D);
    std::size_t attempts = 0;
    const std::size_t attempt_cap = 1000 * count + 1000;
    while (out.size() < count) {
        if (++attempts > attempt_cap) {
            std::ostringstream os;
            os << "resample: positive part of the kernel is too small to sample (positive mass of k = " << pos << ")";
            throw NumericalError(os.str());
        }
        const auto y = data_.point(pick(rng));
        int sign = 1;
        for (std::size_t a = 0; a < D; ++a) {
            double step = 0.0;
            sign *= kernel_.sample_abs_k1(rng, step);
            x[a] = y[a] + step;
        }
        if (sign > 0) out.push_back(x);
    }
    return out;
}

CleanReport decon_clean(const PointCloud& samples, const DeconvolvedMeasure& m, double epsilon, double gamma) {
    if (!(epsilon > 0.0) || !(gamma >= 0.0)) throw PreconditionError("decon_clean: invalid epsilon or gamma");
    CleanReport rep;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double v = m.eval_on_ball(samples.point(i), 4.0 * epsilon);
        if (v <= 2.0 * gamma)
            rep.removed.push_back(static_cast<Index>(i));
        else
            rep.kept.push_back(static_cast<Index>(i));
    }
    return rep;
}

}  // namespace homolens
