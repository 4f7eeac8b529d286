#include "poirot/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>

namespace poirot {

SphereGrid make_grid(int bandwidth) {
    if (bandwidth < 2) throw ConfigError("make_grid: bandwidth must be at least 2");
    const int B = bandwidth;
    const int n = 2 * B;
    SphereGrid grid;
    grid.bandwidth = B;
    grid.polar.resize(n);
    grid.azimuth.resize(n);
    for (int a = 0; a < n; ++a) grid.polar[a] = M_PI * (2.0 * a + 1.0) / (4.0 * B);
    for (int b = 0; b < n; ++b) grid.azimuth[b] = 2.0 * M_PI * b / n;

    // Ring weights exact for Legendre polynomials up to degree 2B-1.
    std::vector<double> ring(n);
    for (int a = 0; a < n; ++a) {
        const double theta = grid.polar[a];
        double s = 0.0;
        for (int k = 0; k < B; ++k) s += std::sin((2.0 * k + 1.0) * theta) / (2.0 * k + 1.0);
        ring[a] = (2.0 / B) * std::sin(theta) * s;
    }

    grid.directions.resize(static_cast<std::size_t>(n) * n);
    grid.weights.resize(static_cast<std::size_t>(n) * n);
    const double az_weight = M_PI / B; // 2 pi / (2B)
    for (int a = 0; a < n; ++a) {
        const double st = std::sin(grid.polar[a]);
        const double ct = std::cos(grid.polar[a]);
        for (int b = 0; b < n; ++b) {
            grid.directions[static_cast<std::size_t>(a) * n + b] =
                Vec3{st * std::cos(grid.azimuth[b]), st * std::sin(grid.azimuth[b]), ct};
            grid.weights[static_cast<std::size_t>(a) * n + b] = az_weight * ring[a];
        }
    }
    return grid;
}

std::shared_ptr<const SphereGrid> shared_grid(int bandwidth) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const SphereGrid>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(bandwidth);
    if (it != cache.end()) return it->second;
    auto grid = std::make_shared<const SphereGrid>(make_grid(bandwidth));
    cache[bandwidth] = grid;
    return grid;
}

double& SphericalSignal::at(int c, int a, int b) {
    const int n = 2 * bandwidth();
    return values[(static_cast<std::size_t>(c) * n + a) * n + b];
}

double SphericalSignal::at(int c, int a, int b) const {
    const int n = 2 * bandwidth();
    return values[(static_cast<std::size_t>(c) * n + a) * n + b];
}

SphericalSignal make_signal(std::shared_ptr<const SphereGrid> grid, int channels) {
    SphericalSignal s;
    s.grid = std::move(grid);
    s.channels = channels;
    s.values.assign(static_cast<std::size_t>(channels) * s.grid->size(), 0.0);
    return s;
}

void ResponseConfig::validate() const {
    if (!(radius > 0.0)) throw ConfigError("response radius must be positive");
    if (partitions < 1) throw ConfigError("partitions must be at least 1");
}

namespace {

int normal_bin(const Vec3& ni, const Vec3& nk, int partitions) {
    // Orientation of raw normals is ambiguous, so the angle is folded onto
    // [0, pi/2] through the absolute dot product.
    const double d = std::clamp(std::abs(ni.dot(nk)), 0.0, 1.0);
    const double angle = std::acos(d);
    int bin = static_cast<int>(angle / (M_PI / 2.0) * partitions);
    return std::min(bin, partitions - 1); // last bin closed
}

} // namespace

SphericalSignal respond(const PointCloud& cloud, std::size_t center, const ResponseConfig& config,
                        std::shared_ptr<const SphereGrid> grid) {
    config.validate();
    if (center >= cloud.size()) throw SizeError("respond: center index out of range");
    if (config.use_normals && !cloud.has_normals())
        throw ConfigError("respond: use_normals requires cloud normals");
    const int channels = config.use_normals ? config.partitions : 1;
    SphericalSignal signal = make_signal(grid, channels);

    const Vec3 xi = cloud.points[center];
    const double r = config.radius;
    const std::size_t g = grid->size();
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        const Vec3 d = cloud.points[k] - xi;
        if (d.norm() <= r) continue; // closed ball excluded, center included
        int c = 0;
        if (config.use_normals)
            c = normal_bin(cloud.normals[center], cloud.normals[k], config.partitions);
        double* out = &signal.values[static_cast<std::size_t>(c) * g];
        for (std::size_t j = 0; j < g; ++j) {
            const double resp = r * grid->directions[j].dot(d);
            if (resp > 0.0) out[j] += resp;
        }
    }
    return signal;
}

std::vector<double> respond_at(const PointCloud& cloud, std::size_t center,
                               const ResponseConfig& config, const Vec3& unit_direction) {
    config.validate();
    if (center >= cloud.size()) throw SizeError("respond_at: center index out of range");
    const int channels = config.use_normals ? config.partitions : 1;
    std::vector<double> out(channels, 0.0);
    const Vec3 xi = cloud.points[center];
    const double r = config.radius;
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        const Vec3 d = cloud.points[k] - xi;
        if (d.norm() <= r) continue;
        const double resp = r * unit_direction.dot(d);
        if (resp <= 0.0) continue;
        int c = 0;
        if (config.use_normals)
            c = normal_bin(cloud.normals[center], cloud.normals[k], config.partitions);
        out[static_cast<std::size_t>(c)] += resp;
    }
    return out;
}

std::vector<double> response_scores(const PointCloud& cloud, const ResponseConfig& config,
                                    std::shared_ptr<const SphereGrid> grid) {
    if (cloud.empty()) throw EmptyError("response_scores on empty cloud");
    std::vector<double> scores(cloud.size(), 0.0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const SphericalSignal s = respond(cloud, i, config, grid);
        double best = 0.0;
        for (double v : s.values) best = std::max(best, v);
        scores[i] = best;
    }
    return scores;
}

std::vector<std::size_t> downsample(const std::vector<double>& scores, std::size_t n_samples,
                                    Rng& rng) {
    const std::size_t n = scores.size();
    if (n_samples < 1 || n_samples >= n)
        throw SizeError("downsample: need 1 <= n_samples < N, got " + std::to_string(n_samples) +
                        " of " + std::to_string(n));
    std::vector<double> weights = scores;
    for (double w : weights)
        if (w < 0.0) throw NumericError("downsample: negative score");
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total <= 0.0) {
        std::cerr << "poirot: warning: all-zero sampling scores, falling back to uniform\n";
        weights.assign(n, 1.0);
        total = static_cast<double>(n);
    }
    std::vector<std::size_t> chosen;
    chosen.reserve(n_samples);
    std::vector<bool> taken(n, false);
    for (std::size_t draw = 0; draw < n_samples; ++draw) {
        const double u = uniform_double(rng) * total;
        double acc = 0.0;
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            acc += weights[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        if (pick == n) {
            // Rounding pushed u past the last positive weight.
            for (std::size_t i = n; i-- > 0;)
                if (!taken[i] && weights[i] > 0.0) {
                    pick = i;
                    break;
                }
        }
        if (pick == n) {
            // Remaining weights all zero: uniform over what is left.
            std::size_t remaining = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (!taken[i]) ++remaining;
            std::size_t step = uniform_index(rng, remaining);
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i]) continue;
                if (step == 0) {
                    pick = i;
                    break;
                }
                --step;
            }
        }
        taken[pick] = true;
        total -= weights[pick];
        chosen.push_back(pick);
    }
    return chosen;
}

std::vector<std::size_t> downsample(const PointCloud& cloud, const std::vector<double>& scores,
                                    std::size_t n_samples, std::uint64_t seed) {
    if (scores.size() != cloud.size())
        throw ShapeError("downsample: score count does not match cloud size");
    Rng rng = make_rng(seed);
    return downsample(scores, n_samples, rng);
}

double ConfidenceParams::confidence(const Vec3& unit_dir) const {
    return std::max(0.0, weight.dot(unit_dir) + bias);
}

std::vector<double> attention_scores(const PointCloud& cloud, std::size_t centroid_index,
                                     const ConfidenceParams& params) {
    if (centroid_index >= cloud.size())
        throw SizeError("attention_scores: centroid index out of range");
    const Vec3 m = cloud.points[centroid_index];
    std::vector<double> scores(cloud.size(), 0.0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3 d = cloud.points[i] - m;
        const double n = d.norm();
        if (n == 0.0) continue; // the centroid point itself gets confidence 0
        scores[i] = params.confidence(d / n);
    }
    return scores;
}

std::vector<std::size_t> attention_subset(const PointCloud& cloud, std::size_t centroid_index,
                                          const ConfidenceParams& params, std::size_t n_samples,
                                          std::uint64_t seed) {
    const std::vector<double> scores = attention_scores(cloud, centroid_index, params);
    Rng rng = make_rng(seed);
    return downsample(scores, n_samples, rng);
}

} // namespace poirot
