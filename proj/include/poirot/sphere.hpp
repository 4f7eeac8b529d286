#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "poirot/geometry.hpp"

namespace poirot {

/// Equiangular grid on the unit sphere at bandwidth B: 2B polar rings
/// theta_a = pi(2a+1)/(4B) times 2B azimuths phi_b = 2 pi b / (2B).
/// Quadrature weights integrate band-limited functions of degree < 2B
/// exactly and sum to 4 pi.
struct SphereGrid {
    int bandwidth = 0;
    std::vector<double> polar;     // 2B
    std::vector<double> azimuth;   // 2B
    std::vector<Vec3> directions;  // 4B^2, index a*2B + b
    std::vector<double> weights;   // 4B^2, same order

    int rings() const { return 2 * bandwidth; }
    std::size_t size() const { return directions.size(); }
};

SphereGrid make_grid(int bandwidth);
std::shared_ptr<const SphereGrid> shared_grid(int bandwidth); // cached, immutable

/// Multi-channel samples on a SphereGrid, value index (c, a, b).
struct SphericalSignal {
    std::shared_ptr<const SphereGrid> grid;
    int channels = 0;
    std::vector<double> values; // channels * 4B^2

    int bandwidth() const { return grid ? grid->bandwidth : 0; }
    double& at(int c, int a, int b);
    double at(int c, int a, int b) const;
    std::size_t grid_size() const { return grid ? grid->size() : 0; }
};

SphericalSignal make_signal(std::shared_ptr<const SphereGrid> grid, int channels);

struct ResponseConfig {
    double radius = 1.0;   // sphere radius r; points within r are excluded
    int partitions = 1;    // normal-angle bins (channels) when use_normals
    bool use_normals = false;

    void validate() const;
};

/// Omni-directional response about one point: for grid direction y (scaled
/// to radius r), sum of max{0, y. (x_k - x_i)} over points outside the
/// closed ball of radius r. With use_normals, contributions are binned by
/// the folded normal angle acos(|n_k . n_i|) over [0, pi/2], last bin
/// closed; channel count equals `partitions`.
SphericalSignal respond(const PointCloud& cloud, std::size_t center,
                        const ResponseConfig& config,
                        std::shared_ptr<const SphereGrid> grid);

/// Response at one arbitrary unit direction, by direct summation. Used for
/// exact covariance checks off the grid.
std::vector<double> respond_at(const PointCloud& cloud, std::size_t center,
                               const ResponseConfig& config, const Vec3& unit_direction);

/// Per-point score: the largest response over grid directions and channels.
std::vector<double> response_scores(const PointCloud& cloud, const ResponseConfig& config,
                                    std::shared_ptr<const SphereGrid> grid);

/// Sequential multinomial draw without replacement, probability of each
/// draw proportional to the remaining scores. All-zero scores degrade to
/// uniform sampling with a warning on stderr.
std::vector<std::size_t> downsample(const PointCloud& cloud, const std::vector<double>& scores,
                                    std::size_t n_samples, std::uint64_t seed);
std::vector<std::size_t> downsample(const std::vector<double>& scores, std::size_t n_samples,
                                    Rng& rng);

/// Confidence map for attention sampling: c = max{0, w.v + b} on unit
/// directions v from the centroid point.
struct ConfidenceParams {
    Vec3 weight{1.0, 0.0, 0.0};
    double bias = 0.0;

    double confidence(const Vec3& unit_dir) const;
};

std::vector<std::size_t> attention_subset(const PointCloud& cloud, std::size_t centroid_index,
                                          const ConfidenceParams& params, std::size_t n_samples,
                                          std::uint64_t seed);

/// Confidence scores used by attention_subset, exposed for testing.
std::vector<double> attention_scores(const PointCloud& cloud, std::size_t centroid_index,
                                     const ConfidenceParams& params);

} // namespace poirot
