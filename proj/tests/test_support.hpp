#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "poirot/geometry.hpp"
#include "poirot/rng.hpp"

namespace testsupport {

using poirot::PointCloud;
using poirot::Rng;
using poirot::Vec3;

inline PointCloud random_cloud(std::size_t n, Rng& rng, double scale = 1.0) {
    PointCloud cloud;
    cloud.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        cloud.points.push_back({scale * poirot::gaussian(rng), scale * poirot::gaussian(rng),
                                scale * poirot::gaussian(rng)});
    return cloud;
}

inline PointCloud random_cloud_with_normals(std::size_t n, Rng& rng) {
    PointCloud cloud = random_cloud(n, rng);
    cloud.normals.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 v{poirot::gaussian(rng), poirot::gaussian(rng), poirot::gaussian(rng)};
        while (v.norm() < 1e-6) v = {poirot::gaussian(rng), poirot::gaussian(rng), poirot::gaussian(rng)};
        cloud.normals.push_back(v.normalized());
    }
    return cloud;
}

// Brute-force k nearest neighbors by full sort on (distance, index).
inline std::vector<std::size_t> knn_oracle(const PointCloud& cloud, const Vec3& q, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        order.push_back({(cloud.points[i] - q).norm(), i});
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(order[i].second);
    return out;
}

// Dijkstra from one source over the epsilon graph; O(N^2), no heap.
inline std::vector<double> dijkstra_oracle(const PointCloud& cloud, double epsilon,
                                           std::size_t source) {
    const std::size_t n = cloud.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, inf);
    std::vector<bool> done(n, false);
    dist[source] = 0.0;
    for (std::size_t it = 0; it < n; ++it) {
        std::size_t u = n;
        double best = inf;
        for (std::size_t i = 0; i < n; ++i)
            if (!done[i] && dist[i] < best) {
                best = dist[i];
                u = i;
            }
        if (u == n) break;
        done[u] = true;
        for (std::size_t v = 0; v < n; ++v) {
            if (done[v]) continue;
            const double w = poirot::distance(cloud.points[u], cloud.points[v]);
            if (w <= epsilon && dist[u] + w < dist[v]) dist[v] = dist[u] + w;
        }
    }
    return dist;
}

// Brute-force hull vertex set for clouds in general position: a point is a
// vertex iff some plane through it and two others has every remaining point
// strictly on one side.
inline bool hull_vertex_oracle(const PointCloud& cloud, std::size_t idx) {
    const std::size_t n = cloud.size();
    for (std::size_t j = 0; j < n; ++j) {
        if (j == idx) continue;
        for (std::size_t k = j + 1; k < n; ++k) {
            if (k == idx) continue;
            const Vec3 normal =
                (cloud.points[j] - cloud.points[idx]).cross(cloud.points[k] - cloud.points[idx]);
            if (normal.norm() < 1e-12) continue;
            bool pos = true, neg = true;
            for (std::size_t t = 0; t < n && (pos || neg); ++t) {
                if (t == idx || t == j || t == k) continue;
                const double side = normal.dot(cloud.points[t] - cloud.points[idx]);
                if (side <= 0.0) pos = false;
                if (side >= 0.0) neg = false;
            }
            if (pos || neg) return true;
        }
    }
    return false;
}

} // namespace testsupport
