#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "poirot/errors.hpp"
#include "poirot/rng.hpp"

namespace poirot {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm2() const { return dot(*this); }
    double norm() const;
    Vec3 normalized() const;
    bool finite() const;
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

double distance(const Vec3& a, const Vec3& b);

/// Ordered point list with optional unit normals and integer part labels.
/// `validate()` enforces: finite coordinates, normals unit within 1e-9 and
/// matching the point count, labels matching the point count.
struct PointCloud {
    std::vector<Vec3> points;
    std::vector<Vec3> normals; // empty or points.size()
    std::vector<int> labels;   // empty or points.size()

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_normals() const { return !normals.empty(); }
    bool has_labels() const { return !labels.empty(); }

    void validate() const;

    /// Largest pairwise Euclidean distance. O(N^2).
    double diameter() const;
    Vec3 mean() const;
};

/// Proper rotation, row-major 3x3. Construction through from_matrix checks
/// orthogonality and determinant to 1e-12.
struct Rotation {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Rotation identity() { return Rotation{}; }
    static Rotation from_matrix(const std::array<double, 9>& entries);

    double at(int r, int c) const { return m[3 * r + c]; }
    Vec3 apply(const Vec3& v) const;
    Vec3 apply_transposed(const Vec3& v) const;
    Rotation transposed() const;
    Rotation compose(const Rotation& o) const; // this * o
    double orthogonality_defect() const;       // max |R^T R - I|
    double determinant() const;
};

PointCloud rotate(const PointCloud& cloud, const Rotation& r);
PointCloud translate(const PointCloud& cloud, const Vec3& t);

/// Pairwise geodesic distances in the epsilon-neighborhood graph.
/// Unreachable pairs carry +infinity; serialization writes them as "inf".
struct GeodesicAffinity {
    std::size_t count = 0;
    double epsilon = 0.0;
    std::vector<double> distances; // count*count, row-major, symmetric

    double at(std::size_t i, std::size_t j) const { return distances[i * count + j]; }
    bool reachable(std::size_t i, std::size_t j) const {
        return at(i, j) != std::numeric_limits<double>::infinity();
    }
    void write_csv(std::ostream& out) const;
};

/// Indices of the k nearest points to `query`, ascending distance, ties by
/// ascending index. Throws SizeError when k exceeds the cloud size.
std::vector<std::size_t> knn(const PointCloud& cloud, const Vec3& query, std::size_t k);

/// Index of the point nearest to the arithmetic mean, ties to the lowest
/// index. Throws EmptyError on an empty cloud.
std::size_t centroid(const PointCloud& cloud);

GeodesicAffinity geodesic_affinity(const PointCloud& cloud, double epsilon);

/// Strict support test: true iff some direction separates the point from
/// every other point. Coplanar and collinear clouds are detected by a
/// singular-value threshold of 1e-9 relative to the diameter and handled in
/// the spanning subspace.
bool is_hull_vertex(const PointCloud& cloud, std::size_t index);

/// Haar-uniform rotation, deterministic per seed.
Rotation random_rotation(std::uint64_t seed);
Rotation random_rotation(Rng& rng);

} // namespace poirot
