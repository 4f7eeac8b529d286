#include "doctest.h"

#include <cmath>
#include <numeric>
#include <sstream>

#include "poirot/geometry.hpp"
#include "test_support.hpp"

using namespace poirot;
using namespace testsupport;

TEST_CASE("knn returns the query point itself at distance zero") {
    Rng rng = make_rng(7);
    PointCloud cloud = random_cloud(20, rng);
    auto hits = knn(cloud, cloud.points[13], 1);
    CHECK(hits == std::vector<std::size_t>{13});
}

TEST_CASE("knn ordering is forced on collinear points") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    auto hits = knn(cloud, {0, 0, 0}, 2);
    CHECK(hits == std::vector<std::size_t>{0, 1});
}

TEST_CASE("knn matches the exhaustive sort oracle") {
    Rng rng = make_rng(11);
    PointCloud cloud = random_cloud(50, rng);
    for (int rep = 0; rep < 10; ++rep) {
        const Vec3 q{gaussian(rng), gaussian(rng), gaussian(rng)};
        CHECK(knn(cloud, q, 5) == knn_oracle(cloud, q, 5));
    }
}

TEST_CASE("knn rejects k beyond the cloud size") {
    Rng rng = make_rng(3);
    PointCloud cloud = random_cloud(4, rng);
    CHECK_THROWS_AS(knn(cloud, {0, 0, 0}, 5), SizeError);
}

TEST_CASE("knn is permutation covariant") {
    Rng rng = make_rng(23);
    PointCloud cloud = random_cloud(30, rng);
    const Vec3 q{0.1, -0.2, 0.3};
    auto base = knn(cloud, q, 7);
    PointCloud rev;
    rev.points.assign(cloud.points.rbegin(), cloud.points.rend());
    auto got = knn(rev, q, 7);
    REQUIRE(got.size() == base.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(rev.points[got[i]].dot(Vec3{1, 1, 1}) == cloud.points[base[i]].dot(Vec3{1, 1, 1}));
}

TEST_CASE("centroid picks an exact center point") {
    PointCloud cloud;
    cloud.points = {{1, 1, 0}, {-1, 1, 0}, {-1, -1, 0}, {1, -1, 0}, {0, 0, 0}};
    CHECK(centroid(cloud) == 4);
}

TEST_CASE("centroid tie breaks to the lowest index") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {1, 0, 0}};
    CHECK(centroid(cloud) == 0);
}

TEST_CASE("centroid matches the exhaustive argmin oracle") {
    Rng rng = make_rng(31);
    PointCloud cloud = random_cloud(100, rng);
    const Vec3 m = cloud.mean();
    std::size_t best = 0;
    for (std::size_t i = 1; i < cloud.size(); ++i)
        if ((cloud.points[i] - m).norm() < (cloud.points[best] - m).norm()) best = i;
    CHECK(centroid(cloud) == best);
    CHECK_THROWS_AS(centroid(PointCloud{}), EmptyError);
}

TEST_CASE("centroid index survives rigid motion") {
    Rng rng = make_rng(37);
    for (int rep = 0; rep < 5; ++rep) {
        PointCloud cloud = random_cloud(60, rng);
        const Rotation r = random_rotation(rng);
        const PointCloud moved = translate(rotate(cloud, r), {0.5, -2.0, 3.0});
        CHECK(centroid(moved) == centroid(cloud));
    }
}

TEST_CASE("geodesic distance walks through the chain") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    auto aff = geodesic_affinity(cloud, 1.5);
    CHECK(aff.at(0, 2) == doctest::Approx(2.0));
}

TEST_CASE("disconnected clusters are infinitely far") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {0.5, 0, 0}, {10, 0, 0}, {10.5, 0, 0}};
    auto aff = geodesic_affinity(cloud, 1.0);
    CHECK(!aff.reachable(0, 2));
    CHECK(aff.reachable(0, 1));
    CHECK(aff.reachable(2, 3));

    std::ostringstream csv;
    aff.write_csv(csv);
    CHECK(csv.str().find("inf") != std::string::npos);
}

TEST_CASE("geodesic affinity matches a Dijkstra oracle") {
    Rng rng = make_rng(41);
    PointCloud cloud = random_cloud(30, rng);
    const double eps = 0.8;
    auto aff = geodesic_affinity(cloud, eps);
    for (std::size_t s = 0; s < cloud.size(); ++s) {
        auto oracle = dijkstra_oracle(cloud, eps, s);
        for (std::size_t j = 0; j < cloud.size(); ++j) {
            if (std::isinf(oracle[j]))
                CHECK(!aff.reachable(s, j));
            else
                CHECK(aff.at(s, j) == doctest::Approx(oracle[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("geodesic affinity is symmetric and triangle-consistent") {
    Rng rng = make_rng(43);
    PointCloud cloud = random_cloud(50, rng);
    auto aff = geodesic_affinity(cloud, 1.0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK(aff.at(i, i) == 0.0);
        for (std::size_t j = 0; j < cloud.size(); ++j) {
            CHECK(aff.at(i, j) == aff.at(j, i));
            for (std::size_t k = 0; k < cloud.size(); ++k) {
                if (aff.reachable(i, k) && aff.reachable(k, j))
                    CHECK(aff.at(i, j) <= aff.at(i, k) + aff.at(k, j) + 1e-9);
            }
        }
    }
}

TEST_CASE("cube corners are hull vertices, the center is not") {
    PointCloud cloud;
    for (int i = 0; i < 8; ++i)
        cloud.points.push_back({i & 1 ? 1.0 : -1.0, i & 2 ? 1.0 : -1.0, i & 4 ? 1.0 : -1.0});
    for (std::size_t i = 0; i < 8; ++i) CHECK(is_hull_vertex(cloud, i));
    cloud.points.push_back({0, 0, 0});
    CHECK(!is_hull_vertex(cloud, 8));
}

TEST_CASE("hull vertex test agrees with the brute-force oracle") {
    Rng rng = make_rng(53);
    for (int rep = 0; rep < 8; ++rep) {
        PointCloud cloud = random_cloud(40, rng);
        for (std::size_t i = 0; i < cloud.size(); ++i)
            CHECK(is_hull_vertex(cloud, i) == hull_vertex_oracle(cloud, i));
    }
}

TEST_CASE("coplanar clouds fall back to the planar test") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.5, 0}};
    CHECK(is_hull_vertex(cloud, 0));
    CHECK(is_hull_vertex(cloud, 3));
    CHECK(!is_hull_vertex(cloud, 4));
}

TEST_CASE("random rotations are special orthogonal") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Rotation r = random_rotation(seed);
        CHECK(r.orthogonality_defect() < 1e-12);
        CHECK(std::abs(r.determinant() - 1.0) < 1e-12);
    }
}

TEST_CASE("rotation sampling matches the Haar trace expectation") {
    // E[tr R] = 0 under Haar with Var[tr] = 1; 3 sigma over 1e4 samples.
    Rng rng = make_rng(59);
    const int samples = 10000;
    double sum = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Rotation r = random_rotation(rng);
        sum += r.m[0] + r.m[4] + r.m[8];
    }
    const double mean = sum / samples;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(samples)));
}

TEST_CASE("rotation determinism per seed") {
    const Rotation a = random_rotation(12345);
    const Rotation b = random_rotation(12345);
    CHECK(a.m == b.m);
}

TEST_CASE("cloud validation rejects bad normals") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}};
    cloud.normals = {{2, 0, 0}};
    CHECK_THROWS_AS(cloud.validate(), NumericError);
}
