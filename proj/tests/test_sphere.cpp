#include "doctest.h"

#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "poirot/sphere.hpp"
#include "test_support.hpp"

using namespace poirot;
using namespace testsupport;

TEST_CASE("grid weights cover the sphere area") {
    for (int B : {2, 4, 8}) {
        const SphereGrid grid = make_grid(B);
        CHECK(grid.size() == static_cast<std::size_t>(4 * B * B));
        const double total = std::accumulate(grid.weights.begin(), grid.weights.end(), 0.0);
        CHECK(total == doctest::Approx(4.0 * M_PI).epsilon(1e-9));
        for (const Vec3& d : grid.directions) CHECK(std::abs(d.norm() - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(make_grid(1), ConfigError);
}

TEST_CASE("ring rule integrates Legendre polynomials exactly below 2B") {
    const int B = 5;
    const SphereGrid grid = make_grid(B);
    // P_L recurrence; the rule must give 2*delta_{L,0} on sum_a ring_a P_L.
    for (int L = 0; L < 2 * B; ++L) {
        double acc = 0.0;
        for (int a = 0; a < grid.rings(); ++a) {
            const double x = std::cos(grid.polar[a]);
            double p0 = 1.0, p1 = x;
            double pl = (L == 0) ? 1.0 : x;
            for (int l = 2; l <= L; ++l) {
                pl = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = pl;
            }
            acc += grid.weights[static_cast<std::size_t>(a) * grid.rings()] * pl;
        }
        acc *= grid.rings() / (2.0 * M_PI); // undo the azimuth factor
        CHECK(acc == doctest::Approx(L == 0 ? 2.0 : 0.0).epsilon(1e-12));
    }
}

namespace {

ResponseConfig basic_config(double r) {
    ResponseConfig cfg;
    cfg.radius = r;
    return cfg;
}

// Direct double loop over grid directions and cloud points.
SphericalSignal respond_oracle(const PointCloud& cloud, std::size_t center,
                               const ResponseConfig& cfg, std::shared_ptr<const SphereGrid> grid) {
    SphericalSignal s = make_signal(grid, 1);
    for (std::size_t j = 0; j < grid->size(); ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < cloud.size(); ++k) {
            const Vec3 d = cloud.points[k] - cloud.points[center];
            if (d.norm() <= cfg.radius) continue;
            acc += std::max(0.0, cfg.radius * grid->directions[j].dot(d));
        }
        s.values[j] = acc;
    }
    return s;
}

} // namespace

TEST_CASE("single far point responds along its direction") {
    PointCloud cloud;
    const double d = 3.0, r = 0.5;
    cloud.points = {{0, 0, 0}, {0, 0, d}};
    auto vals = respond_at(cloud, 0, basic_config(r), {0, 0, 1});
    CHECK(vals[0] == doctest::Approx(r * d).epsilon(1e-15));
    auto back = respond_at(cloud, 0, basic_config(r), {0, 0, -1});
    CHECK(back[0] == 0.0);
}

TEST_CASE("grid response matches the naive summation oracle") {
    Rng rng = make_rng(71);
    PointCloud cloud = random_cloud(20, rng);
    auto grid = shared_grid(3);
    const ResponseConfig cfg = basic_config(0.3);
    const std::size_t center = 7;
    const SphericalSignal got = respond(cloud, center, cfg, grid);
    const SphericalSignal want = respond_oracle(cloud, center, cfg, grid);
    for (std::size_t i = 0; i < got.values.size(); ++i)
        CHECK(got.values[i] == doctest::Approx(want.values[i]).epsilon(1e-12));
}

TEST_CASE("responses are exactly rotation covariant off the grid") {
    Rng rng = make_rng(73);
    PointCloud cloud = random_cloud(25, rng);
    const ResponseConfig cfg = basic_config(0.4);
    const Rotation R = random_rotation(rng);
    const PointCloud rotated = rotate(cloud, R);
    for (int rep = 0; rep < 20; ++rep) {
        Vec3 y{gaussian(rng), gaussian(rng), gaussian(rng)};
        y = y.normalized();
        const auto lhs = respond_at(rotated, 4, cfg, y);
        const auto rhs = respond_at(cloud, 4, cfg, R.apply_transposed(y));
        CHECK(lhs[0] == doctest::Approx(rhs[0]).epsilon(1e-12));
    }
}

TEST_CASE("responses ignore translation") {
    Rng rng = make_rng(79);
    PointCloud cloud = random_cloud(15, rng);
    const PointCloud moved = translate(cloud, {10, -4, 2});
    const ResponseConfig cfg = basic_config(0.2);
    auto grid = shared_grid(2);
    const SphericalSignal a = respond(cloud, 3, cfg, grid);
    const SphericalSignal b = respond(moved, 3, cfg, grid);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
}

TEST_CASE("all points inside the ball produce a zero signal") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {0.1, 0, 0}, {0, 0.1, 0}};
    const SphericalSignal s = respond(cloud, 0, basic_config(1.0), shared_grid(2));
    for (double v : s.values) CHECK(v == 0.0);
}

TEST_CASE("normal partitions add up to the plain response") {
    Rng rng = make_rng(83);
    PointCloud cloud = random_cloud_with_normals(18, rng);
    ResponseConfig plain = basic_config(0.3);
    ResponseConfig parts = plain;
    parts.use_normals = true;
    parts.partitions = 3;
    auto grid = shared_grid(3);
    const SphericalSignal whole = respond(cloud, 5, plain, grid);
    const SphericalSignal split = respond(cloud, 5, parts, grid);
    REQUIRE(split.channels == 3);
    for (std::size_t j = 0; j < grid->size(); ++j) {
        double acc = 0.0;
        for (int c = 0; c < 3; ++c) acc += split.values[static_cast<std::size_t>(c) * grid->size() + j];
        CHECK(acc == doctest::Approx(whole.values[j]).epsilon(1e-12));
    }
}

TEST_CASE("two-point scores are positive and symmetric") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {1, 0, 0}};
    auto scores = response_scores(cloud, basic_config(0.25), shared_grid(2));
    CHECK(scores[0] > 0.0);
    CHECK(scores[0] == doctest::Approx(scores[1]).epsilon(1e-12));
}

TEST_CASE("a far outlier dominates the scores") {
    Rng rng = make_rng(89);
    PointCloud cloud = random_cloud(20, rng, 0.2);
    cloud.points.push_back({5, 5, 5});
    auto scores = response_scores(cloud, basic_config(0.1), shared_grid(2));
    const std::size_t best =
        static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
    CHECK(best == cloud.size() - 1);
}

TEST_CASE("top scoring points are hull vertices") {
    Rng rng = make_rng(97);
    PointCloud cloud = random_cloud(30, rng);
    auto scores = response_scores(cloud, basic_config(0.15), shared_grid(3));
    std::vector<std::size_t> order(cloud.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    for (int t = 0; t < 3; ++t) CHECK(is_hull_vertex(cloud, order[static_cast<std::size_t>(t)]));
}

TEST_CASE("scaling the cloud and radius scales scores linearly") {
    Rng rng = make_rng(101);
    PointCloud cloud = random_cloud(15, rng);
    const double lambda = 2.5;
    PointCloud scaled = cloud;
    for (Vec3& p : scaled.points) p = p * lambda;
    auto grid = shared_grid(2);
    auto s1 = response_scores(cloud, basic_config(0.2), grid);
    auto s2 = response_scores(scaled, basic_config(0.2 * lambda), grid);
    for (std::size_t i = 0; i < s1.size(); ++i)
        CHECK(s2[i] == doctest::Approx(lambda * lambda * s1[i]).epsilon(1e-9));
}

TEST_CASE("downsample is deterministic and respects degenerate scores") {
    PointCloud cloud;
    for (int i = 0; i < 6; ++i) cloud.points.push_back({static_cast<double>(i), 0, 0});
    std::vector<double> scores(6, 0.0);
    scores[4] = 1.0;
    auto one = downsample(cloud, scores, 1, 99);
    CHECK(one == std::vector<std::size_t>{4});

    std::vector<double> uniform(6, 1.0);
    auto a = downsample(cloud, uniform, 3, 7);
    auto b = downsample(cloud, uniform, 3, 7);
    CHECK(a == b);
    std::set<std::size_t> uniq(a.begin(), a.end());
    CHECK(uniq.size() == 3);

    CHECK_THROWS_AS(downsample(cloud, uniform, 6, 1), SizeError);
}

TEST_CASE("uniform scores make every subset equally likely") {
    // N=5 choose 4: each of the 5 left-out points should appear ~equally.
    PointCloud cloud;
    for (int i = 0; i < 5; ++i) cloud.points.push_back({static_cast<double>(i), 0, 0});
    std::vector<double> uniform(5, 1.0);
    std::map<std::size_t, int> left_out;
    const int trials = 10000;
    Rng rng = make_rng(103);
    for (int t = 0; t < trials; ++t) {
        auto subset = downsample(uniform, 4, rng);
        std::set<std::size_t> present(subset.begin(), subset.end());
        for (std::size_t i = 0; i < 5; ++i)
            if (!present.count(i)) left_out[i]++;
    }
    // Chi-squared against the uniform expectation, 4 dof, 0.999 quantile.
    const double expected = trials / 5.0;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        const double d = left_out[i] - expected;
        chi2 += d * d / expected;
    }
    CHECK(chi2 < 18.47);
}

TEST_CASE("sequential draws follow the score weights") {
    // First-draw frequencies must match normalized scores within 4 sigma.
    std::vector<double> scores{1.0, 3.0, 6.0};
    PointCloud cloud;
    for (int i = 0; i < 3; ++i) cloud.points.push_back({static_cast<double>(i), 0, 0});
    const int trials = 20000;
    std::vector<int> first(3, 0);
    Rng rng = make_rng(107);
    for (int t = 0; t < trials; ++t) first[downsample(scores, 1, rng)[0]]++;
    for (std::size_t i = 0; i < 3; ++i) {
        const double p = scores[i] / 10.0;
        const double sigma = std::sqrt(trials * p * (1 - p));
        CHECK(std::abs(first[i] - trials * p) < 4.0 * sigma);
    }
}

TEST_CASE("all-zero scores fall back to uniform sampling") {
    PointCloud cloud;
    for (int i = 0; i < 4; ++i) cloud.points.push_back({static_cast<double>(i), 0, 0});
    std::vector<double> zero(4, 0.0);
    auto subset = downsample(cloud, zero, 2, 5);
    CHECK(subset.size() == 2);
    CHECK(subset[0] != subset[1]);
}

TEST_CASE("attention subset excludes zero-confidence points") {
    PointCloud cloud;
    cloud.points = {{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {2, 0, 0}, {-2, 0, 0}};
    ConfidenceParams params;
    params.weight = {1, 0, 0}; // confidence = relu(v_x)
    params.bias = 0.0;
    auto scores = attention_scores(cloud, 0, params);
    CHECK(scores[0] == 0.0); // the centroid point itself
    CHECK(scores[1] > 0.0);
    CHECK(scores[2] == 0.0);
    for (int seed = 0; seed < 10; ++seed) {
        auto subset = attention_subset(cloud, 0, params, 2, static_cast<std::uint64_t>(seed));
        for (std::size_t idx : subset) CHECK((idx == 1 || idx == 3));
    }
}

TEST_CASE("constant confidence gives uniform attention sampling") {
    PointCloud cloud;
    for (int i = 0; i < 5; ++i) cloud.points.push_back({std::cos(i * 1.3), std::sin(i * 1.3), 0.1 * i});
    ConfidenceParams params;
    params.weight = {0, 0, 0};
    params.bias = 2.0;
    auto scores = attention_scores(cloud, 0, params);
    for (std::size_t i = 1; i < 5; ++i) CHECK(scores[i] == doctest::Approx(2.0));
}

TEST_CASE("attention frequencies match exact probabilities") {
    Rng rng = make_rng(113);
    PointCloud cloud = random_cloud(20, rng);
    ConfidenceParams params;
    params.weight = {0.7, -0.3, 0.5};
    params.bias = 0.4;
    const std::size_t m = centroid(cloud);
    auto scores = attention_scores(cloud, m, params);
    const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
    const int trials = 10000;
    std::vector<int> first(cloud.size(), 0);
    Rng draw_rng = make_rng(127);
    for (int t = 0; t < trials; ++t) first[downsample(scores, 1, draw_rng)[0]]++;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double p = scores[i] / total;
        const double sigma = std::sqrt(trials * p * (1 - p) + 1e-12);
        CHECK(std::abs(first[i] - trials * p) <= 4.0 * sigma + 1.0);
    }
}
