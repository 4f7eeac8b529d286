#include "poirot/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace poirot {

double Vec3::norm() const { return std::sqrt(norm2()); }

Vec3 Vec3::normalized() const {
    const double n = norm();
    if (n == 0.0) return {0.0, 0.0, 0.0};
    return *this / n;
}

bool Vec3::finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

void PointCloud::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].finite())
            throw NumericError("point " + std::to_string(i) + " has non-finite coordinates");
    }
    if (!normals.empty()) {
        if (normals.size() != points.size())
            throw ShapeError("normal count " + std::to_string(normals.size()) +
                             " does not match point count " + std::to_string(points.size()));
        for (std::size_t i = 0; i < normals.size(); ++i) {
            if (!normals[i].finite() || std::abs(normals[i].norm() - 1.0) > 1e-9)
                throw NumericError("normal " + std::to_string(i) + " is not unit length");
        }
    }
    if (!labels.empty() && labels.size() != points.size())
        throw ShapeError("label count does not match point count");
}

double PointCloud::diameter() const {
    double best = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            best = std::max(best, (points[i] - points[j]).norm2());
    return std::sqrt(best);
}

Vec3 PointCloud::mean() const {
    if (points.empty()) throw EmptyError("mean of empty cloud");
    Vec3 m;
    for (const Vec3& p : points) m += p;
    return m / static_cast<double>(points.size());
}

Rotation Rotation::from_matrix(const std::array<double, 9>& entries) {
    Rotation r;
    r.m = entries;
    if (r.orthogonality_defect() > 1e-12)
        throw NumericError("matrix is not orthogonal within 1e-12");
    if (std::abs(r.determinant() - 1.0) > 1e-12)
        throw NumericError("matrix determinant is not 1 within 1e-12");
    return r;
}

Vec3 Rotation::apply(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

Vec3 Rotation::apply_transposed(const Vec3& v) const {
    return {m[0] * v.x + m[3] * v.y + m[6] * v.z,
            m[1] * v.x + m[4] * v.y + m[7] * v.z,
            m[2] * v.x + m[5] * v.y + m[8] * v.z};
}

Rotation Rotation::transposed() const {
    Rotation r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[3 * i + j] = m[3 * j + i];
    return r;
}

Rotation Rotation::compose(const Rotation& o) const {
    Rotation r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += m[3 * i + k] * o.m[3 * k + j];
            r.m[3 * i + j] = s;
        }
    return r;
}

double Rotation::orthogonality_defect() const {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += m[3 * k + i] * m[3 * k + j];
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

double Rotation::determinant() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

PointCloud rotate(const PointCloud& cloud, const Rotation& r) {
    PointCloud out = cloud;
    for (Vec3& p : out.points) p = r.apply(p);
    for (Vec3& n : out.normals) n = r.apply(n);
    return out;
}

PointCloud translate(const PointCloud& cloud, const Vec3& t) {
    PointCloud out = cloud;
    for (Vec3& p : out.points) p += t;
    return out;
}

void GeodesicAffinity::write_csv(std::ostream& out) const {
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < count; ++j) {
            if (j) out << ',';
            const double d = at(i, j);
            if (d == std::numeric_limits<double>::infinity())
                out << "inf";
            else
                out << d;
        }
        out << '\n';
    }
}

std::vector<std::size_t> knn(const PointCloud& cloud, const Vec3& query, std::size_t k) {
    if (k > cloud.size())
        throw SizeError("knn: k=" + std::to_string(k) + " exceeds cloud size " +
                        std::to_string(cloud.size()));
    std::vector<std::pair<double, std::size_t>> order(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        order[i] = {(cloud.points[i] - query).norm2(), i};
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
    std::vector<std::size_t> result(k);
    for (std::size_t i = 0; i < k; ++i) result[i] = order[i].second;
    return result;
}

std::size_t centroid(const PointCloud& cloud) {
    if (cloud.empty()) throw EmptyError("centroid of empty cloud");
    const Vec3 m = cloud.mean();
    std::size_t best = 0;
    double best_d = (cloud.points[0] - m).norm2();
    for (std::size_t i = 1; i < cloud.size(); ++i) {
        const double d = (cloud.points[i] - m).norm2();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

GeodesicAffinity geodesic_affinity(const PointCloud& cloud, double epsilon) {
    if (!(epsilon > 0.0)) throw ConfigError("geodesic_affinity: epsilon must be positive");
    const std::size_t n = cloud.size();
    const double inf = std::numeric_limits<double>::infinity();
    GeodesicAffinity aff;
    aff.count = n;
    aff.epsilon = epsilon;
    aff.distances.assign(n * n, inf);
    for (std::size_t i = 0; i < n; ++i) {
        aff.distances[i * n + i] = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = distance(cloud.points[i], cloud.points[j]);
            if (d <= epsilon) {
                aff.distances[i * n + j] = d;
                aff.distances[j * n + i] = d;
            }
        }
    }
    // Floyd-Warshall, single-threaded for reproducibility.
    std::vector<double>& dist = aff.distances;
    for (std::size_t k = 0; k < n; ++k) {
        const double* dk = &dist[k * n];
        for (std::size_t i = 0; i < n; ++i) {
            const double dik = dist[i * n + k];
            if (dik == inf) continue;
            double* di = &dist[i * n];
            for (std::size_t j = 0; j < n; ++j) {
                const double via = dik + dk[j];
                if (via < di[j]) di[j] = via;
            }
        }
    }
    return aff;
}

namespace {

// Minimum-norm point of conv{p_0..p_{n-1}} in d dimensions (Wolfe's
// algorithm). Points are rows of `pts` (n x d). Returns the squared norm of
// the minimizer.
double min_norm_point_sq(const Eigen::MatrixXd& pts) {
    const Eigen::Index n = pts.rows();
    const Eigen::Index d = pts.cols();
    double scale2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) scale2 = std::max(scale2, pts.row(i).squaredNorm());
    if (scale2 == 0.0) return 0.0;
    const double tol = 1e-12 * scale2;

    // Start from the point of least norm, ties to the lowest index.
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i < n; ++i)
        if (pts.row(i).squaredNorm() < pts.row(start).squaredNorm()) start = i;

    std::vector<Eigen::Index> corral{start};
    Eigen::VectorXd lambda = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd z = pts.row(start).transpose();

    for (int iter = 0; iter < 200; ++iter) {
        // Support point most opposed to z.
        Eigen::Index j = 0;
        double best = z.dot(pts.row(0).transpose());
        for (Eigen::Index i = 1; i < n; ++i) {
            const double v = z.dot(pts.row(i).transpose());
            if (v < best) {
                best = v;
                j = i;
            }
        }
        if (best >= z.squaredNorm() - tol) break; // z is optimal
        if (std::find(corral.begin(), corral.end(), j) != corral.end()) break;
        corral.push_back(j);
        lambda.conservativeResize(corral.size());
        lambda[lambda.size() - 1] = 0.0;

        // Minor cycle: affine minimizer over the corral, trimmed back into
        // the simplex when a coefficient goes negative.
        for (int minor = 0; minor < 100; ++minor) {
            const Eigen::Index k = static_cast<Eigen::Index>(corral.size());
            Eigen::MatrixXd P(k, d);
            for (Eigen::Index i = 0; i < k; ++i) P.row(i) = pts.row(corral[static_cast<std::size_t>(i)]);
            Eigen::MatrixXd sys(k + 1, k + 1);
            sys.topLeftCorner(k, k) = P * P.transpose();
            sys.topRightCorner(k, 1).setOnes();
            sys.bottomLeftCorner(1, k).setOnes();
            sys(k, k) = 0.0;
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
            rhs[k] = 1.0;
            Eigen::VectorXd sol = sys.fullPivLu().solve(rhs);
            Eigen::VectorXd u = sol.head(k);
            if ((u.array() > 1e-12).all()) {
                lambda = u;
                break;
            }
            double theta = 1.0;
            for (Eigen::Index i = 0; i < k; ++i)
                if (u[i] <= 1e-12) theta = std::min(theta, lambda[i] / (lambda[i] - u[i]));
            lambda = (1.0 - theta) * lambda + theta * u;
            // Drop one vanished coefficient.
            Eigen::Index drop = -1;
            for (Eigen::Index i = 0; i < k; ++i)
                if (lambda[i] <= 1e-12) {
                    drop = i;
                    break;
                }
            if (drop < 0) break;
            corral.erase(corral.begin() + drop);
            Eigen::VectorXd nl(k - 1);
            Eigen::Index w = 0;
            for (Eigen::Index i = 0; i < k; ++i)
                if (i != drop) nl[w++] = lambda[i];
            const double s = nl.sum();
            lambda = (s > 0.0) ? Eigen::VectorXd(nl / s) : nl;
        }

        z.setZero();
        for (std::size_t i = 0; i < corral.size(); ++i)
            z += lambda[static_cast<Eigen::Index>(i)] * pts.row(corral[i]).transpose();
    }
    return z.squaredNorm();
}

} // namespace

bool is_hull_vertex(const PointCloud& cloud, std::size_t index) {
    const std::size_t n = cloud.size();
    if (index >= n) throw SizeError("is_hull_vertex: index out of range");
    if (n < 2) return true;

    // Detect the affine dimension of the cloud and work in the spanning
    // subspace. Threshold 1e-9 relative to the diameter.
    const Vec3 m = cloud.mean();
    Eigen::MatrixXd centered(static_cast<Eigen::Index>(n), 3);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 c = cloud.points[i] - m;
        centered(static_cast<Eigen::Index>(i), 0) = c.x;
        centered(static_cast<Eigen::Index>(i), 1) = c.y;
        centered(static_cast<Eigen::Index>(i), 2) = c.z;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const double diam = cloud.diameter();
    if (diam == 0.0) return index == 0; // all coincident: lowest index kept
    int dim = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-9 * diam) ++dim;
    dim = std::max(dim, 1);

    // Differences to the query point, projected onto the spanning basis.
    Eigen::MatrixXd basis = svd.matrixV().leftCols(dim);
    Eigen::MatrixXd diffs(static_cast<Eigen::Index>(n - 1), dim);
    Eigen::Index row = 0;
    const Vec3 q = cloud.points[index];
    for (std::size_t j = 0; j < n; ++j) {
        if (j == index) continue;
        const Vec3 dvec = cloud.points[j] - q;
        Eigen::Vector3d d3(dvec.x, dvec.y, dvec.z);
        diffs.row(row++) = (basis.transpose() * d3).transpose();
    }
    // The point is a vertex iff the origin is separated from conv(diffs),
    // i.e. the minimum-norm point of the difference hull is nonzero.
    const double dist2 = min_norm_point_sq(diffs);
    return dist2 > 1e-14 * diam * diam;
}

Rotation random_rotation(Rng& rng) {
    // Unit quaternion from an isotropic 4-D Gaussian.
    double q[4];
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (double& c : q) {
            c = gaussian(rng);
            norm2 += c * c;
        }
    } while (norm2 < 1e-12);
    const double inv = 1.0 / std::sqrt(norm2);
    const double w = q[0] * inv, x = q[1] * inv, y = q[2] * inv, z = q[3] * inv;
    Rotation r;
    r.m = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
           2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
           2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
    return r;
}

Rotation random_rotation(std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return random_rotation(rng);
}

} // namespace poirot
