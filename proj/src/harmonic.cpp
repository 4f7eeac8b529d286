#include "poirot/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace poirot {

std::size_t s2_coeff_count(int bandwidth) {
    return static_cast<std::size_t>(bandwidth) * bandwidth;
}

std::size_t so3_coeff_count(int bandwidth) {
    const std::size_t b = static_cast<std::size_t>(bandwidth);
    return b * (2 * b - 1) * (2 * b + 1) / 3;
}

cplx& S2Spectrum::at(int c, int l, int m) {
    return coef[static_cast<std::size_t>(c) * s2_coeff_count(bandwidth) + index(l, m)];
}

cplx S2Spectrum::at(int c, int l, int m) const {
    return coef[static_cast<std::size_t>(c) * s2_coeff_count(bandwidth) + index(l, m)];
}

cplx& SO3Spectrum::at(int c, int l, int m, int n) {
    return coef[static_cast<std::size_t>(c) * so3_coeff_count(bandwidth) + index(l, m, n)];
}

cplx SO3Spectrum::at(int c, int l, int m, int n) const {
    return coef[static_cast<std::size_t>(c) * so3_coeff_count(bandwidth) + index(l, m, n)];
}

double& SO3Signal::at(int c, int ia, int ib, int ig) {
    const int n = 2 * bandwidth();
    return values[((static_cast<std::size_t>(c) * n + ia) * n + ib) * n + ig];
}

double SO3Signal::at(int c, int ia, int ib, int ig) const {
    const int n = 2 * bandwidth();
    return values[((static_cast<std::size_t>(c) * n + ia) * n + ib) * n + ig];
}

SO3Signal make_so3_signal(std::shared_ptr<const SO3Grid> grid, int channels) {
    SO3Signal s;
    s.grid = std::move(grid);
    s.channels = channels;
    s.values.assign(static_cast<std::size_t>(channels) * s.grid->size(), 0.0);
    return s;
}

SO3Grid make_so3_grid(int bandwidth) {
    if (bandwidth < 2) throw ConfigError("make_so3_grid: bandwidth must be at least 2");
    const int B = bandwidth;
    const int n = 2 * B;
    SO3Grid grid;
    grid.bandwidth = B;
    grid.alpha.resize(n);
    grid.beta.resize(n);
    grid.gamma.resize(n);
    for (int j = 0; j < n; ++j) {
        grid.alpha[j] = 2.0 * M_PI * j / n;
        grid.gamma[j] = grid.alpha[j];
        grid.beta[j] = M_PI * (2.0 * j + 1.0) / (4.0 * B);
    }
    // Reuse the sphere ring rule; the polar nodes coincide.
    const SphereGrid s2 = make_grid(B);
    grid.beta_weight.resize(n);
    for (int j = 0; j < n; ++j) grid.beta_weight[j] = (M_PI / B) * s2.weights[static_cast<std::size_t>(j) * n];
    return grid;
}

std::shared_ptr<const SO3Grid> shared_so3_grid(int bandwidth) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const SO3Grid>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(bandwidth);
    if (it != cache.end()) return it->second;
    auto grid = std::make_shared<const SO3Grid>(make_so3_grid(bandwidth));
    cache[bandwidth] = grid;
    return grid;
}

namespace {

// Normalized associated Legendre N_l^m P_l^m(cos theta) for 0 <= m <= l < B,
// Condon-Shortley phase included. Output index l(l+1)/2 + m.
void normalized_legendre(int B, double cos_t, double sin_t, double* out) {
    const auto idx = [](int l, int m) {
        return static_cast<std::size_t>(l) * (l + 1) / 2 + static_cast<std::size_t>(m);
    };
    out[idx(0, 0)] = 1.0 / std::sqrt(4.0 * M_PI);
    for (int m = 1; m < B; ++m)
        out[idx(m, m)] =
            -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sin_t * out[idx(m - 1, m - 1)];
    for (int m = 0; m + 1 < B; ++m)
        out[idx(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * cos_t * out[idx(m, m)];
    for (int m = 0; m < B; ++m) {
        for (int l = m + 2; l < B; ++l) {
            const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
            const double b =
                std::sqrt((4.0 * (l - 1.0) * (l - 1.0) - 1.0) /
                          ((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m));
            out[idx(l, m)] = a * (cos_t * out[idx(l - 1, m)] - out[idx(l - 2, m)] / b);
        }
    }
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
    return r;
}

// d^j_{j,n}(beta).
double wigner_seed_top(int j, int n, double cb2, double sb2) {
    return std::sqrt(binomial(2 * j, j - n)) * std::pow(cb2, j + n) * std::pow(-sb2, j - n);
}

// All d^l matrices for l < B at one beta. Seeds at l = max(|m|,|n|) from the
// closed form plus index symmetries, then the three-term recursion in l.
std::vector<std::vector<double>> wigner_d_stack(int B, double beta) {
    std::vector<std::vector<double>> d(static_cast<std::size_t>(B));
    for (int l = 0; l < B; ++l)
        d[static_cast<std::size_t>(l)].assign(static_cast<std::size_t>(2 * l + 1) * (2 * l + 1), 0.0);
    const double cb2 = std::cos(beta / 2.0);
    const double sb2 = std::sin(beta / 2.0);
    const double cb = std::cos(beta);
    d[0][0] = 1.0;
    for (int m = -(B - 1); m <= B - 1; ++m) {
        for (int n = -(B - 1); n <= B - 1; ++n) {
            const int l0 = std::max(std::abs(m), std::abs(n));
            double seed;
            if (l0 == 0)
                seed = 1.0;
            else if (m == l0)
                seed = wigner_seed_top(l0, n, cb2, sb2);
            else if (m == -l0)
                seed = ((l0 + n) % 2 ? -1.0 : 1.0) * wigner_seed_top(l0, -n, cb2, sb2);
            else if (n == l0)
                seed = ((l0 - m) % 2 ? -1.0 : 1.0) * wigner_seed_top(l0, m, cb2, sb2);
            else
                seed = wigner_seed_top(l0, -m, cb2, sb2);

            auto entry = [&](int l) -> double& {
                return d[static_cast<std::size_t>(l)]
                        [static_cast<std::size_t>(m + l) * (2 * l + 1) + static_cast<std::size_t>(n + l)];
            };
            if (l0 < B) entry(l0) = seed;
            double prev2 = 0.0, prev1 = seed;
            for (int l = l0 + 1; l < B; ++l) {
                double cur;
                if (l == 1) {
                    cur = cb * prev1; // d^1_{00} = cos(beta) only reaches here
                } else {
                    const double xl = std::sqrt((static_cast<double>(l) * l - m * m) *
                                                (static_cast<double>(l) * l - n * n));
                    const double lm1 = l - 1.0;
                    const double xlm1 = std::sqrt((lm1 * lm1 - m * m) * (lm1 * lm1 - n * n));
                    const double c1 = (2.0 * l - 1.0) * (l * lm1 * cb - m * n) / (lm1 * xl);
                    const double c2 = l * xlm1 / (lm1 * xl);
                    cur = c1 * prev1 - c2 * prev2;
                }
                entry(l) = cur;
                prev2 = prev1;
                prev1 = cur;
            }
        }
    }
    return d;
}

} // namespace

std::vector<double> wigner_d(int l, double beta) {
    if (l < 0) throw ConfigError("wigner_d: negative degree");
    auto stack = wigner_d_stack(l + 1, beta);
    return std::move(stack[static_cast<std::size_t>(l)]);
}

Rotation rotation_from_euler(const EulerZYZ& e) {
    const double ca = std::cos(e.alpha), sa = std::sin(e.alpha);
    const double cb = std::cos(e.beta), sb = std::sin(e.beta);
    const double cg = std::cos(e.gamma), sg = std::sin(e.gamma);
    Rotation r;
    r.m = {ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb,
           sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb,
           -sb * cg,               sb * sg,                 cb};
    return r;
}

EulerZYZ euler_from_rotation(const Rotation& r) {
    EulerZYZ e;
    const double cb = std::clamp(r.m[8], -1.0, 1.0);
    e.beta = std::acos(cb);
    const double sb = std::sin(e.beta);
    if (sb > 1e-12) {
        e.alpha = std::atan2(r.m[5], r.m[2]);
        e.gamma = std::atan2(r.m[7], -r.m[6]);
    } else if (cb > 0.0) {
        e.alpha = std::atan2(r.m[3], r.m[0]);
        e.gamma = 0.0;
    } else {
        e.alpha = std::atan2(-r.m[3], -r.m[0]);
        e.gamma = 0.0;
    }
    return e;
}

std::vector<cplx> wigner_D(int l, const Rotation& r) {
    const EulerZYZ e = euler_from_rotation(r);
    const std::vector<double> d = wigner_d(l, e.beta);
    const int dim = 2 * l + 1;
    std::vector<cplx> D(static_cast<std::size_t>(dim) * dim);
    for (int m = -l; m <= l; ++m)
        for (int n = -l; n <= l; ++n) {
            const cplx phase =
                std::exp(cplx(0.0, -(m * e.alpha + n * e.gamma)));
            D[static_cast<std::size_t>(m + l) * dim + static_cast<std::size_t>(n + l)] =
                phase * d[static_cast<std::size_t>(m + l) * dim + static_cast<std::size_t>(n + l)];
        }
    return D;
}

cplx sph_harmonic(int l, int m, const Vec3& unit_dir) {
    const double ct = std::clamp(unit_dir.z, -1.0, 1.0);
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double phi = std::atan2(unit_dir.y, unit_dir.x);
    const int B = l + 1;
    std::vector<double> lam(static_cast<std::size_t>(B) * (B + 1) / 2);
    normalized_legendre(B, ct, st, lam.data());
    const int am = std::abs(m);
    const double lval = lam[static_cast<std::size_t>(l) * (l + 1) / 2 + static_cast<std::size_t>(am)];
    const double sign = (m < 0 && (am % 2)) ? -1.0 : 1.0;
    return sign * lval * std::exp(cplx(0.0, m * phi));
}

// ---------------------------------------------------------------------------
// S2Transform

S2Transform::S2Transform(int bandwidth)
    : bandwidth_(bandwidth), grid_(shared_grid(bandwidth)) {
    const int B = bandwidth_;
    const int n = 2 * B;
    lambda_.assign(static_cast<std::size_t>(B) * (B + 1) / 2 * n, 0.0);
    std::vector<double> lam(static_cast<std::size_t>(B) * (B + 1) / 2);
    for (int a = 0; a < n; ++a) {
        const double theta = grid_->polar[a];
        normalized_legendre(B, std::cos(theta), std::sin(theta), lam.data());
        for (std::size_t i = 0; i < lam.size(); ++i)
            lambda_[i * n + static_cast<std::size_t>(a)] = lam[i];
    }
    expphi_.assign(static_cast<std::size_t>(2 * B - 1) * n, cplx(0.0, 0.0));
    for (int m = -(B - 1); m <= B - 1; ++m)
        for (int b = 0; b < n; ++b)
            expphi_[static_cast<std::size_t>(m + B - 1) * n + b] =
                std::exp(cplx(0.0, m * grid_->azimuth[b]));
    ring_w_.resize(n);
    for (int a = 0; a < n; ++a) ring_w_[a] = grid_->weights[static_cast<std::size_t>(a) * n];
}

std::size_t S2Transform::grid_size() const { return grid_->size(); }

std::size_t S2Transform::lam_index(int l, int m) const {
    return (static_cast<std::size_t>(l) * (l + 1) / 2 + static_cast<std::size_t>(m)) *
           static_cast<std::size_t>(2 * bandwidth_);
}

void S2Transform::analyze(const double* values, cplx* coef) const {
    const int B = bandwidth_;
    const int n = 2 * B;
    thread_local std::vector<cplx> G;
    G.assign(static_cast<std::size_t>(n) * (2 * B - 1), cplx(0, 0));
    // G(a, m) = sum_b v(a,b) e^{-i m phi_b}
    for (int a = 0; a < n; ++a) {
        const double* row = values + static_cast<std::size_t>(a) * n;
        for (int m = -(B - 1); m <= B - 1; ++m) {
            const cplx* ex = &expphi_[static_cast<std::size_t>(m + B - 1) * n];
            cplx s(0, 0);
            for (int b = 0; b < n; ++b) s += row[b] * std::conj(ex[b]);
            G[static_cast<std::size_t>(a) * (2 * B - 1) + static_cast<std::size_t>(m + B - 1)] = s;
        }
    }
    for (int l = 0; l < B; ++l) {
        for (int m = -l; m <= l; ++m) {
            const int am = std::abs(m);
            const double sign = (m < 0 && (am % 2)) ? -1.0 : 1.0;
            const double* lam = &lambda_[lam_index(l, am)];
            cplx s(0, 0);
            for (int a = 0; a < n; ++a)
                s += ring_w_[a] * lam[a] *
                     G[static_cast<std::size_t>(a) * (2 * B - 1) + static_cast<std::size_t>(m + B - 1)];
            coef[S2Spectrum::index(l, m)] = sign * s;
        }
    }
}

void S2Transform::synthesize(const cplx* coef, cplx* values) const {
    const int B = bandwidth_;
    const int n = 2 * B;
    thread_local std::vector<cplx> T;
    T.assign(static_cast<std::size_t>(n) * (2 * B - 1), cplx(0, 0));
    // T(a, m) = sum_l coef(l,m) sign_m Lambda(l,|m|,a)
    for (int l = 0; l < B; ++l) {
        for (int m = -l; m <= l; ++m) {
            const int am = std::abs(m);
            const double sign = (m < 0 && (am % 2)) ? -1.0 : 1.0;
            const cplx c = sign * coef[S2Spectrum::index(l, m)];
            const double* lam = &lambda_[lam_index(l, am)];
            cplx* col = &T[static_cast<std::size_t>(m + B - 1)];
            for (int a = 0; a < n; ++a) col[static_cast<std::size_t>(a) * (2 * B - 1)] += c * lam[a];
        }
    }
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            cplx s(0, 0);
            for (int m = -(B - 1); m <= B - 1; ++m)
                s += T[static_cast<std::size_t>(a) * (2 * B - 1) + static_cast<std::size_t>(m + B - 1)] *
                     expphi_[static_cast<std::size_t>(m + B - 1) * n + b];
            values[static_cast<std::size_t>(a) * n + b] = s;
        }
    }
}

void S2Transform::synthesize_real(const cplx* coef, double* values) const {
    thread_local std::vector<cplx> buf;
    buf.assign(grid_size(), cplx(0, 0));
    synthesize(coef, buf.data());
    for (std::size_t i = 0; i < buf.size(); ++i) values[i] = buf[i].real();
}

void S2Transform::analyze_adjoint(const cplx* gcoef, double* gvalues) const {
    thread_local std::vector<cplx> buf;
    buf.assign(grid_size(), cplx(0, 0));
    synthesize(gcoef, buf.data());
    for (std::size_t i = 0; i < buf.size(); ++i) gvalues[i] = grid_->weights[i] * buf[i].real();
}

void S2Transform::synthesize_adjoint(const double* gvalues, cplx* gcoef) const {
    const int B = bandwidth_;
    const int n = 2 * B;
    thread_local std::vector<cplx> G;
    G.assign(static_cast<std::size_t>(n) * (2 * B - 1), cplx(0, 0));
    for (int a = 0; a < n; ++a) {
        const double* row = gvalues + static_cast<std::size_t>(a) * n;
        for (int m = -(B - 1); m <= B - 1; ++m) {
            const cplx* ex = &expphi_[static_cast<std::size_t>(m + B - 1) * n];
            cplx s(0, 0);
            for (int b = 0; b < n; ++b) s += row[b] * std::conj(ex[b]);
            G[static_cast<std::size_t>(a) * (2 * B - 1) + static_cast<std::size_t>(m + B - 1)] = s;
        }
    }
    for (int l = 0; l < B; ++l) {
        for (int m = -l; m <= l; ++m) {
            const int am = std::abs(m);
            const double sign = (m < 0 && (am % 2)) ? -1.0 : 1.0;
            const double* lam = &lambda_[lam_index(l, am)];
            cplx s(0, 0);
            for (int a = 0; a < n; ++a)
                s += lam[a] *
                     G[static_cast<std::size_t>(a) * (2 * B - 1) + static_cast<std::size_t>(m + B - 1)];
            gcoef[S2Spectrum::index(l, m)] = sign * s;
        }
    }
}

// ---------------------------------------------------------------------------
// SO3Transform

SO3Transform::SO3Transform(int bandwidth)
    : bandwidth_(bandwidth), grid_(shared_so3_grid(bandwidth)) {
    const int B = bandwidth_;
    const int n = 2 * B;
    d_.resize(static_cast<std::size_t>(B));
    for (int l = 0; l < B; ++l)
        d_[static_cast<std::size_t>(l)].assign(
            static_cast<std::size_t>(n) * (2 * l + 1) * (2 * l + 1), 0.0);
    for (int ib = 0; ib < n; ++ib) {
        auto stack = wigner_d_stack(B, grid_->beta[ib]);
        for (int l = 0; l < B; ++l) {
            const std::size_t sz = static_cast<std::size_t>(2 * l + 1) * (2 * l + 1);
            std::copy(stack[static_cast<std::size_t>(l)].begin(),
                      stack[static_cast<std::size_t>(l)].end(),
                      d_[static_cast<std::size_t>(l)].begin() + static_cast<std::size_t>(ib) * sz);
        }
    }
    expvals_.assign(static_cast<std::size_t>(2 * B - 1) * n, cplx(0, 0));
    for (int m = -(B - 1); m <= B - 1; ++m)
        for (int j = 0; j < n; ++j)
            expvals_[static_cast<std::size_t>(m + B - 1) * n + j] =
                std::exp(cplx(0.0, m * grid_->alpha[j]));
}

const double* SO3Transform::d_table(int l, int ib) const {
    const std::size_t sz = static_cast<std::size_t>(2 * l + 1) * (2 * l + 1);
    return d_[static_cast<std::size_t>(l)].data() + static_cast<std::size_t>(ib) * sz;
}

void SO3Transform::synth(const cplx* coef, double* values, bool scaled) const {
    const int B = bandwidth_;
    const int n = 2 * B;
    const int nm = 2 * B - 1;
    thread_local std::vector<cplx> T, U;
    T.assign(static_cast<std::size_t>(nm) * nm, cplx(0, 0));
    U.assign(static_cast<std::size_t>(nm) * n, cplx(0, 0));
    for (int ib = 0; ib < n; ++ib) {
        std::fill(T.begin(), T.end(), cplx(0, 0));
        for (int l = 0; l < B; ++l) {
            const double* dtab = d_table(l, ib);
            const double s = scaled ? (2.0 * l + 1.0) / (8.0 * M_PI * M_PI) : 1.0;
            const int dim = 2 * l + 1;
            for (int m = -l; m <= l; ++m) {
                const cplx* crow = coef + SO3Spectrum::block_offset(l) +
                                   static_cast<std::size_t>(m + l) * dim;
                const double* drow = dtab + static_cast<std::size_t>(m + l) * dim;
                cplx* trow = &T[static_cast<std::size_t>(m + B - 1) * nm];
                for (int nn = -l; nn <= l; ++nn)
                    trow[nn + B - 1] += s * drow[nn + l] * crow[nn + l];
            }
        }
        // U(m, ig) = sum_n T(m,n) e^{-i n gamma_ig}
        for (int mi = 0; mi < nm; ++mi) {
            const cplx* trow = &T[static_cast<std::size_t>(mi) * nm];
            for (int ig = 0; ig < n; ++ig) {
                cplx s(0, 0);
                for (int ni = 0; ni < nm; ++ni)
                    s += trow[ni] * std::conj(expvals_[static_cast<std::size_t>(ni) * n + ig]);
                U[static_cast<std::size_t>(mi) * n + ig] = s;
            }
        }
        // v(ia, ib, ig) = Re sum_m e^{-i m alpha_ia} U(m, ig)
        for (int ia = 0; ia < n; ++ia) {
            for (int ig = 0; ig < n; ++ig) {
                cplx s(0, 0);
                for (int mi = 0; mi < nm; ++mi)
                    s += std::conj(expvals_[static_cast<std::size_t>(mi) * n + ia]) *
                         U[static_cast<std::size_t>(mi) * n + ig];
                values[(static_cast<std::size_t>(ia) * n + ib) * n + ig] = s.real();
            }
        }
    }
}

void SO3Transform::project(const double* values, cplx* coef, bool weighted, bool scaled) const {
    const int B = bandwidth_;
    const int n = 2 * B;
    const int nm = 2 * B - 1;
    std::fill(coef, coef + coeff_count(), cplx(0, 0));
    thread_local std::vector<cplx> G, T;
    G.assign(static_cast<std::size_t>(nm) * n, cplx(0, 0));
    T.assign(static_cast<std::size_t>(nm) * nm, cplx(0, 0));
    for (int ib = 0; ib < n; ++ib) {
        const double w = weighted ? grid_->beta_weight[ib] : 1.0;
        // G(m, ig) = sum_ia v(ia,ib,ig) e^{+i m alpha_ia}
        for (int mi = 0; mi < nm; ++mi) {
            const cplx* ex = &expvals_[static_cast<std::size_t>(mi) * n];
            for (int ig = 0; ig < n; ++ig) {
                cplx s(0, 0);
                for (int ia = 0; ia < n; ++ia)
                    s += values[(static_cast<std::size_t>(ia) * n + ib) * n + ig] * ex[ia];
                G[static_cast<std::size_t>(mi) * n + ig] = s;
            }
        }
        // T(m, n) = sum_ig G(m, ig) e^{+i n gamma_ig}
        for (int mi = 0; mi < nm; ++mi) {
            for (int ni = 0; ni < nm; ++ni) {
                const cplx* ex = &expvals_[static_cast<std::size_t>(ni) * n];
                cplx s(0, 0);
                for (int ig = 0; ig < n; ++ig)
                    s += G[static_cast<std::size_t>(mi) * n + ig] * ex[ig];
                T[static_cast<std::size_t>(mi) * nm + ni] = s;
            }
        }
        for (int l = 0; l < B; ++l) {
            const double* dtab = d_table(l, ib);
            const double s = scaled ? (2.0 * l + 1.0) / (8.0 * M_PI * M_PI) : 1.0;
            const int dim = 2 * l + 1;
            for (int m = -l; m <= l; ++m) {
                const double* drow = dtab + static_cast<std::size_t>(m + l) * dim;
                cplx* crow = coef + SO3Spectrum::block_offset(l) +
                             static_cast<std::size_t>(m + l) * dim;
                const cplx* trow = &T[static_cast<std::size_t>(m + B - 1) * nm];
                for (int nn = -l; nn <= l; ++nn)
                    crow[nn + l] += (w * s) * drow[nn + l] * trow[nn + B - 1];
            }
        }
    }
}

void SO3Transform::synthesize_real(const cplx* coef, double* values) const {
    synth(coef, values, false);
}

void SO3Transform::analyze(const double* values, cplx* coef) const {
    project(values, coef, true, true);
}

void SO3Transform::synthesize_adjoint(const double* gvalues, cplx* gcoef) const {
    project(gvalues, gcoef, false, false);
}

void SO3Transform::analyze_adjoint(const cplx* gcoef, double* gvalues) const {
    synth(gcoef, gvalues, true);
    const int n = 2 * bandwidth_;
    for (int ia = 0; ia < n; ++ia)
        for (int ib = 0; ib < n; ++ib)
            for (int ig = 0; ig < n; ++ig)
                gvalues[(static_cast<std::size_t>(ia) * n + ib) * n + ig] *= grid_->beta_weight[ib];
}

std::shared_ptr<const S2Transform> shared_s2_transform(int bandwidth) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const S2Transform>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(bandwidth);
    if (it != cache.end()) return it->second;
    auto t = std::make_shared<const S2Transform>(bandwidth);
    cache[bandwidth] = t;
    return t;
}

std::shared_ptr<const SO3Transform> shared_so3_transform(int bandwidth) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const SO3Transform>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(bandwidth);
    if (it != cache.end()) return it->second;
    auto t = std::make_shared<const SO3Transform>(bandwidth);
    cache[bandwidth] = t;
    return t;
}

// ---------------------------------------------------------------------------
// Public wrappers

namespace {

void check_imag_residue(const std::vector<cplx>& values, const char* what) {
    double max_re = 0.0, max_im = 0.0;
    for (const cplx& v : values) {
        max_re = std::max(max_re, std::abs(v.real()));
        max_im = std::max(max_im, std::abs(v.imag()));
    }
    if (max_im > 1e-9 * std::max(1.0, max_re))
        throw NumericError(std::string(what) + ": imaginary residue " + std::to_string(max_im) +
                           " exceeds tolerance; spectrum is not conjugate-symmetric");
}

} // namespace

S2Spectrum sht_forward(const SphericalSignal& signal) {
    if (!signal.grid) throw StateError("sht_forward: signal has no grid");
    const S2Transform& t = *shared_s2_transform(signal.bandwidth());
    S2Spectrum spec;
    spec.bandwidth = signal.bandwidth();
    spec.channels = signal.channels;
    spec.coef.assign(static_cast<std::size_t>(signal.channels) * t.coeff_count(), cplx(0, 0));
    for (int c = 0; c < signal.channels; ++c)
        t.analyze(signal.values.data() + static_cast<std::size_t>(c) * t.grid_size(),
                  spec.coef.data() + static_cast<std::size_t>(c) * t.coeff_count());
    return spec;
}

SphericalSignal sht_inverse(const S2Spectrum& spectrum, std::shared_ptr<const SphereGrid> grid) {
    if (!grid || grid->bandwidth != spectrum.bandwidth)
        throw ShapeError("sht_inverse: grid bandwidth does not match spectrum");
    const S2Transform& t = *shared_s2_transform(spectrum.bandwidth);
    SphericalSignal out = make_signal(std::move(grid), spectrum.channels);
    std::vector<cplx> buf(t.grid_size());
    for (int c = 0; c < spectrum.channels; ++c) {
        t.synthesize(spectrum.coef.data() + static_cast<std::size_t>(c) * t.coeff_count(),
                     buf.data());
        check_imag_residue(buf, "sht_inverse");
        for (std::size_t i = 0; i < buf.size(); ++i)
            out.values[static_cast<std::size_t>(c) * t.grid_size() + i] = buf[i].real();
    }
    return out;
}

SO3Signal so3_synthesize(const SO3Spectrum& spectrum, std::shared_ptr<const SO3Grid> grid) {
    if (!grid || grid->bandwidth != spectrum.bandwidth)
        throw ShapeError("so3_synthesize: grid bandwidth does not match spectrum");
    const SO3Transform& t = *shared_so3_transform(spectrum.bandwidth);
    SO3Signal out = make_so3_signal(std::move(grid), spectrum.channels);
    // Reality check through round projection: synthesize drops the imaginary
    // part, so verify the spectrum is conjugate-symmetric first.
    for (int c = 0; c < spectrum.channels; ++c) {
        const cplx* coef = spectrum.coef.data() + static_cast<std::size_t>(c) * t.coeff_count();
        double max_mag = 0.0, max_defect = 0.0;
        for (int l = 0; l < spectrum.bandwidth; ++l)
            for (int m = -l; m <= l; ++m)
                for (int n = -l; n <= l; ++n) {
                    const cplx a = coef[SO3Spectrum::index(l, m, n)];
                    const cplx b = coef[SO3Spectrum::index(l, -m, -n)];
                    const double sign = ((m - n) % 2) ? -1.0 : 1.0;
                    max_mag = std::max(max_mag, std::abs(a));
                    max_defect = std::max(max_defect, std::abs(a - sign * std::conj(b)));
                }
        if (max_defect > 1e-9 * std::max(1.0, max_mag))
            throw NumericError("so3_synthesize: spectrum is not conjugate-symmetric");
        t.synthesize_real(coef, out.values.data() + static_cast<std::size_t>(c) * t.grid_size());
    }
    return out;
}

SO3Spectrum so3_analyze(const SO3Signal& signal) {
    if (!signal.grid) throw StateError("so3_analyze: signal has no grid");
    const SO3Transform& t = *shared_so3_transform(signal.bandwidth());
    SO3Spectrum spec;
    spec.bandwidth = signal.bandwidth();
    spec.channels = signal.channels;
    spec.coef.assign(static_cast<std::size_t>(signal.channels) * t.coeff_count(), cplx(0, 0));
    for (int c = 0; c < signal.channels; ++c)
        t.analyze(signal.values.data() + static_cast<std::size_t>(c) * t.grid_size(),
                  spec.coef.data() + static_cast<std::size_t>(c) * t.coeff_count());
    return spec;
}

S2Spectrum rotate_spectrum(const S2Spectrum& spectrum, const Rotation& r) {
    S2Spectrum out = spectrum;
    for (int l = 0; l < spectrum.bandwidth; ++l) {
        const std::vector<cplx> D = wigner_D(l, r);
        const int dim = 2 * l + 1;
        for (int c = 0; c < spectrum.channels; ++c) {
            for (int m = -l; m <= l; ++m) {
                cplx s(0, 0);
                for (int k = -l; k <= l; ++k)
                    s += D[static_cast<std::size_t>(m + l) * dim + static_cast<std::size_t>(k + l)] *
                         spectrum.at(c, l, k);
                out.at(c, l, m) = s;
            }
        }
    }
    return out;
}

SO3Spectrum left_translate_spectrum(const SO3Spectrum& spectrum, const Rotation& r) {
    SO3Spectrum out = spectrum;
    for (int l = 0; l < spectrum.bandwidth; ++l) {
        const std::vector<cplx> D = wigner_D(l, r);
        const int dim = 2 * l + 1;
        for (int c = 0; c < spectrum.channels; ++c) {
            for (int k = -l; k <= l; ++k) {
                for (int n = -l; n <= l; ++n) {
                    cplx s(0, 0);
                    for (int m = -l; m <= l; ++m)
                        s += std::conj(D[static_cast<std::size_t>(k + l) * dim +
                                         static_cast<std::size_t>(m + l)]) *
                             spectrum.at(c, l, m, n);
                    out.at(c, l, k, n) = s;
                }
            }
        }
    }
    return out;
}

double evaluate_s2_at(const S2Spectrum& spectrum, int channel, const Vec3& unit_dir) {
    cplx s(0, 0);
    for (int l = 0; l < spectrum.bandwidth; ++l)
        for (int m = -l; m <= l; ++m)
            s += spectrum.at(channel, l, m) * sph_harmonic(l, m, unit_dir);
    return s.real();
}

double evaluate_so3_at(const SO3Spectrum& spectrum, int channel, const Rotation& r) {
    cplx s(0, 0);
    for (int l = 0; l < spectrum.bandwidth; ++l) {
        const std::vector<cplx> D = wigner_D(l, r);
        const int dim = 2 * l + 1;
        for (int m = -l; m <= l; ++m)
            for (int n = -l; n <= l; ++n)
                s += spectrum.at(channel, l, m, n) *
                     D[static_cast<std::size_t>(m + l) * dim + static_cast<std::size_t>(n + l)];
    }
    return s.real();
}

} // namespace poirot
