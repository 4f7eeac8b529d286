#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "poirot/geometry.hpp"
#include "poirot/sphere.hpp"

namespace poirot {

using cplx = std::complex<double>;

/// Coefficients of a band-limited function on the sphere, index
/// (c, l, m) -> c*B^2 + l^2 + (l + m) for 0 <= l < B, |m| <= l.
struct S2Spectrum {
    int bandwidth = 0;
    int channels = 0;
    std::vector<cplx> coef;

    static std::size_t index(int l, int m) {
        return static_cast<std::size_t>(l) * l + static_cast<std::size_t>(l + m);
    }
    cplx& at(int c, int l, int m);
    cplx at(int c, int l, int m) const;
};

std::size_t s2_coeff_count(int bandwidth); // B^2

/// Coefficients on SO(3) in the Wigner basis, per channel
/// sum_{l<B} (2l+1)^2 entries; degree block l starts at l(2l-1)(2l+1)/3,
/// entry (m, n) at (m+l)(2l+1) + (n+l).
struct SO3Spectrum {
    int bandwidth = 0;
    int channels = 0;
    std::vector<cplx> coef;

    static std::size_t block_offset(int l) {
        return static_cast<std::size_t>(l) * (2 * l - 1) * (2 * l + 1) / 3;
    }
    static std::size_t index(int l, int m, int n) {
        return block_offset(l) + static_cast<std::size_t>(m + l) * (2 * l + 1) +
               static_cast<std::size_t>(n + l);
    }
    cplx& at(int c, int l, int m, int n);
    cplx at(int c, int l, int m, int n) const;
};

std::size_t so3_coeff_count(int bandwidth); // B(2B-1)(2B+1)/3

/// Euler-angle grid over SO(3) in ZYZ convention: alpha, gamma uniform over
/// [0, 2pi), beta at the offset polar nodes. `beta_weight[ib]` is the full
/// Haar quadrature weight of every node in ring ib; all weights sum to
/// 8 pi^2.
struct SO3Grid {
    int bandwidth = 0;
    std::vector<double> alpha, beta, gamma; // each 2B
    std::vector<double> beta_weight;        // 2B

    int rings() const { return 2 * bandwidth; }
    std::size_t size() const {
        const std::size_t n = static_cast<std::size_t>(rings());
        return n * n * n;
    }
};

SO3Grid make_so3_grid(int bandwidth);
std::shared_ptr<const SO3Grid> shared_so3_grid(int bandwidth); // cached

/// Multi-channel samples on an SO3Grid, value index (c, ia, ib, ig).
struct SO3Signal {
    std::shared_ptr<const SO3Grid> grid;
    int channels = 0;
    std::vector<double> values;

    int bandwidth() const { return grid ? grid->bandwidth : 0; }
    double& at(int c, int ia, int ib, int ig);
    double at(int c, int ia, int ib, int ig) const;
    std::size_t grid_size() const { return grid ? grid->size() : 0; }
};

SO3Signal make_so3_signal(std::shared_ptr<const SO3Grid> grid, int channels);

struct EulerZYZ {
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
};

Rotation rotation_from_euler(const EulerZYZ& e);
EulerZYZ euler_from_rotation(const Rotation& r);

/// Wigner small-d matrix, (2l+1)x(2l+1) row-major, row m+l, column n+l.
std::vector<double> wigner_d(int l, double beta);

/// Wigner D^l at a rotation, D_{mn} = e^{-i m alpha} d_{mn}(beta) e^{-i n gamma}.
std::vector<cplx> wigner_D(int l, const Rotation& r);

/// Normalized spherical harmonic Y_l^m at a unit direction.
cplx sph_harmonic(int l, int m, const Vec3& unit_dir);

/// Fast transforms at a fixed bandwidth. Tables are immutable after
/// construction; all methods are const and safe to call concurrently.
class S2Transform {
public:
    explicit S2Transform(int bandwidth);

    int bandwidth() const { return bandwidth_; }
    std::size_t coeff_count() const { return s2_coeff_count(bandwidth_); }
    std::size_t grid_size() const;
    const std::shared_ptr<const SphereGrid>& grid() const { return grid_; }

    /// Quadrature analysis of one channel of grid values.
    void analyze(const double* values, cplx* coef) const;
    /// Pointwise synthesis; exact for band-limited coefficients.
    void synthesize(const cplx* coef, cplx* values) const;
    void synthesize_real(const cplx* coef, double* values) const;
    /// Adjoint of analyze under the real inner product.
    void analyze_adjoint(const cplx* gcoef, double* gvalues) const;
    /// Adjoint of synthesize_real.
    void synthesize_adjoint(const double* gvalues, cplx* gcoef) const;

private:
    int bandwidth_;
    std::shared_ptr<const SphereGrid> grid_;
    std::vector<double> lambda_;    // (l,m>=0) x rings, normalized Legendre
    std::vector<cplx> expphi_;      // (m index) x rings, e^{+i m phi_b}
    std::vector<double> ring_w_;    // full weight per ring node

    std::size_t lam_index(int l, int m) const;
};

class SO3Transform {
public:
    explicit SO3Transform(int bandwidth);

    int bandwidth() const { return bandwidth_; }
    std::size_t coeff_count() const { return so3_coeff_count(bandwidth_); }
    std::size_t grid_size() const { return grid_->size(); }
    const std::shared_ptr<const SO3Grid>& grid() const { return grid_; }

    void synthesize_real(const cplx* coef, double* values) const;
    /// Haar-weighted analysis with the (2l+1)/(8 pi^2) degree scaling;
    /// inverse of synthesize_real on band-limited signals.
    void analyze(const double* values, cplx* coef) const;
    void synthesize_adjoint(const double* gvalues, cplx* gcoef) const;
    void analyze_adjoint(const cplx* gcoef, double* gvalues) const;

    /// d^l_{mn}(beta_ib) table, row-major per (l, ib).
    const double* d_table(int l, int ib) const;

private:
    int bandwidth_;
    std::shared_ptr<const SO3Grid> grid_;
    std::vector<std::vector<double>> d_; // per l: rings x (2l+1)^2
    std::vector<cplx> expvals_;          // (m index) x 2B, e^{+i m angle}

    void project(const double* values, cplx* coef, bool weighted, bool scaled) const;
    void synth(const cplx* coef, double* values, bool scaled) const;
};

std::shared_ptr<const S2Transform> shared_s2_transform(int bandwidth);
std::shared_ptr<const SO3Transform> shared_so3_transform(int bandwidth);

/// Quadrature analysis of a real signal; exact below bandwidth B.
S2Spectrum sht_forward(const SphericalSignal& signal);

/// Pointwise synthesis; throws NumericError if the imaginary residue
/// exceeds 1e-9 relative to the signal scale.
SphericalSignal sht_inverse(const S2Spectrum& spectrum, std::shared_ptr<const SphereGrid> grid);

SO3Signal so3_synthesize(const SO3Spectrum& spectrum, std::shared_ptr<const SO3Grid> grid);
SO3Spectrum so3_analyze(const SO3Signal& signal);

/// Coefficients of x -> f(R^-1 x): degree block l is multiplied by D^l(R).
S2Spectrum rotate_spectrum(const S2Spectrum& spectrum, const Rotation& r);

/// Coefficients of g -> h(R^-1 g) on SO(3).
SO3Spectrum left_translate_spectrum(const SO3Spectrum& spectrum, const Rotation& r);

/// Pointwise evaluation of band-limited spectra (synthesis at one point).
double evaluate_s2_at(const S2Spectrum& spectrum, int channel, const Vec3& unit_dir);
double evaluate_so3_at(const SO3Spectrum& spectrum, int channel, const Rotation& r);

} // namespace poirot
