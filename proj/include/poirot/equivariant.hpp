#pragma once

#include <memory>
#include <string>
#include <vector>

#include "poirot/harmonic.hpp"

namespace poirot {

/// Cyclic decomposition of a dense tensor into order-3 cores:
/// W(i_1..i_k) = trace(T_1(i_1) ... T_k(i_k)), T_j(i) of shape p x p.
struct TensorRingKernel {
    std::vector<int> mode_sizes;
    int core_size = 1;
    // cores[j] holds mode_sizes[j] matrices, entry (i, a, b) at (i*p + a)*p + b.
    std::vector<std::vector<double>> cores;

    static TensorRingKernel random(std::vector<int> modes, int core_size, double entry_variance,
                                   Rng& rng);

    std::size_t order() const { return mode_sizes.size(); }
    std::size_t dense_count() const;
    std::size_t param_count() const; // p^2 * sum of mode sizes

    /// Dense tensor, row-major over the modes.
    std::vector<double> materialize() const;
    /// Accumulates d(loss)/d(cores) given d(loss)/d(materialized tensor).
    void materialize_backward(const double* grad_dense,
                              std::vector<std::vector<double>>& grad_cores) const;

    void validate() const;
};

std::vector<double> tr_materialize(const TensorRingKernel& kernel);
std::size_t tr_param_count(const TensorRingKernel& kernel);

/// Split D into two factors as close to square as possible.
std::pair<int, int> balanced_factor_pair(int d);

/// Flat batch of grid signals: values[(item*channels + c)*grid + g].
struct SignalBatch {
    int items = 0;
    int channels = 0;
    std::size_t grid = 0;
    std::vector<double> values;

    double* item_channel(int i, int c) {
        return values.data() + (static_cast<std::size_t>(i) * channels + c) * grid;
    }
    const double* item_channel(int i, int c) const {
        return values.data() + (static_cast<std::size_t>(i) * channels + c) * grid;
    }
};

SignalBatch make_batch(int items, int channels, std::size_t grid);
SignalBatch pack_signals(const std::vector<SphericalSignal>& signals);

struct ParamView {
    std::string name;
    double* data = nullptr;
    std::size_t size = 0;
    double* grad = nullptr; // nullptr for non-trainable state
};

class Layer {
public:
    virtual ~Layer() = default;
    virtual SignalBatch forward(const SignalBatch& input, bool record) = 0;
    /// Adjoint pass; requires a recorded forward. Accumulates parameter
    /// gradients and returns the input gradient.
    virtual SignalBatch backward(const SignalBatch& grad_output) = 0;
    virtual std::string kind() const = 0;
    virtual std::vector<ParamView> parameter_views() { return {}; }
    virtual std::vector<ParamView> state_views() { return {}; }

    void zero_grad();
    std::size_t parameter_count();
};

/// Learnable spectral coefficients held either as a tensor ring over
/// (C_in, D1, D2, C_out) or as the dense tensor itself.
class SpectralKernel {
public:
    SpectralKernel(int c_in, int c_out, int dof, bool tensor_ring, int core_size,
                   double entry_variance, Rng& rng);

    int c_in() const { return c_in_; }
    int c_out() const { return c_out_; }
    int dof() const { return dof_; }
    bool tensor_ring() const { return tensor_ring_; }

    /// Dense coefficients, layout ((cin*D1 + d1)*D2 + d2)*C_out + cout with
    /// dof index d = d1*D2 + d2.
    const std::vector<double>& materialized();
    double dense_entry(const std::vector<double>& w, int cin, int d, int cout) const {
        return w[(static_cast<std::size_t>(cin) * dof_ + d) * c_out_ + cout];
    }
    /// Routes dense-tensor gradients into the trainable parameters.
    void accumulate_grad(const std::vector<double>& grad_dense);

    std::vector<ParamView> parameter_views(const std::string& prefix);
    std::size_t parameter_count() const;
    std::size_t dense_count() const;

private:
    int c_in_, c_out_, dof_;
    bool tensor_ring_;
    TensorRingKernel tr_;
    std::vector<std::vector<double>> tr_grads_;
    std::vector<double> dense_;
    std::vector<double> dense_grads_;
    std::vector<double> cache_;
    bool cache_valid_ = false;
};

class S2CorrelationLayer : public Layer {
public:
    S2CorrelationLayer(int bandwidth, int c_in, int c_out, bool tensor_ring, int core_size,
                       Rng& rng);

    SignalBatch forward(const SignalBatch& input, bool record) override;
    SignalBatch backward(const SignalBatch& grad_output) override;
    std::string kind() const override { return "s2corr"; }
    std::vector<ParamView> parameter_views() override;

    int bandwidth() const { return bandwidth_; }
    int c_out() const { return c_out_; }
    /// Complex kernel spectra, entry (cin, cout, (l,n)).
    std::vector<cplx> kernel_spectra();

private:
    int bandwidth_, c_in_, c_out_;
    SpectralKernel kernel_;
    std::shared_ptr<const S2Transform> s2_;
    std::shared_ptr<const SO3Transform> so3_;
    std::vector<cplx> recorded_input_spectra_;
    int recorded_items_ = -1;
};

class SO3CorrelationLayer : public Layer {
public:
    SO3CorrelationLayer(int bandwidth, int c_in, int c_out, bool tensor_ring, int core_size,
                        Rng& rng);

    SignalBatch forward(const SignalBatch& input, bool record) override;
    SignalBatch backward(const SignalBatch& grad_output) override;
    std::string kind() const override { return "so3corr"; }
    std::vector<ParamView> parameter_views() override;

    int c_out() const { return c_out_; }
    std::vector<cplx> kernel_spectra();

private:
    int bandwidth_, c_in_, c_out_;
    SpectralKernel kernel_;
    std::shared_ptr<const SO3Transform> so3_;
    std::vector<cplx> recorded_input_spectra_;
    int recorded_items_ = -1;
};

class ReluLayer : public Layer {
public:
    SignalBatch forward(const SignalBatch& input, bool record) override;
    SignalBatch backward(const SignalBatch& grad_output) override;
    std::string kind() const override { return "relu"; }

private:
    std::vector<bool> mask_;
    int items_ = -1, channels_ = 0;
    std::size_t grid_ = 0;
};

/// Per-channel affine H*x + B. When data_init is enabled the first recorded
/// forward sets H and B so that every channel comes out with zero mean and
/// unit variance over the batch and grid.
class ActnormLayer : public Layer {
public:
    explicit ActnormLayer(int channels, bool data_init = true);

    SignalBatch forward(const SignalBatch& input, bool record) override;
    SignalBatch backward(const SignalBatch& grad_output) override;
    std::string kind() const override { return "actnorm"; }
    std::vector<ParamView> parameter_views() override;
    std::vector<ParamView> state_views() override;

    bool initialized() const { return state_[0] != 0.0; }

private:
    int channels_;
    std::vector<double> scale_, bias_;
    std::vector<double> scale_grad_, bias_grad_;
    std::vector<double> state_; // [0]: 1.0 once initialized
    SignalBatch recorded_;
};

class BatchnormLayer : public Layer {
public:
    explicit BatchnormLayer(int channels, double momentum = 0.1, double eps = 1e-5);

    SignalBatch forward(const SignalBatch& input, bool record) override;
    SignalBatch backward(const SignalBatch& grad_output) override;
    std::string kind() const override { return "batchnorm"; }
    std::vector<ParamView> parameter_views() override;
    std::vector<ParamView> state_views() override;

private:
    int channels_;
    double momentum_, eps_;
    std::vector<double> gamma_, beta_, gamma_grad_, beta_grad_;
    std::vector<double> running_mean_, running_var_;
    // Recorded normalization context.
    SignalBatch recorded_;
    std::vector<double> batch_mean_, batch_var_;
};

/// Haar integral per channel, normalized so the constant signal 1 maps to 1.
class InvariantIntegrateLayer : public Layer {
public:
    explicit InvariantIntegrateLayer(int bandwidth);

    SignalBatch forward(const SignalBatch& input, bool record) override;
    SignalBatch backward(const SignalBatch& grad_output) override;
    std::string kind() const override { return "invariant"; }

private:
    int bandwidth_;
    std::shared_ptr<const SO3Grid> grid_;
    int recorded_items_ = -1, recorded_channels_ = 0;
};

/// Fully connected map on grid-1 batches.
class DenseLayer : public Layer {
public:
    DenseLayer(int in_dim, int out_dim, Rng& rng);

    SignalBatch forward(const SignalBatch& input, bool record) override;
    SignalBatch backward(const SignalBatch& grad_output) override;
    std::string kind() const override { return "dense"; }
    std::vector<ParamView> parameter_views() override;

    int in_dim() const { return in_dim_; }
    int out_dim() const { return out_dim_; }

private:
    int in_dim_, out_dim_;
    std::vector<double> weight_, bias_, weight_grad_, bias_grad_;
    SignalBatch recorded_;
};

class LayerStack {
public:
    void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }
    std::size_t size() const { return layers_.size(); }
    Layer& layer(std::size_t i) { return *layers_[i]; }

    SignalBatch forward(const SignalBatch& input, bool record);
    SignalBatch backward(const SignalBatch& grad_output);
    std::vector<ParamView> parameter_views();
    std::vector<ParamView> state_views();
    void zero_grad();
    std::size_t parameter_count();

private:
    std::vector<std::unique_ptr<Layer>> layers_;
};

// Spec-facing single-signal operators. Kernel spectra are indexed with
// channel k = cin * c_out + cout.

SO3Signal s2_correlate(const SphericalSignal& signal, const S2Spectrum& kernel_spectrum, int c_in,
                       int c_out);
SO3Signal so3_correlate(const SO3Signal& signal, const SO3Spectrum& kernel_spectrum, int c_in,
                        int c_out);
std::vector<double> invariant_integrate(const SO3Signal& signal);
SphericalSignal relu(const SphericalSignal& signal);
SO3Signal relu(const SO3Signal& signal);
/// Per-channel affine normalization of a single signal.
SO3Signal actnorm_apply(const SO3Signal& signal, const std::vector<double>& scale,
                        const std::vector<double>& bias);

} // namespace poirot
