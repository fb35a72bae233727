#pragma once

// Minimal dense feed-forward network engine: forward pass, exact reverse-mode
// gradients of the mean-squared-error loss, and RMSprop.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "testgen/rng.hpp"

namespace testgen::nn {

/// Row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  /// Builds a matrix from nested row lists; all rows must have equal length.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class Activation { kTanh, kRelu, kLinear };

struct LayerSpec {
  std::size_t units = 1;
  Activation activation = Activation::kLinear;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct NetworkTopology {
  std::size_t input_dim = 1;
  std::vector<LayerSpec> layers;

  std::size_t output_dim() const { return layers.back().units; }
  /// Throws ContractViolation unless input_dim >= 1, at least one layer, and
  /// every layer has >= 1 unit.
  void validate() const;

  friend bool operator==(const NetworkTopology&, const NetworkTopology&) = default;
};

/// Parameters of a dense network. weights[l] is fan_in x fan_out.
struct NetworkState {
  NetworkTopology topology;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  std::size_t parameter_count() const noexcept;

  friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

struct Gradients {
  std::vector<Matrix> weight_grads;
  std::vector<std::vector<double>> bias_grads;
  /// dLoss/dInputs, batch x input_dim. Empty when not requested.
  Matrix input_grad;
};

/// Optimizer hyperparameters plus the per-parameter running mean of squared
/// gradients.
struct RmspropState {
  double learning_rate = 1e-3;
  double rho = 0.9;
  double epsilon = 1e-8;
  std::vector<Matrix> weight_cache;
  std::vector<std::vector<double>> bias_cache;

  /// Fresh (all-zero) cache shaped like `net`.
  static RmspropState for_network(const NetworkState& net, double learning_rate = 1e-3,
                                  double rho = 0.9, double epsilon = 1e-8);

  friend bool operator==(const RmspropState&, const RmspropState&) = default;
};

/// Layer outputs retained by the forward pass. activations[0] is the input
/// batch; activations[l + 1] is the output of layer l.
struct ForwardTrace {
  std::vector<Matrix> activations;

  const Matrix& output() const { return activations.back(); }
};

/// Glorot-uniform weights U(+-sqrt(6 / (fan_in + fan_out))), zero biases.
NetworkState init_network(const NetworkTopology& topology, Rng& rng);

Matrix forward(const NetworkState& net, const Matrix& inputs);
ForwardTrace forward_trace(const NetworkState& net, const Matrix& inputs);

/// Mean over all entries of the squared error.
double loss_mse(const Matrix& predictions, const Matrix& targets);

/// Gradient of loss_mse with respect to `predictions`.
Matrix loss_mse_grad(const Matrix& predictions, const Matrix& targets);

enum class InputGrad { kCompute, kSkip };

/// Backpropagates an upstream gradient dLoss/dOutput through a recorded
/// forward pass.
Gradients backward(const NetworkState& net, const ForwardTrace& trace, const Matrix& output_grad,
                   InputGrad input_grad = InputGrad::kCompute);

/// Gradients of loss_mse(forward(net, inputs), targets).
Gradients backward(const NetworkState& net, const Matrix& inputs, const Matrix& targets);

/// cache <- rho * cache + (1 - rho) * g^2; param <- param - lr * g / (sqrt(cache) + eps)
void rmsprop_step(NetworkState& net, const Gradients& grads, RmspropState& opt);

struct TrainOptions {
  std::size_t epochs = 1;
  std::size_t minibatch = 32;
};

/// Minibatch RMSprop on (inputs -> targets), reshuffled each epoch with `rng`.
/// Returns the mean loss over the last epoch (measured before each step), or
/// the full-dataset loss of the untouched network when epochs == 0.
double train_epochs(NetworkState& net, RmspropState& opt, const Matrix& inputs,
                    const Matrix& targets, const TrainOptions& options, Rng& rng);

}  // namespace testgen::nn
