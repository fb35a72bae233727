#include "testgen/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "testgen/errors.hpp"

namespace testgen::nn {

using detail::require;

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
  Matrix m(rows.size(), cols);
  std::size_t r = 0;
  for (const auto& row : rows) {
    require(row.size() == cols, "Matrix::from_rows: ragged rows");
    std::copy(row.begin(), row.end(), m.row(r).begin());
    ++r;
  }
  return m;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void NetworkTopology::validate() const {
  require(input_dim >= 1, "network topology: input_dim must be >= 1");
  require(!layers.empty(), "network topology: at least one layer is required");
  for (const auto& layer : layers) {
    require(layer.units >= 1, "network topology: every layer needs >= 1 unit");
  }
}

std::size_t NetworkState::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

RmspropState RmspropState::for_network(const NetworkState& net, double learning_rate, double rho,
                                       double epsilon) {
  require(learning_rate > 0.0, "rmsprop: learning_rate must be positive");
  require(rho > 0.0 && rho < 1.0, "rmsprop: rho must lie in (0, 1)");
  require(epsilon > 0.0, "rmsprop: epsilon must be positive");
  RmspropState opt;
  opt.learning_rate = learning_rate;
  opt.rho = rho;
  opt.epsilon = epsilon;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    opt.weight_cache.emplace_back(net.weights[l].rows(), net.weights[l].cols());
    opt.bias_cache.emplace_back(net.biases[l].size(), 0.0);
  }
  return opt;
}

NetworkState init_network(const NetworkTopology& topology, Rng& rng) {
  topology.validate();
  NetworkState net;
  net.topology = topology;
  std::size_t fan_in = topology.input_dim;
  for (const auto& layer : topology.layers) {
    const std::size_t fan_out = layer.units;
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Matrix w(fan_in, fan_out);
    for (double& v : w.values()) v = dist(rng);
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(fan_out, 0.0);
    fan_in = fan_out;
  }
  return net;
}

namespace {

void check_inputs(const NetworkState& net, const Matrix& inputs) {
  if (inputs.cols() != net.topology.input_dim) {
    throw ContractViolation("forward: expected " + std::to_string(net.topology.input_dim) +
                            " input columns, got " + std::to_string(inputs.cols()));
  }
  require(inputs.all_finite(), "forward: inputs must be finite");
}

// out = act(in * w + b)
Matrix dense(const Matrix& in, const Matrix& w, const std::vector<double>& b,
             Activation activation) {
  const std::size_t n_out = w.cols();
  Matrix out(in.rows(), n_out);
  for (std::size_t r = 0; r < in.rows(); ++r) {
    double* o = out.row(r).data();
    std::copy(b.begin(), b.end(), o);
    const auto x = in.row(r);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double a = x[k];
      const double* wk = w.row(k).data();
      for (std::size_t j = 0; j < n_out; ++j) o[j] += a * wk[j];
    }
  }
  switch (activation) {
    case Activation::kTanh:
      for (double& v : out.values()) v = std::tanh(v);
      break;
    case Activation::kRelu:
      for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
      break;
    case Activation::kLinear:
      break;
  }
  return out;
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractViolation(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) +
                            "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                            "x" + std::to_string(b.cols()) + ")");
  }
}

}  // namespace

ForwardTrace forward_trace(const NetworkState& net, const Matrix& inputs) {
  check_inputs(net, inputs);
  ForwardTrace trace;
  trace.activations.reserve(net.weights.size() + 1);
  trace.activations.push_back(inputs);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    trace.activations.push_back(dense(trace.activations.back(), net.weights[l], net.biases[l],
                                      net.topology.layers[l].activation));
  }
  return trace;
}

Matrix forward(const NetworkState& net, const Matrix& inputs) {
  check_inputs(net, inputs);
  Matrix current = inputs;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    current = dense(current, net.weights[l], net.biases[l], net.topology.layers[l].activation);
  }
  return current;
}

double loss_mse(const Matrix& predictions, const Matrix& targets) {
  check_same_shape(predictions, targets, "loss_mse");
  require(predictions.size() > 0, "loss_mse: empty matrices");
  const auto p = predictions.values();
  const auto t = targets.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - t[i];
    sum += d * d;
  }
  return sum / static_cast<double>(p.size());
}

Matrix loss_mse_grad(const Matrix& predictions, const Matrix& targets) {
  check_same_shape(predictions, targets, "loss_mse_grad");
  require(predictions.size() > 0, "loss_mse_grad: empty matrices");
  Matrix g(predictions.rows(), predictions.cols());
  const double scale = 2.0 / static_cast<double>(predictions.size());
  const auto p = predictions.values();
  const auto t = targets.values();
  auto out = g.values();
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = scale * (p[i] - t[i]);
  return g;
}

Gradients backward(const NetworkState& net, const ForwardTrace& trace, const Matrix& output_grad,
                   InputGrad input_grad) {
  const std::size_t n_layers = net.weights.size();
  require(trace.activations.size() == n_layers + 1, "backward: trace does not match network");
  check_same_shape(trace.output(), output_grad, "backward");

  Gradients grads;
  grads.weight_grads.resize(n_layers);
  grads.bias_grads.resize(n_layers);

  Matrix delta = output_grad;
  for (std::size_t l = n_layers; l-- > 0;) {
    const Matrix& out = trace.activations[l + 1];
    const Matrix& in = trace.activations[l];
    auto d = delta.values();
    const auto a = out.values();
    switch (net.topology.layers[l].activation) {
      case Activation::kTanh:
        for (std::size_t i = 0; i < d.size(); ++i) d[i] *= 1.0 - a[i] * a[i];
        break;
      case Activation::kRelu:
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] > 0.0 ? d[i] : 0.0;
        break;
      case Activation::kLinear:
        break;
    }

    const Matrix& w = net.weights[l];
    const std::size_t fan_in = w.rows();
    const std::size_t fan_out = w.cols();

    Matrix dw(fan_in, fan_out);
    std::vector<double> db(fan_out, 0.0);
    for (std::size_t r = 0; r < delta.rows(); ++r) {
      const double* dr = delta.row(r).data();
      const auto x = in.row(r);
      for (std::size_t k = 0; k < fan_in; ++k) {
        const double xk = x[k];
        double* dwk = dw.row(k).data();
        for (std::size_t j = 0; j < fan_out; ++j) dwk[j] += xk * dr[j];
      }
      for (std::size_t j = 0; j < fan_out; ++j) db[j] += dr[j];
    }
    grads.weight_grads[l] = std::move(dw);
    grads.bias_grads[l] = std::move(db);

    if (l == 0 && input_grad == InputGrad::kSkip) break;

    Matrix prev(delta.rows(), fan_in);
    for (std::size_t r = 0; r < delta.rows(); ++r) {
      const double* dr = delta.row(r).data();
      double* pr = prev.row(r).data();
      for (std::size_t k = 0; k < fan_in; ++k) {
        const double* wk = w.row(k).data();
        double s = 0.0;
        for (std::size_t j = 0; j < fan_out; ++j) s += wk[j] * dr[j];
        pr[k] = s;
      }
    }
    delta = std::move(prev);
  }
  if (input_grad == InputGrad::kCompute) grads.input_grad = std::move(delta);
  return grads;
}

Gradients backward(const NetworkState& net, const Matrix& inputs, const Matrix& targets) {
  const ForwardTrace trace = forward_trace(net, inputs);
  return backward(net, trace, loss_mse_grad(trace.output(), targets));
}

namespace {

void rmsprop_update(std::span<double> params, std::span<const double> grads,
                    std::span<double> cache, const RmspropState& opt) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    cache[i] = opt.rho * cache[i] + (1.0 - opt.rho) * g * g;
    params[i] -= opt.learning_rate * g / (std::sqrt(cache[i]) + opt.epsilon);
  }
}

}  // namespace

void rmsprop_step(NetworkState& net, const Gradients& grads, RmspropState& opt) {
  const std::size_t n_layers = net.weights.size();
  require(grads.weight_grads.size() == n_layers && grads.bias_grads.size() == n_layers &&
              opt.weight_cache.size() == n_layers && opt.bias_cache.size() == n_layers,
          "rmsprop_step: layer count mismatch");
  for (std::size_t l = 0; l < n_layers; ++l) {
    check_same_shape(net.weights[l], grads.weight_grads[l], "rmsprop_step");
    check_same_shape(net.weights[l], opt.weight_cache[l], "rmsprop_step");
    require(grads.bias_grads[l].size() == net.biases[l].size() &&
                opt.bias_cache[l].size() == net.biases[l].size(),
            "rmsprop_step: bias shape mismatch");
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    rmsprop_update(net.weights[l].values(), grads.weight_grads[l].values(),
                   opt.weight_cache[l].values(), opt);
    rmsprop_update(net.biases[l], grads.bias_grads[l], opt.bias_cache[l], opt);
  }
}

double train_epochs(NetworkState& net, RmspropState& opt, const Matrix& inputs,
                    const Matrix& targets, const TrainOptions& options, Rng& rng) {
  require(inputs.rows() > 0, "train_epochs: empty dataset");
  require(inputs.rows() == targets.rows(), "train_epochs: inputs/targets row mismatch");
  require(targets.cols() == net.topology.output_dim(), "train_epochs: target width mismatch");
  require(options.minibatch >= 1, "train_epochs: minibatch must be >= 1");

  if (options.epochs == 0) return loss_mse(forward(net, inputs), targets);

  const std::size_t n = inputs.rows();
  std::vector<std::size_t> order(n);
  double epoch_loss = 0.0;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += options.minibatch) {
      const std::size_t count = std::min(options.minibatch, n - start);
      Matrix xb(count, inputs.cols());
      Matrix yb(count, targets.cols());
      for (std::size_t i = 0; i < count; ++i) {
        const auto src_x = inputs.row(order[start + i]);
        const auto src_y = targets.row(order[start + i]);
        std::copy(src_x.begin(), src_x.end(), xb.row(i).begin());
        std::copy(src_y.begin(), src_y.end(), yb.row(i).begin());
      }
      const ForwardTrace trace = forward_trace(net, xb);
      epoch_loss += loss_mse(trace.output(), yb) * static_cast<double>(count);
      const Gradients g =
          backward(net, trace, loss_mse_grad(trace.output(), yb), InputGrad::kSkip);
      rmsprop_step(net, g, opt);
    }
    epoch_loss /= static_cast<double>(n);
  }
  return epoch_loss;
}

}  // namespace testgen::nn
