#include "testgen/gan.hpp"

#include <algorithm>

#include "testgen/errors.hpp"

namespace testgen::gan {

using detail::require;
using nn::Activation;
using nn::Matrix;

nn::NetworkTopology generator_topology() {
  return {kLatentDim,
          {{128, Activation::kTanh},
           {128, Activation::kTanh},
           {128, Activation::kTanh},
           {kTestDim, Activation::kTanh}}};
}

nn::NetworkTopology discriminator_topology() {
  return {kTestDim,
          {{8, Activation::kTanh},
           {8, Activation::kTanh},
           {8, Activation::kTanh},
           {1, Activation::kRelu}}};
}

void GanHyperparams::validate() const {
  require(disc_epochs >= 1, "gan: disc_epochs must be >= 1");
  require(gen_epochs >= 1, "gan: gen_epochs must be >= 1");
  require(gen_samples_per_round >= 1, "gan: gen_samples_per_round must be >= 1");
  require(minibatch >= 1, "gan: minibatch must be >= 1");
}

GanModel init_gan(const GanHyperparams& hp, Rng& rng) {
  hp.validate();
  GanModel gan;
  gan.generator = nn::init_network(generator_topology(), rng);
  gan.discriminator = nn::init_network(discriminator_topology(), rng);
  gan.latent_dim = kLatentDim;
  gan.gen_opt = nn::RmspropState::for_network(gan.generator);
  gan.disc_opt = nn::RmspropState::for_network(gan.discriminator);
  return gan;
}

namespace {

Matrix draw_latent(std::size_t rows, std::size_t dim, Rng& rng) {
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  Matrix z(rows, dim);
  for (double& v : z.values()) v = noise(rng);
  return z;
}

struct CompositePass {
  double loss = 0.0;
  nn::Gradients grads;
};

// Loss of D(G(z)) against a constant target of 1, backpropagated through the
// discriminator into the generator parameters.
CompositePass composite_pass(const GanModel& gan, const Matrix& latent) {
  const nn::ForwardTrace gen_trace = nn::forward_trace(gan.generator, latent);
  const nn::ForwardTrace disc_trace = nn::forward_trace(gan.discriminator, gen_trace.output());
  const Matrix ones(latent.rows(), 1, 1.0);
  const nn::Gradients through_disc = nn::backward(
      gan.discriminator, disc_trace, nn::loss_mse_grad(disc_trace.output(), ones));
  return {nn::loss_mse(disc_trace.output(), ones),
          nn::backward(gan.generator, gen_trace, through_disc.input_grad, nn::InputGrad::kSkip)};
}

}  // namespace

Matrix sample_candidates(const GanModel& gan, std::size_t k, Rng& rng) {
  require(k >= 1, "sample_candidates: k must be >= 1");
  return nn::forward(gan.generator, draw_latent(k, gan.latent_dim, rng));
}

std::vector<double> predict_fitness(const GanModel& gan, const Matrix& inputs) {
  const Matrix out = nn::forward(gan.discriminator, inputs);
  return {out.values().begin(), out.values().end()};
}

double train_discriminator(GanModel& gan, const TrainingSet& suite, const GanHyperparams& hp,
                           Rng& rng) {
  hp.validate();
  require(suite.inputs.rows() > 0, "train_discriminator: empty suite");
  require(suite.inputs.rows() == suite.fitness.size(),
          "train_discriminator: inputs and fitness sizes differ");
  Matrix targets(suite.fitness.size(), 1);
  std::copy(suite.fitness.begin(), suite.fitness.end(), targets.values().begin());
  return nn::train_epochs(gan.discriminator, gan.disc_opt, suite.inputs, targets,
                          {hp.disc_epochs, hp.minibatch}, rng);
}

nn::Gradients generator_gradients(const GanModel& gan, const Matrix& latent) {
  return composite_pass(gan, latent).grads;
}

double train_generator(GanModel& gan, const GanHyperparams& hp, Rng& rng) {
  hp.validate();
  const std::size_t n = hp.gen_samples_per_round;
  double epoch_loss = 0.0;
  for (std::size_t epoch = 0; epoch < hp.gen_epochs; ++epoch) {
    const Matrix latent = draw_latent(n, gan.latent_dim, rng);
    epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += hp.minibatch) {
      const std::size_t count = std::min(hp.minibatch, n - start);
      Matrix zb(count, gan.latent_dim);
      for (std::size_t i = 0; i < count; ++i) {
        const auto src = latent.row(start + i);
        std::copy(src.begin(), src.end(), zb.row(i).begin());
      }
      const CompositePass pass = composite_pass(gan, zb);
      epoch_loss += pass.loss * static_cast<double>(count);
      nn::rmsprop_step(gan.generator, pass.grads, gan.gen_opt);
    }
    epoch_loss /= static_cast<double>(n);
  }
  return epoch_loss;
}

void train_gan(GanModel& gan, const TrainingSet& suite, const GanHyperparams& hp,
               Rng& shuffle_rng, Rng& latent_rng) {
  train_discriminator(gan, suite, hp, shuffle_rng);
  GanHyperparams gen_hp = hp;
  gen_hp.gen_samples_per_round = std::max(hp.gen_samples_per_round, suite.inputs.rows());
  train_generator(gan, gen_hp, latent_rng);
}

}  // namespace testgen::gan
