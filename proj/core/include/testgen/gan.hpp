#pragma once

#include <cstddef>
#include <vector>

#include "testgen/nn.hpp"
#include "testgen/rng.hpp"

namespace testgen::gan {

inline constexpr std::size_t kLatentDim = 100;
inline constexpr std::size_t kTestDim = 6;

/// 100 -> 128, 128, 128 (tanh) -> 6 (tanh).
nn::NetworkTopology generator_topology();

/// 6 -> 8, 8, 8 (tanh) -> 1 (relu).
nn::NetworkTopology discriminator_topology();

/// Online training schedule.
struct GanHyperparams {
  std::size_t disc_epochs = 10;
  std::size_t gen_epochs = 10;
  /// Lower bound on latent vectors per generator epoch; train_gan raises it
  /// to the suite size.
  std::size_t gen_samples_per_round = 32;
  std::size_t minibatch = 32;

  /// Throws ContractViolation if any field is zero.
  void validate() const;
};

struct GanModel {
  nn::NetworkState generator;
  nn::NetworkState discriminator;
  std::size_t latent_dim = kLatentDim;
  nn::RmspropState gen_opt;
  nn::RmspropState disc_opt;
};

/// Executed tests in normalized form with their measured fitness.
struct TrainingSet {
  nn::Matrix inputs;             // n x 6, entries in [-1, 1]
  std::vector<double> fitness;   // n values in [0, 1]
};

GanModel init_gan(const GanHyperparams& hp, Rng& rng);

/// k fresh latent vectors from U(-1, 1)^100 pushed through the generator.
nn::Matrix sample_candidates(const GanModel& gan, std::size_t k, Rng& rng);

/// Raw relu output of the discriminator, one value per input row. Not clamped
/// to 1.
std::vector<double> predict_fitness(const GanModel& gan, const nn::Matrix& inputs);

/// Regression of the discriminator onto measured fitness. The generator is
/// not touched. Returns the last-epoch mean loss.
double train_discriminator(GanModel& gan, const TrainingSet& suite, const GanHyperparams& hp,
                           Rng& rng);

/// Trains the generator through the frozen discriminator towards a predicted
/// fitness of 1. The discriminator is not touched. Returns the last-epoch
/// mean loss.
double train_generator(GanModel& gan, const GanHyperparams& hp, Rng& rng);

/// Gradient of mean((D(G(z)) - 1)^2) with respect to the generator
/// parameters for a fixed latent batch.
nn::Gradients generator_gradients(const GanModel& gan, const nn::Matrix& latent);

/// train_discriminator on the full suite, then train_generator with
/// gen_samples_per_round raised to at least the suite size.
void train_gan(GanModel& gan, const TrainingSet& suite, const GanHyperparams& hp,
               Rng& shuffle_rng, Rng& latent_rng);

}  // namespace testgen::gan
