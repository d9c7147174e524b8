#include "gcl/coop/steps.hpp"

#include <cmath>

#include "gcl/error.hpp"

namespace gcl::coop {

double train_discriminator_step(nn::Network& disc, nn::RmspropState& opt, const nn::Matrix& batch,
                                std::span<const double> targets) {
  nn::Tape tape;
  const nn::Matrix probs = nn::forward(disc, batch, &tape);
  const auto loss = nn::bce_loss(probs, targets);
  if (!std::isfinite(loss.value)) {
    throw Error(ErrorKind::numeric, "discriminator loss is not finite");
  }
  nn::rmsprop_step(opt, disc, nn::backward(disc, tape, loss.grad));
  return loss.value;
}

GeneratorStep train_generator_step(nn::Network& gen, nn::RmspropState& opt,
                                   const nn::Matrix& batch, const NlTargetBatch& targets,
                                   nn::NormKind norm) {
  if (!targets.targets.same_shape(batch)) {
    throw Error(ErrorKind::dimension, "generator step: targets " + targets.targets.shape_string() +
                                          " vs batch " + batch.shape_string());
  }
  GeneratorStep step;
  step.rows_used = targets.included();
  if (step.rows_used == 0) {
    step.skipped = true;
    return step;
  }
  nn::Tape tape;
  const nn::Matrix recon = nn::forward(gen, batch, &tape);
  const auto loss = nn::reconstruction_loss(recon, targets.targets, targets.include, norm);
  if (!std::isfinite(loss.value)) throw Error(ErrorKind::numeric, "generator loss is not finite");
  step.loss = loss.value;
  nn::rmsprop_step(opt, gen, nn::backward(gen, tape, loss.grad));
  return step;
}

GeneratorStep train_autoencoder_step(nn::Network& gen, nn::RmspropState& opt,
                                     const nn::Matrix& batch, nn::NormKind norm) {
  NlTargetBatch plain{batch, std::vector<std::uint8_t>(batch.rows(), 1), false};
  return train_generator_step(gen, opt, batch, plain, norm);
}

}  // namespace gcl::coop
