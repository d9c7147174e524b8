#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gcl/nn/matrix.hpp"

namespace gcl::nn {

enum class Activation { relu, sigmoid, identity };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct DenseLayer {
  Matrix weights;  // in_dim x out_dim
  Matrix bias;     // 1 x out_dim
  Activation activation = Activation::identity;

  std::size_t in_dim() const noexcept { return weights.rows(); }
  std::size_t out_dim() const noexcept { return weights.cols(); }
};

// Per-layer tensors shaped like a layer's parameters. Used for gradients and
// for optimizer accumulators.
struct LayerTensors {
  Matrix weights;
  Matrix bias;
};
using Gradients = std::vector<LayerTensors>;

class Network {
 public:
  Network() = default;
  /// Validates that consecutive layers are dimension-compatible.
  explicit Network(std::vector<DenseLayer> layers);

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t input_dim() const;
  std::size_t output_dim() const;
  /// [in_dim of layer 0, out_dim of layer 0, out_dim of layer 1, ...]
  std::vector<std::size_t> dims() const;
  std::size_t parameter_count() const;

  /// Zero-filled tensors shaped like this network's parameters.
  Gradients zeros_like() const;

  friend bool operator==(const Network&, const Network&);

 private:
  std::vector<DenseLayer> layers_;
};

/// Builds a dense chain with the uniform fan-based init
/// U(-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))) and zero biases.
/// `activations` has one entry per layer (dims.size() - 1).
Network init_network(const std::vector<std::size_t>& dims,
                     const std::vector<Activation>& activations,
                     std::uint64_t seed);

/// Activations cached by forward() for use in backward().
struct Tape {
  std::vector<Matrix> inputs;   // input to layer i
  std::vector<Matrix> outputs;  // post-activation output of layer i

  bool empty() const noexcept { return outputs.empty(); }
  void clear() {
    inputs.clear();
    outputs.clear();
  }
};

/// Runs the chain on a b x in_dim input. When `tape` is non-null it is
/// overwritten with the per-layer activations.
Matrix forward(const Network& net, const Matrix& input, Tape* tape = nullptr);

/// Reverse-mode pass for dLoss/dOutput = `loss_grad`, using the activations
/// recorded by the last forward() into `tape`.
Gradients backward(const Network& net, const Tape& tape, const Matrix& loss_grad);

}  // namespace gcl::nn
