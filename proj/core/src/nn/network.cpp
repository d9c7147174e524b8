#include "gcl/nn/network.hpp"

#include <cmath>
#include <random>

#include "gcl/error.hpp"

namespace gcl::nn {

const char* to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::identity: return "identity";
  }
  return "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "identity") return Activation::identity;
  throw Error(ErrorKind::format, "unknown activation '" + name + "'");
}

Network::Network(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.in_dim() == 0 || l.out_dim() == 0) {
      throw Error(ErrorKind::dimension, "layer " + std::to_string(i) + " has a zero dimension");
    }
    if (l.bias.rows() != 1 || l.bias.cols() != l.out_dim()) {
      throw Error(ErrorKind::dimension, "layer " + std::to_string(i) + " bias shape " +
                                            l.bias.shape_string() + " does not match out_dim " +
                                            std::to_string(l.out_dim()));
    }
    if (i > 0 && layers_[i - 1].out_dim() != l.in_dim()) {
      throw Error(ErrorKind::dimension,
                  "layer " + std::to_string(i) + " expects in_dim " + std::to_string(l.in_dim()) +
                      " but layer " + std::to_string(i - 1) + " produces " +
                      std::to_string(layers_[i - 1].out_dim()));
    }
  }
}

std::size_t Network::input_dim() const {
  if (layers_.empty()) throw Error(ErrorKind::state, "empty network has no input dimension");
  return layers_.front().in_dim();
}

std::size_t Network::output_dim() const {
  if (layers_.empty()) throw Error(ErrorKind::state, "empty network has no output dimension");
  return layers_.back().out_dim();
}

std::vector<std::size_t> Network::dims() const {
  std::vector<std::size_t> d;
  if (layers_.empty()) return d;
  d.push_back(layers_.front().in_dim());
  for (const auto& l : layers_) d.push_back(l.out_dim());
  return d;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

Gradients Network::zeros_like() const {
  Gradients g;
  g.reserve(layers_.size());
  for (const auto& l : layers_) {
    g.push_back({Matrix(l.in_dim(), l.out_dim()), Matrix(1, l.out_dim())});
  }
  return g;
}

bool operator==(const Network& a, const Network& b) {
  if (a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t i = 0; i < a.layers_.size(); ++i) {
    const auto& x = a.layers_[i];
    const auto& y = b.layers_[i];
    if (x.activation != y.activation || !(x.weights == y.weights) || !(x.bias == y.bias)) {
      return false;
    }
  }
  return true;
}

Network init_network(const std::vector<std::size_t>& dims,
                     const std::vector<Activation>& activations, std::uint64_t seed) {
  if (dims.size() < 2) {
    throw Error(ErrorKind::config, "init_network needs at least two dims (input and output)");
  }
  if (activations.size() != dims.size() - 1) {
    throw Error(ErrorKind::config, "init_network: " + std::to_string(dims.size() - 1) +
                                       " layers but " + std::to_string(activations.size()) +
                                       " activations");
  }
  std::mt19937_64 rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const std::size_t fan_in = dims[i];
    const std::size_t fan_out = dims[i + 1];
    if (fan_in == 0 || fan_out == 0) {
      throw Error(ErrorKind::config, "init_network: zero-width layer at index " + std::to_string(i));
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    DenseLayer layer{Matrix(fan_in, fan_out), Matrix(1, fan_out), activations[i]};
    for (double& w : layer.weights.values()) w = dist(rng);
    layers.push_back(std::move(layer));
  }
  return Network(std::move(layers));
}

namespace {

void apply_activation(Activation a, Matrix& m) {
  switch (a) {
    case Activation::relu:
      for (double& v : m.values()) v = v > 0.0 ? v : 0.0;
      break;
    case Activation::sigmoid:
      for (double& v : m.values()) {
        // Split form avoids overflow in exp for large |v|.
        if (v >= 0.0) {
          v = 1.0 / (1.0 + std::exp(-v));
        } else {
          const double e = std::exp(v);
          v = e / (1.0 + e);
        }
      }
      break;
    case Activation::identity:
      break;
  }
}

// delta *= f'(z), expressed through the stored output y = f(z).
void apply_activation_grad(Activation a, const Matrix& output, Matrix& delta) {
  auto y = output.values();
  auto g = delta.values();
  switch (a) {
    case Activation::relu:
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = y[i] > 0.0 ? g[i] : 0.0;
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= y[i] * (1.0 - y[i]);
      break;
    case Activation::identity:
      break;
  }
}

}  // namespace

Matrix forward(const Network& net, const Matrix& input, Tape* tape) {
  if (net.depth() == 0) throw Error(ErrorKind::state, "forward on an empty network");
  if (tape) tape->clear();
  Matrix current = input;
  for (std::size_t i = 0; i < net.depth(); ++i) {
    const auto& layer = net.layers()[i];
    if (current.cols() != layer.in_dim()) {
      throw Error(ErrorKind::dimension,
                  "forward: layer " + std::to_string(i) + " expects " +
                      std::to_string(layer.in_dim()) + " input columns, got " +
                      current.shape_string());
    }
    Matrix z = matmul(current, layer.weights);
    const double* b = layer.bias.row(0).data();
    for (std::size_t r = 0; r < z.rows(); ++r) {
      double* zr = z.row(r).data();
      for (std::size_t c = 0; c < z.cols(); ++c) zr[c] += b[c];
    }
    apply_activation(layer.activation, z);
    if (tape) tape->inputs.push_back(std::move(current));
    current = std::move(z);
    if (tape) tape->outputs.push_back(current);
  }
  return current;
}

Gradients backward(const Network& net, const Tape& tape, const Matrix& loss_grad) {
  if (tape.empty()) throw Error(ErrorKind::state, "backward called before forward");
  if (tape.outputs.size() != net.depth() || tape.inputs.size() != net.depth()) {
    throw Error(ErrorKind::state, "backward: tape was recorded for a different network");
  }
  if (!loss_grad.same_shape(tape.outputs.back())) {
    throw Error(ErrorKind::dimension, "backward: loss gradient shape " +
                                          loss_grad.shape_string() + " does not match output " +
                                          tape.outputs.back().shape_string());
  }
  Gradients grads(net.depth());
  Matrix delta = loss_grad;
  for (std::size_t i = net.depth(); i-- > 0;) {
    const auto& layer = net.layers()[i];
    if (!tape.outputs[i].same_shape(delta) || tape.inputs[i].cols() != layer.in_dim()) {
      throw Error(ErrorKind::state,
                  "backward: tape shapes do not match layer " + std::to_string(i));
    }
    apply_activation_grad(layer.activation, tape.outputs[i], delta);
    grads[i].weights = matmul_tn(tape.inputs[i], delta);
    grads[i].bias = Matrix(1, layer.out_dim());
    double* gb = grads[i].bias.row(0).data();
    for (std::size_t r = 0; r < delta.rows(); ++r) {
      const double* dr = delta.row(r).data();
      for (std::size_t c = 0; c < delta.cols(); ++c) gb[c] += dr[c];
    }
    if (i > 0) delta = matmul_nt(delta, layer.weights);
  }
  return grads;
}

}  // namespace gcl::nn
