#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hybran {

enum class Activation { Tanh, Relu, Identity };

std::string to_string(Activation act);
Activation activation_from_string(const std::string& name);

/// One dense layer: out = act(W * in + b), W stored row-major (out x in).
struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> w;
    std::vector<double> b;
    Activation act = Activation::Tanh;
};

/// Feedforward network applied layer by layer. Immutable after training.
struct NeuralNet {
    std::vector<Layer> layers;

    std::size_t input_size() const { return layers.empty() ? 0 : layers.front().in; }
    std::size_t output_size() const { return layers.empty() ? 0 : layers.back().out; }
    std::size_t parameter_count() const;

    /// Throws std::invalid_argument unless layer dimensions chain and all
    /// parameters are finite.
    void validate() const;
};

/// Evaluates the network. Throws on an input dimension mismatch.
std::vector<double> forward(const NeuralNet& net, std::span<const double> input);

/// Allocation-free variant for hot loops; scratch is resized as needed.
void forward_into(const NeuralNet& net, std::span<const double> input,
                  std::vector<double>& scratch, std::vector<double>& output);

}  // namespace hybran
