#include "hybran/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace hybran {

std::string to_string(Activation act) {
    switch (act) {
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
        case Activation::Identity: return "identity";
    }
    throw std::invalid_argument("to_string: unknown activation");
}

Activation activation_from_string(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "relu") return Activation::Relu;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + name);
}

std::size_t NeuralNet::parameter_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers) n += l.w.size() + l.b.size();
    return n;
}

void NeuralNet::validate() const {
    if (layers.empty()) throw std::invalid_argument("NeuralNet: no layers");
    std::size_t prev = layers.front().in;
    for (const Layer& l : layers) {
        if (l.in == 0 || l.out == 0) throw std::invalid_argument("NeuralNet: zero-sized layer");
        if (l.in != prev) throw std::invalid_argument("NeuralNet: layer dimensions do not chain");
        if (l.w.size() != l.in * l.out || l.b.size() != l.out)
            throw std::invalid_argument("NeuralNet: parameter size mismatch");
        for (double v : l.w)
            if (!std::isfinite(v)) throw std::invalid_argument("NeuralNet: non-finite weight");
        for (double v : l.b)
            if (!std::isfinite(v)) throw std::invalid_argument("NeuralNet: non-finite bias");
        prev = l.out;
    }
}

namespace {

inline double apply_act(Activation act, double z) {
    switch (act) {
        case Activation::Tanh: return std::tanh(z);
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Identity: return z;
    }
    return z;
}

}  // namespace

void forward_into(const NeuralNet& net, std::span<const double> input,
                  std::vector<double>& scratch, std::vector<double>& output) {
    if (net.layers.empty()) throw std::invalid_argument("forward: empty network");
    if (input.size() != net.input_size())
        throw std::invalid_argument("forward: input dimension mismatch");

    scratch.assign(input.begin(), input.end());
    for (const Layer& l : net.layers) {
        output.resize(l.out);
        for (std::size_t o = 0; o < l.out; ++o) {
            double acc = l.b[o];
            const double* row = l.w.data() + o * l.in;
            for (std::size_t j = 0; j < l.in; ++j) acc += row[j] * scratch[j];
            output[o] = apply_act(l.act, acc);
        }
        scratch.swap(output);
    }
    output.swap(scratch);
}

std::vector<double> forward(const NeuralNet& net, std::span<const double> input) {
    std::vector<double> scratch, output;
    forward_into(net, input, scratch, output);
    return output;
}

}  // namespace hybran
