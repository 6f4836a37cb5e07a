#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hybran/dataset.hpp"
#include "hybran/nn.hpp"

namespace hybran {

/// Adam and Sgd run epoch-based gradient descent; Lm is damped Gauss-Newton
/// (Levenberg-Marquardt), the method of choice for small least-squares nets
/// with sharp features. For Lm, `epochs` caps the outer iterations and the
/// learning-rate fields are ignored.
enum class Optimizer { Adam, Sgd, Lm };

std::string to_string(Optimizer opt);
Optimizer optimizer_from_string(const std::string& name);

/// Layer sizes n0..nL plus one activation per layer 1..L.
struct Arch {
    std::vector<std::size_t> sizes;
    std::vector<Activation> activations;
};

/// in -> hidden (act) -> out (linear), the shape used for every local model.
Arch one_hidden(std::size_t in, std::size_t hidden, std::size_t out,
                Activation act = Activation::Tanh);

/// Xavier draws every weight uniform with scale sqrt(6/(n_in+n_out)).
/// NguyenWidrow spreads the hidden-unit transition regions across the
/// dataset's input ranges. SteepMix keeps half the hidden units Xavier and
/// turns the rest into steep axis-aligned ramp candidates (log-spread slopes,
/// zero output weight), which is what piecewise or switching targets need.
enum class InitScheme { Xavier, NguyenWidrow, SteepMix };

std::string to_string(InitScheme scheme);
InitScheme init_scheme_from_string(const std::string& name);

struct TrainConfig {
    int epochs = 2000;
    double learning_rate = 1e-3;
    /// When > 0, the learning rate follows a cosine schedule from
    /// learning_rate down to this value over the epochs.
    double final_learning_rate = 0.0;
    Optimizer optimizer = Optimizer::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int batch = 0;  // 0 = full batch
    std::uint64_t seed = 0;
    InitScheme init = InitScheme::Xavier;
    /// Independent re-initializations; the net with the lowest training MSE
    /// wins. Restart r derives its init seed from (seed, r), so results stay
    /// deterministic.
    int restarts = 1;
    /// Stop restarting early once the training MSE reaches this value
    /// (0 = always run all restarts).
    double restart_target = 0.0;
    /// When > 0, this fraction of the pairs (seeded shuffle) is held out of
    /// the fit and restarts are ranked by their held-out MSE instead of the
    /// training MSE. Guards restart selection against overfit sharp fits.
    double validation_fraction = 0.0;
    bool record_history = false;
};

struct TrainResult {
    NeuralNet net;
    /// MSE of the returned network on the training pairs, recomputed with the
    /// public forward pass.
    double final_loss = 0.0;
    std::vector<double> loss_history;
    double seconds = 0.0;
};

/// Xavier-uniform weights (scale sqrt(6/(n_in+n_out))), zero biases;
/// deterministic in the seed.
NeuralNet init_net(const Arch& arch, std::uint64_t seed);

/// Minimizes mean squared one-step error over the dataset by full-batch (or
/// minibatch) gradient descent. Throws EmptyDatasetError on an empty dataset
/// and TrainingDivergedError when the loss becomes non-finite.
TrainResult train(const CellDataset& dataset, const Arch& arch, const TrainConfig& cfg);

struct TrainAllResult {
    std::vector<NeuralNet> nets;  // index-aligned with the datasets
    std::vector<double> losses;
    std::vector<double> cell_seconds;
    double wall_seconds = 0.0;
};

/// Trains one network per cell, each with derived seed (cfg.seed XOR cell
/// index), so results are bitwise identical for any worker count. threads = 0
/// uses worker_threads(). Per-cell errors are rethrown with the cell index.
TrainAllResult train_all(std::span<const CellDataset> datasets, const Arch& arch,
                         const TrainConfig& cfg, unsigned threads = 0);

/// Max relative disagreement between backprop gradients of the squared error
/// at one pair and central finite differences (h = 1e-5).
double gradient_check(const NeuralNet& net,
                      const std::pair<std::vector<double>, std::vector<double>>& pair);

}  // namespace hybran
