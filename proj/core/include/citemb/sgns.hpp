#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "citemb/vocab.hpp"

namespace citemb {

struct TrainConfig {
    std::uint32_t dim = 100;
    std::uint32_t window = 5;
    std::uint32_t negatives = 5;
    std::uint32_t epochs = 5;
    double lr_start = 0.025;
    double lr_end = 1e-4;
    double subsample_t = 1e-4;
    std::uint64_t seed = 1;
    std::uint32_t workers = 1;
};

// One period's embedding space. input_vectors holds the published vectors;
// output_vectors is the training-side context matrix and is not persisted.
struct EmbeddingModel {
    std::int32_t period = 0;
    bool aligned = false;
    std::int32_t frame_period = 0;
    std::uint32_t dim = 0;
    Vocabulary vocab;
    std::vector<float> input_vectors;
    std::vector<float> output_vectors;

    std::span<float> input_row(std::uint32_t id) {
        return {input_vectors.data() + static_cast<std::size_t>(id) * dim, dim};
    }
    std::span<const float> input_row(std::uint32_t id) const {
        return {input_vectors.data() + static_cast<std::size_t>(id) * dim, dim};
    }
    std::span<float> output_row(std::uint32_t id) {
        return {output_vectors.data() + static_cast<std::size_t>(id) * dim, dim};
    }
    std::span<const float> output_row(std::uint32_t id) const {
        return {output_vectors.data() + static_cast<std::size_t>(id) * dim, dim};
    }
};

// Logistic function with the argument clamped to |x| <= 30; outside the
// clamp it returns the limit offset by 1e-13 so logs stay finite.
double sigmoid_clamped(double x);

// Negative-sampling loss of one (center, context) pair:
//   -[ log sigma(c.x) + sum_k log sigma(-c.n_k) ]
double pair_loss(std::span<const double> center, std::span<const double> context,
                 const std::vector<std::vector<double>>& negatives);

struct PairGradients {
    std::vector<double> center;
    std::vector<double> context;
    std::vector<std::vector<double>> negatives;
};

// Exact analytic gradients of pair_loss with respect to each input.
PairGradients pair_gradients(std::span<const double> center, std::span<const double> context,
                             const std::vector<std::vector<double>>& negatives);

struct TrainStats {
    std::vector<double> epoch_mean_loss;
    std::uint64_t scheduled_pairs = 0;
};

// Skip-gram negative-sampling training over citing sentences. Deterministic
// (bit-for-bit) for workers == 1; with workers > 1 sentence shards update the
// shared matrices without synchronization and only statistical properties
// are guaranteed.
EmbeddingModel train(std::span<const Sentence> sentences, const Vocabulary& v,
                     const TrainConfig& cfg, std::int32_t period, TrainStats* stats = nullptr);

} // namespace citemb
