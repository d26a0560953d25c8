#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "advsmo/candidates.hpp"

namespace advsmo {

/// Per-feature (min, max) used to map (k1, theta) into the unit square.
struct InputNorm {
    std::array<double, 2> min{3.0, 0.0};
    std::array<double, 2> max{15.0, 90.0};

    void validate() const;
    static InputNorm from_pairs(std::span<const CandidatePair> pairs);
};

std::array<double, 2> normalize_input(const CandidatePair& pair, const InputNorm& norm);

/// Fully connected 2 -> 10 -> 1 network: tanh hidden layer, linear output.
struct SurrogateModel {
    static constexpr int kInputs = 2;
    static constexpr int kHidden = 10;
    static constexpr std::size_t kParamCount = kHidden * kInputs + kHidden + kHidden + 1;

    std::array<double, kHidden * kInputs> w1{};  // row-major [hidden][input]
    std::array<double, kHidden> b1{};
    std::array<double, kHidden> w2{};
    double b2 = 0.0;
    InputNorm input_norm;
    std::uint64_t seed = 0;
    int epochs_trained = 0;

    /// Flat parameter view in the order w1, b1, w2, b2.
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> flat);

    double forward(std::span<const double, 2> input) const;
    double predict(const CandidatePair& pair) const;
};

struct TrainConfig {
    int epochs = 700;
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SurrogateSample {
    CandidatePair pair;
    double ssim = 0.0;
};

/// Full-batch mean squared error of the model on normalized samples.
double batch_loss(const SurrogateModel& model, std::span<const std::array<double, 2>> inputs,
                  std::span<const double> targets);

/// Analytic gradient of batch_loss with respect to parameters(), same order.
std::vector<double> batch_gradient(const SurrogateModel& model, std::span<const std::array<double, 2>> inputs,
                                   std::span<const double> targets);

/// Weights drawn uniformly from [-0.5, 0.5] using `seed`.
SurrogateModel init_model(std::uint64_t seed, const InputNorm& norm);

struct TrainResult {
    SurrogateModel model;
    std::vector<double> loss_curve;  // loss after each epoch
};

TrainResult train(std::span<const SurrogateSample> dataset, const TrainConfig& cfg);

/// Linearly interpolated empirical quantile (q in [0, 1]) of unsorted values.
double quantile(std::vector<double> values, double q);

/// (q_lo, q_hi) quantiles of the model's predictions over the grid.
std::pair<double, double> derive_ssim_band(const SurrogateModel& model, std::span<const CandidatePair> grid,
                                           double q_lo, double q_hi);

std::string model_to_json(const SurrogateModel& model);
SurrogateModel model_from_json(const std::string& text);
std::string loss_curve_csv(std::span<const double> curve);

}  // namespace advsmo
