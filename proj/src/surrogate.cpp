#include "advsmo/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "advsmo/error.hpp"

namespace advsmo {

namespace {

using Hidden = std::array<double, SurrogateModel::kHidden>;

// Hidden activations for one input.
Hidden hidden_layer(const SurrogateModel& m, std::span<const double, 2> in) {
    Hidden h;
    for (int j = 0; j < SurrogateModel::kHidden; ++j) {
        h[j] = std::tanh(m.w1[j * 2] * in[0] + m.w1[j * 2 + 1] * in[1] + m.b1[j]);
    }
    return h;
}

double output_layer(const SurrogateModel& m, const Hidden& h) {
    double out = m.b2;
    for (int j = 0; j < SurrogateModel::kHidden; ++j) out += m.w2[j] * h[j];
    return out;
}

void require_matching(std::span<const std::array<double, 2>> inputs, std::span<const double> targets) {
    if (inputs.size() != targets.size()) {
        throw Error(ErrorCode::invalid_argument, "inputs and targets differ in length");
    }
    if (inputs.empty()) {
        throw Error(ErrorCode::empty_dataset, "no training samples");
    }
}

}  // namespace

void InputNorm::validate() const {
    for (int f = 0; f < 2; ++f) {
        if (!(min[f] < max[f])) {
            throw Error(ErrorCode::degenerate_range, "input normalization needs min < max for every feature");
        }
    }
}

InputNorm InputNorm::from_pairs(std::span<const CandidatePair> pairs) {
    if (pairs.empty()) {
        throw Error(ErrorCode::empty_dataset, "no pairs to normalize");
    }
    InputNorm n;
    n.min = {static_cast<double>(pairs[0].k1), pairs[0].theta};
    n.max = n.min;
    for (const auto& p : pairs) {
        n.min[0] = std::min(n.min[0], static_cast<double>(p.k1));
        n.max[0] = std::max(n.max[0], static_cast<double>(p.k1));
        n.min[1] = std::min(n.min[1], p.theta);
        n.max[1] = std::max(n.max[1], p.theta);
    }
    // A feature that never varies maps to 0.
    for (int f = 0; f < 2; ++f) {
        if (n.max[f] == n.min[f]) n.max[f] = n.min[f] + 1.0;
    }
    return n;
}

std::array<double, 2> normalize_input(const CandidatePair& pair, const InputNorm& norm) {
    norm.validate();
    const double raw[2] = {static_cast<double>(pair.k1), pair.theta};
    std::array<double, 2> out;
    for (int f = 0; f < 2; ++f) {
        out[f] = std::clamp((raw[f] - norm.min[f]) / (norm.max[f] - norm.min[f]), 0.0, 1.0);
    }
    return out;
}

std::vector<double> SurrogateModel::parameters() const {
    std::vector<double> flat;
    flat.reserve(kParamCount);
    flat.insert(flat.end(), w1.begin(), w1.end());
    flat.insert(flat.end(), b1.begin(), b1.end());
    flat.insert(flat.end(), w2.begin(), w2.end());
    flat.push_back(b2);
    return flat;
}

void SurrogateModel::set_parameters(std::span<const double> flat) {
    if (flat.size() != kParamCount) {
        throw Error(ErrorCode::invalid_argument, "expected " + std::to_string(kParamCount) + " parameters");
    }
    auto it = flat.begin();
    std::copy_n(it, w1.size(), w1.begin());
    it += static_cast<std::ptrdiff_t>(w1.size());
    std::copy_n(it, b1.size(), b1.begin());
    it += static_cast<std::ptrdiff_t>(b1.size());
    std::copy_n(it, w2.size(), w2.begin());
    it += static_cast<std::ptrdiff_t>(w2.size());
    b2 = *it;
}

double SurrogateModel::forward(std::span<const double, 2> input) const {
    return output_layer(*this, hidden_layer(*this, input));
}

double SurrogateModel::predict(const CandidatePair& pair) const {
    const auto in = normalize_input(pair, input_norm);
    return forward(in);
}

void TrainConfig::validate() const {
    if (epochs <= 0) throw Error(ErrorCode::invalid_argument, "epochs must be positive");
    if (!(learning_rate > 0.0)) throw Error(ErrorCode::invalid_argument, "learning rate must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw Error(ErrorCode::invalid_argument, "Adam decay rates must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
}

double batch_loss(const SurrogateModel& model, std::span<const std::array<double, 2>> inputs,
                  std::span<const double> targets) {
    require_matching(inputs, targets);
    double sum = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const double err = model.forward(inputs[i]) - targets[i];
        sum += err * err;
    }
    return sum / static_cast<double>(inputs.size());
}

std::vector<double> batch_gradient(const SurrogateModel& model, std::span<const std::array<double, 2>> inputs,
                                   std::span<const double> targets) {
    require_matching(inputs, targets);
    constexpr int H = SurrogateModel::kHidden;
    std::array<double, H * 2> g_w1{};
    Hidden g_b1{};
    Hidden g_w2{};
    double g_b2 = 0.0;

    const double scale = 2.0 / static_cast<double>(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const auto& x = inputs[i];
        const Hidden h = hidden_layer(model, x);
        const double d_out = scale * (output_layer(model, h) - targets[i]);
        g_b2 += d_out;
        for (int j = 0; j < H; ++j) {
            g_w2[j] += d_out * h[j];
            const double d_pre = d_out * model.w2[j] * (1.0 - h[j] * h[j]);
            g_b1[j] += d_pre;
            g_w1[j * 2] += d_pre * x[0];
            g_w1[j * 2 + 1] += d_pre * x[1];
        }
    }

    std::vector<double> grad;
    grad.reserve(SurrogateModel::kParamCount);
    grad.insert(grad.end(), g_w1.begin(), g_w1.end());
    grad.insert(grad.end(), g_b1.begin(), g_b1.end());
    grad.insert(grad.end(), g_w2.begin(), g_w2.end());
    grad.push_back(g_b2);
    return grad;
}

SurrogateModel init_model(std::uint64_t seed, const InputNorm& norm) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    std::vector<double> flat(SurrogateModel::kParamCount);
    for (double& v : flat) v = dist(rng);
    SurrogateModel m;
    m.set_parameters(flat);
    m.input_norm = norm;
    m.seed = seed;
    return m;
}

TrainResult train(std::span<const SurrogateSample> dataset, const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.empty()) {
        throw Error(ErrorCode::empty_dataset, "no training samples");
    }
    std::vector<CandidatePair> pairs;
    pairs.reserve(dataset.size());
    for (const auto& s : dataset) pairs.push_back(s.pair);
    std::sort(pairs.begin(), pairs.end());
    if (std::unique(pairs.begin(), pairs.end()) - pairs.begin() < 2) {
        throw Error(ErrorCode::empty_dataset, "training needs at least two distinct samples");
    }

    const InputNorm norm = InputNorm::from_pairs(pairs);
    std::vector<std::array<double, 2>> inputs;
    std::vector<double> targets;
    inputs.reserve(dataset.size());
    targets.reserve(dataset.size());
    for (const auto& s : dataset) {
        inputs.push_back(normalize_input(s.pair, norm));
        targets.push_back(s.ssim);
    }

    TrainResult result{init_model(cfg.seed, norm), {}};
    result.loss_curve.reserve(cfg.epochs);
    std::vector<double> params = result.model.parameters();
    std::vector<double> m1(params.size(), 0.0);
    std::vector<double> m2(params.size(), 0.0);
    double beta1_pow = 1.0;
    double beta2_pow = 1.0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto grad = batch_gradient(result.model, inputs, targets);
        beta1_pow *= cfg.beta1;
        beta2_pow *= cfg.beta2;
        for (std::size_t k = 0; k < params.size(); ++k) {
            m1[k] = cfg.beta1 * m1[k] + (1.0 - cfg.beta1) * grad[k];
            m2[k] = cfg.beta2 * m2[k] + (1.0 - cfg.beta2) * grad[k] * grad[k];
            const double m_hat = m1[k] / (1.0 - beta1_pow);
            const double v_hat = m2[k] / (1.0 - beta2_pow);
            params[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
        }
        result.model.set_parameters(params);
        result.loss_curve.push_back(batch_loss(result.model, inputs, targets));
    }
    result.model.epochs_trained = cfg.epochs;
    return result;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw Error(ErrorCode::empty_grid, "no values");
    }
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::pair<double, double> derive_ssim_band(const SurrogateModel& model, std::span<const CandidatePair> grid,
                                           double q_lo, double q_hi) {
    if (grid.empty()) {
        throw Error(ErrorCode::empty_grid, "cannot derive a band from an empty grid");
    }
    if (!(q_lo >= 0.0 && q_lo < q_hi && q_hi <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "quantiles must satisfy 0 <= q_lo < q_hi <= 1");
    }
    std::vector<double> preds;
    preds.reserve(grid.size());
    for (const auto& p : grid) preds.push_back(model.predict(p));
    return {quantile(preds, q_lo), quantile(std::move(preds), q_hi)};
}

std::string model_to_json(const SurrogateModel& model) {
    nlohmann::ordered_json j;
    j["w1"] = nlohmann::json::array();
    for (int r = 0; r < SurrogateModel::kHidden; ++r) {
        j["w1"].push_back({model.w1[r * 2], model.w1[r * 2 + 1]});
    }
    j["b1"] = model.b1;
    j["w2"] = model.w2;
    j["b2"] = model.b2;
    j["input_norm"] = {{"min", model.input_norm.min}, {"max", model.input_norm.max}};
    j["seed"] = model.seed;
    j["epochs_trained"] = model.epochs_trained;
    return j.dump(2) + "\n";
}

SurrogateModel model_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        SurrogateModel m;
        const auto& w1 = j.at("w1");
        if (w1.size() != SurrogateModel::kHidden) throw Error(ErrorCode::invalid_argument, "w1 must have 10 rows");
        for (int r = 0; r < SurrogateModel::kHidden; ++r) {
            m.w1[r * 2] = w1.at(r).at(0).get<double>();
            m.w1[r * 2 + 1] = w1.at(r).at(1).get<double>();
        }
        m.b1 = j.at("b1").get<std::array<double, SurrogateModel::kHidden>>();
        m.w2 = j.at("w2").get<std::array<double, SurrogateModel::kHidden>>();
        m.b2 = j.at("b2").get<double>();
        m.input_norm.min = j.at("input_norm").at("min").get<std::array<double, 2>>();
        m.input_norm.max = j.at("input_norm").at("max").get<std::array<double, 2>>();
        m.input_norm.validate();
        m.seed = j.value("seed", std::uint64_t{0});
        m.epochs_trained = j.value("epochs_trained", 0);
        for (double v : m.parameters()) {
            if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "model parameters must be finite");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_argument, std::string("bad model JSON: ") + e.what());
    }
}

std::string loss_curve_csv(std::span<const double> curve) {
    std::ostringstream out;
    out.precision(17);
    out << "epoch,mse\n";
    for (std::size_t e = 0; e < curve.size(); ++e) out << (e + 1) << ',' << curve[e] << '\n';
    return out.str();
}

}  // namespace advsmo
