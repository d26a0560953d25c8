#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "advsmo/candidates.hpp"
#include "advsmo/defense.hpp"
#include "advsmo/image.hpp"

namespace advsmo {

/// What the target model returns. Nothing else crosses the black-box boundary.
struct Verdict {
    int label = 0;
    std::optional<std::vector<double>> scores;
};

/// Opaque classification oracle. Implementations expose only image-in, verdict-out.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual Verdict classify(const Image& img) const = 0;
};

enum class StubRule { threshold_flip, texture_diff_flip };

/// Where verdicts come from: a remote HTTP service or an in-tree deterministic stub.
struct ClassifierEndpoint {
    enum class Kind { remote, stub };

    Kind kind = Kind::stub;
    std::string url;  // remote only, e.g. http://127.0.0.1:8080
    StubRule rule = StubRule::threshold_flip;
    double threshold = 10.0;
    int classes = 2;
    int timeout_ms = 5000;
    int max_in_flight = 4;
    int retry_budget = 3;
    int backoff_ms = 50;

    void validate() const;
    std::string describe() const;
};

/// Parses "http://host:port" or "stub:threshold-flip(t=10,classes=2)" / "stub:texture-diff-flip(t=0.5)".
ClassifierEndpoint parse_endpoint(std::string_view text);

/// Deterministic stand-in model. It remembers (benign image, label) references and
/// labels an input with the label of the closest same-shaped reference (by MSE),
/// flipped to (label + 1) mod classes when the rule's distance exceeds the threshold.
/// Rules: threshold-flip uses L-infinity on the 0-255 scale; texture-diff-flip uses
/// the GLCM L1 distance of the luma planes.
class StubClassifier final : public Classifier {
public:
    StubClassifier(StubRule rule, double threshold, int classes);

    void add_reference(Image benign, int label);
    Verdict classify(const Image& img) const override;

private:
    StubRule rule_;
    double threshold_;
    int classes_;
    std::vector<std::pair<Image, int>> references_;
};

/// HTTP client for the classify wire protocol.
class RemoteClassifier final : public Classifier {
public:
    explicit RemoteClassifier(const ClassifierEndpoint& ep);

    Verdict classify(const Image& img) const override;
    /// GET /health; returns the advertised class count.
    int health() const;

private:
    ClassifierEndpoint ep_;
};

/// JSON request body for POST /classify.
std::string classify_request_body(const Image& img);

/// Parses a /classify response body. Throws malformed_response.
Verdict parse_verdict(std::string_view body);

std::unique_ptr<Classifier> make_classifier(const ClassifierEndpoint& ep);

enum class SuccessMode { ground_truth, model_relative };

std::string_view to_string(SuccessMode m);
SuccessMode success_mode_from_string(std::string_view name);

struct AttackSample {
    std::string id;
    Image benign;
    int label = 0;
    Image adversarial;
    std::optional<CandidatePair> pair;
    std::optional<double> ssim, mse, linf;
};

struct EvalOptions {
    SuccessMode mode = SuccessMode::ground_truth;
    int retry_budget = 3;
    std::chrono::milliseconds backoff{50};
    int max_in_flight = 1;
};

EvalOptions eval_options_for(const ClassifierEndpoint& ep, SuccessMode mode);

struct AttackEntry {
    std::string sample_id;
    int y = 0;
    std::optional<int> y_hat;
    bool evaluated = false;
    bool success = false;
    std::optional<CandidatePair> pair;
    std::optional<double> ssim, mse, linf;
    std::string error;  // last failure when unevaluated
};

struct AttackReport {
    std::vector<AttackEntry> entries;  // in sample order
    std::size_t evaluated = 0;
    std::size_t unevaluated = 0;
    std::size_t successes = 0;
    std::size_t query_count = 0;  // every classifier call, including failed attempts
    std::size_t retries = 0;      // failed attempts that were retried or exhausted the budget
    double asr = 0.0;
    std::string defense;  // empty for the undefended attack
    std::vector<std::string> no_candidate;  // samples without a valid pair; never classified

    std::string to_json() const;
    std::string to_csv() const;
};

AttackReport attack_success_rate(const Classifier& oracle, const std::vector<AttackSample>& samples,
                                 const EvalOptions& opts = {});

AttackReport evasion_rate(const Classifier& oracle, const std::vector<AttackSample>& samples, const DefenseKind& d,
                          const EvalOptions& opts = {});

}  // namespace advsmo
