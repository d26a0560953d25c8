#include "advsmo/blackbox.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <regex>
#include <sstream>
#include <thread>

#include "advsmo/error.hpp"
#include "advsmo/metrics.hpp"
#include "advsmo/parallel.hpp"
#include "advsmo/texture.hpp"

namespace advsmo {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string base64(const std::vector<std::uint8_t>& bytes) {
    return httplib::detail::base64_encode(std::string(bytes.begin(), bytes.end()));
}

struct Attempt {
    std::optional<Verdict> verdict;
    std::size_t calls = 0;
    std::string error;
};

Attempt classify_with_retry(const Classifier& oracle, const Image& img, const EvalOptions& opts) {
    Attempt a;
    for (int attempt = 0; attempt <= opts.retry_budget; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(opts.backoff * (1 << (attempt - 1)));
        }
        ++a.calls;
        try {
            a.verdict = oracle.classify(img);
            return a;
        } catch (const Error& e) {
            const auto code = e.code();
            if (code != ErrorCode::network_timeout && code != ErrorCode::malformed_response &&
                code != ErrorCode::http_error) {
                throw;
            }
            a.error = e.what();
        }
    }
    return a;
}

void finalize(AttackReport& r) {
    r.evaluated = r.unevaluated = r.successes = 0;
    for (const auto& e : r.entries) {
        if (e.evaluated) {
            ++r.evaluated;
            if (e.success) ++r.successes;
        } else {
            ++r.unevaluated;
        }
    }
    if (r.evaluated == 0) {
        throw Error(ErrorCode::all_samples_unevaluated,
                    "none of " + std::to_string(r.entries.size()) + " samples could be evaluated");
    }
    r.asr = static_cast<double>(r.successes) / static_cast<double>(r.evaluated);
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

void ClassifierEndpoint::validate() const {
    if (timeout_ms <= 0) throw Error(ErrorCode::invalid_argument, "endpoint timeout must be positive");
    if (max_in_flight <= 0) throw Error(ErrorCode::invalid_argument, "max_in_flight must be positive");
    if (retry_budget < 0) throw Error(ErrorCode::invalid_argument, "retry budget must be non-negative");
    if (kind == Kind::remote) {
        static const std::regex url_re(R"(^https?://[A-Za-z0-9.\-_\[\]:]+(:[0-9]+)?/?$)");
        if (!std::regex_match(url, url_re)) {
            throw Error(ErrorCode::invalid_argument, "malformed endpoint URL '" + url + "'");
        }
    } else if (classes < 2) {
        throw Error(ErrorCode::invalid_argument, "stub classifier needs at least 2 classes");
    }
}

std::string ClassifierEndpoint::describe() const {
    if (kind == Kind::remote) return url;
    std::ostringstream out;
    out << "stub:" << (rule == StubRule::threshold_flip ? "threshold-flip" : "texture-diff-flip") << "(t=" << threshold
        << ",classes=" << classes << ")";
    return out.str();
}

ClassifierEndpoint parse_endpoint(std::string_view text) {
    ClassifierEndpoint ep;
    const std::string s(text);
    if (s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0) {
        ep.kind = ClassifierEndpoint::Kind::remote;
        ep.url = s;
        while (!ep.url.empty() && ep.url.back() == '/') ep.url.pop_back();
        ep.validate();
        return ep;
    }
    static const std::regex stub_re(R"(^stub:([a-z\-]+)(\((.*)\))?$)");
    std::smatch m;
    if (!std::regex_match(s, m, stub_re)) {
        throw Error(ErrorCode::invalid_argument, "unrecognized endpoint '" + s + "'");
    }
    ep.kind = ClassifierEndpoint::Kind::stub;
    if (m[1] == "threshold-flip") {
        ep.rule = StubRule::threshold_flip;
        ep.threshold = 10.0;
    } else if (m[1] == "texture-diff-flip") {
        ep.rule = StubRule::texture_diff_flip;
        ep.threshold = 0.5;
    } else {
        throw Error(ErrorCode::invalid_argument, "unknown stub rule '" + m[1].str() + "'");
    }
    std::stringstream args(m[3].str());
    std::string kv;
    while (std::getline(args, kv, ',')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::invalid_argument, "bad stub argument '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        try {
            if (key == "t") {
                ep.threshold = std::stod(value);
            } else if (key == "classes") {
                ep.classes = std::stoi(value);
            } else {
                throw Error(ErrorCode::invalid_argument, "unknown stub argument '" + key + "'");
            }
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::invalid_argument, "bad stub argument value '" + kv + "'");
        }
    }
    ep.validate();
    return ep;
}

StubClassifier::StubClassifier(StubRule rule, double threshold, int classes)
    : rule_(rule), threshold_(threshold), classes_(classes) {
    if (classes < 2) throw Error(ErrorCode::invalid_argument, "stub classifier needs at least 2 classes");
}

void StubClassifier::add_reference(Image benign, int label) {
    if (label < 0 || label >= classes_) throw Error(ErrorCode::invalid_argument, "reference label out of range");
    references_.emplace_back(std::move(benign), label);
}

Verdict StubClassifier::classify(const Image& img) const {
    const std::pair<Image, int>* nearest = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ref : references_) {
        if (!ref.first.same_shape(img)) continue;
        const double d = mse(ref.first, img).value;
        if (d < best) {
            best = d;
            nearest = &ref;
        }
    }
    if (nearest == nullptr) return Verdict{0, std::nullopt};

    const double distance = rule_ == StubRule::threshold_flip
                                ? linf(nearest->first, img).value
                                : texture_diff(to_luma(nearest->first), to_luma(img));
    const int label = distance > threshold_ ? (nearest->second + 1) % classes_ : nearest->second;
    return Verdict{label, std::nullopt};
}

RemoteClassifier::RemoteClassifier(const ClassifierEndpoint& ep) : ep_(ep) {
    if (ep.kind != ClassifierEndpoint::Kind::remote) {
        throw Error(ErrorCode::invalid_argument, "RemoteClassifier needs a remote endpoint");
    }
    ep_.validate();
}

namespace {

httplib::Client make_client(const ClassifierEndpoint& ep) {
    httplib::Client cli(ep.url);
    const auto timeout = std::chrono::milliseconds(ep.timeout_ms);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    return cli;
}

[[noreturn]] void raise_transport(const httplib::Result& res, const std::string& what) {
    throw Error(ErrorCode::network_timeout, what + ": " + httplib::to_string(res.error()));
}

}  // namespace

Verdict RemoteClassifier::classify(const Image& img) const {
    auto cli = make_client(ep_);
    auto res = cli.Post("/classify", classify_request_body(img), "application/json");
    if (!res) raise_transport(res, "POST /classify");
    if (res->status != 200) {
        throw Error(ErrorCode::http_error, "POST /classify returned status " + std::to_string(res->status));
    }
    return parse_verdict(res->body);
}

int RemoteClassifier::health() const {
    auto cli = make_client(ep_);
    auto res = cli.Get("/health");
    if (!res) raise_transport(res, "GET /health");
    if (res->status != 200) {
        throw Error(ErrorCode::http_error, "GET /health returned status " + std::to_string(res->status));
    }
    try {
        const auto j = json::parse(res->body);
        return j.at("classes").get<int>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::malformed_response, std::string("health body: ") + e.what());
    }
}

std::string classify_request_body(const Image& img) {
    ordered_json j;
    j["image_png_b64"] = base64(encode_png(img));
    return j.dump();
}

Verdict parse_verdict(std::string_view body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::malformed_response, std::string("not JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("label") || !j["label"].is_number_integer()) {
        throw Error(ErrorCode::malformed_response, "response lacks an integer 'label'");
    }
    Verdict v;
    v.label = j["label"].get<int>();
    if (j.contains("scores") && !j["scores"].is_null()) {
        const auto& s = j["scores"];
        if (!s.is_array()) throw Error(ErrorCode::malformed_response, "'scores' is not an array");
        std::vector<double> scores;
        double sum = 0.0;
        for (const auto& x : s) {
            if (!x.is_number()) throw Error(ErrorCode::malformed_response, "non-numeric score");
            const double d = x.get<double>();
            if (!(d >= 0.0) || !std::isfinite(d)) throw Error(ErrorCode::malformed_response, "negative score");
            scores.push_back(d);
            sum += d;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            throw Error(ErrorCode::malformed_response, "scores do not sum to 1");
        }
        v.scores = std::move(scores);
    }
    return v;
}

std::unique_ptr<Classifier> make_classifier(const ClassifierEndpoint& ep) {
    ep.validate();
    if (ep.kind == ClassifierEndpoint::Kind::remote) return std::make_unique<RemoteClassifier>(ep);
    return std::make_unique<StubClassifier>(ep.rule, ep.threshold, ep.classes);
}

std::string_view to_string(SuccessMode m) {
    return m == SuccessMode::ground_truth ? "ground-truth" : "model-relative";
}

SuccessMode success_mode_from_string(std::string_view name) {
    if (name == "ground-truth") return SuccessMode::ground_truth;
    if (name == "model-relative") return SuccessMode::model_relative;
    throw Error(ErrorCode::invalid_argument, "unknown success mode '" + std::string(name) + "'");
}

EvalOptions eval_options_for(const ClassifierEndpoint& ep, SuccessMode mode) {
    EvalOptions o;
    o.mode = mode;
    o.retry_budget = ep.retry_budget;
    o.backoff = std::chrono::milliseconds(ep.backoff_ms);
    o.max_in_flight = ep.max_in_flight;
    return o;
}

AttackReport attack_success_rate(const Classifier& oracle, const std::vector<AttackSample>& samples,
                                 const EvalOptions& opts) {
    if (samples.empty()) {
        throw Error(ErrorCode::empty_dataset, "no samples to evaluate");
    }
    AttackReport report;
    report.entries.resize(samples.size());
    std::vector<std::size_t> calls(samples.size(), 0);
    std::vector<std::size_t> failures(samples.size(), 0);

    parallel_for(samples.size(), static_cast<unsigned>(std::max(1, opts.max_in_flight)), [&](std::size_t i) {
        const AttackSample& s = samples[i];
        AttackEntry& e = report.entries[i];
        e.sample_id = s.id;
        e.y = s.label;
        e.pair = s.pair;
        e.ssim = s.ssim;
        e.mse = s.mse;
        e.linf = s.linf;

        int reference = s.label;
        if (opts.mode == SuccessMode::model_relative) {
            Attempt benign = classify_with_retry(oracle, s.benign, opts);
            calls[i] += benign.calls;
            failures[i] += benign.calls - (benign.verdict ? 1 : 0);
            if (!benign.verdict) {
                e.error = benign.error;
                return;
            }
            reference = benign.verdict->label;
        }
        Attempt adv = classify_with_retry(oracle, s.adversarial, opts);
        calls[i] += adv.calls;
        failures[i] += adv.calls - (adv.verdict ? 1 : 0);
        if (!adv.verdict) {
            e.error = adv.error;
            return;
        }
        e.evaluated = true;
        e.y_hat = adv.verdict->label;
        e.success = adv.verdict->label != reference;
    });

    for (std::size_t i = 0; i < samples.size(); ++i) {
        report.query_count += calls[i];
        report.retries += failures[i];
    }
    finalize(report);
    return report;
}

AttackReport evasion_rate(const Classifier& oracle, const std::vector<AttackSample>& samples, const DefenseKind& d,
                          const EvalOptions& opts) {
    std::vector<AttackSample> defended;
    defended.reserve(samples.size());
    for (const auto& s : samples) {
        AttackSample t = s;
        t.adversarial = apply_defense(s.adversarial, d);
        defended.push_back(std::move(t));
    }
    AttackReport r = attack_success_rate(oracle, defended, opts);
    r.defense = d.label();
    return r;
}

std::string AttackReport::to_json() const {
    ordered_json j;
    j["defense"] = defense.empty() ? json(nullptr) : json(defense);
    j["asr"] = asr;
    j["evaluated"] = evaluated;
    j["unevaluated"] = unevaluated;
    j["successes"] = successes;
    j["query_count"] = query_count;
    j["retries"] = retries;
    j["entries"] = json::array();
    for (const auto& e : entries) {
        ordered_json row;
        row["sample_id"] = e.sample_id;
        row["y"] = e.y;
        row["y_hat"] = e.y_hat ? json(*e.y_hat) : json(nullptr);
        row["evaluated"] = e.evaluated;
        row["success"] = e.success;
        row["k1"] = e.pair ? json(e.pair->k1) : json(nullptr);
        row["theta"] = e.pair ? json(e.pair->theta) : json(nullptr);
        row["ssim"] = e.ssim ? json(*e.ssim) : json(nullptr);
        row["mse"] = e.mse ? json(*e.mse) : json(nullptr);
        row["linf"] = e.linf ? json(*e.linf) : json(nullptr);
        if (!e.error.empty()) row["error"] = e.error;
        j["entries"].push_back(std::move(row));
    }
    j["no_candidate"] = no_candidate;
    return j.dump(2) + "\n";
}

std::string AttackReport::to_csv() const {
    std::ostringstream out;
    out << "sample_id,y,y_hat,success,k1,theta,ssim,mse,linf\n";
    const auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
    for (const auto& e : entries) {
        out << e.sample_id << ',' << e.y << ',' << (e.y_hat ? std::to_string(*e.y_hat) : std::string()) << ','
            << (e.evaluated ? (e.success ? "1" : "0") : "") << ',' << (e.pair ? std::to_string(e.pair->k1) : "")
            << ',' << (e.pair ? fmt(e.pair->theta) : "") << ',' << opt(e.ssim) << ',' << opt(e.mse) << ','
            << opt(e.linf) << '\n';
    }
    return out.str();
}

}  // namespace advsmo
