#include "advsmo/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "advsmo/error.hpp"
#include "advsmo/metrics.hpp"

namespace advsmo {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
    throw Error(ErrorCode::config_invalid, "'" + key + "': " + why);
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& prefix) {
    if (!obj.is_object()) invalid(prefix.empty() ? "<root>" : prefix, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!known) invalid(prefix.empty() ? key : prefix + "." + key, "unknown key");
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& prefix) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        invalid(prefix.empty() ? key : prefix + "." + key, e.what());
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::file_missing, path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

ordered_json pair_list(const CandidateSet& s) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : s.pairs) arr.push_back({p.k1, p.theta});
    return arr;
}

ordered_json gabor_json(const GaborDefaults& g) {
    ordered_json j;
    j["lambda_ratio"] = g.lambda_ratio;
    j["phase"] = g.phase;
    j["aspect"] = g.aspect;
    j["bandwidth"] = g.bandwidth;
    return j;
}

ordered_json thresholds_json(const ConstraintThresholds& t) {
    ordered_json j;
    j["ssim_lo"] = t.ssim_lo;
    j["ssim_hi"] = t.ssim_hi;
    j["mse_lo"] = t.mse_lo;
    j["mse_hi"] = t.mse_hi;
    j["linf_lo"] = t.linf_lo;
    j["linf_hi"] = t.linf_hi;
    return j;
}

CandidateRecord* find_record(std::vector<CandidateRecord>& records, const CandidatePair& p) {
    for (auto& r : records) {
        if (r.pair == p) return &r;
    }
    return nullptr;
}

}  // namespace

void PipelineConfig::validate() const {
    if (!(gabor.lambda_ratio > 0.0)) invalid("gabor.lambda_ratio", "must be positive");
    if (!(gabor.aspect > 0.0)) invalid("gabor.aspect", "must be positive");
    if (!(gabor.bandwidth > 0.0)) invalid("gabor.bandwidth", "must be positive");
    try {
        generate_grid(grid);
    } catch (const Error& e) {
        invalid("grid", e.what());
    }
    try {
        thresholds.validate();
    } catch (const Error& e) {
        invalid("thresholds", e.what());
    }
    try {
        endpoint.validate();
    } catch (const Error& e) {
        invalid("endpoint", e.what());
    }
    try {
        surrogate.train.validate();
    } catch (const Error& e) {
        invalid("surrogate", e.what());
    }
    if (!(surrogate.q_lo >= 0.0 && surrogate.q_lo < surrogate.q_hi && surrogate.q_hi <= 1.0)) {
        invalid("surrogate.quantiles", "need 0 <= q_lo < q_hi <= 1");
    }
    if (output_root.empty()) invalid("output_root", "must not be empty");
}

PipelineConfig config_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::config_invalid, std::string("not valid JSON: ") + e.what());
    }
    check_keys(root,
               {"gabor", "grid", "thresholds", "selection", "endpoint", "success_mode", "global_u", "surrogate",
                "dataset_root", "output_root", "seed", "workers"},
               "");
    PipelineConfig cfg;

    if (root.contains("gabor")) {
        const auto& g = root["gabor"];
        check_keys(g, {"lambda_ratio", "phase", "aspect", "bandwidth"}, "gabor");
        read(g, "lambda_ratio", cfg.gabor.lambda_ratio, "gabor");
        read(g, "phase", cfg.gabor.phase, "gabor");
        read(g, "aspect", cfg.gabor.aspect, "gabor");
        read(g, "bandwidth", cfg.gabor.bandwidth, "gabor");
    }
    if (root.contains("grid")) {
        const auto& g = root["grid"];
        check_keys(g, {"k1", "theta_step"}, "grid");
        read(g, "k1", cfg.grid.k1_values, "grid");
        read(g, "theta_step", cfg.grid.theta_step, "grid");
    }
    if (root.contains("thresholds")) {
        const auto& t = root["thresholds"];
        check_keys(t, {"ssim_lo", "ssim_hi", "mse_lo", "mse_hi", "linf_lo", "linf_hi"}, "thresholds");
        read(t, "ssim_lo", cfg.thresholds.ssim_lo, "thresholds");
        read(t, "ssim_hi", cfg.thresholds.ssim_hi, "thresholds");
        read(t, "mse_lo", cfg.thresholds.mse_lo, "thresholds");
        read(t, "mse_hi", cfg.thresholds.mse_hi, "thresholds");
        read(t, "linf_lo", cfg.thresholds.linf_lo, "thresholds");
        read(t, "linf_hi", cfg.thresholds.linf_hi, "thresholds");
    }
    if (root.contains("selection")) {
        std::string s;
        read(root, "selection", s, "");
        try {
            cfg.selection = selection_policy_from_string(s);
        } catch (const Error& e) {
            invalid("selection", e.what());
        }
    }
    if (root.contains("endpoint")) {
        const auto& e = root["endpoint"];
        check_keys(e, {"descriptor", "timeout_ms", "max_in_flight", "retry_budget", "backoff_ms"}, "endpoint");
        if (e.contains("descriptor")) {
            std::string d;
            read(e, "descriptor", d, "endpoint");
            try {
                cfg.endpoint = parse_endpoint(d);
            } catch (const Error& err) {
                invalid("endpoint.descriptor", err.what());
            }
        }
        read(e, "timeout_ms", cfg.endpoint.timeout_ms, "endpoint");
        read(e, "max_in_flight", cfg.endpoint.max_in_flight, "endpoint");
        read(e, "retry_budget", cfg.endpoint.retry_budget, "endpoint");
        read(e, "backoff_ms", cfg.endpoint.backoff_ms, "endpoint");
    }
    if (root.contains("success_mode")) {
        std::string m;
        read(root, "success_mode", m, "");
        try {
            cfg.success_mode = success_mode_from_string(m);
        } catch (const Error& e) {
            invalid("success_mode", e.what());
        }
    }
    read(root, "global_u", cfg.global_u, "");
    if (root.contains("surrogate")) {
        const auto& s = root["surrogate"];
        check_keys(s, {"epochs", "learning_rate", "beta1", "beta2", "epsilon", "quantiles"}, "surrogate");
        read(s, "epochs", cfg.surrogate.train.epochs, "surrogate");
        read(s, "learning_rate", cfg.surrogate.train.learning_rate, "surrogate");
        read(s, "beta1", cfg.surrogate.train.beta1, "surrogate");
        read(s, "beta2", cfg.surrogate.train.beta2, "surrogate");
        read(s, "epsilon", cfg.surrogate.train.epsilon, "surrogate");
        if (s.contains("quantiles")) {
            std::array<double, 2> q{};
            read(s, "quantiles", q, "surrogate");
            cfg.surrogate.q_lo = q[0];
            cfg.surrogate.q_hi = q[1];
        }
    }
    read(root, "dataset_root", cfg.dataset_root, "");
    read(root, "output_root", cfg.output_root, "");
    read(root, "seed", cfg.seed, "");
    read(root, "workers", cfg.workers, "");
    cfg.surrogate.train.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    try {
        return config_from_json(read_text(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::file_missing) throw Error(ErrorCode::config_invalid, "cannot read " + path.string());
        throw;
    }
}

std::string config_to_json(const PipelineConfig& cfg) {
    ordered_json j;
    j["gabor"] = gabor_json(cfg.gabor);
    j["grid"] = {{"k1", cfg.grid.k1_values}, {"theta_step", cfg.grid.theta_step}};
    j["thresholds"] = thresholds_json(cfg.thresholds);
    j["selection"] = std::string(to_string(cfg.selection));
    ordered_json ep;
    ep["descriptor"] = cfg.endpoint.describe();
    ep["timeout_ms"] = cfg.endpoint.timeout_ms;
    ep["max_in_flight"] = cfg.endpoint.max_in_flight;
    ep["retry_budget"] = cfg.endpoint.retry_budget;
    ep["backoff_ms"] = cfg.endpoint.backoff_ms;
    j["endpoint"] = ep;
    j["success_mode"] = std::string(to_string(cfg.success_mode));
    j["global_u"] = cfg.global_u;
    ordered_json s;
    s["epochs"] = cfg.surrogate.train.epochs;
    s["learning_rate"] = cfg.surrogate.train.learning_rate;
    s["beta1"] = cfg.surrogate.train.beta1;
    s["beta2"] = cfg.surrogate.train.beta2;
    s["epsilon"] = cfg.surrogate.train.epsilon;
    s["quantiles"] = {cfg.surrogate.q_lo, cfg.surrogate.q_hi};
    j["surrogate"] = s;
    j["dataset_root"] = cfg.dataset_root;
    j["output_root"] = cfg.output_root;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    return j.dump(2) + "\n";
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::io_failure, "sha256 failed");
    }
    std::string hex;
    hex.reserve(len * 2);
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string config_hash(const PipelineConfig& cfg) { return sha256_hex(config_to_json(cfg)); }

SearchResult run_search(const Image& benign, const std::string& benign_path, const std::string& stem,
                        const PipelineConfig& cfg) {
    SearchResult r;
    r.benign_path = benign_path;
    r.stem = stem;
    r.grid = generate_grid(cfg.grid);
    r.records = build_initial_set(benign, r.grid, cfg.gabor, stem, cfg.workers);
    r.sets = apply_constraints(r.records, cfg.thresholds);
    return r;
}

std::string candidate_manifest_json(const SearchResult& r, const PipelineConfig& cfg) {
    ordered_json j;
    j["benign_path"] = r.benign_path;
    j["gabor_defaults"] = gabor_json(cfg.gabor);
    j["grid"] = {{"k1", cfg.grid.k1_values}, {"theta_step", cfg.grid.theta_step}};
    j["records"] = ordered_json::array();
    for (const auto& rec : r.records) {
        ordered_json row;
        row["k1"] = rec.pair.k1;
        row["theta"] = rec.pair.theta;
        if (rec.skipped) {
            row["ssim"] = nullptr;
            row["mse"] = nullptr;
            row["linf"] = nullptr;
            row["image_ref"] = nullptr;
            row["skipped"] = *rec.skipped;
        } else {
            row["ssim"] = rec.ssim;
            row["mse"] = rec.mse;
            row["linf"] = rec.linf;
            row["image_ref"] = rec.image_ref;
        }
        j["records"].push_back(std::move(row));
    }
    ordered_json sets;
    sets["ssim"] = pair_list(r.sets.ssim);
    sets["mse"] = pair_list(r.sets.mse);
    sets["linf"] = pair_list(r.sets.linf);
    sets["intersection"] = pair_list(r.sets.intersection);
    j["sets"] = sets;
    j["thresholds"] = thresholds_json(cfg.thresholds);
    j["tool_version"] = kToolVersion;
    return j.dump(2) + "\n";
}

void write_search_outputs(const SearchResult& r, const PipelineConfig& cfg, const std::filesystem::path& out) {
    write_text(out / "manifests" / (r.stem + ".json"), candidate_manifest_json(r, cfg));
    for (const auto& rec : r.records) {
        if (rec.image) save_image(*rec.image, out / rec.image_ref);
    }
}

Dataset load_dataset(const std::filesystem::path& root) {
    const auto path = root / "dataset.json";
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::config_invalid, path.string() + ": " + e.what());
    }
    Dataset ds;
    try {
        ds.classes = j.value("classes", 2);
        for (const auto& s : j.at("samples")) {
            ds.samples.push_back({s.at("id").get<std::string>(), s.at("path").get<std::string>(),
                                  s.at("label").get<int>()});
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::config_invalid, path.string() + ": " + e.what());
    }
    if (ds.samples.empty()) throw Error(ErrorCode::empty_dataset, path.string() + " lists no samples");
    std::set<std::string> ids;
    for (const auto& s : ds.samples) {
        if (!ids.insert(s.id).second) throw Error(ErrorCode::config_invalid, "duplicate sample id '" + s.id + "'");
        if (s.label < 0 || s.label >= ds.classes) {
            throw Error(ErrorCode::config_invalid, "label of sample '" + s.id + "' out of range");
        }
    }
    return ds;
}

AttackRun build_adversarial_set(const PipelineConfig& cfg) {
    cfg.validate();
    const std::filesystem::path root = cfg.dataset_root;
    const Dataset ds = load_dataset(root);
    AttackRun run;

    std::vector<Image> benign;
    for (const auto& s : ds.samples) {
        benign.push_back(load_image(root / s.path));
        run.searches.push_back(run_search(benign.back(), s.path, s.id, cfg));
    }
    if (cfg.global_u) {
        std::vector<CandidateSet> us;
        for (const auto& r : run.searches) us.push_back(r.sets.intersection);
        run.global_u = intersect(us);
    }

    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        auto& search = run.searches[i];
        const CandidateSet& u = cfg.global_u ? *run.global_u : search.sets.intersection;
        if (u.empty()) {
            run.no_candidate.push_back(ds.samples[i].id);
            continue;
        }
        const CandidatePair pair = select_pair(u, search.records, cfg.selection);
        CandidateRecord* rec = find_record(search.records, pair);
        if (rec == nullptr || !rec->image) {
            run.no_candidate.push_back(ds.samples[i].id);
            continue;
        }
        AttackSample sample{ds.samples[i].id, benign[i], ds.samples[i].label, *rec->image, pair,
                            std::nullopt, std::nullopt, std::nullopt};
        sample.ssim = ssim(sample.benign, sample.adversarial).value;
        sample.mse = mse(sample.benign, sample.adversarial).value;
        sample.linf = linf(sample.benign, sample.adversarial).value;
        run.samples.push_back(std::move(sample));
    }
    return run;
}

std::unique_ptr<Classifier> classifier_for(const PipelineConfig& cfg, const std::vector<AttackSample>& samples) {
    if (cfg.endpoint.kind == ClassifierEndpoint::Kind::remote) return make_classifier(cfg.endpoint);
    auto stub = std::make_unique<StubClassifier>(cfg.endpoint.rule, cfg.endpoint.threshold, cfg.endpoint.classes);
    for (const auto& s : samples) stub->add_reference(s.benign, s.label % cfg.endpoint.classes);
    return stub;
}

namespace {

void write_outputs_for(const AttackRun& run, const PipelineConfig& cfg) {
    const std::filesystem::path out = cfg.output_root;
    for (const auto& r : run.searches) write_search_outputs(r, cfg, out);
    for (const auto& s : run.samples) {
        save_image(s.adversarial, out / "images" / s.id / "adversarial.png");
        save_image(extract_texture(s.benign, s.adversarial), out / "images" / s.id / "texture_residual.png");
    }
}

}  // namespace

AttackRun run_attack(const PipelineConfig& cfg) {
    AttackRun run = build_adversarial_set(cfg);
    write_outputs_for(run, cfg);
    const std::filesystem::path out = cfg.output_root;
    if (run.samples.empty()) {
        throw Error(ErrorCode::all_samples_unevaluated, "no sample has a valid candidate pair");
    }
    const auto oracle = classifier_for(cfg, run.samples);
    AttackReport report =
        attack_success_rate(*oracle, run.samples, eval_options_for(cfg.endpoint, cfg.success_mode));
    report.no_candidate = run.no_candidate;
    write_text(out / "reports" / "attack.json", report.to_json());
    write_text(out / "reports" / "attack.csv", report.to_csv());
    run.report = std::move(report);
    return run;
}

std::vector<AttackReport> run_defend(const PipelineConfig& cfg, const std::vector<DefenseKind>& defenses) {
    AttackRun run = build_adversarial_set(cfg);
    write_outputs_for(run, cfg);
    if (run.samples.empty()) {
        throw Error(ErrorCode::all_samples_unevaluated, "no sample has a valid candidate pair");
    }
    const std::filesystem::path out = cfg.output_root;
    const auto oracle = classifier_for(cfg, run.samples);
    const auto opts = eval_options_for(cfg.endpoint, cfg.success_mode);
    std::vector<AttackReport> reports;
    for (const auto& d : defenses) {
        AttackReport r = evasion_rate(*oracle, run.samples, d, opts);
        r.no_candidate = run.no_candidate;
        write_text(out / "reports" / ("defense_" + d.label() + ".json"), r.to_json());
        write_text(out / "reports" / ("defense_" + d.label() + ".csv"), r.to_csv());
        reports.push_back(std::move(r));
    }
    return reports;
}

void write_run_manifest(const PipelineConfig& cfg, const std::string& command,
                        const std::vector<std::string>& inputs) {
    ordered_json j;
    j["command"] = command;
    j["inputs"] = inputs;
    j["config"] = ordered_json::parse(config_to_json(cfg));
    j["config_hash"] = config_hash(cfg);
    j["tool_version"] = kToolVersion;
    write_text(std::filesystem::path(cfg.output_root) / "manifests" / "run.json", j.dump(2) + "\n");
}

}  // namespace advsmo
