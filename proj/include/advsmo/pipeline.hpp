#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "advsmo/blackbox.hpp"
#include "advsmo/candidates.hpp"
#include "advsmo/defense.hpp"
#include "advsmo/gabor.hpp"
#include "advsmo/surrogate.hpp"

namespace advsmo {

inline constexpr const char* kToolVersion = "0.1.0";

struct SurrogateSettings {
    TrainConfig train;
    double q_lo = 0.25;
    double q_hi = 0.75;
};

/// Everything a run needs. Defaults carry the shipped thresholds.
struct PipelineConfig {
    GaborDefaults gabor;
    GridSpec grid;
    ConstraintThresholds thresholds;
    SelectionPolicy selection = SelectionPolicy::least_perceptible;
    ClassifierEndpoint endpoint;
    SuccessMode success_mode = SuccessMode::ground_truth;
    bool global_u = false;
    SurrogateSettings surrogate;
    std::string dataset_root;
    std::string output_root = "advsmo_out";
    std::uint64_t seed = 0;
    unsigned workers = 0;  // 0 = machine parallelism

    /// Checks the preconditions of every module the config feeds. Throws config_invalid.
    void validate() const;
};

/// Parses a JSON config. Missing keys keep defaults; unknown keys are config_invalid.
PipelineConfig config_from_json(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& cfg);

/// Hex SHA-256 of the canonical config JSON.
std::string config_hash(const PipelineConfig& cfg);
std::string sha256_hex(std::string_view data);

struct SearchResult {
    std::string benign_path;
    std::string stem;
    std::vector<CandidatePair> grid;
    std::vector<CandidateRecord> records;
    ConstraintResult sets;
};

SearchResult run_search(const Image& benign, const std::string& benign_path, const std::string& stem,
                        const PipelineConfig& cfg);

/// Candidate manifest: fixed field order, byte-deterministic.
std::string candidate_manifest_json(const SearchResult& r, const PipelineConfig& cfg);

/// Writes manifests/<stem>.json and every generated candidate image under `out`.
void write_search_outputs(const SearchResult& r, const PipelineConfig& cfg, const std::filesystem::path& out);

struct DatasetSample {
    std::string id;
    std::string path;  // relative to the dataset root
    int label = 0;
};

struct Dataset {
    int classes = 2;
    std::vector<DatasetSample> samples;
};

/// Reads <root>/dataset.json: {"classes": N, "samples": [{"id", "path", "label"}, ...]}.
Dataset load_dataset(const std::filesystem::path& root);

struct AttackRun {
    std::vector<SearchResult> searches;
    std::vector<AttackSample> samples;       // samples with a valid adversarial image
    std::vector<std::string> no_candidate;   // sample ids whose U was empty
    std::optional<AttackReport> report;
    std::optional<CandidateSet> global_u;
};

/// Builds adversarial images for the dataset (quantized to 8 bits, as written to disk).
AttackRun build_adversarial_set(const PipelineConfig& cfg);

/// Classifier for the configured endpoint. Stubs are seeded with the dataset's benign references.
std::unique_ptr<Classifier> classifier_for(const PipelineConfig& cfg, const std::vector<AttackSample>& samples);

/// Full attack: search, select, write images, classify, write reports/attack.{json,csv}.
AttackRun run_attack(const PipelineConfig& cfg);

/// Evasion reports, one per defense, written as reports/defense_<label>.{json,csv}.
std::vector<AttackReport> run_defend(const PipelineConfig& cfg, const std::vector<DefenseKind>& defenses);

/// Records the command, config, config hash and tool version in manifests/run.json.
void write_run_manifest(const PipelineConfig& cfg, const std::string& command,
                        const std::vector<std::string>& inputs);

}  // namespace advsmo
