#include <gtest/gtest.h>
#include <json.hpp>

#include <fstream>

#include "advsmo/error.hpp"
#include "advsmo/pipeline.hpp"
#include "cli.hpp"
#include "support/dataset.hpp"

using namespace advsmo;
using nlohmann::json;

namespace {

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "advsmo");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::run_command(static_cast<int>(argv.size()), argv.data());
}

PipelineConfig open_config(const std::filesystem::path& dataset, const std::filesystem::path& out) {
    PipelineConfig cfg;
    cfg.grid = GridSpec{{3, 5, 7, 9}, 15.0};
    cfg.thresholds.mse_lo = 0.0;
    cfg.thresholds.mse_hi = 1.0;
    cfg.thresholds.linf_lo = 0.0;
    cfg.thresholds.linf_hi = 256.0;
    cfg.thresholds.ssim_lo = -1.0;
    cfg.thresholds.ssim_hi = 1.0;
    cfg.dataset_root = dataset.string();
    cfg.output_root = out.string();
    cfg.endpoint = parse_endpoint("stub:threshold-flip(t=60)");
    cfg.workers = 2;
    return cfg;
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
    const PipelineConfig def;
    const PipelineConfig back = config_from_json(config_to_json(def));
    EXPECT_EQ(config_to_json(back), config_to_json(def));
    EXPECT_EQ(config_hash(back), config_hash(def));
    EXPECT_EQ(config_hash(def).size(), 64u);
    EXPECT_EQ(back.thresholds.linf_hi, 27.19215686);
}

TEST(Config, PartialOverridesKeepDefaults) {
    const PipelineConfig cfg = config_from_json(R"({"grid": {"theta_step": 15}, "seed": 9})");
    EXPECT_EQ(cfg.grid.theta_step, 15.0);
    EXPECT_EQ(cfg.grid.k1_values, GridSpec{}.k1_values);
    EXPECT_EQ(cfg.seed, 9u);
    EXPECT_NE(config_hash(cfg), config_hash(PipelineConfig{}));
}

TEST(Config, UnknownKeyIsNamed) {
    for (const char* text : {R"({"bogus": 1})", R"({"gabor": {"wavelength": 3}})"}) {
        try {
            config_from_json(text);
            FAIL() << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::config_invalid);
            const std::string what = e.what();
            EXPECT_TRUE(what.find("bogus") != std::string::npos || what.find("wavelength") != std::string::npos)
                << what;
        }
    }
}

TEST(Config, InvalidValuesAreRejected) {
    for (const char* text : {R"({"grid": {"theta_step": 7}})", R"({"thresholds": {"ssim_lo": 0.5, "ssim_hi": 0.1}})",
                             R"({"selection": "best"})", R"({"endpoint": {"descriptor": "ftp://x"}})", "[1, 2",
                             R"({"seed": "abc"})"}) {
        try {
            config_from_json(text);
            FAIL() << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::config_invalid) << text;
        }
    }
}

TEST(Sha256, KnownVector) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Search, ManifestIsDeterministicAndOrdered) {
    const Image img = testdata::stripe_sample(3);
    PipelineConfig cfg;
    cfg.grid = GridSpec{{3, 5}, 30.0};
    cfg.workers = 1;
    const std::string a = candidate_manifest_json(run_search(img, "x.png", "x", cfg), cfg);
    cfg.workers = 4;
    const std::string b = candidate_manifest_json(run_search(img, "x.png", "x", cfg), cfg);
    EXPECT_EQ(a, b);

    const auto j = nlohmann::ordered_json::parse(a);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"benign_path", "gabor_defaults", "grid", "records", "sets", "thresholds",
                                              "tool_version"}));
    EXPECT_EQ(j["records"].size(), 8u);
    EXPECT_EQ(j["tool_version"], kToolVersion);
}

TEST(Attack, WritesImagesAndReports) {
    const auto root = testdata::scratch_dir("pipeline_attack");
    const auto data = testdata::write_stripe_dataset(root / "data", 4);
    const PipelineConfig cfg = open_config(data, root / "out");
    const AttackRun run = run_attack(cfg);
    ASSERT_TRUE(run.report);
    EXPECT_EQ(run.samples.size() + run.no_candidate.size(), 4u);
    for (const auto& s : run.samples) {
        const auto png = root / "out" / "images" / s.id / "adversarial.png";
        ASSERT_TRUE(std::filesystem::exists(png)) << png;
        EXPECT_EQ(load_image(png), s.adversarial);
    }
    EXPECT_TRUE(std::filesystem::exists(root / "out" / "reports" / "attack.json"));
    EXPECT_TRUE(std::filesystem::exists(root / "out" / "reports" / "attack.csv"));
    const auto j = json::parse(testdata::read_file(root / "out" / "reports" / "attack.json"));
    EXPECT_EQ(j.at("asr").get<double>(), run.report->asr);

    const auto reports = run_defend(cfg, {DefenseKind{DefenseType::median, 3, 1.0}});
    ASSERT_EQ(reports.size(), 1u);
    EXPECT_TRUE(std::filesystem::exists(root / "out" / "reports" / ("defense_" + reports[0].defense + ".json")));
}

TEST(Attack, MissingDatasetFails) {
    PipelineConfig cfg;
    cfg.dataset_root = "/nonexistent/advsmo";
    try {
        run_attack(cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::file_missing);
    }
}

TEST(Cli, ExitCodes) {
    const auto root = testdata::scratch_dir("pipeline_cli");
    const auto png = root / "in.png";
    save_image(testdata::stripe_sample(1), png);

    EXPECT_EQ(run_cli({"smooth", "--in", png.string(), "--out", (root / "s.png").string(), "--k1", "5", "--theta",
                       "30"}),
              0);
    EXPECT_EQ(load_image(root / "s.png").width(), 32);
    EXPECT_EQ(run_cli({"smooth", "--in", png.string(), "--out", (root / "s.png").string(), "--k1", "4", "--theta",
                       "30"}),
              2);
    EXPECT_EQ(run_cli({"smooth", "--in", png.string()}), 1);
    EXPECT_EQ(run_cli({"frobnicate"}), 1);

    std::ofstream(root / "bad.json") << R"({"nope": true})";
    EXPECT_EQ(run_cli({"search", "--in", png.string(), "--config", (root / "bad.json").string(), "--out",
                       (root / "o").string()}),
              1);

    EXPECT_EQ(run_cli({"search", "--in", png.string(), "--k1", "3,5", "--theta-step", "45", "--out",
                       (root / "o").string()}),
              0);
    EXPECT_TRUE(std::filesystem::exists(root / "o" / "manifests" / "in.json"));
    EXPECT_TRUE(std::filesystem::exists(root / "o" / "manifests" / "run.json"));
    const auto run = nlohmann::ordered_json::parse(testdata::read_file(root / "o" / "manifests" / "run.json"));
    EXPECT_EQ(run.at("command"), "search");
    EXPECT_EQ(run.at("config_hash").get<std::string>().size(), 64u);

    EXPECT_EQ(run_cli({"glcm", "--in", png.string(), "--levels", "4", "--out", (root / "g.csv").string()}), 0);
    EXPECT_TRUE(std::filesystem::exists(root / "g.csv"));
}
