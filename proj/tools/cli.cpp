#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "advsmo/blackbox.hpp"
#include "advsmo/candidates.hpp"
#include "advsmo/defense.hpp"
#include "advsmo/error.hpp"
#include "advsmo/gabor.hpp"
#include "advsmo/image.hpp"
#include "advsmo/metrics.hpp"
#include "advsmo/pipeline.hpp"
#include "advsmo/surrogate.hpp"
#include "advsmo/texture.hpp"

namespace advsmo::cli {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
auto wrap(const std::string& key, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(ErrorCode::config_invalid, "'" + key + "': " + e.what());
    }
}

void apply_endpoint(PipelineConfig& cfg, const std::string& text) {
    const ClassifierEndpoint parsed = wrap("endpoint", [&] { return parse_endpoint(text); });
    ClassifierEndpoint& ep = cfg.endpoint;
    ep.kind = parsed.kind;
    ep.url = parsed.url;
    ep.rule = parsed.rule;
    ep.threshold = parsed.threshold;
    ep.classes = parsed.classes;
}

/// Flag values that override the config file when given.
struct Overrides {
    std::string config_path;
    std::optional<std::string> out_root;
    std::optional<unsigned> workers;
    std::optional<std::uint64_t> seed;
    std::optional<double> lambda_ratio, phase, aspect, bandwidth;
    std::vector<int> k1;
    std::optional<double> theta_step;
    std::optional<double> ssim_lo, ssim_hi, mse_lo, mse_hi, linf_lo, linf_hi;
    std::optional<std::string> selection, endpoint, mode, dataset;
    bool global_u = false;

    void add_common(CLI::App* app, bool with_out_root) {
        app->add_option("--config", config_path, "JSON pipeline config")->check(CLI::ExistingFile);
        if (with_out_root) app->add_option("--out", out_root, "Output root directory");
        app->add_option("--workers", workers, "Worker threads for data-parallel stages (0 = all cores)");
        app->add_option("--seed", seed, "Random seed");
    }

    void add_gabor(CLI::App* app) {
        app->add_option("--lambda-ratio", lambda_ratio, "Wavelength as a multiple of k1");
        app->add_option("--phase", phase, "Gabor phase offset (radians)");
        app->add_option("--aspect", aspect, "Spatial aspect ratio gamma");
        app->add_option("--bandwidth", bandwidth, "Bandwidth in octaves (sets sigma)");
    }

    void add_search(CLI::App* app) {
        add_gabor(app);
        app->add_option("--k1", k1, "Kernel sizes of the grid (odd)")->delimiter(',');
        app->add_option("--theta-step", theta_step, "Orientation step in degrees (must divide 90)");
        app->add_option("--ssim-lo", ssim_lo);
        app->add_option("--ssim-hi", ssim_hi);
        app->add_option("--mse-lo", mse_lo);
        app->add_option("--mse-hi", mse_hi);
        app->add_option("--linf-lo", linf_lo);
        app->add_option("--linf-hi", linf_hi);
        app->add_option("--selection", selection, "least-perceptible | first");
    }

    void add_attack(CLI::App* app) {
        add_search(app);
        app->add_option("--dataset", dataset, "Dataset directory holding dataset.json");
        app->add_option("--endpoint", endpoint, "http://host:port or stub:threshold-flip(t=10)");
        app->add_option("--mode", mode, "ground-truth | model-relative");
        app->add_flag("--global-u", global_u, "Intersect the valid set across all images");
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
        if (const char* env = std::getenv("ADVSMO_ENDPOINT"); env != nullptr && *env != '\0') {
            apply_endpoint(cfg, env);
        }
        if (out_root) cfg.output_root = *out_root;
        if (workers) cfg.workers = *workers;
        if (seed) {
            cfg.seed = *seed;
            cfg.surrogate.train.seed = *seed;
        }
        if (lambda_ratio) cfg.gabor.lambda_ratio = *lambda_ratio;
        if (phase) cfg.gabor.phase = *phase;
        if (aspect) cfg.gabor.aspect = *aspect;
        if (bandwidth) cfg.gabor.bandwidth = *bandwidth;
        if (!k1.empty()) cfg.grid.k1_values = k1;
        if (theta_step) cfg.grid.theta_step = *theta_step;
        if (ssim_lo) cfg.thresholds.ssim_lo = *ssim_lo;
        if (ssim_hi) cfg.thresholds.ssim_hi = *ssim_hi;
        if (mse_lo) cfg.thresholds.mse_lo = *mse_lo;
        if (mse_hi) cfg.thresholds.mse_hi = *mse_hi;
        if (linf_lo) cfg.thresholds.linf_lo = *linf_lo;
        if (linf_hi) cfg.thresholds.linf_hi = *linf_hi;
        if (selection) cfg.selection = wrap("selection", [&] { return selection_policy_from_string(*selection); });
        if (endpoint) apply_endpoint(cfg, *endpoint);
        if (mode) cfg.success_mode = wrap("mode", [&] { return success_mode_from_string(*mode); });
        if (dataset) cfg.dataset_root = *dataset;
        if (global_u) cfg.global_u = true;
        cfg.validate();
        return cfg;
    }
};

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

Image upscale_nearest(const Channel& ch, int factor) {
    const int w = ch.width() * factor;
    const int h = ch.height() * factor;
    std::vector<double> px(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) px[static_cast<std::size_t>(y) * w + x] = ch.at(x / factor, y / factor);
    }
    return Image(w, h, 1, std::move(px));
}

std::string kernel_csv(const Kernel& k) {
    std::ostringstream out;
    out.precision(17);
    for (int r = 0; r < k.side; ++r) {
        for (int c = 0; c < k.side; ++c) {
            if (c) out << ',';
            out << k.weights[static_cast<std::size_t>(r) * k.side + c];
        }
        out << '\n';
    }
    return out.str();
}

int cmd_smooth(const Overrides& o, const std::string& in, const std::string& out, int k1, double theta,
               const std::string& residual_path, const std::string& kernel_path) {
    const PipelineConfig cfg = o.resolve();
    const GaborParams p = cfg.gabor.params_for(k1, theta);
    const Image benign = load_image(in);
    const Image smoothed = smooth(benign, p);
    save_image(smoothed, out);
    if (!residual_path.empty()) save_image(extract_texture(benign, smoothed), residual_path);
    if (!kernel_path.empty()) write_text(kernel_path, kernel_csv(gabor_kernel(p)));
    std::cout << "ssim=" << ssim(benign, smoothed).value << " mse=" << mse(benign, smoothed).value
              << " linf=" << linf(benign, smoothed).value << '\n';
    return 0;
}

int cmd_search(const Overrides& o, const std::string& in, std::string stem) {
    const PipelineConfig cfg = o.resolve();
    if (stem.empty()) stem = stem_of(in);
    const Image benign = load_image(in);
    const SearchResult r = run_search(benign, in, stem, cfg);
    write_search_outputs(r, cfg, cfg.output_root);
    write_run_manifest(cfg, "search", {in});
    std::cout << "grid=" << r.grid.size() << " |U_ssim|=" << r.sets.ssim.size() << " |U_mse|=" << r.sets.mse.size()
              << " |U_linf|=" << r.sets.linf.size() << " |U|=" << r.sets.intersection.size() << '\n';
    std::cout << "manifest: " << (fs::path(cfg.output_root) / "manifests" / (stem + ".json")).string() << '\n';
    return 0;
}

int cmd_attack(const Overrides& o) {
    const PipelineConfig cfg = o.resolve();
    const AttackRun run = run_attack(cfg);
    write_run_manifest(cfg, "attack", {cfg.dataset_root});
    const AttackReport& r = *run.report;
    std::cout << "asr=" << r.asr << " evaluated=" << r.evaluated << " unevaluated=" << r.unevaluated
              << " no_candidate=" << run.no_candidate.size() << " queries=" << r.query_count << '\n';
    return 0;
}

int cmd_defend(const Overrides& o, const std::vector<std::string>& names, int window, double sigma) {
    const PipelineConfig cfg = o.resolve();
    std::vector<DefenseKind> defenses;
    if (names.empty()) {
        for (DefenseType t : kAllDefenses) defenses.push_back({t, window, sigma});
    } else {
        for (const auto& n : names) {
            defenses.push_back({wrap("defense", [&] { return defense_type_from_string(n); }), window, sigma});
        }
    }
    const auto reports = run_defend(cfg, defenses);
    write_run_manifest(cfg, "defend", {cfg.dataset_root});
    for (const auto& r : reports) {
        std::cout << r.defense << ": asr=" << r.asr << " evaluated=" << r.evaluated << '\n';
    }
    return 0;
}

int cmd_glcm(const std::string& in, const std::string& adv, int dx, int dy, int levels, const std::string& out,
             const std::string& heatmap, int tile, int stride) {
    const Channel benign = to_luma(load_image(in));
    const GlcmOffset offset{dx, dy};
    const GlcmMatrix m = glcm(benign, offset, levels);
    if (out.empty()) {
        std::cout << glcm_to_csv(m);
    } else {
        write_text(out, glcm_to_csv(m));
    }
    if (!adv.empty()) {
        const Channel other = to_luma(load_image(adv));
        std::cout << "texture_diff=" << texture_diff(benign, other, offset, levels) << '\n';
        if (!heatmap.empty()) {
            const Channel map = texture_heatmap(benign, other, tile, stride, offset, levels);
            const Channel planes[] = {map};
            save_image(from_planes(planes), heatmap);
        }
    }
    return 0;
}

std::vector<SurrogateSample> samples_from_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::file_missing, path);
    const auto j = nlohmann::json::parse(in);
    std::vector<SurrogateSample> out;
    for (const auto& rec : j.at("records")) {
        if (rec.at("ssim").is_null()) continue;
        out.push_back({{rec.at("k1").get<int>(), rec.at("theta").get<double>()}, rec.at("ssim").get<double>()});
    }
    return out;
}

int cmd_train_surrogate(const Overrides& o, const std::vector<std::string>& manifests, const std::string& in,
                        std::optional<int> epochs) {
    PipelineConfig cfg = o.resolve();
    if (epochs) cfg.surrogate.train.epochs = *epochs;
    cfg.validate();
    std::vector<SurrogateSample> data;
    std::vector<std::string> inputs;
    for (const auto& m : manifests) {
        auto part = samples_from_manifest(m);
        data.insert(data.end(), part.begin(), part.end());
        inputs.push_back(m);
    }
    if (!in.empty()) {
        const Image benign = load_image(in);
        const SearchResult r = run_search(benign, in, stem_of(in), cfg);
        for (const auto& rec : r.records) {
            if (!rec.skipped) data.push_back({rec.pair, rec.ssim});
        }
        inputs.push_back(in);
    }
    if (data.empty()) throw Error(ErrorCode::empty_dataset, "give --manifest or --in to collect training samples");

    const TrainResult t = train(data, cfg.surrogate.train);
    const auto grid = generate_grid(cfg.grid);
    const auto [lo, hi] = derive_ssim_band(t.model, grid, cfg.surrogate.q_lo, cfg.surrogate.q_hi);

    const fs::path out = fs::path(cfg.output_root) / "reports";
    write_text(out / "surrogate_model.json", model_to_json(t.model));
    write_text(out / "surrogate_loss.csv", loss_curve_csv(t.loss_curve));
    nlohmann::ordered_json band;
    band["ssim_lo"] = lo;
    band["ssim_hi"] = hi;
    band["quantiles"] = {cfg.surrogate.q_lo, cfg.surrogate.q_hi};
    band["final_loss"] = t.loss_curve.back();
    write_text(out / "surrogate_band.json", band.dump(2) + "\n");
    write_run_manifest(cfg, "train-surrogate", inputs);
    std::cout << "final_mse=" << t.loss_curve.back() << " ssim_band=(" << lo << ", " << hi << ")\n";
    return 0;
}

int cmd_report(const Overrides& o, const std::string& in) {
    const PipelineConfig cfg = o.resolve();
    const std::string stem = stem_of(in);
    const Image benign = load_image(in);
    const SearchResult r = run_search(benign, in, stem, cfg);
    const fs::path out = fs::path(cfg.output_root) / "reports";

    std::ostringstream csv;
    csv.precision(17);
    csv << "k1,theta,ssim,mse,linf,in_ssim,in_mse,in_linf,in_u\n";
    for (const auto& rec : r.records) {
        if (rec.skipped) continue;
        csv << rec.pair.k1 << ',' << rec.pair.theta << ',' << rec.ssim << ',' << rec.mse << ',' << rec.linf << ','
            << r.sets.ssim.contains(rec.pair) << ',' << r.sets.mse.contains(rec.pair) << ','
            << r.sets.linf.contains(rec.pair) << ',' << r.sets.intersection.contains(rec.pair) << '\n';
    }
    write_text(out / (stem + "_candidates.csv"), csv.str());

    // SSIM surface: one row per k1, one column per theta, SSIM mapped from [-1, 1] to [0, 1].
    const auto& ks = r.grid;
    std::vector<int> k_values;
    std::vector<double> thetas;
    for (const auto& p : ks) {
        if (std::find(k_values.begin(), k_values.end(), p.k1) == k_values.end()) k_values.push_back(p.k1);
        if (std::find(thetas.begin(), thetas.end(), p.theta) == thetas.end()) thetas.push_back(p.theta);
    }
    std::vector<double> surface(k_values.size() * thetas.size(), 0.0);
    for (const auto& rec : r.records) {
        const auto row = std::find(k_values.begin(), k_values.end(), rec.pair.k1) - k_values.begin();
        const auto col = std::find(thetas.begin(), thetas.end(), rec.pair.theta) - thetas.begin();
        surface[static_cast<std::size_t>(row) * thetas.size() + col] = rec.skipped ? 0.0 : (rec.ssim + 1.0) / 2.0;
    }
    const Channel surf(static_cast<int>(thetas.size()), static_cast<int>(k_values.size()), std::move(surface));
    save_image(upscale_nearest(surf, 8), out / (stem + "_ssim_surface.png"));

    if (!r.sets.intersection.empty()) {
        const CandidatePair pick = select_pair(r.sets.intersection, r.records, cfg.selection);
        for (const auto& rec : r.records) {
            if (rec.pair == pick && rec.image) {
                const Channel map = texture_heatmap(to_luma(benign), to_luma(*rec.image));
                const Channel planes[] = {map};
                save_image(from_planes(planes), out / (stem + "_texture_heatmap.png"));
            }
        }
    }
    write_run_manifest(cfg, "report", {in});
    std::cout << "|U|=" << r.sets.intersection.size() << " report: " << out.string() << '\n';
    return 0;
}

}  // namespace

int run_command(int argc, const char* const* argv) {
    CLI::App app{"advsmo: texture-smoothing adversarial example toolkit", "advsmo"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    Overrides smooth_o, search_o, attack_o, defend_o, train_o, report_o;

    auto* smooth_cmd = app.add_subcommand("smooth", "Gabor-smooth one image with a (k1, theta) pair");
    std::string smooth_in, smooth_out, residual_out, kernel_out;
    int smooth_k1 = 9;
    double smooth_theta = 0.0;
    smooth_cmd->add_option("--in", smooth_in, "Input PNG")->required()->check(CLI::ExistingFile);
    smooth_cmd->add_option("--out", smooth_out, "Output PNG")->required();
    smooth_cmd->add_option("--k1", smooth_k1, "Kernel size (odd, >= 3)")->required();
    smooth_cmd->add_option("--theta", smooth_theta, "Orientation in degrees")->required();
    smooth_cmd->add_option("--residual", residual_out, "Also write the removed texture residual PNG");
    smooth_cmd->add_option("--kernel-csv", kernel_out, "Also write the normalized kernel as CSV");
    smooth_o.add_common(smooth_cmd, false);
    smooth_o.add_gabor(smooth_cmd);

    auto* search_cmd = app.add_subcommand("search", "Build the candidate set and apply the constraints");
    std::string search_in, search_stem;
    search_cmd->add_option("--in", search_in, "Benign PNG")->required()->check(CLI::ExistingFile);
    search_cmd->add_option("--stem", search_stem, "Name for manifest and image folder (default: file stem)");
    search_o.add_common(search_cmd, true);
    search_o.add_search(search_cmd);

    auto* attack_cmd = app.add_subcommand("attack", "Generate adversarial examples and measure attack success");
    attack_o.add_common(attack_cmd, true);
    attack_o.add_attack(attack_cmd);

    auto* defend_cmd = app.add_subcommand("defend", "Measure attack success after defense filtering");
    std::vector<std::string> defense_names;
    int defense_window = 3;
    double defense_sigma = 1.0;
    defend_cmd->add_option("--defense", defense_names, "bilinear|gaussian|max|mean|median|min (default: all)");
    defend_cmd->add_option("--window", defense_window, "Filter window (odd)");
    defend_cmd->add_option("--sigma", defense_sigma, "Gaussian sigma");
    defend_o.add_common(defend_cmd, true);
    defend_o.add_attack(defend_cmd);

    auto* glcm_cmd = app.add_subcommand("glcm", "Gray-level co-occurrence matrix and texture change");
    std::string glcm_in, glcm_adv, glcm_out, glcm_heatmap;
    int dx = 1, dy = 0, levels = 8, tile = 8, stride = 4;
    glcm_cmd->add_option("--in", glcm_in, "Input PNG")->required()->check(CLI::ExistingFile);
    glcm_cmd->add_option("--adv", glcm_adv, "Second PNG to compare against")->check(CLI::ExistingFile);
    glcm_cmd->add_option("--dx", dx);
    glcm_cmd->add_option("--dy", dy);
    glcm_cmd->add_option("--levels", levels);
    glcm_cmd->add_option("--out", glcm_out, "CSV path for the counts (default: stdout)");
    glcm_cmd->add_option("--heatmap", glcm_heatmap, "PNG path for the texture-change heatmap (needs --adv)");
    glcm_cmd->add_option("--tile", tile);
    glcm_cmd->add_option("--stride", stride);

    auto* train_cmd = app.add_subcommand("train-surrogate", "Fit the (k1, theta) -> SSIM network and derive a band");
    std::vector<std::string> train_manifests;
    std::string train_in;
    std::optional<int> train_epochs;
    train_cmd->add_option("--manifest", train_manifests, "Candidate manifest(s) to train on");
    train_cmd->add_option("--in", train_in, "Benign PNG to search and train on")->check(CLI::ExistingFile);
    train_cmd->add_option("--epochs", train_epochs);
    train_o.add_common(train_cmd, true);
    train_o.add_search(train_cmd);

    auto* report_cmd = app.add_subcommand("report", "SSIM-surface heatmap, candidate tables, texture heatmap");
    std::string report_in;
    report_cmd->add_option("--in", report_in, "Benign PNG")->required()->check(CLI::ExistingFile);
    report_o.add_common(report_cmd, true);
    report_o.add_search(report_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 1;
    }

    try {
        if (*smooth_cmd) {
            return cmd_smooth(smooth_o, smooth_in, smooth_out, smooth_k1, smooth_theta, residual_out, kernel_out);
        }
        if (*search_cmd) return cmd_search(search_o, search_in, search_stem);
        if (*attack_cmd) return cmd_attack(attack_o);
        if (*defend_cmd) return cmd_defend(defend_o, defense_names, defense_window, defense_sigma);
        if (*glcm_cmd) return cmd_glcm(glcm_in, glcm_adv, dx, dy, levels, glcm_out, glcm_heatmap, tile, stride);
        if (*train_cmd) return cmd_train_surrogate(train_o, train_manifests, train_in, train_epochs);
        if (*report_cmd) return cmd_report(report_o, report_in);
    } catch (const Error& e) {
        std::cerr << "advsmo: " << e.what() << '\n';
        return e.code() == ErrorCode::config_invalid ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "advsmo: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace advsmo::cli
