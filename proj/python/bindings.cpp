#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "advsmo/blackbox.hpp"
#include "advsmo/candidates.hpp"
#include "advsmo/defense.hpp"
#include "advsmo/error.hpp"
#include "advsmo/gabor.hpp"
#include "advsmo/metrics.hpp"
#include "advsmo/pipeline.hpp"
#include "advsmo/surrogate.hpp"
#include "advsmo/texture.hpp"

namespace py = pybind11;
using namespace advsmo;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// (H, W) or (H, W, C) float array in [0, 1].
Image to_image(const Array& a) {
    if (a.ndim() != 2 && a.ndim() != 3) throw py::value_error("image must have shape (H, W) or (H, W, C)");
    const int h = static_cast<int>(a.shape(0));
    const int w = static_cast<int>(a.shape(1));
    const int c = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
    return Image(w, h, c, std::vector<double>(a.data(), a.data() + a.size()));
}

Array from_image(const Image& img) {
    std::vector<py::ssize_t> shape{img.height(), img.width()};
    if (img.channels() > 1) shape.push_back(img.channels());
    Array out(shape);
    std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
    return out;
}

Channel to_channel(const Array& a) {
    if (a.ndim() != 2) throw py::value_error("channel must have shape (H, W)");
    return Channel(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)),
                   std::vector<double>(a.data(), a.data() + a.size()));
}

Array from_channel(const Channel& ch) {
    Array out({ch.height(), ch.width()});
    std::copy(ch.values().begin(), ch.values().end(), out.mutable_data());
    return out;
}

PipelineConfig config_or_default(const std::optional<std::string>& json) {
    return json ? config_from_json(*json) : PipelineConfig{};
}

GaborParams params_for(int k1, double theta, double lambda_ratio) {
    GaborDefaults d;
    d.lambda_ratio = lambda_ratio;
    return d.params_for(k1, theta);
}

py::dict record_dict(const CandidateRecord& r) {
    py::dict d;
    d["k1"] = r.pair.k1;
    d["theta"] = r.pair.theta;
    d["ssim"] = r.ssim;
    d["mse"] = r.mse;
    d["linf"] = r.linf;
    d["skipped"] = r.skipped ? py::object(py::str(*r.skipped)) : py::object(py::none());
    return d;
}

py::list pair_list(const CandidateSet& s) {
    py::list out;
    for (const auto& p : s.pairs) out.append(py::make_tuple(p.k1, p.theta));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Texture-smoothing adversarial example toolkit";
    m.attr("__version__") = kToolVersion;

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("load_image", [](const std::string& path) { return from_image(load_image(path)); }, py::arg("path"));
    m.def("save_image", [](const Array& img, const std::string& path) { save_image(to_image(img), path); },
          py::arg("image"), py::arg("path"));
    m.def("to_luma", [](const Array& img) { return from_channel(to_luma(to_image(img))); }, py::arg("image"));

    m.def(
        "gabor_kernel",
        [](int k1, double theta, double lambda_ratio) {
            const Kernel k = gabor_kernel(params_for(k1, theta, lambda_ratio));
            Array out({k.side, k.side});
            std::copy(k.weights.begin(), k.weights.end(), out.mutable_data());
            return out;
        },
        py::arg("k1"), py::arg("theta"), py::arg("lambda_ratio") = GaborDefaults{}.lambda_ratio);
    m.def(
        "smooth",
        [](const Array& img, int k1, double theta, double lambda_ratio) {
            return from_image(smooth(to_image(img), params_for(k1, theta, lambda_ratio)));
        },
        py::arg("image"), py::arg("k1"), py::arg("theta"), py::arg("lambda_ratio") = GaborDefaults{}.lambda_ratio);
    m.def(
        "extract_texture",
        [](const Array& benign, const Array& smoothed) {
            return from_image(extract_texture(to_image(benign), to_image(smoothed)));
        },
        py::arg("benign"), py::arg("smoothed"));

    m.def("ssim", [](const Array& a, const Array& b) { return ssim(to_image(a), to_image(b)).value; });
    m.def("mse", [](const Array& a, const Array& b) { return mse(to_image(a), to_image(b)).value; });
    m.def("linf", [](const Array& a, const Array& b) { return linf(to_image(a), to_image(b)).value; });

    m.def(
        "glcm",
        [](const Array& ch, int dx, int dy, int levels) {
            const GlcmMatrix g = glcm(to_channel(ch), {dx, dy}, levels);
            py::array_t<std::uint64_t> out({levels, levels});
            std::copy(g.counts.begin(), g.counts.end(), out.mutable_data());
            return out;
        },
        py::arg("channel"), py::arg("dx") = 1, py::arg("dy") = 0, py::arg("levels") = 8);
    m.def(
        "texture_diff",
        [](const Array& a, const Array& b, int dx, int dy, int levels) {
            return texture_diff(to_channel(a), to_channel(b), {dx, dy}, levels);
        },
        py::arg("a"), py::arg("b"), py::arg("dx") = 1, py::arg("dy") = 0, py::arg("levels") = 8);

    m.def(
        "search",
        [](const Array& img, const std::optional<std::string>& config_json) {
            const PipelineConfig cfg = config_or_default(config_json);
            SearchResult r = [&] {
                py::gil_scoped_release release;
                return run_search(to_image(img), "<array>", "array", cfg);
            }();
            py::list records;
            for (const auto& rec : r.records) records.append(record_dict(rec));
            py::dict sets;
            sets["ssim"] = pair_list(r.sets.ssim);
            sets["mse"] = pair_list(r.sets.mse);
            sets["linf"] = pair_list(r.sets.linf);
            sets["intersection"] = pair_list(r.sets.intersection);
            py::dict out;
            out["records"] = records;
            out["sets"] = sets;
            return out;
        },
        py::arg("image"), py::arg("config_json") = py::none(),
        "Runs the candidate search on one image; returns per-pair metrics and the constraint sets.");

    m.def(
        "apply_defense",
        [](const Array& img, const std::string& name, int window, double sigma) {
            return from_image(apply_defense(to_image(img), DefenseKind{defense_type_from_string(name), window, sigma}));
        },
        py::arg("image"), py::arg("defense"), py::arg("window") = 3, py::arg("sigma") = 1.0);

    m.def(
        "train_surrogate",
        [](const std::vector<std::tuple<int, double, double>>& samples, int epochs, std::uint64_t seed) {
            std::vector<SurrogateSample> data;
            for (const auto& [k1, theta, value] : samples) data.push_back({{k1, theta}, value});
            TrainConfig cfg;
            cfg.epochs = epochs;
            cfg.seed = seed;
            const TrainResult r = train(data, cfg);
            py::dict out;
            out["model_json"] = model_to_json(r.model);
            out["loss_curve"] = r.loss_curve;
            return out;
        },
        py::arg("samples"), py::arg("epochs") = TrainConfig{}.epochs, py::arg("seed") = 0);
    m.def(
        "surrogate_predict",
        [](const std::string& model_json, int k1, double theta) {
            return model_from_json(model_json).predict({k1, theta});
        },
        py::arg("model_json"), py::arg("k1"), py::arg("theta"));

    m.def(
        "run_attack",
        [](const std::string& config_json) {
            const PipelineConfig cfg = config_from_json(config_json);
            AttackRun run = [&] {
                py::gil_scoped_release release;
                return run_attack(cfg);
            }();
            return run.report ? run.report->to_json() : std::string("null");
        },
        py::arg("config_json"), "Runs the attack pipeline and returns the attack report as JSON.");
    m.def("default_config", [] { return config_to_json(PipelineConfig{}); });
}
