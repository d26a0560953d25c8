#include "advsmo/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "advsmo/error.hpp"
#include "advsmo/parallel.hpp"

namespace advsmo {

void ConstraintThresholds::validate() const {
    const auto check = [](const char* name, double lo, double hi) {
        if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
            throw Error(ErrorCode::invalid_argument, std::string(name) + ": lower bound must be below upper bound");
        }
    };
    check("ssim", ssim_lo, ssim_hi);
    check("mse", mse_lo, mse_hi);
    check("linf", linf_lo, linf_hi);
}

std::pair<double, double> ConstraintThresholds::band(MetricKind kind) const {
    switch (kind) {
        case MetricKind::ssim: return {ssim_lo, ssim_hi};
        case MetricKind::mse: return {mse_lo, mse_hi};
        case MetricKind::linf: return {linf_lo, linf_hi};
    }
    throw Error(ErrorCode::invalid_argument, "unknown metric kind");
}

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::grid: return "grid";
        case Provenance::ssim: return "ssim";
        case Provenance::mse: return "mse";
        case Provenance::linf: return "linf";
        case Provenance::intersection: return "intersection";
    }
    return "unknown";
}

double CandidateRecord::metric(MetricKind kind) const {
    switch (kind) {
        case MetricKind::ssim: return ssim;
        case MetricKind::mse: return mse;
        case MetricKind::linf: return linf;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<CandidatePair> generate_grid(std::span<const int> k1_values, double theta_step) {
    if (k1_values.empty()) {
        throw Error(ErrorCode::empty_range, "no k1 values");
    }
    if (!(theta_step > 0.0) || theta_step > 90.0) {
        throw Error(ErrorCode::empty_range, "theta step must be in (0, 90]");
    }
    const double steps = 90.0 / theta_step;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9) {
        throw Error(ErrorCode::empty_range, "theta step " + std::to_string(theta_step) + " does not divide 90");
    }
    std::vector<int> ks(k1_values.begin(), k1_values.end());
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (int k : ks) {
        if (k < 3 || k % 2 == 0) {
            throw Error(ErrorCode::empty_range, "k1 values must be odd and >= 3, got " + std::to_string(k));
        }
    }

    std::vector<CandidatePair> grid;
    const auto n = static_cast<int>(rounded);
    grid.reserve(ks.size() * (n + 1));
    for (int k : ks) {
        for (int i = 0; i <= n; ++i) {
            grid.push_back({k, i * theta_step});
        }
    }
    return grid;
}

std::vector<CandidatePair> generate_grid(const GridSpec& spec) {
    return generate_grid(spec.k1_values, spec.theta_step);
}

std::string candidate_image_ref(const std::string& stem, const CandidatePair& pair) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "k%02d_t%06.2f.png", pair.k1, pair.theta);
    return "images/" + stem + "/" + buf;
}

std::vector<CandidateRecord> build_initial_set(const Image& benign, std::span<const CandidatePair> grid,
                                               const GaborDefaults& gabor, const std::string& stem,
                                               unsigned workers) {
    std::vector<CandidateRecord> records(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) {
        CandidateRecord& rec = records[i];
        rec.pair = grid[i];
        try {
            Image candidate = quantize8(smooth(benign, gabor.params_for(grid[i].k1, grid[i].theta)));
            rec.ssim = ssim(benign, candidate).value;
            rec.mse = mse(benign, candidate).value;
            rec.linf = linf(benign, candidate).value;
            rec.image_ref = candidate_image_ref(stem, grid[i]);
            rec.image = std::move(candidate);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::kernel_larger_than_image && e.code() != ErrorCode::degenerate_kernel) {
                throw;
            }
            rec.skipped = std::string(to_string(e.code()));
        }
    });
    return records;
}

CandidateSet filter_by_metric(std::span<const CandidateRecord> records, MetricKind kind, double lo, double hi) {
    CandidateSet out;
    out.provenance = kind == MetricKind::ssim ? Provenance::ssim
                     : kind == MetricKind::mse ? Provenance::mse
                                               : Provenance::linf;
    for (const auto& rec : records) {
        if (rec.skipped) continue;
        const double v = rec.metric(kind);
        if (lo < v && v < hi) out.pairs.insert(rec.pair);
    }
    return out;
}

CandidateSet filter_set(const CandidateSet& set, std::span<const CandidateRecord> records, MetricKind kind,
                        double lo, double hi) {
    CandidateSet passing = filter_by_metric(records, kind, lo, hi);
    CandidateSet out;
    out.provenance = set.provenance;
    for (const auto& p : set.pairs) {
        if (passing.contains(p)) out.pairs.insert(p);
    }
    return out;
}

CandidateSet intersect(std::span<const CandidateSet> sets) {
    CandidateSet out;
    out.provenance = Provenance::intersection;
    if (sets.empty()) return out;
    out.pairs = sets.front().pairs;
    for (const auto& s : sets.subspan(1)) {
        std::erase_if(out.pairs, [&](const CandidatePair& p) { return !s.contains(p); });
    }
    return out;
}

ConstraintResult apply_constraints(std::span<const CandidateRecord> records, const ConstraintThresholds& t) {
    t.validate();
    ConstraintResult r;
    r.ssim = filter_by_metric(records, MetricKind::ssim, t.ssim_lo, t.ssim_hi);
    r.mse = filter_by_metric(records, MetricKind::mse, t.mse_lo, t.mse_hi);
    r.linf = filter_by_metric(records, MetricKind::linf, t.linf_lo, t.linf_hi);
    const CandidateSet parts[] = {r.ssim, r.mse, r.linf};
    r.intersection = intersect(parts);
    return r;
}

std::string_view to_string(SelectionPolicy p) {
    return p == SelectionPolicy::least_perceptible ? "least-perceptible" : "first";
}

SelectionPolicy selection_policy_from_string(std::string_view name) {
    if (name == "least-perceptible") return SelectionPolicy::least_perceptible;
    if (name == "first") return SelectionPolicy::first;
    throw Error(ErrorCode::invalid_argument, "unknown selection policy '" + std::string(name) + "'");
}

CandidatePair select_pair(const CandidateSet& u, std::span<const CandidateRecord> records, SelectionPolicy policy) {
    if (u.empty()) {
        throw Error(ErrorCode::empty_set, "no valid candidate pair");
    }
    if (policy == SelectionPolicy::first) {
        for (const auto& rec : records) {
            if (u.contains(rec.pair)) return rec.pair;
        }
        return *u.pairs.begin();
    }

    const CandidateRecord* best = nullptr;
    for (const auto& rec : records) {
        if (!u.contains(rec.pair)) continue;
        if (best == nullptr || rec.ssim > best->ssim || (rec.ssim == best->ssim && rec.pair < best->pair)) {
            best = &rec;
        }
    }
    if (best == nullptr) {
        throw Error(ErrorCode::empty_set, "selected set has no matching records");
    }
    return best->pair;
}

}  // namespace advsmo
