#pragma once

#include <compare>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "advsmo/gabor.hpp"
#include "advsmo/image.hpp"
#include "advsmo/metrics.hpp"

namespace advsmo {

/// One point of the search grid: Gabor kernel side and stripe orientation (degrees).
struct CandidatePair {
    int k1 = 3;
    double theta = 0.0;

    friend auto operator<=>(const CandidatePair&, const CandidatePair&) = default;
    friend bool operator==(const CandidatePair&, const CandidatePair&) = default;
};

/// Bounds of the perceptibility/attack constraint. Every bound is strict.
struct ConstraintThresholds {
    double ssim_lo = 0.077444225;
    double ssim_hi = 0.132868965;
    double mse_lo = 0.020213895;
    double mse_hi = 0.038001586;
    double linf_lo = 19.81960784;
    double linf_hi = 27.19215686;

    void validate() const;
    std::pair<double, double> band(MetricKind kind) const;
};

enum class Provenance { grid, ssim, mse, linf, intersection };

std::string_view to_string(Provenance p);

struct CandidateSet {
    std::set<CandidatePair> pairs;
    Provenance provenance = Provenance::grid;

    bool contains(const CandidatePair& p) const { return pairs.contains(p); }
    bool empty() const { return pairs.empty(); }
    std::size_t size() const { return pairs.size(); }
};

/// A generated candidate and its distances from the benign image.
struct CandidateRecord {
    CandidatePair pair;
    double ssim = 0.0;
    double mse = 0.0;
    double linf = 0.0;
    std::string image_ref;
    std::optional<std::string> skipped;  // reason, when the pair could not be generated
    std::optional<Image> image;

    double metric(MetricKind kind) const;
};

struct GridSpec {
    std::vector<int> k1_values{3, 5, 7, 9, 11, 13, 15};
    double theta_step = 5.0;
};

/// Cartesian product of the k1 values (ascending) with theta in {0, step, ..., 90}.
std::vector<CandidatePair> generate_grid(std::span<const int> k1_values, double theta_step);
std::vector<CandidatePair> generate_grid(const GridSpec& spec);

/// Storage key for a candidate image, relative to the output root.
std::string candidate_image_ref(const std::string& stem, const CandidatePair& pair);

/// One record per grid pair, in grid order. Candidates are quantized to 8 bits, so the metrics
/// describe the image exactly as it is stored. Pairs whose kernel does not fit the image
/// or whose kernel is degenerate are kept as skipped records.
std::vector<CandidateRecord> build_initial_set(const Image& benign, std::span<const CandidatePair> grid,
                                               const GaborDefaults& gabor, const std::string& stem = "candidate",
                                               unsigned workers = 1);

/// Pairs whose metric lies strictly inside (lo, hi). Skipped records never pass.
CandidateSet filter_by_metric(std::span<const CandidateRecord> records, MetricKind kind, double lo, double hi);

/// Restricts an existing set with the same strict band (used for idempotence checks and refinement).
CandidateSet filter_set(const CandidateSet& set, std::span<const CandidateRecord> records, MetricKind kind,
                        double lo, double hi);

CandidateSet intersect(std::span<const CandidateSet> sets);

/// U_SSIM, U_MSE, U_LINF and their intersection for one benign image.
struct ConstraintResult {
    CandidateSet ssim;
    CandidateSet mse;
    CandidateSet linf;
    CandidateSet intersection;
};

ConstraintResult apply_constraints(std::span<const CandidateRecord> records, const ConstraintThresholds& t);

enum class SelectionPolicy { least_perceptible, first };

std::string_view to_string(SelectionPolicy p);
SelectionPolicy selection_policy_from_string(std::string_view name);

/// least_perceptible: highest SSIM, ties to smaller k1 then smaller theta. first: grid order.
CandidatePair select_pair(const CandidateSet& u, std::span<const CandidateRecord> records, SelectionPolicy policy);

}  // namespace advsmo
