#pragma once

#include <optional>

#include "gsys/sampler.hpp"

namespace gsys {

struct IntensityEstimate {
    std::vector<TimePoint> times;
    std::vector<Interval> box;
    double mean_count = 0.0;
    double std_error = 0.0;  // sample sd / sqrt(replicates)
    long replicates = 0;
};

/// Estimate from materialized system samples: per-replicate counts of
/// particles with every selected coordinate inside the box.
IntensityEstimate estimate_intensity(const std::vector<SystemSample>& samples,
                                     const std::vector<size_t>& time_indices, const std::vector<Interval>& box,
                                     const std::vector<TimePoint>& times);

/// Estimate straight from the exact box-count sampler (scales to measures
/// whose window mass makes dense samples impractical).
IntensityEstimate estimate_intensity_mc(const PairSpec& pair, const CountQuery& query, int replicates, uint64_t seed,
                                        uint64_t task_tag, int n_threads = 1);

/// Closed-form intensity where available: n = 1 for every DSL measure, n = 2
/// for exp mixtures; nullopt otherwise.
std::optional<double> analytic_intensity(const PairSpec& pair, const CountQuery& query);

struct DesignEntry {
    std::vector<TimePoint> times;
    std::vector<Interval> box;
};

struct StatDesign {
    std::vector<DesignEntry> entries;
    std::vector<TimePoint> shifts;
};

/// times {0, 0.5, 1} x boxes {[0,1], [-1,0], [-2,2]}, one rectangle
/// [0,1]x[-1,1] at (0,1); shifts {0.5, 1} (embedded in the first coordinate).
StatDesign default_stat_design(int dim);
std::vector<DesignEntry> default_law_design(int dim);

struct StatComparison {
    DesignEntry base;
    TimePoint shift;
    IntensityEstimate est_a, est_b;
    std::optional<double> analytic_a, analytic_b;
    double z = 0.0;
};

struct StationarityReport {
    std::vector<StatComparison> comparisons;
    double alpha = 0.0;
    double z_crit = 0.0;  // Bonferroni-corrected two-sided quantile
    bool pass = false;
};

/// Two-sample z-tests of m_{t}(B) against m_{t+h}(B) over the design.
/// Arm streams are keyed by arm content, so a zero shift compares a stream
/// with itself (z identically 0) while distinct arms stay independent.
StationarityReport stationarity_test(const PairSpec& pair, const StatDesign& design, int replicates, double alpha,
                                     uint64_t seed, int n_threads = 1);

struct LawComparison {
    DesignEntry entry;
    IntensityEstimate est_a, est_b;
    std::optional<double> analytic_a;
    double z = 0.0;
};

struct EqualInLawMcReport {
    std::vector<LawComparison> comparisons;
    double alpha = 0.0;
    double z_crit = 0.0;
    bool pass = false;
};

EqualInLawMcReport equal_in_law_mc(const PairSpec& pair_a, const PairSpec& pair_b,
                                   const std::vector<DesignEntry>& design, int replicates, double alpha,
                                   uint64_t seed, int n_threads = 1);

/// Neumaier-compensated sum; keeps aggregate totals independent of reduction
/// order at 1e-12.
double compensated_sum(const std::vector<double>& xs);

}  // namespace gsys
