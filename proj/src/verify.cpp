#include "gsys/verify.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "gsys/special.hpp"

namespace gsys {
namespace {

uint64_t fnv1a(const void* data, size_t len, uint64_t h = 1469598103934665603ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

uint64_t hash_double(uint64_t h, double x) {
    uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    return fnv1a(&bits, sizeof(bits), h);
}

/// Content hash of an arm: identical (times, box) share a stream.
uint64_t arm_tag(const std::vector<TimePoint>& times, const std::vector<Interval>& box, uint64_t salt) {
    uint64_t h = fnv1a(&salt, sizeof(salt));
    for (const auto& t : times) {
        for (double x : t) h = hash_double(h, x);
        h = fnv1a("|", 1, h);
    }
    for (const auto& b : box) {
        h = hash_double(h, b.lo);
        h = hash_double(h, b.hi);
    }
    return h;
}

IntensityEstimate estimate_from_counts(const std::vector<uint32_t>& counts, std::vector<TimePoint> times,
                                       std::vector<Interval> box) {
    if (counts.empty()) throw std::invalid_argument("estimate: empty replicate stream");
    std::vector<double> vals(counts.begin(), counts.end());
    const double n = static_cast<double>(vals.size());
    const double mean = compensated_sum(vals) / n;
    double var = 0.0;
    if (vals.size() > 1) {
        std::vector<double> sq(vals.size());
        for (size_t i = 0; i < vals.size(); ++i) sq[i] = (vals[i] - mean) * (vals[i] - mean);
        var = compensated_sum(sq) / (n - 1.0);
    }
    IntensityEstimate e;
    e.times = std::move(times);
    e.box = std::move(box);
    e.mean_count = mean;
    e.std_error = std::sqrt(var / n);
    e.replicates = static_cast<long>(vals.size());
    return e;
}

double z_score(const IntensityEstimate& a, const IntensityEstimate& b) {
    const double denom = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    const double diff = a.mean_count - b.mean_count;
    if (denom == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / denom;
}

TimePoint embed_scalar(double x, int dim) {
    TimePoint t(static_cast<size_t>(dim), 0.0);
    t[0] = x;
    return t;
}

}  // namespace

double compensated_sum(const std::vector<double>& xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

IntensityEstimate estimate_intensity(const std::vector<SystemSample>& samples,
                                     const std::vector<size_t>& time_indices, const std::vector<Interval>& box,
                                     const std::vector<TimePoint>& times) {
    if (samples.empty()) throw std::invalid_argument("estimate_intensity: empty sample stream");
    if (time_indices.size() != box.size())
        throw std::invalid_argument("estimate_intensity: box dimensions must match times-subset length");
    std::vector<uint32_t> counts(samples.size(), 0);
    for (size_t r = 0; r < samples.size(); ++r) {
        const auto& s = samples[r];
        uint32_t c = 0;
        for (size_t i = 0; i < s.n_particles(); ++i) {
            bool in = true;
            for (size_t k = 0; k < time_indices.size() && in; ++k) {
                const double v = s.value(i, time_indices[k]);
                in = (v >= box[k].lo && v <= box[k].hi);
            }
            if (in) ++c;
        }
        counts[r] = c;
    }
    std::vector<TimePoint> sel;
    sel.reserve(time_indices.size());
    for (size_t k : time_indices) sel.push_back(times[k]);
    return estimate_from_counts(counts, std::move(sel), box);
}

IntensityEstimate estimate_intensity_mc(const PairSpec& pair, const CountQuery& query, int replicates, uint64_t seed,
                                        uint64_t task_tag, int n_threads) {
    const auto counts = simulate_box_counts(pair, query, replicates, seed, task_tag, n_threads);
    return estimate_from_counts(counts, query.times, query.box);
}

std::optional<double> analytic_intensity(const PairSpec& pair, const CountQuery& query) {
    if (query.times.size() == 1) return onedim_intensity(pair, query.times[0], query.box[0].lo, query.box[0].hi);
    if (query.times.size() == 2 && !pair.measure().has_gauss_terms()) {
        const Rect rect{query.box[0].lo, query.box[0].hi, query.box[1].lo, query.box[1].hi};
        return bivariate_intensity(pair, query.times[0], query.times[1], rect);
    }
    return std::nullopt;
}

StatDesign default_stat_design(int dim) {
    StatDesign d;
    const std::vector<Interval> boxes{{0.0, 1.0}, {-1.0, 0.0}, {-2.0, 2.0}};
    for (const auto& b : boxes)
        for (double t : {0.0, 0.5, 1.0}) d.entries.push_back({{embed_scalar(t, dim)}, {b}});
    d.entries.push_back({{embed_scalar(0.0, dim), embed_scalar(1.0, dim)}, {{0.0, 1.0}, {-1.0, 1.0}}});
    d.shifts = {embed_scalar(0.5, dim), embed_scalar(1.0, dim)};
    return d;
}

std::vector<DesignEntry> default_law_design(int dim) { return default_stat_design(dim).entries; }

StationarityReport stationarity_test(const PairSpec& pair, const StatDesign& design, int replicates, double alpha,
                                     uint64_t seed, int n_threads) {
    if (design.entries.empty() || design.shifts.empty())
        throw std::invalid_argument("stationarity_test: empty design");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("stationarity_test: alpha in (0,1) required");
    StationarityReport rep;
    rep.alpha = alpha;
    const size_t k = design.entries.size() * design.shifts.size();
    rep.z_crit = norm_ppf(1.0 - alpha / (2.0 * static_cast<double>(k)));
    std::unordered_map<uint64_t, IntensityEstimate> cache;
    auto arm_estimate = [&](const std::vector<TimePoint>& times, const std::vector<Interval>& box) {
        const uint64_t tag = arm_tag(times, box, 0x41524d00ULL);
        auto it = cache.find(tag);
        if (it != cache.end()) return it->second;
        IntensityEstimate e = estimate_intensity_mc(pair, {times, box}, replicates, seed, tag, n_threads);
        cache.emplace(tag, e);
        return e;
    };
    rep.pass = true;
    for (const auto& entry : design.entries) {
        for (const auto& h : design.shifts) {
            StatComparison c;
            c.base = entry;
            c.shift = h;
            std::vector<TimePoint> shifted;
            shifted.reserve(entry.times.size());
            for (const auto& t : entry.times) shifted.push_back(time_add(t, h));
            c.est_a = arm_estimate(entry.times, entry.box);
            c.est_b = arm_estimate(shifted, entry.box);
            c.analytic_a = analytic_intensity(pair, {entry.times, entry.box});
            c.analytic_b = analytic_intensity(pair, {shifted, entry.box});
            c.z = z_score(c.est_a, c.est_b);
            if (std::fabs(c.z) > rep.z_crit) rep.pass = false;
            rep.comparisons.push_back(std::move(c));
        }
    }
    return rep;
}

EqualInLawMcReport equal_in_law_mc(const PairSpec& pair_a, const PairSpec& pair_b,
                                   const std::vector<DesignEntry>& design, int replicates, double alpha,
                                   uint64_t seed, int n_threads) {
    if (design.empty()) throw std::invalid_argument("equal_in_law_mc: empty design");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("equal_in_law_mc: alpha in (0,1) required");
    EqualInLawMcReport rep;
    rep.alpha = alpha;
    rep.z_crit = norm_ppf(1.0 - alpha / (2.0 * static_cast<double>(design.size())));
    rep.pass = true;
    for (const auto& entry : design) {
        LawComparison c;
        c.entry = entry;
        // distinct arm salts keep the two systems independent even when the
        // pairs coincide (pair vs itself must be a genuine null comparison)
        c.est_a = estimate_intensity_mc(pair_a, {entry.times, entry.box}, replicates, seed,
                                        arm_tag(entry.times, entry.box, 0x5359531aULL), n_threads);
        c.est_b = estimate_intensity_mc(pair_b, {entry.times, entry.box}, replicates, seed,
                                        arm_tag(entry.times, entry.box, 0x5359532bULL), n_threads);
        c.analytic_a = analytic_intensity(pair_a, {entry.times, entry.box});
        c.z = z_score(c.est_a, c.est_b);
        if (std::fabs(c.z) > rep.z_crit) rep.pass = false;
        rep.comparisons.push_back(std::move(c));
    }
    return rep;
}

}  // namespace gsys
