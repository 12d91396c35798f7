#include "gsys/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "hit_mass.hpp"

namespace gsys {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr uint64_t kSystemStreamTag = 0x53595354454d5331ULL;

struct Hull {
    double lo, hi;
};

Hull box_hull(const std::vector<Interval>& boxes) {
    Hull h{kInf, -kInf};
    for (const auto& b : boxes) {
        if (!(b.lo <= b.hi) || std::isinf(b.lo) || std::isinf(b.hi))
            throw std::invalid_argument("observation boxes must be bounded with lo <= hi");
        h.lo = std::min(h.lo, b.lo);
        h.hi = std::max(h.hi, b.hi);
    }
    return h;
}

struct TimeMoments {
    double mu;  // E xi(t_j), shift included
    double sd;  // sqrt Var xi(t_j)
};

std::vector<TimeMoments> time_moments(const PairSpec& pair, const std::vector<TimePoint>& times) {
    std::vector<TimeMoments> m;
    m.reserve(times.size());
    for (const auto& t : times) {
        const double v = var_at(pair.process(), t);
        m.push_back({pair.mean_at(t), v > 0.0 ? std::sqrt(v) : 0.0});
    }
    return m;
}

double side_bound(const MeasureSpec& m, const std::vector<TimeMoments>& mom, const std::vector<Interval>& boxes,
                  double x0, double x1) {
    double s = 0.0;
    for (size_t j = 0; j < mom.size(); ++j)
        s += detail::hit_mass(m, x0, x1, mom[j].mu, mom[j].sd, boxes[j].lo, boxes[j].hi);
    return s;
}

/// Symmetric factor A with A A^T = cov; eigenvalues in [-1e-9 trace, 0] clamp
/// to zero, anything lower is a factorization failure.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw NotPsdError("eigen factorization failed");
    const double floor = -1e-9 * std::max(cov.trace(), 0.0);
    Eigen::VectorXd d = es.eigenvalues();
    for (int i = 0; i < d.size(); ++i) {
        if (d(i) < floor) throw NotPsdError("covariance beyond PSD tolerance in factorization");
        if (d(i) < 0.0) d(i) = 0.0;
    }
    return es.eigenvectors() * d.cwiseSqrt().asDiagonal();
}

}  // namespace

void SimulationConfig::validate() const {
    if (replicates < 1) throw std::invalid_argument("SimulationConfig: replicates must be >= 1");
    if (times.empty()) throw std::invalid_argument("SimulationConfig: times must be nonempty");
    if (boxes.size() != times.size())
        throw std::invalid_argument("SimulationConfig: need one observation box per time");
    if (window_padding && !(*window_padding > 0.0))
        throw std::invalid_argument("SimulationConfig: window_padding must be > 0");
    box_hull(boxes);
}

WindowResult sampling_window(const PairSpec& pair, const std::vector<TimePoint>& times,
                             const std::vector<Interval>& boxes, double epsilon) {
    if (times.size() != boxes.size()) throw std::invalid_argument("sampling_window: one box per time");
    if (!(epsilon > 0.0)) throw std::invalid_argument("sampling_window: epsilon must be > 0");
    const Hull hull = box_hull(boxes);
    const auto mom = time_moments(pair, times);
    double max_mu = 0.0, max_sd = 0.0;
    for (const auto& m : mom) {
        max_mu = std::max(max_mu, std::fabs(m.mu));
        max_sd = std::max(max_sd, m.sd);
    }
    const double cap = 60.0 * (max_mu + 10.0 * max_sd + 1.0);
    const double step = 0.5;
    WindowResult w{hull.lo, hull.hi, 0.0};
    for (;;) {
        const double left = side_bound(pair.measure(), mom, boxes, -kInf, w.lo);
        const double right = side_bound(pair.measure(), mom, boxes, w.hi, kInf);
        w.bound = left + right;
        if (w.bound <= epsilon) return w;
        bool grew = false;
        if (left > 0.5 * epsilon && hull.lo - w.lo < cap) {
            w.lo -= step;
            grew = true;
        }
        if (right > 0.5 * epsilon && w.hi - hull.hi < cap) {
            w.hi += step;
            grew = true;
        }
        if (!grew)
            throw WindowCapError("sampling_window: padding cap reached with bound " + std::to_string(w.bound));
    }
}

std::vector<double> sample_poisson_starts(const MeasureSpec& m, double lo, double hi, RngStream& rng) {
    const double mass = mass_on_interval(m, lo, hi);
    const uint64_t n = rng.next_poisson(mass);
    std::vector<double> xs(n);
    for (auto& x : xs) x = inverse_cdf_on_window(m, lo, hi, rng.next_uniform());
    std::sort(xs.begin(), xs.end());
    return xs;
}

Eigen::MatrixXd sample_paths(const GridLaw& law, int count, RngStream& rng) {
    const Eigen::MatrixXd a = psd_factor(law.cov);
    const int n = static_cast<int>(law.times.size());
    Eigen::MatrixXd out(count, n);
    Eigen::VectorXd z(n);
    for (int i = 0; i < count; ++i) {
        for (int k = 0; k < n; ++k) z(k) = rng.next_gaussian();
        out.row(i) = (law.mean + a * z).transpose();
    }
    return out;
}

namespace {

SystemSample make_system_sample(const PairSpec& pair, const std::vector<TimePoint>& times, const WindowResult& w,
                                const GridLaw& law, const Eigen::MatrixXd& factor, uint64_t seed, size_t replicate) {
    RngStream rng = RngStream::substream(seed, kSystemStreamTag, replicate);
    SystemSample s;
    s.window_lo = w.lo;
    s.window_hi = w.hi;
    s.truncation_error_bound = w.bound;
    s.n_times = times.size();
    s.start_points = sample_poisson_starts(pair.measure(), w.lo, w.hi, rng);
    const size_t n = times.size();
    s.path_values.resize(s.start_points.size() * n);
    Eigen::VectorXd z(static_cast<int>(n));
    for (size_t i = 0; i < s.start_points.size(); ++i) {
        for (size_t k = 0; k < n; ++k) z(static_cast<int>(k)) = rng.next_gaussian();
        const Eigen::VectorXd xi = law.mean + factor * z;
        for (size_t j = 0; j < n; ++j) s.path_values[i * n + j] = s.start_points[i] + xi(static_cast<int>(j));
    }
    return s;
}

}  // namespace

void simulate_system(const SimulationConfig& config, const std::function<void(size_t, const SystemSample&)>& sink,
                     int n_threads) {
    config.validate();
    const auto& pair = config.pair;
    WindowResult w;
    if (config.window_padding) {
        const Hull hull = box_hull(config.boxes);
        w.lo = hull.lo - *config.window_padding;
        w.hi = hull.hi + *config.window_padding;
        const auto mom = time_moments(pair, config.times);
        w.bound = side_bound(pair.measure(), mom, config.boxes, -kInf, w.lo) +
                  side_bound(pair.measure(), mom, config.boxes, w.hi, kInf);
    } else {
        const double eps = config.epsilon > 0.0 ? config.epsilon : 1e-4 * static_cast<double>(config.boxes.size());
        w = sampling_window(pair, config.times, config.boxes, eps);
    }
    const GridLaw law = pair.shifted_grid_law(config.times);
    const Eigen::MatrixXd factor = psd_factor(law.cov);
    const size_t total = static_cast<size_t>(config.replicates);

    if (n_threads <= 1) {
        for (size_t r = 0; r < total; ++r) sink(r, make_system_sample(pair, config.times, w, law, factor, config.seed, r));
        return;
    }
    const size_t threads = static_cast<size_t>(n_threads);
    const size_t chunk = 4 * threads;
    std::vector<SystemSample> slots(chunk);
    for (size_t base = 0; base < total; base += chunk) {
        const size_t end = std::min(base + chunk, total);
        std::vector<std::thread> workers;
        workers.reserve(threads);
        for (size_t t = 0; t < threads; ++t) {
            workers.emplace_back([&, t] {
                for (size_t r = base + t; r < end; r += threads)
                    slots[r - base] = make_system_sample(pair, config.times, w, law, factor, config.seed, r);
            });
        }
        for (auto& th : workers) th.join();
        for (size_t r = base; r < end; ++r) sink(r, slots[r - base]);
    }
}

std::vector<SystemSample> simulate_system_collect(const SimulationConfig& config, int n_threads) {
    std::vector<SystemSample> out(static_cast<size_t>(config.replicates));
    simulate_system(config, [&](size_t r, const SystemSample& s) { out[r] = s; }, n_threads);
    return out;
}

void write_samples_csv(std::ostream& os, const std::vector<SystemSample>& samples) {
    os << "replicate,particle,start";
    const size_t n_times = samples.empty() ? 0 : samples.front().n_times;
    for (size_t j = 0; j < n_times; ++j) os << ",V_t" << j;
    os << "\n";
    os.precision(17);
    for (size_t r = 0; r < samples.size(); ++r) {
        const auto& s = samples[r];
        for (size_t i = 0; i < s.n_particles(); ++i) {
            os << r << "," << i << "," << s.start_points[i];
            for (size_t j = 0; j < s.n_times; ++j) os << "," << s.value(i, j);
            os << "\n";
        }
    }
}

// ---------------------------------------------------------------------------
// Exact box-count sampler
// ---------------------------------------------------------------------------

namespace {

// One single-term sub-measure of the core region, with its own closed-form
// (or bisection) inversion via inverse_cdf_on_window.
struct CoreComponent {
    MeasureSpec term;
    double mass;
};

// Candidate source: starters on one window tail whose position at time j
// lands in box j. cum is monotone from 0 to rate over [x_lo, x_hi].
struct TailSource {
    size_t time_idx;
    double rate;
    double x_lo, x_hi;
    std::function<double(double)> cum;
};

struct CondLaw {
    // law of the remaining coordinates given coordinate j
    Eigen::VectorXd base_mean;   // size n-1
    Eigen::VectorXd slope;       // times (v - mu_j)
    Eigen::MatrixXd factor;      // (n-1) x (n-1)
};

struct CountPlan {
    std::vector<TimePoint> times;
    std::vector<Interval> box;
    WindowResult window;
    double core_lo = 0.0, core_hi = 0.0;
    std::vector<CoreComponent> core_components;
    double core_mass = 0.0;
    GridLaw law;
    Eigen::MatrixXd core_factor;
    std::vector<TimeMoments> mom;  // effective per-time moments (sd 0 when degenerate)
    std::vector<TailSource> tails;
    std::vector<CondLaw> cond;  // per time index, used when n >= 2
    double tail_rate = 0.0;
};

bool in_box(const std::vector<Interval>& box, const Eigen::VectorXd& v, double x) {
    for (int i = 0; i < v.size(); ++i) {
        const double p = x + v(i);
        if (p < box[static_cast<size_t>(i)].lo || p > box[static_cast<size_t>(i)].hi) return false;
    }
    return true;
}

CountPlan build_count_plan(const PairSpec& pair, const CountQuery& query, double epsilon, double core_budget) {
    if (query.times.empty()) throw std::invalid_argument("count query: times must be nonempty");
    if (query.times.size() != query.box.size()) throw std::invalid_argument("count query: one interval per time");
    CountPlan plan;
    plan.times = query.times;
    plan.box = query.box;
    const double eps = epsilon > 0.0 ? epsilon : 1e-4 * static_cast<double>(query.box.size());
    plan.window = sampling_window(pair, query.times, query.box, eps);
    plan.law = pair.shifted_grid_law(query.times);
    const size_t n = query.times.size();

    // effective per-time moments; tiny variances count as deterministic
    const double det_eps = 1e-12 * std::max(1.0, plan.law.cov.trace() / static_cast<double>(n));
    plan.mom.resize(n);
    for (size_t j = 0; j < n; ++j) {
        const double v = plan.law.cov(static_cast<int>(j), static_cast<int>(j));
        plan.mom[j] = {plan.law.mean(static_cast<int>(j)), v > det_eps ? std::sqrt(v) : 0.0};
    }

    // dense core: all starts that can reach a box within 3.5 sigma
    double reach_lo = kInf, reach_hi = -kInf;
    for (size_t j = 0; j < n; ++j) {
        reach_lo = std::min(reach_lo, query.box[j].lo - plan.mom[j].mu - 3.5 * plan.mom[j].sd);
        reach_hi = std::max(reach_hi, query.box[j].hi - plan.mom[j].mu + 3.5 * plan.mom[j].sd);
    }
    plan.core_lo = std::max(plan.window.lo, reach_lo);
    plan.core_hi = std::min(plan.window.hi, reach_hi);
    if (plan.core_lo >= plan.core_hi) {
        plan.core_lo = plan.core_hi = std::min(std::max(plan.window.lo, reach_lo), plan.window.hi);
    } else {
        double mass = mass_on_interval(pair.measure(), plan.core_lo, plan.core_hi);
        // Push excess mass into the exactly-handled tails, always trimming from
        // the denser window edge so the box-adjacent region stays dense.
        int guard = 0;
        while (mass > core_budget && ++guard < 64) {
            const double width = plan.core_hi - plan.core_lo;
            const double probe = std::max(1e-9, 1e-3 * width);
            const double dl = mass_on_interval(pair.measure(), plan.core_lo, plan.core_lo + probe);
            const double dr = mass_on_interval(pair.measure(), plan.core_hi - probe, plan.core_hi);
            const double trim = std::min(mass - core_budget, 0.25 * mass);
            if (dl >= dr)
                plan.core_lo = inverse_cdf_on_window(pair.measure(), plan.core_lo, plan.core_hi, trim / mass);
            else
                plan.core_hi = inverse_cdf_on_window(pair.measure(), plan.core_lo, plan.core_hi, 1.0 - trim / mass);
            mass = mass_on_interval(pair.measure(), plan.core_lo, plan.core_hi);
        }
    }

    if (plan.core_hi > plan.core_lo) {
        for (const auto& t : pair.measure().exp_terms()) {
            MeasureSpec single({t}, {});
            const double m = mass_on_interval(single, plan.core_lo, plan.core_hi);
            if (m > 0.0) plan.core_components.push_back({std::move(single), m});
        }
        for (const auto& g : pair.measure().gauss_terms()) {
            MeasureSpec single({}, {g});
            const double m = mass_on_interval(single, plan.core_lo, plan.core_hi);
            if (m > 0.0) plan.core_components.push_back({std::move(single), m});
        }
        for (const auto& c : plan.core_components) plan.core_mass += c.mass;
    }
    plan.core_factor = psd_factor(plan.law.cov);

    // tail hitter sources, one per (side, time, measure term)
    auto add_tail = [&](double x0, double x1) {
        if (!(x0 < x1)) return;
        for (size_t j = 0; j < n; ++j) {
            const double mu = plan.mom[j].mu, sd = plan.mom[j].sd;
            const double bl = query.box[j].lo, bu = query.box[j].hi;
            for (const auto& t : pair.measure().exp_terms()) {
                const double rate = detail::hit_mass_exp(t, x0, x1, mu, sd, bl, bu);
                if (rate > 1e-14)
                    plan.tails.push_back({j, rate, x0, x1,
                                          [t, x0, mu, sd, bl, bu](double x) {
                                              return detail::hit_mass_exp(t, x0, x, mu, sd, bl, bu);
                                          }});
            }
            for (const auto& g : pair.measure().gauss_terms()) {
                const double rate = detail::hit_mass_gauss(g, x0, x1, mu, sd, bl, bu);
                if (rate > 1e-14)
                    plan.tails.push_back({j, rate, x0, x1,
                                          [g, x0, mu, sd, bl, bu](double x) {
                                              return detail::hit_mass_gauss(g, x0, x, mu, sd, bl, bu);
                                          }});
            }
        }
    };
    add_tail(plan.window.lo, plan.core_lo);
    add_tail(plan.core_hi, plan.window.hi);
    for (const auto& s : plan.tails) plan.tail_rate += s.rate;

    // conditional laws of the other coordinates given coordinate j
    if (n >= 2) {
        plan.cond.resize(n);
        for (size_t j = 0; j < n; ++j) {
            const int nj = static_cast<int>(j);
            Eigen::VectorXd mo(static_cast<int>(n) - 1);
            Eigen::VectorXd cross(static_cast<int>(n) - 1);
            Eigen::MatrixXd co(static_cast<int>(n) - 1, static_cast<int>(n) - 1);
            int r = 0;
            for (int i = 0; i < static_cast<int>(n); ++i) {
                if (i == nj) continue;
                mo(r) = plan.law.mean(i);
                cross(r) = plan.law.cov(i, nj);
                int cidx = 0;
                for (int k = 0; k < static_cast<int>(n); ++k) {
                    if (k == nj) continue;
                    co(r, cidx++) = plan.law.cov(i, k);
                }
                ++r;
            }
            CondLaw c;
            c.base_mean = mo;
            const double vj = plan.mom[j].sd * plan.mom[j].sd;
            if (vj > 0.0) {
                c.slope = cross / vj;
                co -= (cross * cross.transpose()) / vj;
            } else {
                c.slope = Eigen::VectorXd::Zero(static_cast<int>(n) - 1);
            }
            c.factor = psd_factor(co);
            plan.cond[j] = std::move(c);
        }
    }
    return plan;
}

double invert_tail_cdf(const TailSource& src, double target) {
    double lo = src.x_lo, hi = src.x_hi;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::fabs(hi) + std::fabs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (src.cum(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

uint32_t run_count_replicate(const CountPlan& plan, RngStream& rng) {
    const size_t n = plan.times.size();
    uint32_t count = 0;
    Eigen::VectorXd z(static_cast<int>(n));
    // dense core, term by term (Poisson superposition)
    for (const auto& comp : plan.core_components) {
        const uint64_t m = rng.next_poisson(comp.mass);
        const bool dirac = comp.term.is_finite() && comp.term.gauss_terms().size() == 1 &&
                           comp.term.gauss_terms()[0].variance == 0.0;
        for (uint64_t i = 0; i < m; ++i) {
            const double x = dirac ? comp.term.gauss_terms()[0].mean
                                   : inverse_cdf_on_window(comp.term, plan.core_lo, plan.core_hi, rng.next_uniform());
            for (size_t k = 0; k < n; ++k) z(static_cast<int>(k)) = rng.next_gaussian();
            const Eigen::VectorXd xi = plan.law.mean + plan.core_factor * z;
            if (in_box(plan.box, xi, x)) ++count;
        }
    }
    // tail hitters with multiplicity correction
    Eigen::VectorXd xi(static_cast<int>(n));
    for (const auto& src : plan.tails) {
        const uint64_t m = rng.next_poisson(src.rate);
        for (uint64_t i = 0; i < m; ++i) {
            const double x = invert_tail_cdf(src, rng.next_uniform() * src.rate);
            const size_t j = src.time_idx;
            const double v = truncated_normal(plan.mom[j].mu, plan.mom[j].sd, plan.box[j].lo - x,
                                              plan.box[j].hi - x, rng.next_uniform());
            xi(static_cast<int>(j)) = v;
            if (n >= 2) {
                const auto& c = plan.cond[j];
                Eigen::VectorXd zo(static_cast<int>(n) - 1);
                for (int k = 0; k + 1 < static_cast<int>(n); ++k) zo(k) = rng.next_gaussian();
                const Eigen::VectorXd others = c.base_mean + c.slope * (v - plan.mom[j].mu) + c.factor * zo;
                int r = 0;
                for (size_t k = 0; k < n; ++k) {
                    if (k == j) continue;
                    xi(static_cast<int>(k)) = others(r++);
                }
            }
            // multiplicity over per-time hits; the j-th hit holds by construction
            int hits = 0;
            bool all = true;
            for (size_t k = 0; k < n; ++k) {
                const double p = x + xi(static_cast<int>(k));
                const bool in = (p >= plan.box[k].lo && p <= plan.box[k].hi);
                hits += in ? 1 : 0;
                all = all && in;
            }
            if (hits < 1) hits = 1;
            const bool accept = (hits == 1) || (rng.next_uniform() * hits < 1.0);
            if (accept && all) ++count;
        }
    }
    return count;
}

}  // namespace

std::vector<uint32_t> simulate_box_counts(const PairSpec& pair, const CountQuery& query, int replicates,
                                          uint64_t seed, uint64_t task_tag, int n_threads, double epsilon,
                                          double core_mass_budget, CountSamplerDiagnostics* diag) {
    if (replicates < 1) throw std::invalid_argument("simulate_box_counts: replicates must be >= 1");
    const CountPlan plan = build_count_plan(pair, query, epsilon, core_mass_budget);
    if (diag) {
        diag->window = plan.window;
        diag->core_lo = plan.core_lo;
        diag->core_hi = plan.core_hi;
        diag->core_mass = plan.core_mass;
        diag->tail_candidate_rate = plan.tail_rate;
    }
    std::vector<uint32_t> counts(static_cast<size_t>(replicates));
    auto worker = [&](size_t begin, size_t end) {
        for (size_t r = begin; r < end; ++r) {
            RngStream rng = RngStream::substream(seed, task_tag, r);
            counts[r] = run_count_replicate(plan, rng);
        }
    };
    if (n_threads <= 1) {
        worker(0, counts.size());
    } else {
        const size_t threads = static_cast<size_t>(n_threads);
        std::vector<std::thread> pool;
        pool.reserve(threads);
        const size_t block = (counts.size() + threads - 1) / threads;
        for (size_t t = 0; t < threads; ++t) {
            const size_t b = std::min(t * block, counts.size());
            const size_t e = std::min(b + block, counts.size());
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return counts;
}

}  // namespace gsys
