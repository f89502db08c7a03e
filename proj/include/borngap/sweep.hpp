#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <mutex>
#include <thread>
#include <vector>

#include <json.hpp>

#include "borngap/common.hpp"
#include "borngap/params.hpp"

namespace borngap::sweep {

// ---------------------------------------------------------------------------
// Log-log fitting
// ---------------------------------------------------------------------------

struct GrowthFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::optional<double> target;
    int point_count = 0;
};

/// Ordinary least squares on (log x, log y).
inline GrowthFit fit_loglog(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 4)
        throw validation_error("fit_loglog: need at least 4 points, got " +
                               std::to_string(points.size()));
    for (const auto& [x, y] : points)
        if (!(x > 0.0) || !(y > 0.0))
            throw validation_error("fit_loglog: all points must be positive");
    const int n = static_cast<int>(points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        const double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    GrowthFit fit;
    fit.point_count = n;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw validation_error("fit_loglog: degenerate abscissae");
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / n;
    for (const auto& [x, y] : points) {
        const double ly = std::log(y);
        const double pred = fit.intercept + fit.slope * std::log(x);
        ss_res += (ly - pred) * (ly - pred);
        ss_tot += (ly - mean_y) * (ly - mean_y);
    }
    fit.r_squared = (ss_tot == 0.0) ? 1.0 : std::max(0.0, 1.0 - ss_res / ss_tot);
    return fit;
}

// ---------------------------------------------------------------------------
// Deterministic parallel map
// ---------------------------------------------------------------------------

/// Runs fn(0..count-1), each index exactly once, result independent of the
/// thread count because every item writes only its own slot.
template <class F>
void parallel_map(std::size_t count, int threads, F&& fn) {
    if (count == 0) return;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int nthreads =
        std::max(1, std::min<int>(threads <= 0 ? static_cast<int>(hw) : threads,
                                  static_cast<int>(count)));
    if (nthreads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    std::atomic<bool> panic{false};
    std::string panic_msg;
    std::mutex panic_mu;
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count || panic.load()) return;
                try {
                    fn(i);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(panic_mu);
                    panic.store(true);
                    if (panic_msg.empty()) panic_msg = e.what();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (panic.load()) throw error(errc::nonconvergence, "parallel_map worker: " + panic_msg);
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

struct GridPoint {
    double L = 0.0;
    double t = 0.0;
    double sigma = 0.0;
    double r = 0.0;
};

struct SweepRow {
    GridPoint point;
    complex value{0.0, 0.0};
    double err_estimate = 0.0;
    std::string flags;  // empty when clean; "error:<what>" or labels otherwise
};

struct SweepResult {
    std::string experiment_id;
    ModelParams params;
    std::vector<SweepRow> rows;
    std::optional<GrowthFit> fit;
    bool failed = false;
    int excluded_count = 0;
};

struct Experiment {
    std::string id;
    ModelParams params;
    std::vector<GridPoint> grid;
    /// evaluate one grid point (may throw; exceptions become row flags)
    std::function<KernelValue(const GridPoint&)> eval;
    /// optional post-hoc flag, e.g. a low-confidence marker
    std::function<std::string(const GridPoint&, const KernelValue&)> flagger;
    /// optional fit over the clean rows
    std::function<std::optional<GrowthFit>(const std::vector<SweepRow>&)> fit;
};

/// Evaluates every grid point under the deterministic parallel map.  Failed
/// points are recorded with flags, never dropped; more than half failing
/// marks the sweep failed.  The fit sees only the clean rows.
inline SweepResult run_sweep(const Experiment& exp, int threads = 0) {
    if (exp.grid.empty()) throw validation_error("run_sweep: empty grid");
    if (!exp.eval) throw validation_error("run_sweep: experiment has no evaluator");
    SweepResult result;
    result.experiment_id = exp.id;
    result.params = exp.params;
    result.rows.resize(exp.grid.size());
    parallel_map(exp.grid.size(), threads, [&](std::size_t i) {
        SweepRow& row = result.rows[i];
        row.point = exp.grid[i];
        try {
            const KernelValue kv = exp.eval(exp.grid[i]);
            row.value = kv.value;
            row.err_estimate = kv.err_estimate;
            if (exp.flagger) row.flags = exp.flagger(exp.grid[i], kv);
        } catch (const nonconvergence_error& e) {
            row.value = e.best.value;
            row.err_estimate = e.best.err_estimate;
            row.flags = std::string("error:") + e.what();
        } catch (const std::exception& e) {
            row.flags = std::string("error:") + e.what();
        }
    });
    std::size_t bad = 0;
    for (const auto& row : result.rows)
        if (!row.flags.empty()) ++bad;
    result.excluded_count = static_cast<int>(bad);
    if (2 * bad > result.rows.size()) {
        result.failed = true;
        return result;
    }
    if (exp.fit) {
        std::vector<SweepRow> clean;
        clean.reserve(result.rows.size());
        for (const auto& row : result.rows)
            if (row.flags.empty()) clean.push_back(row);
        result.fit = exp.fit(clean);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal form; "inf" for the p = infinity sentinel.
inline std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline constexpr const char* csv_header =
    "experiment_id,n,m,alpha,p,delta,c_ball,L,t,sigma,r,"
    "re_value,im_value,abs_value,err_estimate,flags";

/// One row per grid point; every row carries the full parameter snapshot.
/// `config_json` is embedded as a comment so the file is self-reproducing.
inline std::string render_csv(const SweepResult& res, const std::string& config_json) {
    std::string out;
    out += "# borngap sweep\n";
    out += "# config " + config_json + "\n";
    out += csv_header;
    out += '\n';
    const ModelParams& mp = res.params;
    for (const auto& row : res.rows) {
        out += res.experiment_id;
        out += ',' + std::to_string(mp.n) + ',' + std::to_string(mp.m);
        out += ',' + fmt_double(mp.alpha) + ',' + fmt_double(mp.p);
        out += ',' + fmt_double(mp.delta) + ',' + fmt_double(mp.c_ball);
        out += ',' + fmt_double(row.point.L) + ',' + fmt_double(row.point.t);
        out += ',' + fmt_double(row.point.sigma) + ',' + fmt_double(row.point.r);
        out += ',' + fmt_double(row.value.real()) + ',' + fmt_double(row.value.imag());
        out += ',' + fmt_double(std::abs(row.value)) + ',' + fmt_double(row.err_estimate);
        out += ',' + row.flags;
        out += '\n';
    }
    return out;
}

inline nlohmann::json summary_json(const SweepResult& res,
                                   const nlohmann::json& config) {
    nlohmann::json j;
    j["experiment_id"] = res.experiment_id;
    j["failed"] = res.failed;
    if (res.fit) {
        j["slope"] = res.fit->slope;
        j["intercept"] = res.fit->intercept;
        j["r_squared"] = res.fit->r_squared;
        j["point_count"] = res.fit->point_count;
        if (res.fit->target)
            j["target_slope"] = *res.fit->target;
        else
            j["target_slope"] = nullptr;
    } else {
        j["slope"] = nullptr;
        j["intercept"] = nullptr;
        j["r_squared"] = nullptr;
        j["point_count"] = 0;
        j["target_slope"] = nullptr;
    }
    j["excluded_count"] = res.excluded_count;
    j["config"] = config;
    return j;
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot open output file: " + path);
    out << contents;
    if (!out) throw validation_error("failed writing output file: " + path);
}

}  // namespace borngap::sweep
