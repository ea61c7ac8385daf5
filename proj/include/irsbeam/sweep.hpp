#pragma once

// Experiment drivers: the active-element sizing table, the figure-level
// sweeps and their CSV emission. Sweep points are evaluated independently
// (optionally in parallel, capped by IRSBEAM_THREADS) and merged in grid
// order, so output bytes do not depend on the worker count.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "beamforming.hpp"
#include "scenario.hpp"

namespace irsbeam {

// ---------------------------------------------------------------------------
// Link metrics

/// Path gain 10*log10(|r|^2) of a received sample computed under a unit
/// transmit amplitude budget (sum |w_T|^2 = 1).
inline double path_gain_db(cplx r) { return 10.0 * std::log10(std::norm(r)); }

/// Spectral efficiency log2(1 + SNR) of a received power level.
inline double throughput_bps_hz(double received_dbm, double noise_dbm) {
    return std::log2(1.0 + std::pow(10.0, (received_dbm - noise_dbm) / 10.0));
}

// ---------------------------------------------------------------------------
// Parallel evaluation

inline int worker_count(size_t n_jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    size_t n = std::min<size_t>(n_jobs, hw);
    if (const char* env = std::getenv("IRSBEAM_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<size_t>(n, static_cast<size_t>(cap));
    }
    return static_cast<int>(std::max<size_t>(1, n));
}

/// Run body(i) for i in [0, n); results must be written by index.
inline void parallel_for(size_t n, const std::function<void(size_t)>& body) {
    int workers = worker_count(n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Sizing table

struct Table1Cell {
    Point2 irs_center;
    int irs_size = 0;
    int span_based = 0;
    int far_field = 0;
    int main_lobe = 0;
};

/// Active-element counts of the three sizing schemes for the reference
/// setup: 64-element Tx at the origin, one-element Rx, IRS sizes
/// {2048, 1024, 512, 256} at (0, 933) and (933, 933) wavelengths.
inline std::vector<Table1Cell> run_table1() {
    ArraySpec tx{{0.0, 0.0}, 0.0, 64, 0.5};
    ArraySpec rx{{466.0, 0.0}, 0.0, 1, 0.5};
    std::vector<Table1Cell> cells;
    for (Point2 pos : {Point2{0.0, 933.0}, Point2{933.0, 933.0}})
        for (int size : {2048, 1024, 512, 256}) {
            ArraySpec irs{pos, pi, size, 0.5};
            Table1Cell cell;
            cell.irs_center = pos;
            cell.irs_size = size;
            cell.span_based = active_element_count(SizingMethod::span_based, tx, rx, irs);
            cell.far_field = active_element_count(SizingMethod::far_field, tx, rx, irs);
            cell.main_lobe = active_element_count(SizingMethod::main_lobe, tx, rx, irs);
            cells.push_back(cell);
        }
    return cells;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepKind { pathgain, convergence, rxcompare, throughput, coverage };

inline const char* to_string(SweepKind k) {
    switch (k) {
        case SweepKind::pathgain: return "pathgain";
        case SweepKind::convergence: return "convergence";
        case SweepKind::rxcompare: return "rxcompare";
        case SweepKind::throughput: return "throughput";
        case SweepKind::coverage: return "coverage";
    }
    return "?";
}

inline SweepKind parse_sweep_kind(const std::string& s) {
    if (s == "pathgain") return SweepKind::pathgain;
    if (s == "convergence") return SweepKind::convergence;
    if (s == "rxcompare") return SweepKind::rxcompare;
    if (s == "throughput") return SweepKind::throughput;
    if (s == "coverage") return SweepKind::coverage;
    throw std::invalid_argument("unknown sweep kind: " + s);
}

struct SweepResult {
    std::string x;        // independent variable (size, position, distance, "x:y" cell)
    SizingMethod method = SizingMethod::span_based;
    int n_active = 0;     // Tx elements carrying power
    double path_gain_db = 0.0;
    double rx_power_dbm = 0.0;
    double throughput = 0.0;
};

/// Grid specification: "a,b,c" (list), "lin:lo:hi:n", "log:lo:hi:n" or
/// "grid:x0:x1:nx:y0:y1:ny" for 2-D coverage grids.
struct GridSpec {
    std::vector<double> values;
    std::vector<Point2> cells; // non-empty only for 2-D grids
    bool is_2d() const { return !cells.empty(); }
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::vector<double> spaced(double lo, double hi, int n, bool logarithmic) {
    if (n < 2) throw std::invalid_argument("grid: need at least 2 points");
    if (logarithmic && (!(lo > 0.0) || !(hi > 0.0)))
        throw std::invalid_argument("grid: log spacing needs positive bounds");
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / (n - 1);
        v[static_cast<size_t>(i)] = logarithmic ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    }
    return v;
}

} // namespace detail

inline GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    if (text.rfind("lin:", 0) == 0 || text.rfind("log:", 0) == 0) {
        std::vector<std::string> parts = detail::split(text, ':');
        if (parts.size() != 4) throw std::invalid_argument("grid: expected lin:lo:hi:n");
        g.values = detail::spaced(std::stod(parts[1]), std::stod(parts[2]), std::stoi(parts[3]),
                                  parts[0] == "log");
        return g;
    }
    if (text.rfind("grid:", 0) == 0) {
        std::vector<std::string> parts = detail::split(text, ':');
        if (parts.size() != 7) throw std::invalid_argument("grid: expected grid:x0:x1:nx:y0:y1:ny");
        std::vector<double> xs = detail::spaced(std::stod(parts[1]), std::stod(parts[2]), std::stoi(parts[3]), false);
        std::vector<double> ys = detail::spaced(std::stod(parts[4]), std::stod(parts[5]), std::stoi(parts[6]), false);
        for (double y : ys)
            for (double x : xs) g.cells.push_back({x, y});
        return g;
    }
    for (const std::string& item : detail::split(text, ',')) {
        std::string t = detail::trim(item);
        if (t.empty()) throw std::invalid_argument("grid: empty list entry");
        g.values.push_back(std::stod(t));
    }
    return g;
}

inline GridSpec default_grid(SweepKind kind) {
    switch (kind) {
        case SweepKind::pathgain: return parse_grid("256,512,1024,2048");
        case SweepKind::convergence: return parse_grid("log:1000:150000:40");
        case SweepKind::rxcompare: return parse_grid("1,2,4,8,16,32,64");
        case SweepKind::throughput: return parse_grid("lin:280:2800:64");
        case SweepKind::coverage: return parse_grid("grid:-933:933:25:50:1450:15");
    }
    throw std::logic_error("default_grid: unhandled kind");
}

namespace detail {

inline std::string format_value(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline SweepResult evaluate_plan_point(const std::string& x, const Scenario& sc, const ArraySpec& rx,
                                       const ArraySpec& irs, SizingMethod method) {
    BeamPlan plan = build_plan(sc.tx, rx, irs, method);
    cplx r = received_sample(plan, sc.pattern(), sc.propagation);
    SweepResult row;
    row.x = x;
    row.method = method;
    row.n_active = plan.n_active;
    row.path_gain_db = path_gain_db(r);
    row.rx_power_dbm = sc.tx_power_dbm + row.path_gain_db;
    row.throughput = throughput_bps_hz(row.rx_power_dbm, sc.noise_dbm);
    return row;
}

/// Two-tier segmented receive design focused on the transmitter, evaluated
/// against the exact per-element field (the convergence experiment has no
/// reflector in it).
inline SweepResult evaluate_direct_point(const std::string& x, const Scenario& sc, const ArraySpec& rx,
                                         bool segmented) {
    ArrayDesign tx_design{sc.tx, {}};
    double g_t = sc.tx.n_elements > 1 ? view_of(sc.tx, rx.center).gamma : 0.0;
    tx_design.segments.push_back({0, sc.tx.n_elements, g_t, 0.0,
                                  1.0 / std::sqrt(static_cast<double>(sc.tx.n_elements))});

    ArrayDesign rx_design{rx, {}};
    double amp = 1.0 / std::sqrt(static_cast<double>(rx.n_elements));
    if (segmented) {
        Segmentation seg = segment(rx, element_positions(sc.tx));
        for (int n = 0; n < seg.n_segments; ++n) {
            ArraySpec s = seg.segment_spec(n);
            AngularView v = view_of(s, sc.tx.center);
            rx_design.segments.push_back({n * seg.elements_per_segment, seg.elements_per_segment,
                                          v.gamma, -wavenumber * v.distance, amp});
        }
    } else {
        AngularView v = view_of(rx, sc.tx.center);
        rx_design.segments.push_back({0, rx.n_elements, v.gamma, 0.0, amp});
    }

    std::vector<cplx> wt = tx_design.element_weights();
    std::vector<cplx> wr = rx_design.element_weights();
    cplx r = exact_direct_field(sc.tx, wt, rx, wr, sc.propagation);

    SweepResult row;
    row.x = x;
    row.method = segmented ? SizingMethod::span_based : SizingMethod::far_field_conv;
    row.n_active = sc.tx.n_elements;
    row.path_gain_db = path_gain_db(r);
    row.rx_power_dbm = sc.tx_power_dbm + row.path_gain_db;
    row.throughput = throughput_bps_hz(row.rx_power_dbm, sc.noise_dbm);
    return row;
}

} // namespace detail

/// One row per grid point per method, in grid-major order.
inline std::vector<SweepResult> run_sweep(SweepKind kind, const Scenario& sc, const GridSpec& grid) {
    struct Job {
        std::string x;
        ArraySpec rx;
        ArraySpec irs;
        SizingMethod method = SizingMethod::span_based;
        bool direct_segmented = false;
    };
    std::vector<Job> jobs;
    bool direct = (kind == SweepKind::convergence);

    switch (kind) {
        case SweepKind::pathgain: {
            const ArraySpec& irs = sc.require_irs();
            for (double v : grid.values) {
                if (v < 1 || v != std::floor(v))
                    throw std::invalid_argument("pathgain grid entries must be positive element counts");
                ArraySpec sized = irs;
                sized.n_elements = static_cast<int>(v);
                for (SizingMethod m : {SizingMethod::span_based, SizingMethod::far_field,
                                       SizingMethod::main_lobe, SizingMethod::far_field_conv})
                    jobs.push_back({detail::format_value(v), sc.rx, sized, m, false});
            }
            break;
        }
        case SweepKind::convergence: {
            Point2 dir = sc.rx.center - sc.tx.center;
            double len = norm(dir);
            if (!(len > 0.0)) throw ScenarioError("rx.center", "must differ from tx.center for convergence sweeps");
            dir = (1.0 / len) * dir;
            for (double d : grid.values) {
                if (!(d > 0.0)) throw std::invalid_argument("convergence grid entries must be positive distances");
                ArraySpec rx = sc.rx;
                rx.center = sc.tx.center + d * dir;
                jobs.push_back({detail::format_value(d), rx, {}, SizingMethod::span_based, true});
                jobs.push_back({detail::format_value(d), rx, {}, SizingMethod::far_field_conv, false});
            }
            break;
        }
        case SweepKind::rxcompare: {
            const ArraySpec& irs = sc.require_irs();
            for (double v : grid.values) {
                if (v < 1 || v != std::floor(v))
                    throw std::invalid_argument("rxcompare grid entries must be positive element counts");
                ArraySpec rx = sc.rx;
                rx.n_elements = static_cast<int>(v);
                for (SizingMethod m : {SizingMethod::span_based, SizingMethod::single_element})
                    jobs.push_back({detail::format_value(v), rx, irs, m, false});
            }
            break;
        }
        case SweepKind::throughput: {
            const ArraySpec& irs = sc.require_irs();
            for (double x : grid.values) {
                ArraySpec rx = sc.rx;
                rx.center.x = x;
                jobs.push_back({detail::format_value(x), rx, irs, sc.method, false});
            }
            break;
        }
        case SweepKind::coverage: {
            const ArraySpec& irs = sc.require_irs();
            if (!grid.is_2d()) throw std::invalid_argument("coverage sweeps need a grid:... specification");
            for (Point2 cell : grid.cells) {
                ArraySpec rx = sc.rx;
                rx.center = cell;
                jobs.push_back({detail::format_value(cell.x) + ":" + detail::format_value(cell.y),
                                rx, irs, sc.method, false});
            }
            break;
        }
    }

    std::vector<SweepResult> rows(jobs.size());
    parallel_for(jobs.size(), [&](size_t i) {
        const Job& job = jobs[i];
        rows[i] = direct ? detail::evaluate_direct_point(job.x, sc, job.rx, job.direct_segmented)
                         : detail::evaluate_plan_point(job.x, sc, job.rx, job.irs, job.method);
    });
    return rows;
}

// ---------------------------------------------------------------------------
// CSV emission

inline void write_sweep_csv(std::ostream& out, std::span<const SweepResult> rows) {
    out << "x,method,n_active,path_gain_db,rx_power_dbm,throughput_bps_hz\n";
    for (const SweepResult& r : rows)
        out << r.x << ',' << to_string(r.method) << ',' << r.n_active << ','
            << detail::format_value(r.path_gain_db) << ',' << detail::format_value(r.rx_power_dbm)
            << ',' << detail::format_value(r.throughput) << '\n';
}

inline void write_table1_csv(std::ostream& out, std::span<const Table1Cell> cells) {
    out << "irs_x_wl,irs_y_wl,irs_size,span,far_field,main_lobe\n";
    for (const Table1Cell& c : cells)
        out << detail::format_value(c.irs_center.x) << ',' << detail::format_value(c.irs_center.y)
            << ',' << c.irs_size << ',' << c.span_based << ',' << c.far_field << ',' << c.main_lobe
            << '\n';
}

} // namespace irsbeam
