// Acceptance suite: end-to-end checks of the sizing table, oracle agreement,
// kernel behavior, phase alignment, figure-level orderings and output
// determinism. Prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "irsbeam/beamforming.hpp"
#include "irsbeam/channel.hpp"
#include "irsbeam/geometry.hpp"
#include "irsbeam/scenario.hpp"
#include "irsbeam/sweep.hpp"

using namespace irsbeam;

namespace {

int g_failures = 0;

struct Criterion {
    int id;
    std::string label;
    bool pass = true;
    std::string detail;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Criterion(int id_, std::string label_) : id(id_), label(std::move(label_)) {}

    void expect(bool ok, const std::string& why) {
        if (!ok && pass) {
            pass = false;
            detail = why;
        }
    }

    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }

    void finish() {
        double t = seconds();
        std::printf("%s  criterion %2d  %-38s (%.2f s)%s%s\n", pass ? "PASS" : "FAIL", id,
                    label.c_str(), t, detail.empty() ? "" : "  -- ", detail.c_str());
        if (!pass) ++g_failures;
    }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

ArraySpec reference_tx() { return {{0.0, 0.0}, 0.0, 64, 0.5}; }
ArraySpec irs_at(Point2 p, int n) { return {p, pi, n, 0.5}; }

// ---------------------------------------------------------------------------

void criterion_table(int id, const char* label, int column, const int want0[4], const int want1[4],
                     double budget_s) {
    Criterion c(id, label);
    std::vector<Table1Cell> cells = run_table1();
    c.expect(cells.size() == 8, "expected 8 table cells");
    for (size_t i = 0; i < cells.size() && c.pass; ++i) {
        const Table1Cell& cell = cells[i];
        int got = column == 0 ? cell.span_based : column == 1 ? cell.far_field : cell.main_lobe;
        int want = i < 4 ? want0[i] : want1[i - 4];
        if (got != want)
            c.expect(false, fmt("size %.0f at (%.0f", cell.irs_size, cell.irs_center.x) +
                                fmt(",%.0f): got %.0f", cell.irs_center.y, got) + fmt(" want %.0f", want));
    }
    c.expect(c.seconds() < budget_s, fmt("runtime %.2f s exceeds %.0f s", c.seconds(), budget_s));
    c.finish();
}

void criterion_oracle_equivalence() {
    Criterion c(4, "segmented model vs exact field oracle");
    RadiationPattern rp{0.285};
    PropagationParams fs = PropagationParams::free_space();
    std::mt19937_64 rng(20240901);
    std::uniform_real_distribution<double> ux(-400.0, 400.0);
    std::uniform_real_distribution<double> uy_irs(500.0, 1100.0);
    std::uniform_real_distribution<double> uy_rx(0.0, 150.0);
    const int tx_sizes[] = {8, 16, 32, 64};
    const int irs_sizes[] = {32, 64, 128, 256, 512};
    const int rx_sizes[] = {1, 2, 4, 8, 16};
    const SizingMethod methods[] = {SizingMethod::span_based, SizingMethod::far_field,
                                    SizingMethod::main_lobe, SizingMethod::far_field_conv};

    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        ArraySpec tx{{0.0, 0.0}, 0.0, tx_sizes[trial % 4], 0.5};
        ArraySpec irs = irs_at({ux(rng), uy_irs(rng)}, irs_sizes[trial % 5]);
        ArraySpec rx{{ux(rng), uy_rx(rng)}, 0.0, rx_sizes[trial % 5], 0.5};
        SizingMethod method = methods[trial % 4];

        BeamPlan plan = build_plan(tx, rx, irs, method);
        cplx model = received_sample(plan, rp, fs);
        cplx exact = exact_field_oracle(tx, plan.tx.element_weights(), irs, plan.irs.element_phases(),
                                        rx, plan.rx.element_weights(), rp, fs);
        double diff = std::fabs(10.0 * std::log10(std::norm(model) / std::norm(exact)));
        worst = std::max(worst, diff);
        if (diff > 0.5) {
            c.expect(false, fmt("trial %.0f: |model - oracle| = %.3f dB", trial, diff));
            break;
        }
    }
    if (c.pass) c.detail = fmt("worst deviation %.3f dB over 20 geometries", worst);
    c.expect(c.seconds() < 60.0, fmt("runtime %.1f s exceeds 60 s", c.seconds()));
    c.finish();
}

void criterion_kernel_suite() {
    Criterion c(5, "Dirichlet kernel grid suite");
    const int sizes[] = {1, 2, 8, 64, 512, 4096};
    const int samples = 10000;
    for (int n : sizes) {
        if (std::fabs(dirichlet_kernel(0.0, n) - n) > 1e-9 * n)
            c.expect(false, fmt("f(0;%.0f) != n", n));
        for (int m = 1; m < n && c.pass; ++m) {
            double theta = 2.0 * pi * m / n;
            if (std::fabs(dirichlet_kernel(theta, n)) > 1e-6 * n)
                c.expect(false, fmt("null violated at m=%.0f, n=%.0f", m, n));
        }
        for (int i = 0; i < samples && c.pass; ++i) {
            double theta = -pi + 2.0 * pi * i / (samples - 1);
            double f = dirichlet_kernel(theta, n);
            if (std::fabs(f - dirichlet_kernel(-theta, n)) > 1e-9 * n)
                c.expect(false, fmt("evenness violated at n=%.0f", n));
            if (std::fabs(f) > n + 1e-9) c.expect(false, fmt("|f| > n at n=%.0f", n));
        }
        for (int i = 0; i < samples && c.pass; ++i) {
            double theta = (-1.0 + 2.0 * i / (samples - 1)) * pi / n;
            double err = std::fabs(dirichlet_kernel(theta, n) - main_lobe_approx(theta, n)) / n;
            if (err > 0.10)
                c.expect(false, fmt("approx error %.3f at n=%.0f", err, n));
        }
        if (!c.pass) break;
    }
    c.expect(c.seconds() < 5.0, fmt("runtime %.2f s exceeds 5 s", c.seconds()));
    c.finish();
}

void criterion_phase_alignment() {
    Criterion c(6, "phase alignment of main-lobe terms");
    RadiationPattern rp{0.285};
    PropagationParams fs = PropagationParams::free_space();
    ArraySpec tx = reference_tx();
    ArraySpec rx{{466.0, 0.0}, 0.0, 1, 0.5};
    ArraySpec irs = irs_at({0.0, 933.0}, 512);

    BeamPlan plan = build_plan(tx, rx, irs, SizingMethod::span_based);
    const SegmentWeights& t = plan.tx.segments[0];
    const SegmentWeights& r = plan.rx.segments[0];
    ArraySpec tseg = tx.slice(t.first_element, t.n_elements);

    double max_arg = 0.0, sum_abs = 0.0;
    cplx sum = 0.0;
    int kept = 0;
    for (int m = 0; m < irs.n_elements; ++m) {
        ArraySpec mseg = plan.irs.segmentation.segment_spec(m);
        AngularView vt = view_of(tseg, mseg.center);
        AngularView vr = view_of(rx, mseg.center);
        if (std::fabs(t.tier1_gamma - vt.gamma) > 2.0 * pi / t.n_elements) continue;
        if (std::fabs(r.tier1_gamma - vr.gamma) > 2.0 * pi / r.n_elements) continue;
        AngularView lt = view_of(mseg, tseg.center);
        AngularView lr = view_of(mseg, rx.center);
        cplx term = t.amplitude * dirichlet_kernel(t.tier1_gamma - vt.gamma, t.n_elements) *
                    r.amplitude * dirichlet_kernel(r.tier1_gamma - vr.gamma, r.n_elements) *
                    element_gain(lt.theta, rp) * element_gain(lr.theta, rp) *
                    propagation_coefficient(vt.distance, vr.distance, fs) *
                    std::exp(cplx(0.0, plan.irs.profiles[static_cast<size_t>(m)].tier2_phase));
        max_arg = std::max(max_arg, std::fabs(std::arg(term)));
        sum += term;
        sum_abs += std::abs(term);
        ++kept;
    }
    c.expect(kept > 0, "no main-lobe terms found");
    c.expect(max_arg <= 1e-6, fmt("max term phase %.2e rad exceeds 1e-6", max_arg));
    double rel = std::fabs(std::abs(sum) - sum_abs) / sum_abs;
    c.expect(rel <= 1e-9, fmt("|sum| vs sum|.| relative gap %.2e", rel));
    if (c.pass) c.detail = fmt("%.0f terms, max phase %.1e rad", kept, max_arg);
    c.finish();
}

void criterion_size_sweep_ordering(int id, Point2 irs_pos, const char* label) {
    Criterion c(id, label);
    RadiationPattern rp{0.285};
    PropagationParams fs = PropagationParams::free_space();
    ArraySpec tx = reference_tx();
    ArraySpec rx{{466.0, 0.0}, 0.0, 1, 0.5};

    const int sizes[] = {2048, 1024, 512, 256};
    std::vector<double> gap;
    for (int n : sizes) {
        ArraySpec irs = irs_at(irs_pos, n);
        double span_db = path_gain_db(received_sample(build_plan(tx, rx, irs, SizingMethod::span_based), rp, fs));
        double ff_db = path_gain_db(received_sample(build_plan(tx, rx, irs, SizingMethod::far_field), rp, fs));
        gap.push_back(span_db - ff_db);
        if (span_db < ff_db - 1e-9)
            c.expect(false, fmt("far-field beats span at size %.0f by %.3f dB", n, ff_db - span_db));
    }
    c.expect(gap[0] > 1e-6, fmt("no strict advantage at 2048 (gap %.2e dB)", gap[0]));
    for (size_t i = 0; i + 1 < gap.size(); ++i)
        c.expect(gap[i] > gap[i + 1] - 1e-9,
                 fmt("gap not shrinking: %.3f -> %.3f dB", gap[i], gap[i + 1]));
    if (c.pass)
        c.detail = fmt("gaps %.2f / %.2f dB at 2048 / 1024", gap[0], gap[1]) + fmt(", %.2f / %.2f at 512 / 256", gap[2], gap[3]);
    c.finish();
}

void criterion_convergence() {
    Criterion c(8, "convergence to far-field beamforming");
    Scenario sc;
    sc.tx = {{0.0, 0.0}, 0.0, 1, 0.5};
    sc.rx = {{0.0, 1.0}, 0.0, 128, 0.5};
    double far_boundary = far_field_distance(sc.rx.aperture()); // 2 D^2
    GridSpec grid = parse_grid("log:1000:150000:40");

    std::vector<double> conv_distance;
    for (double theta_t : {0.0, pi / 6.0, pi / 3.0}) {
        Scenario s = sc;
        s.rx.center = {std::sin(theta_t), std::cos(theta_t)};
        std::vector<SweepResult> rows = run_sweep(SweepKind::convergence, s, grid);
        std::vector<double> gaps;
        for (size_t i = 0; i < rows.size(); i += 2)
            gaps.push_back(rows[i].path_gain_db - rows[i + 1].path_gain_db);

        for (size_t i = 0; i + 1 < gaps.size(); ++i)
            c.expect(gaps[i + 1] <= gaps[i] + 1e-6,
                     fmt("gap grows with distance at offset %.2f rad (%.4f -> %.4f dB)", theta_t,
                         gaps[i], gaps[i + 1]));
        for (size_t i = 0; i < gaps.size(); ++i)
            if (grid.values[i] >= 10.0 * far_boundary)
                c.expect(std::fabs(gaps[i]) < 0.1,
                         fmt("gap %.3f dB beyond ten far-field distances (offset %.2f)", gaps[i], theta_t));

        double conv = grid.values.back();
        for (size_t i = gaps.size(); i-- > 0;) {
            if (std::fabs(gaps[i]) >= 0.1) break;
            conv = grid.values[i];
        }
        conv_distance.push_back(conv);
    }
    c.expect(conv_distance[1] <= conv_distance[0] + 1e-9, "offset pi/6 converges later than broadside");
    c.expect(conv_distance[2] <= conv_distance[1] + 1e-9, "offset pi/3 converges later than pi/6");
    c.expect(conv_distance[2] < conv_distance[0], "convergence distance does not shrink with offset");
    if (c.pass)
        c.detail = fmt("conv at %.0f / %.0f / %.0f wl", conv_distance[0], conv_distance[1], conv_distance[2]);
    c.finish();
}

void criterion_rx_sizing() {
    Criterion c(9, "general sizing beats single-element sizing");
    RadiationPattern rp{0.285};
    PropagationParams fs = PropagationParams::free_space();
    ArraySpec tx = reference_tx();
    ArraySpec irs = irs_at({467.0, 467.0}, 1024); // 512-wavelength surface
    for (int n_r : {4, 16, 64}) {
        ArraySpec rx{{467.0, 0.0}, 0.0, n_r, 0.5};
        double general = path_gain_db(received_sample(build_plan(tx, rx, irs, SizingMethod::span_based), rp, fs));
        double single = path_gain_db(received_sample(build_plan(tx, rx, irs, SizingMethod::single_element), rp, fs));
        c.expect(general >= single - 1e-9,
                 fmt("single-element wins at N_R = %.0f (%.3f vs %.3f dB)", n_r, single, general));
    }
    c.finish();
}

void criterion_determinism() {
    Criterion c(10, "byte-identical CSV across runs and workers");
    Scenario sc;
    sc.tx = reference_tx();
    sc.rx = {{466.0, 0.0}, 0.0, 1, 0.5};
    sc.irs = irs_at({0.0, 933.0}, 512);
    GridSpec grid = parse_grid("256,512,1024,2048");

    auto render = [&]() {
        std::ostringstream out;
        std::vector<SweepResult> rows = run_sweep(SweepKind::pathgain, sc, grid);
        write_sweep_csv(out, rows);
        return out.str();
    };
    setenv("IRSBEAM_THREADS", "1", 1);
    std::string one = render();
    std::string one_again = render();
    setenv("IRSBEAM_THREADS", "5", 1);
    std::string five = render();
    unsetenv("IRSBEAM_THREADS");
    std::string free_run = render();

    c.expect(one == one_again, "two serial runs differ");
    c.expect(one == five, "worker count changes the bytes");
    c.expect(one == free_run, "default worker count changes the bytes");
    c.finish();
}

} // namespace

int main() {
    const int span0[4] = {2, 5, 9, 18}, span1[4] = {6, 12, 25, 51};
    const int ff0[4] = {43, 43, 43, 43}, ff1[4] = {45, 48, 50, 51};
    const int ml0[4] = {4, 8, 15, 29}, ml1[4] = {9, 20, 41, 51};

    criterion_table(1, "span-based active-element column", 0, span0, span1, 10.0);
    criterion_table(2, "far-field-based active-element column", 1, ff0, ff1, 10.0);
    criterion_table(3, "main-lobe-based active-element column", 2, ml0, ml1, 10.0);
    criterion_oracle_equivalence();
    criterion_kernel_suite();
    criterion_phase_alignment();
    criterion_size_sweep_ordering(7, {0.0, 933.0}, "span vs far-field gap, broadside IRS");
    criterion_size_sweep_ordering(7, {933.0, 933.0}, "span vs far-field gap, diagonal IRS");
    criterion_convergence();
    criterion_rx_sizing();
    criterion_determinism();

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
