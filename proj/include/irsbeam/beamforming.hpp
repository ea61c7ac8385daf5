#pragma once

// Dirichlet-kernel field analysis, compensation gains, the two-tier cascaded
// beamforming design and the Tx active-segment sizing schemes.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "channel.hpp"
#include "geometry.hpp"

namespace irsbeam {

// ---------------------------------------------------------------------------
// Kernels

/// Dirichlet kernel f(theta; n) = sin(n*theta/2) / sin(theta/2), the array
/// factor of a uniform linear-phase array. Even in theta, |f| <= n, main
/// lobe width 4*pi/n. Near removable singularities the direct series
/// sum over I_n is used instead.
inline double dirichlet_kernel(double theta, int n) {
    if (n < 1) throw std::invalid_argument("dirichlet_kernel: n must be >= 1");
    double s = std::sin(theta / 2.0);
    if (std::fabs(s) < 1e-9) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) acc += std::cos(theta * (l - (n - 1) / 2.0));
        return acc;
    }
    return std::sin(n * theta / 2.0) / s;
}

/// Second-order main-lobe expansion n - (n^3 - n)/24 * theta^2, intended
/// for |theta| <= pi/n.
inline double main_lobe_approx(double theta, int n) {
    if (n < 1) throw std::invalid_argument("main_lobe_approx: n must be >= 1");
    double nd = n;
    return nd - (nd * nd * nd - nd) / 24.0 * theta * theta;
}

// ---------------------------------------------------------------------------
// Compensation gains

/// Tx segment compensation gain f(gamma_steer - gamma_target; n_active) / sqrt(n_total).
inline double comp_gain_tx(double gamma_steer, double gamma_target, int n_active, int n_total) {
    if (n_total < 1) throw std::invalid_argument("comp_gain_tx: n_total must be >= 1");
    return dirichlet_kernel(gamma_steer - gamma_target, n_active) / std::sqrt(static_cast<double>(n_total));
}

/// Rx compensation gain f(gamma_steer - gamma_target; n) / sqrt(n).
inline double comp_gain_rx(double gamma_steer, double gamma_target, int n) {
    return dirichlet_kernel(gamma_steer - gamma_target, n) / std::sqrt(static_cast<double>(n));
}

/// Rx gain truncated to the main lobe: zero outside |offset| <= 2*pi/n.
inline double truncated_rx_gain(double gamma_steer, double gamma_target, int n) {
    if (n < 1) throw std::invalid_argument("truncated_rx_gain: n must be >= 1");
    if (std::fabs(gamma_steer - gamma_target) > 2.0 * pi / n) return 0.0;
    return comp_gain_rx(gamma_steer, gamma_target, n);
}

// ---------------------------------------------------------------------------
// Segment steering and profiles

/// Specular profile of an IRS segment: tier-1 ramp gamma_tx + gamma_rx and
/// tier-2 phase -k*(d_t + d_r), which drives the segment compensation gain
/// to its maximum |alpha| = n_elements and cancels the propagation delay.
inline PhaseProfile irs_specular_profile(const AngularView& to_tx, const AngularView& to_rx,
                                         int n_elements) {
    return {to_tx.gamma + to_rx.gamma, -wavenumber * (to_tx.distance + to_rx.distance), n_elements};
}

/// Steering as the mean of the per-scatterer spatial frequencies, clamped
/// to the physical bound |gamma| <= k*q.
inline double steering_by_average(std::span<const AngularView> views, double gamma_limit) {
    if (views.empty()) throw std::invalid_argument("steering_by_average: no views");
    double acc = 0.0;
    for (const AngularView& v : views) acc += v.gamma;
    double g = acc / static_cast<double>(views.size());
    return std::clamp(g, -gamma_limit, gamma_limit);
}

// ---------------------------------------------------------------------------
// Active segment sizing

/// Span-based count round(sqrt(5*C0/C1)) with C0 = sum of rx gains and
/// C1 = sum of rx_gain * (gamma_steer - gamma_m)^2, capped at n_cap.
/// A zero angular spread (C1 = 0) asks for an unbounded segment and
/// returns the cap.
inline int span_based_elements(double gamma_steer, std::span<const double> gammas,
                               std::span<const double> rx_gains, int n_cap) {
    if (gammas.empty() || gammas.size() != rx_gains.size())
        throw std::invalid_argument("span_based_elements: gamma/gain lists must match and be non-empty");
    double c0 = 0.0, c1 = 0.0;
    for (size_t m = 0; m < gammas.size(); ++m) {
        double dev = gamma_steer - gammas[m];
        c0 += rx_gains[m];
        c1 += rx_gains[m] * dev * dev;
    }
    if (!(c0 > 0.0)) throw std::domain_error("span_based_elements: no IRS segment visible to the receiver beam");
    if (!(c1 > 0.0)) return n_cap;
    return std::clamp(round_half_up(std::sqrt(5.0 * c0 / c1)), 1, n_cap);
}

/// Count whose main-lobe half width 2*pi/N covers the IRS angular span
/// around gamma_steer, capped at n_cap.
inline int main_lobe_elements(double gamma_steer, std::span<const double> gammas, int n_cap) {
    if (gammas.empty()) throw std::invalid_argument("main_lobe_elements: no views");
    double span = 0.0;
    for (double g : gammas) span = std::max(span, std::fabs(gamma_steer - g));
    if (!(span > 0.0)) return n_cap;
    return std::clamp(round_half_up(2.0 * pi / span), 1, n_cap);
}

/// Far-field-limited count: the largest segment keeping every scatterer at
/// d_min in its far field, capped by the array size.
inline int far_field_elements(double d_min, double spacing, int n_total) {
    return std::min(max_segment_elements(d_min, spacing), n_total);
}

// ---------------------------------------------------------------------------
// Beam plans

/// Two-tier weights of one active segment: elements [first, first + n) get
/// weight amplitude * exp(j*(tier1_gamma*l + tier2_phase)) with l over I_n.
struct SegmentWeights {
    int first_element = 0;
    int n_elements = 1;
    double tier1_gamma = 0.0;
    double tier2_phase = 0.0;
    double amplitude = 1.0;
};

inline std::vector<cplx> segment_weight_vector(const SegmentWeights& s) {
    std::vector<cplx> w(static_cast<size_t>(s.n_elements));
    for (int l = 0; l < s.n_elements; ++l) {
        double idx = l - (s.n_elements - 1) / 2.0;
        w[static_cast<size_t>(l)] = s.amplitude * std::exp(cplx(0.0, s.tier1_gamma * idx + s.tier2_phase));
    }
    return w;
}

/// Per-segment beamforming over one array. Elements outside every segment
/// range carry zero weight (switched off).
struct ArrayDesign {
    ArraySpec array;
    std::vector<SegmentWeights> segments;

    std::vector<cplx> element_weights() const {
        std::vector<cplx> w(static_cast<size_t>(array.n_elements), cplx(0.0));
        for (const SegmentWeights& s : segments) {
            std::vector<cplx> ws = segment_weight_vector(s);
            for (int l = 0; l < s.n_elements; ++l) w[static_cast<size_t>(s.first_element + l)] = ws[static_cast<size_t>(l)];
        }
        return w;
    }

    /// Scale amplitudes so the total radiated amplitude^2 is one.
    void normalize_power() {
        double total = 0.0;
        for (const SegmentWeights& s : segments) total += s.n_elements * s.amplitude * s.amplitude;
        if (!(total > 0.0)) throw std::invalid_argument("ArrayDesign::normalize_power: all segments off");
        double scale = 1.0 / std::sqrt(total);
        for (SegmentWeights& s : segments) s.amplitude *= scale;
    }
};

/// Passive design of the IRS: a segmentation plus one phase profile per segment.
struct IrsDesign {
    ArraySpec array;
    Segmentation segmentation;
    std::vector<PhaseProfile> profiles;

    std::vector<double> element_phases() const {
        std::vector<double> phases(static_cast<size_t>(array.n_elements));
        for (int m = 0; m < segmentation.n_segments; ++m)
            for (int l = 0; l < segmentation.elements_per_segment; ++l)
                phases[static_cast<size_t>(m * segmentation.elements_per_segment + l)] = profiles[static_cast<size_t>(m)].phase_at(l);
        return phases;
    }

    std::vector<IrsSegmentState> segment_states() const {
        std::vector<IrsSegmentState> states;
        states.reserve(static_cast<size_t>(segmentation.n_segments));
        for (int m = 0; m < segmentation.n_segments; ++m)
            states.push_back({segmentation.segment_spec(m), profiles[static_cast<size_t>(m)]});
        return states;
    }
};

enum class SizingMethod { span_based, single_element, far_field, main_lobe, far_field_conv };

inline const char* to_string(SizingMethod m) {
    switch (m) {
        case SizingMethod::span_based: return "span";
        case SizingMethod::single_element: return "span_single";
        case SizingMethod::far_field: return "far_field";
        case SizingMethod::main_lobe: return "main_lobe";
        case SizingMethod::far_field_conv: return "far_field_conv";
    }
    return "?";
}

inline SizingMethod parse_sizing_method(const std::string& s) {
    if (s == "span") return SizingMethod::span_based;
    if (s == "span_single") return SizingMethod::single_element;
    if (s == "far_field") return SizingMethod::far_field;
    if (s == "main_lobe") return SizingMethod::main_lobe;
    if (s == "far_field_conv") return SizingMethod::far_field_conv;
    throw std::invalid_argument("unknown sizing method: " + s);
}

/// Full beamforming state: Tx active segment(s) and steering, Rx steering,
/// per-IRS-segment phase profiles and the sizing method used.
struct BeamPlan {
    ArrayDesign tx;
    ArrayDesign rx;
    IrsDesign irs;
    SizingMethod method = SizingMethod::span_based;
    int n_active = 0;
};

namespace detail {

inline std::vector<AngularView> views_from(const ArraySpec& observer, Point2 refpoint,
                                           const ArraySpec& target_elements) {
    std::vector<AngularView> views(static_cast<size_t>(target_elements.n_elements));
    for (int m = 0; m < target_elements.n_elements; ++m)
        views[static_cast<size_t>(m)] = view_from(observer, refpoint, target_elements.element_position(m));
    return views;
}

inline std::vector<double> gammas_of(std::span<const AngularView> views) {
    std::vector<double> g(views.size());
    for (size_t i = 0; i < views.size(); ++i) g[i] = views[i].gamma;
    return g;
}

} // namespace detail

/// Size the centered Tx active segment for a given method. The span family
/// steers at the mean spatial frequency; the main-lobe rule sizes against
/// the midpoint of the frequency span so the lobe covers the whole surface.
inline int active_element_count(SizingMethod method, const ArraySpec& tx, const ArraySpec& rx,
                                const ArraySpec& irs) {
    std::vector<AngularView> views_t = detail::views_from(tx, tx.center, irs);
    std::vector<double> gam_t = detail::gammas_of(views_t);
    double d_min = views_t[0].distance;
    for (const AngularView& v : views_t) d_min = std::min(d_min, v.distance);
    int n_o = far_field_elements(d_min, tx.spacing, tx.n_elements);

    switch (method) {
        case SizingMethod::far_field:
            return n_o;
        case SizingMethod::far_field_conv:
            return tx.n_elements;
        case SizingMethod::main_lobe: {
            auto [lo, hi] = std::minmax_element(gam_t.begin(), gam_t.end());
            return main_lobe_elements(0.5 * (*lo + *hi), gam_t, n_o);
        }
        case SizingMethod::span_based:
        case SizingMethod::single_element: {
            double steer_t = steering_by_average(views_t, wavenumber * tx.spacing);
            std::vector<double> rx_gains(gam_t.size(), 1.0);
            if (method == SizingMethod::span_based && rx.n_elements > 1) {
                std::vector<AngularView> views_r = detail::views_from(rx, rx.center, irs);
                double steer_r = steering_by_average(views_r, wavenumber * rx.spacing);
                for (size_t m = 0; m < rx_gains.size(); ++m)
                    rx_gains[m] = truncated_rx_gain(steer_r, views_r[m].gamma, rx.n_elements);
            }
            return span_based_elements(steer_t, gam_t, rx_gains, n_o);
        }
    }
    throw std::logic_error("active_element_count: unhandled method");
}

/// Build the cascaded two-tier beam plan for one Tx/IRS/Rx triple. Proposed
/// methods activate one centered Tx segment with averaged steering and give
/// every IRS element a specular profile; far_field_conv uses the whole Tx
/// array and plane-wave designs aimed at the unit centers.
inline BeamPlan build_plan(const ArraySpec& tx, const ArraySpec& rx, const ArraySpec& irs,
                           SizingMethod method) {
    tx.validate("tx");
    rx.validate("rx");
    irs.validate("irs");

    BeamPlan plan;
    plan.method = method;
    plan.tx.array = tx;
    plan.rx.array = rx;
    plan.irs.array = irs;
    plan.irs.segmentation = per_element_segmentation(irs);
    plan.n_active = active_element_count(method, tx, rx, irs);

    if (method == SizingMethod::far_field_conv) {
        double g_conv_t = view_of(tx, irs.center).gamma;
        double g_conv_r = view_of(rx, irs.center).gamma;
        Segmentation ts = segment(tx, element_positions(irs));
        double amp = 1.0 / std::sqrt(static_cast<double>(tx.n_elements));
        for (int i = 0; i < ts.n_segments; ++i) {
            double center_idx = ts.elements_per_segment * (i - (ts.n_segments - 1) / 2.0);
            plan.tx.segments.push_back({i * ts.elements_per_segment, ts.elements_per_segment,
                                        g_conv_t, g_conv_t * center_idx, amp});
        }
        plan.rx.segments.push_back({0, rx.n_elements, g_conv_r, 0.0,
                                    1.0 / std::sqrt(static_cast<double>(rx.n_elements))});

        // whole-surface linear profile, specular about the array center
        AngularView lt = view_of(irs, tx.center);
        AngularView lr = view_of(irs, rx.center);
        PhaseProfile flat{lt.gamma + lr.gamma, -wavenumber * (lt.distance + lr.distance), irs.n_elements};
        plan.irs.profiles.resize(static_cast<size_t>(irs.n_elements));
        for (int m = 0; m < irs.n_elements; ++m)
            plan.irs.profiles[static_cast<size_t>(m)] = {0.0, flat.phase_at(m), 1};
        return plan;
    }

    int start = (tx.n_elements - plan.n_active) / 2;
    ArraySpec active = tx.slice(start, plan.n_active);

    std::vector<AngularView> views_t = detail::views_from(tx, active.center, irs);
    double steer_t = steering_by_average(views_t, wavenumber * tx.spacing);
    plan.tx.segments.push_back({start, plan.n_active, steer_t, 0.0,
                                1.0 / std::sqrt(static_cast<double>(plan.n_active))});

    std::vector<AngularView> views_r = detail::views_from(rx, rx.center, irs);
    double steer_r = steering_by_average(views_r, wavenumber * rx.spacing);
    plan.rx.segments.push_back({0, rx.n_elements, steer_r, 0.0,
                                1.0 / std::sqrt(static_cast<double>(rx.n_elements))});

    plan.irs.profiles.resize(static_cast<size_t>(irs.n_elements));
    for (int m = 0; m < irs.n_elements; ++m) {
        Point2 pm = irs.element_position(m);
        AngularView to_tx = view_from(irs, pm, active.center);
        AngularView to_rx = view_from(irs, pm, rx.center);
        plan.irs.profiles[static_cast<size_t>(m)] = irs_specular_profile(to_tx, to_rx, 1);
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Plan evaluation

/// Received sample r = w_R^T (sum_c H^{L;c} w_{T,c}) of the segmented block
/// model, evaluated in kernel form: every (rx segment, tx segment, IRS
/// segment) triple contributes the product of its two array-factor kernels,
/// the segment compensation gain, the element patterns and the two-hop
/// propagation coefficient between segment centers.
inline cplx received_sample(const BeamPlan& plan, const RadiationPattern& rp,
                            const PropagationParams& p) {
    cplx total = 0.0;
    for (const SegmentWeights& rs : plan.rx.segments) {
        if (rs.amplitude == 0.0) continue;
        ArraySpec rseg = plan.rx.array.slice(rs.first_element, rs.n_elements);
        cplx r_factor_phase = rs.amplitude * std::exp(cplx(0.0, rs.tier2_phase));
        for (const SegmentWeights& ts : plan.tx.segments) {
            if (ts.amplitude == 0.0) continue;
            ArraySpec tseg = plan.tx.array.slice(ts.first_element, ts.n_elements);
            cplx t_factor_phase = ts.amplitude * std::exp(cplx(0.0, ts.tier2_phase));
            for (int m = 0; m < plan.irs.segmentation.n_segments; ++m) {
                ArraySpec mseg = plan.irs.segmentation.segment_spec(m);
                const PhaseProfile& prof = plan.irs.profiles[static_cast<size_t>(m)];
                AngularView vt = view_of(tseg, mseg.center);
                AngularView vr = view_of(rseg, mseg.center);
                AngularView lt = view_of(mseg, tseg.center);
                AngularView lr = view_of(mseg, rseg.center);
                double f_t = dirichlet_kernel(ts.tier1_gamma - vt.gamma, ts.n_elements);
                double f_r = dirichlet_kernel(rs.tier1_gamma - vr.gamma, rs.n_elements);
                cplx alpha = std::exp(cplx(0.0, prof.tier2_phase)) *
                             dirichlet_kernel(prof.tier1_gamma - lt.gamma - lr.gamma, prof.n_elements);
                double b = element_gain(lt.theta, rp) * element_gain(lr.theta, rp);
                cplx rho = propagation_coefficient(vt.distance, vr.distance, p);
                total += r_factor_phase * f_r * t_factor_phase * f_t * b * rho * alpha;
            }
        }
    }
    return total;
}

/// Same quantity assembled literally from channel-block matrices; used to
/// cross-check the kernel-form evaluation.
inline cplx received_sample_via_blocks(const BeamPlan& plan, const RadiationPattern& rp,
                                       const PropagationParams& p) {
    std::vector<IrsSegmentState> states = plan.irs.segment_states();
    cplx total = 0.0;
    for (const SegmentWeights& rs : plan.rx.segments) {
        if (rs.amplitude == 0.0) continue;
        ArraySpec rseg = plan.rx.array.slice(rs.first_element, rs.n_elements);
        std::vector<cplx> wr = segment_weight_vector(rs);
        for (const SegmentWeights& ts : plan.tx.segments) {
            if (ts.amplitude == 0.0) continue;
            ArraySpec tseg = plan.tx.array.slice(ts.first_element, ts.n_elements);
            std::vector<cplx> wt = segment_weight_vector(ts);
            ChannelBlock block = irs_block_channel(tseg, rseg, states, rp, p);
            total += bilinear(wr, block.matrix, wt);
        }
    }
    return total;
}

/// Complex field sample of a segmented transmit design at a point: the
/// superposition of per-segment weighted kernels with their own hop
/// coefficients. For a single full-array segment this is the conventional
/// far-field beam pattern.
inline cplx near_field_pattern(const ArrayDesign& design, Point2 target, const PropagationParams& p) {
    if (design.segments.empty()) throw std::invalid_argument("near_field_pattern: no segments");
    cplx total = 0.0;
    for (const SegmentWeights& s : design.segments) {
        if (s.amplitude == 0.0) continue;
        ArraySpec seg = design.array.slice(s.first_element, s.n_elements);
        AngularView v = view_of(seg, target);
        total += hop_coefficient(v.distance, p) * s.amplitude * std::exp(cplx(0.0, s.tier2_phase)) *
                 dirichlet_kernel(s.tier1_gamma - v.gamma, s.n_elements);
    }
    return total;
}

/// Beam-space channel H_B = W_R^T H W_T for beam sets given as designs.
inline CMatrix beamspace_matrix(const CMatrix& h, std::span<const ArrayDesign> tx_beams,
                                std::span<const ArrayDesign> rx_beams) {
    if (tx_beams.empty() || rx_beams.empty())
        throw std::invalid_argument("beamspace_matrix: empty beam set");
    CMatrix hb(static_cast<int>(rx_beams.size()), static_cast<int>(tx_beams.size()));
    std::vector<std::vector<cplx>> wt;
    wt.reserve(tx_beams.size());
    for (const ArrayDesign& d : tx_beams) {
        if (d.array.n_elements != h.cols) throw std::invalid_argument("beamspace_matrix: tx size mismatch");
        wt.push_back(d.element_weights());
    }
    for (size_t r = 0; r < rx_beams.size(); ++r) {
        if (rx_beams[r].array.n_elements != h.rows)
            throw std::invalid_argument("beamspace_matrix: rx size mismatch");
        std::vector<cplx> wr = rx_beams[r].element_weights();
        for (size_t t = 0; t < tx_beams.size(); ++t)
            hb.at(static_cast<int>(r), static_cast<int>(t)) = bilinear(wr, h, wt[t]);
    }
    return hb;
}

} // namespace irsbeam
