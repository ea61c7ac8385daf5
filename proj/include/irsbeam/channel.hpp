#pragma once

// Decomposed geometric channel: plane-wave response vectors, propagation
// coefficients, IRS-cluster channel blocks, higher-order gain composition
// and an exact per-element propagation oracle for verification.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "linalg.hpp"

namespace irsbeam {

// ---------------------------------------------------------------------------
// Response vectors

/// Plane-wave response of a ULA segment: entry exp(-j*gamma*l), l over I_n.
struct ResponseVector {
    std::vector<cplx> entries;
    int size() const { return static_cast<int>(entries.size()); }
};

inline ResponseVector response_vector(double gamma, int n) {
    if (n < 1) throw std::invalid_argument("response_vector: n must be >= 1");
    ResponseVector a;
    a.entries.resize(static_cast<size_t>(n));
    for (int l = 0; l < n; ++l) {
        double idx = l - (n - 1) / 2.0;
        a.entries[static_cast<size_t>(l)] = std::exp(cplx(0.0, -gamma * idx));
    }
    return a;
}

/// Whole-array response as the stack of per-segment responses, in order.
inline ResponseVector stack_responses(std::span<const ResponseVector> per_segment) {
    if (per_segment.empty()) throw std::invalid_argument("stack_responses: empty list");
    ResponseVector out;
    for (const ResponseVector& r : per_segment)
        out.entries.insert(out.entries.end(), r.entries.begin(), r.entries.end());
    return out;
}

// ---------------------------------------------------------------------------
// Propagation and element radiation pattern

/// Path-loss model constants; free space is a_att = 2, b_att = 2k.
struct PropagationParams {
    double a_att = 2.0;
    double b_att = 2.0 * wavenumber;

    static PropagationParams free_space() { return {2.0, 2.0 * wavenumber}; }

    void validate() const {
        if (!(a_att > 0.0) || !(b_att > 0.0))
            throw std::invalid_argument("PropagationParams: a_att and b_att must be > 0");
    }
};

/// One-hop field coefficient exp(j*k*d) / (b * d^(a/2)).
inline cplx hop_coefficient(double d, const PropagationParams& p) {
    if (!(d > 0.0)) throw std::invalid_argument("hop_coefficient: distance must be > 0");
    return std::exp(cplx(0.0, wavenumber * d)) / (p.b_att * std::pow(d, p.a_att / 2.0));
}

/// Two-hop propagation coefficient exp(j*k*(dt+dr)) / (b^2 * (dt*dr)^(a/2)).
inline cplx propagation_coefficient(double d_t, double d_r, const PropagationParams& p) {
    return hop_coefficient(d_t, p) * hop_coefficient(d_r, p);
}

/// Power pattern of a reflecting element is 2*(2q+1)*cos^(2q)(theta); field
/// superposition uses the amplitude pattern, i.e. its square root.
struct RadiationPattern {
    double q_exp = 0.285;

    void validate() const {
        if (!(q_exp >= 0.0)) throw std::invalid_argument("RadiationPattern: q_exp must be >= 0");
    }
};

inline double element_gain(double theta, const RadiationPattern& rp) {
    if (std::fabs(theta) > pi / 2.0) return 0.0; // back side
    double c = std::max(0.0, std::cos(theta));
    return std::sqrt(2.0 * (2.0 * rp.q_exp + 1.0)) * std::pow(c, rp.q_exp);
}

// ---------------------------------------------------------------------------
// IRS phase profiles

/// Two-tier phase profile of one IRS segment: a linear passive steering
/// ramp tier1_gamma plus a common phase tier2_phase. Element i of the
/// segment (i over I_n) applies exp(j*(tier1_gamma*i + tier2_phase)).
struct PhaseProfile {
    double tier1_gamma = 0.0;
    double tier2_phase = 0.0;
    int n_elements = 1;

    double phase_at(int l) const {
        double idx = l - (n_elements - 1) / 2.0;
        return tier1_gamma * idx + tier2_phase;
    }
};

/// Compensation gain of an IRS segment: a_L(theta_rx)^T * Phi * a_L(theta_tx)
/// evaluated as the direct element sum. |result| <= n_elements.
inline cplx irs_compensation_gain(const PhaseProfile& profile, double gamma_to_tx, double gamma_to_rx) {
    cplx acc = 0.0;
    for (int l = 0; l < profile.n_elements; ++l) {
        double idx = l - (profile.n_elements - 1) / 2.0;
        acc += std::exp(cplx(0.0, profile.phase_at(l) - (gamma_to_tx + gamma_to_rx) * idx));
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Channel blocks

enum class PathType { ordinary, controlled, mixed }; // S, L, M

/// Channel between one Tx segment and one Rx segment for one path type.
struct ChannelBlock {
    CMatrix matrix; // N_{R,S} x N_{T,S}
    int rx_segment = 0;
    int tx_segment = 0;
    PathType path_type = PathType::controlled;
};

/// One IRS segment as seen by the channel: its geometry plus phase profile.
struct IrsSegmentState {
    ArraySpec spec;
    PhaseProfile profile;
};

/// Type-L block between a Tx segment and an Rx segment: a sum over IRS
/// segments of rank-one terms with gain B * rho * alpha, where alpha is the
/// segment compensation gain and B the element pattern at both hops.
inline ChannelBlock irs_block_channel(const ArraySpec& tx_seg, const ArraySpec& rx_seg,
                                      std::span<const IrsSegmentState> irs_segments,
                                      const RadiationPattern& rp, const PropagationParams& p) {
    ChannelBlock block;
    block.matrix = CMatrix(rx_seg.n_elements, tx_seg.n_elements);
    block.path_type = PathType::controlled;
    for (const IrsSegmentState& seg : irs_segments) {
        if (seg.profile.n_elements != seg.spec.n_elements)
            throw std::invalid_argument("irs_block_channel: profile size mismatch");
        AngularView to_tx = view_of(seg.spec, tx_seg.center);
        AngularView to_rx = view_of(seg.spec, rx_seg.center);
        AngularView from_tx = view_of(tx_seg, seg.spec.center);
        AngularView from_rx = view_of(rx_seg, seg.spec.center);
        cplx alpha = irs_compensation_gain(seg.profile, to_tx.gamma, to_rx.gamma);
        double b = element_gain(to_tx.theta, rp) * element_gain(to_rx.theta, rp);
        cplx rho = propagation_coefficient(to_tx.distance, to_rx.distance, p);
        ResponseVector a_r = response_vector(from_rx.gamma, rx_seg.n_elements);
        ResponseVector a_t = response_vector(from_tx.gamma, tx_seg.n_elements);
        add_outer(block.matrix, a_r.entries, a_t.entries, b * rho * alpha);
    }
    return block;
}

/// Complete S_R x S_T grid of blocks for one path type, row-major by
/// (rx_segment, tx_segment).
struct BlockGrid {
    int n_rx_segments = 0;
    int n_tx_segments = 0;
    PathType path_type = PathType::controlled;
    std::vector<ChannelBlock> blocks;

    const ChannelBlock& block(int n, int c) const {
        return blocks[static_cast<size_t>(n) * n_tx_segments + c];
    }
};

/// Concatenate a block grid into the full N_R x N_T matrix.
inline CMatrix flatten_blocks(const BlockGrid& grid) {
    if (grid.blocks.size() != static_cast<size_t>(grid.n_rx_segments) * grid.n_tx_segments)
        throw std::invalid_argument("flatten_blocks: incomplete grid");
    int nrs = grid.block(0, 0).matrix.rows;
    int nts = grid.block(0, 0).matrix.cols;
    CMatrix h(grid.n_rx_segments * nrs, grid.n_tx_segments * nts);
    for (int n = 0; n < grid.n_rx_segments; ++n)
        for (int c = 0; c < grid.n_tx_segments; ++c) {
            const CMatrix& b = grid.block(n, c).matrix;
            if (b.rows != nrs || b.cols != nts)
                throw std::invalid_argument("flatten_blocks: inconsistent block shapes");
            for (int r = 0; r < nrs; ++r)
                for (int k = 0; k < nts; ++k) h.at(n * nrs + r, c * nts + k) = b.at(r, k);
        }
    return h;
}

/// Total channel H = sum of the flattened per-type grids (absent types
/// contribute zero). All present grids must agree in overall shape.
inline CMatrix assemble_channel(std::span<const BlockGrid> grids) {
    if (grids.empty()) throw std::invalid_argument("assemble_channel: no grids");
    CMatrix total = flatten_blocks(grids[0]);
    for (size_t i = 1; i < grids.size(); ++i) {
        CMatrix h = flatten_blocks(grids[i]);
        if (h.rows != total.rows || h.cols != total.cols)
            throw std::invalid_argument("assemble_channel: grid shapes disagree");
        total += h;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Ordinary (type-S) clusters

/// A point scattering cluster with a unit-variance complex-Gaussian gain by
/// default (R-ray style), or a fixed deterministic gain, plus per-segment
/// visibility masks (empty mask = visible everywhere).
struct OrdinaryCluster {
    Point2 position;
    cplx gain = 1.0;         // used when random_gain is off
    bool random_gain = true;
    std::vector<int> visible_tx_segments; // empty = all
    std::vector<int> visible_rx_segments; // empty = all
};

inline bool cluster_sees(const std::vector<int>& mask, int segment) {
    if (mask.empty()) return true;
    for (int m : mask)
        if (m == segment) return true;
    return false;
}

/// Type-S block grid. Random gains are unit-variance circularly-symmetric
/// complex Gaussian, drawn once per cluster in list order from `seed`.
inline BlockGrid sample_ordinary_clusters(std::span<const OrdinaryCluster> clusters,
                                          const Segmentation& tx_seg, const Segmentation& rx_seg,
                                          std::uint64_t seed) {
    BlockGrid grid;
    grid.n_rx_segments = rx_seg.n_segments;
    grid.n_tx_segments = tx_seg.n_segments;
    grid.path_type = PathType::ordinary;
    grid.blocks.reserve(static_cast<size_t>(rx_seg.n_segments) * tx_seg.n_segments);
    for (int n = 0; n < rx_seg.n_segments; ++n)
        for (int c = 0; c < tx_seg.n_segments; ++c) {
            ChannelBlock b;
            b.rx_segment = n;
            b.tx_segment = c;
            b.path_type = PathType::ordinary;
            b.matrix = CMatrix(rx_seg.elements_per_segment, tx_seg.elements_per_segment);
            grid.blocks.push_back(std::move(b));
        }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (const OrdinaryCluster& cl : clusters) {
        cplx beta = cl.gain;
        if (cl.random_gain) {
            double re = gauss(rng), im = gauss(rng);
            beta = cplx(re, im) / std::sqrt(2.0);
        }
        for (int n = 0; n < rx_seg.n_segments; ++n) {
            if (!cluster_sees(cl.visible_rx_segments, n)) continue;
            AngularView vr = view_of(rx_seg.segment_spec(n), cl.position);
            ResponseVector a_r = response_vector(vr.gamma, rx_seg.elements_per_segment);
            for (int c = 0; c < tx_seg.n_segments; ++c) {
                if (!cluster_sees(cl.visible_tx_segments, c)) continue;
                AngularView vt = view_of(tx_seg.segment_spec(c), cl.position);
                ResponseVector a_t = response_vector(vt.gamma, tx_seg.elements_per_segment);
                add_outer(grid.blocks[static_cast<size_t>(n) * tx_seg.n_segments + c].matrix,
                          a_r.entries, a_t.entries, beta);
            }
        }
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Higher-order reflections

/// Gain of a second-order path summed over the intermediate segment index.
/// Each term is the product of its two hop gains; heterogeneous paths
/// multiply in the ordinary-scatterer factor as well.
inline cplx second_order_gain(std::span<const cplx> first_hop, std::span<const cplx> second_hop,
                              std::span<const cplx> ordinary_factors = {}) {
    if (first_hop.empty() || first_hop.size() != second_hop.size())
        throw std::invalid_argument("second_order_gain: hop lists must be non-empty and equal length");
    if (!ordinary_factors.empty() && ordinary_factors.size() != first_hop.size())
        throw std::invalid_argument("second_order_gain: factor list length mismatch");
    cplx acc = 0.0;
    for (size_t k = 0; k < first_hop.size(); ++k) {
        cplx term = first_hop[k] * second_hop[k];
        if (!ordinary_factors.empty()) term *= ordinary_factors[k];
        acc += term;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Exact per-element oracles (no plane-wave approximation anywhere)

/// Received sample of the Tx -> IRS -> Rx cascade summed element by element
/// with exact distances and per-element pattern angles:
///   r = sum_{i,j,l} wT_i * B(in) * B(out) * e^{j phi_j}
///       * e^{jk(d_ij + d_jl)} / (b^2 (d_ij d_jl)^(a/2)) * wR_l.
/// The inner Tx and Rx sums factor per IRS element and are accumulated in
/// fixed index order, so the result is bit-stable.
inline cplx exact_field_oracle(const ArraySpec& tx, std::span<const cplx> tx_weights,
                               const ArraySpec& irs, std::span<const double> irs_phases,
                               const ArraySpec& rx, std::span<const cplx> rx_weights,
                               const RadiationPattern& rp, const PropagationParams& p) {
    if (static_cast<int>(tx_weights.size()) != tx.n_elements ||
        static_cast<int>(irs_phases.size()) != irs.n_elements ||
        static_cast<int>(rx_weights.size()) != rx.n_elements)
        throw std::invalid_argument("exact_field_oracle: weight/phase length mismatch");
    cplx total = 0.0;
    for (int j = 0; j < irs.n_elements; ++j) {
        Point2 pj = irs.element_position(j);
        cplx incident = 0.0;
        for (int i = 0; i < tx.n_elements; ++i) {
            if (tx_weights[static_cast<size_t>(i)] == cplx(0.0)) continue;
            AngularView in = view_from(irs, pj, tx.element_position(i));
            incident += tx_weights[static_cast<size_t>(i)] * element_gain(in.theta, rp) *
                        hop_coefficient(in.distance, p);
        }
        cplx outgoing = 0.0;
        for (int l = 0; l < rx.n_elements; ++l) {
            AngularView out = view_from(irs, pj, rx.element_position(l));
            outgoing += rx_weights[static_cast<size_t>(l)] * element_gain(out.theta, rp) *
                        hop_coefficient(out.distance, p);
        }
        total += incident * std::exp(cplx(0.0, irs_phases[static_cast<size_t>(j)])) * outgoing;
    }
    return total;
}

/// Exact Tx -> Rx sample over isotropic elements (no reflector).
inline cplx exact_direct_field(const ArraySpec& tx, std::span<const cplx> tx_weights,
                               const ArraySpec& rx, std::span<const cplx> rx_weights,
                               const PropagationParams& p) {
    if (static_cast<int>(tx_weights.size()) != tx.n_elements ||
        static_cast<int>(rx_weights.size()) != rx.n_elements)
        throw std::invalid_argument("exact_direct_field: weight length mismatch");
    cplx total = 0.0;
    for (int l = 0; l < rx.n_elements; ++l) {
        Point2 pl = rx.element_position(l);
        cplx acc = 0.0;
        for (int i = 0; i < tx.n_elements; ++i) {
            if (tx_weights[static_cast<size_t>(i)] == cplx(0.0)) continue;
            double d = distance(tx.element_position(i), pl);
            if (!(d > 0.0)) throw std::invalid_argument("exact_direct_field: coincident elements");
            acc += tx_weights[static_cast<size_t>(i)] * hop_coefficient(d, p);
        }
        total += acc * rx_weights[static_cast<size_t>(l)];
    }
    return total;
}

} // namespace irsbeam
