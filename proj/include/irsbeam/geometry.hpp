#pragma once

// Planar geometry of uniform linear arrays: element placement, broadside
// angles, spatial frequencies and the far-field segmentation rule.
// All lengths are in wavelength units (lambda = 1, wavenumber k = 2*pi).

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace irsbeam {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double wavenumber = 2.0 * pi; // k = 2*pi/lambda, lambda = 1

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Symmetric index set I_z = {i - (z-1)/2 : i = 0..z-1}; sums to zero.
inline std::vector<double> symmetric_index_set(int z) {
    if (z < 1) throw std::invalid_argument("symmetric_index_set: z must be >= 1");
    std::vector<double> idx(static_cast<size_t>(z));
    for (int i = 0; i < z; ++i) idx[static_cast<size_t>(i)] = i - (z - 1) / 2.0;
    return idx;
}

/// Uniform linear array in the plane. The array axis points along
/// `orientation`; broadside (the normal) is the axis rotated +90 degrees.
/// Physical size is D = n_elements * spacing.
struct ArraySpec {
    Point2 center;
    double orientation = 0.0; // radians w.r.t. the global x-axis
    int n_elements = 1;
    double spacing = 0.5; // in wavelengths

    Point2 axis() const { return {std::cos(orientation), std::sin(orientation)}; }
    Point2 normal() const { return {-std::sin(orientation), std::cos(orientation)}; }
    double aperture() const { return n_elements * spacing; }

    /// Position of element i (0-based); element offsets run over I_N.
    Point2 element_position(int i) const {
        double off = (i - (n_elements - 1) / 2.0) * spacing;
        return center + off * axis();
    }

    /// Sub-array covering elements [first, first + count).
    ArraySpec slice(int first, int count) const {
        if (first < 0 || count < 1 || first + count > n_elements)
            throw std::invalid_argument("ArraySpec::slice: range out of bounds");
        double off = (first + (count - 1) / 2.0 - (n_elements - 1) / 2.0) * spacing;
        return {center + off * axis(), orientation, count, spacing};
    }

    void validate(const char* who = "ArraySpec") const {
        if (n_elements < 1) throw std::invalid_argument(std::string(who) + ": n_elements must be >= 1");
        if (!(spacing > 0.0)) throw std::invalid_argument(std::string(who) + ": spacing must be > 0");
        if (!std::isfinite(center.x) || !std::isfinite(center.y) || !std::isfinite(orientation))
            throw std::invalid_argument(std::string(who) + ": non-finite geometry");
    }
};

inline std::vector<Point2> element_positions(const ArraySpec& a) {
    a.validate();
    std::vector<Point2> pos(static_cast<size_t>(a.n_elements));
    for (int i = 0; i < a.n_elements; ++i) pos[static_cast<size_t>(i)] = a.element_position(i);
    return pos;
}

/// Plane-wave far-field boundary 2*D^2/lambda of an aperture D.
inline double far_field_distance(double aperture) { return 2.0 * aperture * aperture; }

/// Broadside view of a target from an observer array segment: signed angle
/// theta from the segment normal, spatial frequency gamma = k*q*sin(theta)
/// and Euclidean distance.
struct AngularView {
    double theta = 0.0;    // radians, signed toward the array axis
    double gamma = 0.0;    // radians per element index
    double distance = 0.0; // wavelengths
};

/// View of a target from an arbitrary reference point, measured in the
/// frame array's axis/normal basis (used for per-element views).
inline AngularView view_from(const ArraySpec& frame, Point2 refpoint, Point2 target) {
    Point2 d = target - refpoint;
    double dist = norm(d);
    if (!(dist > 0.0)) throw std::invalid_argument("view_from: target coincides with observer");
    double s = dot(frame.axis(), d) / dist;
    double c = dot(frame.normal(), d) / dist;
    return {std::atan2(s, c), wavenumber * frame.spacing * s, dist};
}

inline AngularView view_of(const ArraySpec& observer, Point2 target) {
    return view_from(observer, observer.center, target);
}

inline int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

/// Largest segment element count N with 2*(N*q)^2/lambda <= d_min,
/// evaluated as round(sqrt(d_min/2)/q) and floored at one element.
inline int max_segment_elements(double d_min, double spacing) {
    if (!(d_min > 0.0)) throw std::invalid_argument("max_segment_elements: d_min must be > 0");
    if (!(spacing > 0.0)) throw std::invalid_argument("max_segment_elements: spacing must be > 0");
    double n = std::floor(std::sqrt(d_min / 2.0) / spacing + 0.5);
    n = std::clamp(n, 1.0, static_cast<double>(1 << 30)); // callers cap by array size anyway
    return static_cast<int>(n);
}

/// Partition of an array into contiguous equal-size segments.
struct Segmentation {
    ArraySpec parent;
    int n_segments = 1;
    int elements_per_segment = 1;

    ArraySpec segment_spec(int i) const {
        return parent.slice(i * elements_per_segment, elements_per_segment);
    }
    Point2 segment_center(int i) const { return segment_spec(i).center; }
};

inline int largest_divisor_not_above(int n, int cap) {
    cap = std::min(cap, n);
    for (int d = cap; d >= 1; --d)
        if (n % d == 0) return d;
    return 1;
}

/// Segment an array so every constellation point lies in the far field of
/// each segment. The nearest point (to the array center) sets the segment
/// size; the size snaps down to a divisor of n_elements for equal segments.
inline Segmentation segment(const ArraySpec& a, std::span<const Point2> constellation) {
    a.validate();
    if (constellation.empty()) throw std::invalid_argument("segment: empty constellation");
    double d_min = std::numeric_limits<double>::infinity();
    for (const Point2& p : constellation) d_min = std::min(d_min, distance(a.center, p));
    if (!(d_min > 0.0)) throw std::invalid_argument("segment: constellation touches the array center");
    int cap = std::min(max_segment_elements(d_min, a.spacing), a.n_elements);
    int per = largest_divisor_not_above(a.n_elements, cap);
    return {a, a.n_elements / per, per};
}

/// One segment per element (S = N); always a valid segmentation.
inline Segmentation per_element_segmentation(const ArraySpec& a) {
    a.validate();
    return {a, a.n_elements, 1};
}

} // namespace irsbeam
