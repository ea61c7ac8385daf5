#pragma once

// Scenario files: a small key/value format with [unit] sections. Lengths
// are accepted in wavelengths ("933 wl", bare numbers default to wl) or in
// meters ("10 m"); everything is stored canonically in wavelengths.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamforming.hpp"
#include "channel.hpp"
#include "geometry.hpp"

namespace irsbeam {

struct ScenarioError : std::runtime_error {
    explicit ScenarioError(const std::string& field, const std::string& what)
        : std::runtime_error("scenario field '" + field + "': " + what) {}
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

/// Operating setup of one experiment: three ULAs, link budget, propagation
/// model and element pattern. Defaults follow the reference setup: 28 GHz,
/// 0 dBm transmit power, -90 dBm noise floor, q = 0.285 pattern exponent,
/// half-wavelength spacing and a 64-element Tx at the origin.
struct Scenario {
    double frequency_ghz = 28.0;
    double tx_power_dbm = 0.0;
    double noise_dbm = -90.0;
    double pattern_q = 0.285;
    PropagationParams propagation = PropagationParams::free_space();
    ArraySpec tx{{0.0, 0.0}, 0.0, 64, 0.5};
    ArraySpec rx{{933.0, 0.0}, 0.0, 1, 0.5};
    std::optional<ArraySpec> irs;
    SizingMethod method = SizingMethod::span_based;
    std::uint64_t seed = 1;

    double wavelength_m() const { return 299792458.0 / (frequency_ghz * 1e9); }
    RadiationPattern pattern() const { return {pattern_q}; }

    const ArraySpec& require_irs() const {
        if (!irs) throw ScenarioError("irs", "section is required for this experiment");
        return *irs;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

/// Raw key/value pairs keyed as "section.key" ("key" at top level).
struct ScenarioDoc {
    std::map<std::string, std::string> entries;
    bool has(const std::string& key) const { return entries.count(key) > 0; }
};

inline ScenarioDoc parse_doc(std::istream& in) {
    ScenarioDoc doc;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ScenarioError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty())
                throw ScenarioError("line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ScenarioError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ScenarioError("line " + std::to_string(lineno) + ": empty key");
        std::string full = section.empty() ? key : section + "." + key;
        if (doc.entries.count(full))
            throw ScenarioError(full, "duplicate entry");
        doc.entries[full] = value;
    }
    return doc;
}

inline double parse_number(const std::string& field, const std::string& text) {
    try {
        size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(v)) throw std::invalid_argument("not finite");
        return v;
    } catch (const std::exception&) {
        throw ScenarioError(field, "expected a number, got '" + text + "'");
    }
}

/// "NUM", "NUM wl" or "NUM m" -> wavelengths.
inline double parse_length_wl(const std::string& field, const std::string& text, double wavelength_m) {
    std::istringstream ss(text);
    std::string num, unit, extra;
    ss >> num >> unit >> extra;
    if (num.empty() || !extra.empty())
        throw ScenarioError(field, "expected 'NUM [wl|m]', got '" + text + "'");
    double v = parse_number(field, num);
    if (unit.empty() || unit == "wl") return v;
    if (unit == "m") return v / wavelength_m;
    throw ScenarioError(field, "unknown length unit '" + unit + "' (use wl or m)");
}

inline Point2 parse_point(const std::string& field, const std::string& text, double wavelength_m) {
    std::string s = trim(text);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw ScenarioError(field, "expected '[X, Y]', got '" + text + "'");
    s = s.substr(1, s.size() - 2);
    size_t comma = s.find(',');
    if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos)
        throw ScenarioError(field, "expected exactly two coordinates");
    return {parse_length_wl(field, trim(s.substr(0, comma)), wavelength_m),
            parse_length_wl(field, trim(s.substr(comma + 1)), wavelength_m)};
}

inline std::string parse_word(const std::string& field, const std::string& text) {
    std::string s = trim(text);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    if (s.empty()) throw ScenarioError(field, "expected a value");
    return s;
}

inline int parse_positive_int(const std::string& field, const std::string& text) {
    double v = parse_number(field, text);
    if (v < 1 || v != std::floor(v)) throw ScenarioError(field, "expected a positive integer");
    if (v > 1e6) throw ScenarioError(field, "unreasonably large count");
    return static_cast<int>(v);
}

inline void read_array_section(const ScenarioDoc& doc, const std::string& section, ArraySpec& a,
                               double wavelength_m) {
    if (doc.has(section + ".center"))
        a.center = parse_point(section + ".center", doc.entries.at(section + ".center"), wavelength_m);
    if (doc.has(section + ".orientation_deg"))
        a.orientation = parse_number(section + ".orientation_deg",
                                     doc.entries.at(section + ".orientation_deg")) * pi / 180.0;
    if (doc.has(section + ".n_elements"))
        a.n_elements = parse_positive_int(section + ".n_elements", doc.entries.at(section + ".n_elements"));
    if (doc.has(section + ".spacing_wl")) {
        a.spacing = parse_number(section + ".spacing_wl", doc.entries.at(section + ".spacing_wl"));
        if (!(a.spacing > 0.0)) throw ScenarioError(section + ".spacing_wl", "must be > 0");
    }
}

} // namespace detail

inline Scenario parse_scenario(std::istream& in) {
    static const std::vector<std::string> known = {
        "frequency_ghz", "tx_power_dbm", "noise_dbm", "pattern_q", "method", "seed",
        "propagation.mode", "propagation.a_att", "propagation.b_att",
        "tx.center", "tx.orientation_deg", "tx.n_elements", "tx.spacing_wl",
        "rx.center", "rx.orientation_deg", "rx.n_elements", "rx.spacing_wl",
        "irs.center", "irs.orientation_deg", "irs.n_elements", "irs.spacing_wl",
    };

    detail::ScenarioDoc doc = detail::parse_doc(in);
    for (const auto& [key, value] : doc.entries) {
        (void)value;
        bool ok = false;
        for (const std::string& k : known) ok = ok || (k == key);
        if (!ok) throw ScenarioError(key, "unknown field");
    }

    Scenario sc;
    if (doc.has("frequency_ghz")) sc.frequency_ghz = detail::parse_number("frequency_ghz", doc.entries.at("frequency_ghz"));
    if (!(sc.frequency_ghz > 0.0)) throw ScenarioError("frequency_ghz", "must be > 0");
    double wl_m = sc.wavelength_m();

    if (doc.has("tx_power_dbm")) sc.tx_power_dbm = detail::parse_number("tx_power_dbm", doc.entries.at("tx_power_dbm"));
    if (doc.has("noise_dbm")) sc.noise_dbm = detail::parse_number("noise_dbm", doc.entries.at("noise_dbm"));
    if (doc.has("pattern_q")) {
        sc.pattern_q = detail::parse_number("pattern_q", doc.entries.at("pattern_q"));
        if (!(sc.pattern_q >= 0.0)) throw ScenarioError("pattern_q", "must be >= 0");
    }
    if (doc.has("method")) {
        try {
            sc.method = parse_sizing_method(detail::parse_word("method", doc.entries.at("method")));
        } catch (const std::invalid_argument& e) {
            throw ScenarioError("method", e.what());
        }
    }
    if (doc.has("seed")) {
        double v = detail::parse_number("seed", doc.entries.at("seed"));
        if (v < 0 || v != std::floor(v)) throw ScenarioError("seed", "expected a non-negative integer");
        sc.seed = static_cast<std::uint64_t>(v);
    }

    std::string mode = "free_space";
    if (doc.has("propagation.mode")) mode = detail::parse_word("propagation.mode", doc.entries.at("propagation.mode"));
    if (mode == "free_space") {
        sc.propagation = PropagationParams::free_space();
        if (doc.has("propagation.a_att") || doc.has("propagation.b_att"))
            throw ScenarioError("propagation.mode", "free_space does not take a_att/b_att overrides");
    } else if (mode == "explicit") {
        if (!doc.has("propagation.a_att") || !doc.has("propagation.b_att"))
            throw ScenarioError("propagation.mode", "explicit mode requires a_att and b_att");
        sc.propagation.a_att = detail::parse_number("propagation.a_att", doc.entries.at("propagation.a_att"));
        sc.propagation.b_att = detail::parse_number("propagation.b_att", doc.entries.at("propagation.b_att"));
        if (!(sc.propagation.a_att > 0.0)) throw ScenarioError("propagation.a_att", "must be > 0");
        if (!(sc.propagation.b_att > 0.0)) throw ScenarioError("propagation.b_att", "must be > 0");
    } else {
        throw ScenarioError("propagation.mode", "expected free_space or explicit");
    }

    detail::read_array_section(doc, "tx", sc.tx, wl_m);
    detail::read_array_section(doc, "rx", sc.rx, wl_m);
    bool has_irs = false;
    for (const char* key : {"irs.center", "irs.orientation_deg", "irs.n_elements", "irs.spacing_wl"})
        has_irs = has_irs || doc.has(key);
    if (has_irs) {
        // IRS faces the -y half plane unless the scenario says otherwise
        ArraySpec irs{{0.0, 933.0}, pi, 512, 0.5};
        detail::read_array_section(doc, "irs", irs, wl_m);
        sc.irs = irs;
    }

    try {
        sc.tx.validate("tx");
        sc.rx.validate("rx");
        if (sc.irs) sc.irs->validate("irs");
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(e.what());
    }
    return sc;
}

inline Scenario parse_scenario(const std::string& text) {
    std::istringstream ss(text);
    return parse_scenario(ss);
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    return parse_scenario(in);
}

} // namespace irsbeam
