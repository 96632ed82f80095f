#ifndef QWI_IO_HPP
#define QWI_IO_HPP

// Profile documents (JSON), their canonical serialisation, and the sweep and verify
// commands built on them.
//
//   {
//     "schema_version": 1,
//     "name": "...",                                        optional
//     "physics": {"hbar2_over_2m0_eV_nm2": .., "effective_mass_ratio": ..},   optional
//     "leads": {"left_eV": .., "right_eV": ..},
//     "segments": [{"shape": "constant", "x_left_nm": .., "x_right_nm": .., "value_eV": ..}, ...],
//     "builtin": {"family": "...", "params": {...}},       instead of leads + segments
//     "sweep": {"E_min_eV": .., "E_max_eV": .., "points": 2000},
//     "variants": [{"label": "...", "params": {...}},                  builtin documents
//                  {"label": "...", "overrides": [{"segment": 2, "field": "slope_eV_per_nm", "value": -0.1}]}]
//   }
//
// Shape fields:
//   constant     value_eV
//   linear       value_at_left_eV, slope_eV_per_nm
//   parabolic    curvature_eV_per_nm2, center_nm, offset_eV (default 0)
//   exponential  amplitude_eV, offset_b, rate_per_nm, anchor_nm
//   numeric      samples_nm_eV: [[x, U], ...], piecewise linear
//
// The canonical form is the serializer's output: keys sorted, two-space indent,
// every optional field written out, trailing newline.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qwi/chain.hpp"
#include "qwi/core.hpp"
#include "qwi/errors.hpp"
#include "qwi/oracle.hpp"
#include "qwi/scattering.hpp"

namespace qwi {

inline constexpr int schema_version = 1;
inline constexpr int default_sweep_points = 2000;

struct SweepSpec {
    double E_min = 0.0;
    double E_max = 1.0;
    int points = default_sweep_points;

    std::vector<double> grid() const { return linspace(E_min, E_max, std::size_t(points)); }
};

struct SegmentOverride {
    std::size_t segment = 0;
    std::string field;
    double value = 0.0;
};

struct Variant {
    std::string label;
    FamilyParams params;                     // builtin documents
    std::vector<SegmentOverride> overrides;  // explicit documents
};

struct BuiltinRef {
    std::string family;
    FamilyParams params;
};

struct ProfileDocument {
    int schema_version = qwi::schema_version;
    std::string name;
    PhysicalConfig physics;
    std::optional<BuiltinRef> builtin;
    PotentialProfile profile;  // explicit profile, or the builtin's base profile
    SweepSpec sweep;
    std::vector<Variant> variants;
};

namespace io_detail {

using nlohmann::json;

struct FieldSpec {
    const char* key;
    bool required;
};

inline const std::map<std::string, std::vector<FieldSpec>>& shape_fields() {
    static const std::map<std::string, std::vector<FieldSpec>> m = {
        {"constant", {{"value_eV", true}}},
        {"linear", {{"value_at_left_eV", true}, {"slope_eV_per_nm", true}}},
        {"parabolic", {{"curvature_eV_per_nm2", true}, {"center_nm", true}, {"offset_eV", false}}},
        {"exponential", {{"amplitude_eV", true}, {"offset_b", true}, {"rate_per_nm", true}, {"anchor_nm", true}}},
        {"numeric", {{"samples_nm_eV", true}}},
    };
    return m;
}

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

/// Collects violations while walking the JSON tree.
class Reader {
public:
    std::vector<std::string> errors;

    bool object(const json& j, const std::string& where) {
        if (j.is_object()) return true;
        errors.push_back(where + ": expected an object");
        return false;
    }

    void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!ok.count(it.key())) errors.push_back(where + ": unknown field '" + it.key() + "'");
    }

    std::optional<double> number(const json& j, const std::string& where, const char* key, bool required) {
        if (!j.contains(key)) {
            if (required) errors.push_back(where + ": missing field '" + key + "'");
            return std::nullopt;
        }
        const json& v = j.at(key);
        if (!v.is_number()) {
            errors.push_back(where + "." + key + ": expected a number");
            return std::nullopt;
        }
        double d = v.get<double>();
        if (!std::isfinite(d)) {
            errors.push_back(where + "." + key + ": not finite");
            return std::nullopt;
        }
        return d;
    }

    std::optional<long long> integer(const json& j, const std::string& where, const char* key, bool required) {
        if (!j.contains(key)) {
            if (required) errors.push_back(where + ": missing field '" + key + "'");
            return std::nullopt;
        }
        const json& v = j.at(key);
        if (!v.is_number_integer()) {
            errors.push_back(where + "." + key + ": expected an integer");
            return std::nullopt;
        }
        return v.get<long long>();
    }

    std::optional<std::string> string(const json& j, const std::string& where, const char* key, bool required) {
        if (!j.contains(key)) {
            if (required) errors.push_back(where + ": missing field '" + key + "'");
            return std::nullopt;
        }
        const json& v = j.at(key);
        if (!v.is_string()) {
            errors.push_back(where + "." + key + ": expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    FamilyParams params(const json& j, const std::string& where) {
        FamilyParams p;
        if (!object(j, where)) return p;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!it->is_number() || !std::isfinite(it->get<double>())) {
                errors.push_back(where + "." + it.key() + ": expected a finite number");
                continue;
            }
            p[it.key()] = it->get<double>();
        }
        return p;
    }

    std::optional<Segment> segment(const json& j, const std::string& where) {
        if (!object(j, where)) return std::nullopt;
        auto shape = string(j, where, "shape", true);
        auto xl = number(j, where, "x_left_nm", true);
        auto xr = number(j, where, "x_right_nm", true);
        if (!shape) return std::nullopt;
        auto it = shape_fields().find(*shape);
        if (it == shape_fields().end()) {
            errors.push_back(where + ": unknown shape '" + *shape + "'");
            return std::nullopt;
        }
        std::set<std::string> allowed{"shape", "x_left_nm", "x_right_nm"};
        for (const auto& f : it->second) allowed.insert(f.key);
        for (auto k = j.begin(); k != j.end(); ++k)
            if (!allowed.count(k.key()))
                errors.push_back(where + ": unknown field '" + k.key() + "' for shape " + *shape);
        const std::size_t before = errors.size();
        std::optional<Shape> s;
        if (*shape == "numeric") {
            std::vector<std::pair<double, double>> pts;
            if (!j.contains("samples_nm_eV")) {
                errors.push_back(where + ": missing field 'samples_nm_eV'");
            } else if (!j.at("samples_nm_eV").is_array() || j.at("samples_nm_eV").size() < 2) {
                errors.push_back(where + ".samples_nm_eV: expected at least two [x, U] pairs");
            } else {
                for (const auto& p : j.at("samples_nm_eV")) {
                    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                        errors.push_back(where + ".samples_nm_eV: entries must be [x_nm, U_eV]");
                        break;
                    }
                    pts.emplace_back(p[0].get<double>(), p[1].get<double>());
                }
            }
            if (errors.size() == before) s = Numeric::from_samples(pts);
        } else {
            std::map<std::string, double> v;
            for (const auto& f : it->second)
                if (auto d = number(j, where, f.key, f.required)) v[f.key] = *d;
            if (errors.size() == before) {
                if (*shape == "constant") s = Constant{v["value_eV"]};
                else if (*shape == "linear") s = Linear{v["value_at_left_eV"], v["slope_eV_per_nm"]};
                else if (*shape == "parabolic") s = Parabolic{v["curvature_eV_per_nm2"], v["center_nm"], v["offset_eV"]};
                else s = Exponential{v["amplitude_eV"], v["offset_b"], v["rate_per_nm"], v["anchor_nm"]};
            }
        }
        if (!s || !xl || !xr) return std::nullopt;
        return Segment(*xl, *xr, std::move(*s));
    }
};

inline json segment_json(const Segment& s) {
    json j;
    j["shape"] = shape_name(s.shape);
    j["x_left_nm"] = s.x_left;
    j["x_right_nm"] = s.x_right;
    std::visit(
        [&](const auto& sh) {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Constant>) {
                j["value_eV"] = sh.value;
            } else if constexpr (std::is_same_v<T, Linear>) {
                j["value_at_left_eV"] = sh.value_at_left;
                j["slope_eV_per_nm"] = sh.slope;
            } else if constexpr (std::is_same_v<T, Parabolic>) {
                j["curvature_eV_per_nm2"] = sh.curvature;
                j["center_nm"] = sh.center;
                j["offset_eV"] = sh.offset;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                j["amplitude_eV"] = sh.amplitude;
                j["offset_b"] = sh.offset_b;
                j["rate_per_nm"] = sh.rate;
                j["anchor_nm"] = sh.anchor;
            } else {
                json pts = json::array();
                for (const auto& [x, u] : sh.samples) pts.push_back(json::array({x, u}));
                j["samples_nm_eV"] = pts;
            }
        },
        s.shape);
    return j;
}

/// Apply one field override to a segment; returns false when the field does not exist
/// for the segment's shape.
inline bool apply_override(Segment& seg, const std::string& field, double value) {
    if (field == "x_left_nm") {
        seg = Segment(value, seg.x_right, seg.shape);
        return true;
    }
    if (field == "x_right_nm") {
        seg.x_right = value;
        return true;
    }
    return std::visit(
        [&](auto& sh) {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Constant>) {
                if (field == "value_eV") return sh.value = value, true;
            } else if constexpr (std::is_same_v<T, Linear>) {
                if (field == "value_at_left_eV") return sh.value_at_left = value, true;
                if (field == "slope_eV_per_nm") return sh.slope = value, true;
            } else if constexpr (std::is_same_v<T, Parabolic>) {
                if (field == "curvature_eV_per_nm2") return sh.curvature = value, true;
                if (field == "center_nm") return sh.center = value, true;
                if (field == "offset_eV") return sh.offset = value, true;
            } else if constexpr (std::is_same_v<T, Exponential>) {
                if (field == "amplitude_eV") return sh.amplitude = value, true;
                if (field == "offset_b") return sh.offset_b = value, true;
                if (field == "rate_per_nm") return sh.rate = value, true;
                if (field == "anchor_nm") return sh.anchor = value, true;
            }
            return false;
        },
        seg.shape);
}

}  // namespace io_detail

/// Profile for one variant (or the base profile when `variant` is null).
inline PotentialProfile variant_profile(const ProfileDocument& doc, const Variant* variant) {
    if (doc.builtin) {
        FamilyParams p = doc.builtin->params;
        if (variant)
            for (const auto& [k, v] : variant->params) p[k] = v;
        return builtin_family(doc.builtin->family, p);
    }
    PotentialProfile prof = doc.profile;
    if (variant)
        for (const auto& o : variant->overrides) {
            if (o.segment >= prof.segments.size() || !io_detail::apply_override(prof.segments[o.segment], o.field, o.value))
                throw ValidationError({"variant '" + variant->label + "': cannot apply override of '" + o.field +
                                       "' to segment " + std::to_string(o.segment)});
        }
    return prof;
}

/// Strict parse. Malformed JSON raises ParseError with its line and column; every
/// schema or physics violation is collected into one ValidationError.
inline ProfileDocument parse_profile(const std::string& text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = io_detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        std::string msg = e.what();
        if (auto p = msg.find(": ", msg.find("parse error")); p != std::string::npos) msg = msg.substr(p + 2);
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg, line, col);
    }
    io_detail::Reader rd;
    ProfileDocument doc;
    if (!rd.object(j, "document")) throw ValidationError(rd.errors);
    rd.only_keys(j, "document", {"schema_version", "name", "physics", "leads", "segments", "builtin", "sweep", "variants"});

    if (auto v = rd.integer(j, "document", "schema_version", true)) {
        if (*v != schema_version)
            rd.errors.push_back("document.schema_version: unsupported version " + std::to_string(*v));
        doc.schema_version = int(*v);
    }
    if (auto n = rd.string(j, "document", "name", false)) doc.name = *n;

    if (j.contains("physics") && rd.object(j["physics"], "physics")) {
        const json& p = j["physics"];
        rd.only_keys(p, "physics", {"hbar2_over_2m0_eV_nm2", "effective_mass_ratio"});
        if (auto v = rd.number(p, "physics", "hbar2_over_2m0_eV_nm2", false)) doc.physics.hbar2_over_2m0 = *v;
        if (auto v = rd.number(p, "physics", "effective_mass_ratio", false)) doc.physics.effective_mass_ratio = *v;
        for (auto& m : doc.physics.violations()) rd.errors.push_back("physics: " + m);
    }

    const bool has_builtin = j.contains("builtin");
    if (has_builtin) {
        if (j.contains("leads") || j.contains("segments"))
            rd.errors.push_back("document: 'builtin' cannot be combined with 'leads' or 'segments'");
        if (rd.object(j["builtin"], "builtin")) {
            const json& b = j["builtin"];
            rd.only_keys(b, "builtin", {"family", "params"});
            BuiltinRef ref;
            if (auto f = rd.string(b, "builtin", "family", true)) ref.family = *f;
            if (b.contains("params")) ref.params = rd.params(b["params"], "builtin.params");
            if (!ref.family.empty())
                for (auto& m : builtin_family_violations(ref.family, ref.params)) rd.errors.push_back("builtin: " + m);
            doc.builtin = ref;
        }
    } else {
        if (!j.contains("leads")) {
            rd.errors.push_back("document: missing field 'leads'");
        } else if (rd.object(j["leads"], "leads")) {
            rd.only_keys(j["leads"], "leads", {"left_eV", "right_eV"});
            if (auto v = rd.number(j["leads"], "leads", "left_eV", true)) doc.profile.lead_left = *v;
            if (auto v = rd.number(j["leads"], "leads", "right_eV", true)) doc.profile.lead_right = *v;
        }
        if (!j.contains("segments")) {
            rd.errors.push_back("document: missing field 'segments'");
        } else if (!j["segments"].is_array()) {
            rd.errors.push_back("segments: expected an array");
        } else {
            const json& segs = j["segments"];
            for (std::size_t i = 0; i < segs.size(); ++i) {
                auto s = rd.segment(segs[i], "segments[" + std::to_string(i) + "]");
                if (s) doc.profile.segments.push_back(std::move(*s));
            }
            // Geometry from the raw coordinates, so it is reported even when a shape is bad.
            auto coord = [&](std::size_t i, const char* key) -> std::optional<double> {
                if (!segs[i].is_object() || !segs[i].contains(key) || !segs[i][key].is_number()) return std::nullopt;
                return segs[i][key].get<double>();
            };
            for (std::size_t i = 0; i < segs.size(); ++i) {
                auto xl = coord(i, "x_left_nm"), xr = coord(i, "x_right_nm");
                if (xl && xr && !(*xl <= *xr))
                    rd.errors.push_back("segments[" + std::to_string(i) + "]: x_left_nm > x_right_nm");
                if (i + 1 < segs.size()) {
                    auto next = coord(i + 1, "x_left_nm");
                    if (xr && next && *xr != *next)
                        rd.errors.push_back("segments[" + std::to_string(i) + "] and segments[" + std::to_string(i + 1) +
                                            "] are not contiguous: x_right_nm " + io_detail::fmt("%.17g", *xr) +
                                            " != x_left_nm " + io_detail::fmt("%.17g", *next));
                }
            }
        }
    }

    if (!j.contains("sweep")) {
        rd.errors.push_back("document: missing field 'sweep'");
    } else if (rd.object(j["sweep"], "sweep")) {
        const json& s = j["sweep"];
        rd.only_keys(s, "sweep", {"E_min_eV", "E_max_eV", "points"});
        auto lo = rd.number(s, "sweep", "E_min_eV", true);
        auto hi = rd.number(s, "sweep", "E_max_eV", true);
        auto pts = rd.integer(s, "sweep", "points", false);
        if (lo) doc.sweep.E_min = *lo;
        if (hi) doc.sweep.E_max = *hi;
        if (pts) {
            if (*pts < 1 || *pts > 10000000) rd.errors.push_back("sweep.points: must be between 1 and 10^7");
            else doc.sweep.points = int(*pts);
        }
        if (lo && hi) {
            if (doc.sweep.points == 1 ? *hi < *lo : !(*hi > *lo))
                rd.errors.push_back("sweep: E_max_eV must exceed E_min_eV");
        }
    }

    if (j.contains("variants")) {
        if (!j["variants"].is_array()) {
            rd.errors.push_back("variants: expected an array");
        } else {
            std::set<std::string> labels;
            for (std::size_t i = 0; i < j["variants"].size(); ++i) {
                const std::string where = "variants[" + std::to_string(i) + "]";
                const json& v = j["variants"][i];
                if (!rd.object(v, where)) continue;
                rd.only_keys(v, where, {"label", "params", "overrides"});
                Variant var;
                if (auto l = rd.string(v, where, "label", true)) {
                    var.label = *l;
                    if (!labels.insert(*l).second) rd.errors.push_back(where + ": duplicate label '" + *l + "'");
                }
                if (v.contains("params")) {
                    if (!has_builtin) rd.errors.push_back(where + ": 'params' needs a builtin profile");
                    var.params = rd.params(v["params"], where + ".params");
                    if (doc.builtin && !doc.builtin->family.empty())
                        for (auto& m : builtin_family_violations(doc.builtin->family, var.params))
                            rd.errors.push_back(where + ": " + m);
                }
                if (v.contains("overrides")) {
                    if (has_builtin) rd.errors.push_back(where + ": 'overrides' needs explicit segments");
                    if (!v["overrides"].is_array()) {
                        rd.errors.push_back(where + ".overrides: expected an array");
                    } else {
                        for (std::size_t k = 0; k < v["overrides"].size(); ++k) {
                            const std::string w2 = where + ".overrides[" + std::to_string(k) + "]";
                            const json& o = v["overrides"][k];
                            if (!rd.object(o, w2)) continue;
                            rd.only_keys(o, w2, {"segment", "field", "value"});
                            auto seg = rd.integer(o, w2, "segment", true);
                            auto field = rd.string(o, w2, "field", true);
                            auto value = rd.number(o, w2, "value", true);
                            if (!seg || !field || !value) continue;
                            if (*seg < 0 || std::size_t(*seg) >= doc.profile.segments.size()) {
                                rd.errors.push_back(w2 + ": segment index " + std::to_string(*seg) + " out of range");
                                continue;
                            }
                            Segment probe = doc.profile.segments[std::size_t(*seg)];
                            if (!io_detail::apply_override(probe, *field, *value))
                                rd.errors.push_back(w2 + ": segment " + std::to_string(*seg) + " (" +
                                                    shape_name(probe.shape) + ") has no field '" + *field + "'");
                            var.overrides.push_back({std::size_t(*seg), *field, *value});
                        }
                    }
                }
                doc.variants.push_back(std::move(var));
            }
        }
    }

    if (rd.errors.empty()) {
        // Variants must produce valid profiles too.
        for (const auto& v : doc.variants) {
            try {
                for (auto& m : variant_profile(doc, &v).violations())
                    rd.errors.push_back("variant '" + v.label + "': " + m);
            } catch (const ValidationError& e) {
                for (auto& m : e.violations()) rd.errors.push_back(m);
            }
        }
    }
    if (!rd.errors.empty()) throw ValidationError(rd.errors);
    if (doc.builtin) doc.profile = builtin_family(doc.builtin->family, doc.builtin->params);
    return doc;
}

/// Canonical text of a document.
inline std::string serialize_profile(const ProfileDocument& doc) {
    using nlohmann::json;
    json j;
    j["schema_version"] = doc.schema_version;
    if (!doc.name.empty()) j["name"] = doc.name;
    j["physics"] = {{"hbar2_over_2m0_eV_nm2", doc.physics.hbar2_over_2m0},
                    {"effective_mass_ratio", doc.physics.effective_mass_ratio}};
    if (doc.builtin) {
        json params = json::object();
        for (const auto& [k, v] : doc.builtin->params) params[k] = v;
        j["builtin"] = {{"family", doc.builtin->family}, {"params", params}};
    } else {
        j["leads"] = {{"left_eV", doc.profile.lead_left}, {"right_eV", doc.profile.lead_right}};
        json segs = json::array();
        for (const auto& s : doc.profile.segments) segs.push_back(io_detail::segment_json(s));
        j["segments"] = segs;
    }
    j["sweep"] = {{"E_min_eV", doc.sweep.E_min}, {"E_max_eV", doc.sweep.E_max}, {"points", doc.sweep.points}};
    if (!doc.variants.empty()) {
        json vs = json::array();
        for (const auto& v : doc.variants) {
            json jv;
            jv["label"] = v.label;
            if (!v.params.empty()) {
                json params = json::object();
                for (const auto& [k, val] : v.params) params[k] = val;
                jv["params"] = params;
            }
            if (!v.overrides.empty()) {
                json os = json::array();
                for (const auto& o : v.overrides) os.push_back({{"segment", o.segment}, {"field", o.field}, {"value", o.value}});
                jv["overrides"] = os;
            }
            vs.push_back(jv);
        }
        j["variants"] = vs;
    }
    return j.dump(2) + "\n";
}

/// Document for a built-in profile with a sweep from just above zero to 1.2 times its top.
inline ProfileDocument builtin_document(const BuiltinProfile& b) {
    ProfileDocument doc;
    doc.name = b.name;
    doc.builtin = BuiltinRef{b.family, b.params};
    doc.profile = b.profile;
    const double lo = std::max(b.profile.lead_left, b.profile.lead_right);
    doc.sweep = {lo + 1e-3, lo + 1.2 * (b.barrier_top - lo) + 1e-3, default_sweep_points};
    return doc;
}

// ---------------------------------------------------------------------------
// Sweep command

enum class OutputFormat { csv, plot };

struct SweepOptions {
    OutputFormat format = OutputFormat::csv;
    bool strict = false;
    unsigned threads = 0;  // 0: QWI_THREADS or hardware concurrency
};

/// Writes the CSV (or plot blocks) for the base profile, or for each variant when the
/// document defines any. Returns 0, or 1 in strict mode when any entry failed.
inline int run_sweep(const ProfileDocument& doc, std::ostream& out, const SweepOptions& opt = {},
                     std::ostream* diag = nullptr) {
    using io_detail::fmt;
    std::vector<const Variant*> runs;
    for (const auto& v : doc.variants) runs.push_back(&v);
    if (runs.empty()) runs.push_back(nullptr);
    const std::vector<double> grid = doc.sweep.grid();
    int failures = 0;
    if (opt.format == OutputFormat::csv) out << "E_eV,T,R,ReZ_in,ImZ_in,status\n";
    bool first = true;
    for (const Variant* v : runs) {
        const Spectrum s = sweep(variant_profile(doc, v), grid, doc.physics, opt.threads);
        if (opt.format == OutputFormat::plot && !first) out << "\n\n";
        first = false;
        if (v) out << "# variant=" << v->label << "\n";
        for (const auto& e : s) {
            if (e.status == Status::failed) {
                ++failures;
                if (diag) *diag << "E = " << fmt("%.10g", e.E) << " eV failed: " << e.message << "\n";
            }
            if (opt.format == OutputFormat::csv) {
                out << fmt("%.10g", e.E) << ',' << fmt("%.12e", e.T) << ',' << fmt("%.12e", e.R) << ','
                    << fmt("%.12e", e.z_input.real()) << ',' << fmt("%.12e", e.z_input.imag()) << ','
                    << status_name(e.status) << "\n";
            } else {
                out << fmt("%.10g", e.E) << ' ' << fmt("%.12e", e.T) << "\n";
            }
        }
    }
    return opt.strict && failures > 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Verify command

struct CheckRow {
    std::string variant;
    std::string check;
    double achieved;
    double threshold;
    bool passed;
    std::string note;
};

struct VerifyReport {
    std::vector<CheckRow> rows;
    std::vector<std::string> warnings;
    bool fallback_basis_used = false;

    bool passed() const {
        return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.passed; });
    }
};

struct VerifyOptions {
    std::size_t oracle_points = 200;
    double riccati_tolerance = 1e-12;
    double oracle_threshold = 1e-6;
    double flux_threshold = 1e-9;
    double closed_form_threshold = 1e-10;
    double staircase_threshold = 1e-3;
    double resonance_prominence = 0.1;
};

/// Chain against the Riccati oracle (T and the projective state), flux balance and
/// staircase convergence, for the base profile or each variant.
inline VerifyReport verify_document(const ProfileDocument& doc, const VerifyOptions& opt = {}, unsigned threads = 0) {
    VerifyReport rep;
    std::vector<const Variant*> runs;
    for (const auto& v : doc.variants) runs.push_back(&v);
    if (runs.empty()) runs.push_back(nullptr);
    const PhysicalConfig& cfg = doc.physics;
    const std::vector<double> full = doc.sweep.grid();
    std::vector<double> grid;
    const std::size_t stride = std::max<std::size_t>(1, (full.size() + opt.oracle_points - 1) / opt.oracle_points);
    for (std::size_t k = 0; k < full.size(); k += stride) grid.push_back(full[k]);

    for (const Variant* v : runs) {
        const std::string label = v ? v->label : "base";
        const PotentialProfile prof = variant_profile(doc, v);
        const Spectrum spec = sweep(prof, full, cfg, threads);

        double flux = 0.0;
        bool any_failed = false;
        for (const auto& e : spec) {
            if (e.status == Status::fallback_basis_used) rep.fallback_basis_used = true;
            if (e.status == Status::failed) any_failed = true;
            if (e.status == Status::ok || e.status == Status::fallback_basis_used)
                flux = std::max(flux, std::abs(e.T + e.R - 1.0));
        }
        rep.rows.push_back({label, "sweep_completed", any_failed ? 1.0 : 0.0, 0.0, !any_failed, ""});
        rep.rows.push_back({label, "flux_T_plus_R", flux, opt.flux_threshold, flux <= opt.flux_threshold, ""});

        double t_err = 0.0, z_err = 0.0;
        for (double E : grid) {
            ScatteringResult c = transmission(prof, E, cfg);
            if (c.status == Status::evanescent_lead || c.status == Status::failed) continue;
            OracleTransmission o = riccati_transmission(prof, E, cfg, opt.riccati_tolerance);
            if (c.T > 1e-12) t_err = std::max(t_err, std::abs(c.T - o.T) / c.T);
            const double kr = std::sqrt(std::max(0.0, E - prof.lead_right) / cfg.hbar2_over_2m());
            const ImpedanceState load = ImpedanceState::from_log_derivative(cplx(0.0, kr));
            ImpedanceState ch = chain_impedance(prof, E, load, Direction::backward, cfg);
            RiccatiResult rc = riccati_integrate(prof, E, load, opt.riccati_tolerance, cfg);
            z_err = std::max(z_err, projective_distance(ch, rc.state));
        }
        rep.rows.push_back({label, "chain_vs_riccati_T", t_err, opt.oracle_threshold, t_err <= opt.oracle_threshold, ""});
        if (std::all_of(prof.segments.begin(), prof.segments.end(), [](const Segment& s) { return s.is_constant(); })) {
            double tm = 0.0;
            for (double E : grid) {
                ScatteringResult c = transmission(prof, E, cfg);
                if (c.status == Status::failed) continue;
                tm = std::max(tm, std::abs(c.T - transfer_matrix_transmission(prof, E, cfg).T));
            }
            rep.rows.push_back({label, "chain_vs_transfer_T", tm, opt.closed_form_threshold, tm <= opt.closed_form_threshold, ""});
        }
        rep.rows.push_back({label, "chain_vs_riccati_Z", z_err, opt.oracle_threshold, z_err <= opt.oracle_threshold, ""});

        std::vector<double> errs;
        for (int n : {10, 100, 1000}) {
            const PotentialProfile st = staircase(prof, n).profile;
            double m = 0.0;
            for (double E : grid) {
                ScatteringResult a = transmission(st, E, cfg), b = transmission(prof, E, cfg);
                if (a.status == Status::failed || b.status == Status::failed) continue;
                m = std::max(m, std::abs(a.T - b.T));
            }
            errs.push_back(m);
        }
        const bool monotone = errs[1] <= errs[0] && errs[2] <= errs[1];
        char note[96];
        std::snprintf(note, sizeof note, "N=10: %.2e  N=100: %.2e%s", errs[0], errs[1], monotone ? "" : "  (not monotone)");
        rep.rows.push_back(
            {label, "staircase_N1000", errs[2], opt.staircase_threshold, monotone && errs[2] <= opt.staircase_threshold, note});

        const double spacing = full.size() > 1 ? full[1] - full[0] : 0.0;
        for (const auto& r : find_resonances(spec, opt.resonance_prominence))
            if (spacing > 0.0 && r.width < 3.0 * spacing)
                rep.warnings.push_back(label + ": resonance at " + io_detail::fmt("%.6g", r.E_peak) + " eV has width " +
                                       io_detail::fmt("%.2e", r.width) + " eV, below 3 grid spacings");
    }
    return rep;
}

inline void print_report(const VerifyReport& rep, std::ostream& out) {
    char line[256];
    std::snprintf(line, sizeof line, "%-20s %-22s %-12s %-12s %s\n", "variant", "check", "achieved", "threshold", "result");
    out << line;
    for (const auto& r : rep.rows) {
        std::snprintf(line, sizeof line, "%-20s %-22s %-12.3e %-12.3e %s", r.variant.c_str(), r.check.c_str(), r.achieved,
                      r.threshold, r.passed ? "PASS" : "FAIL");
        out << line;
        if (!r.note.empty()) out << "  " << r.note;
        out << "\n";
    }
    out << "fallback_basis_used: " << (rep.fallback_basis_used ? "yes" : "no") << "\n";
    for (const auto& w : rep.warnings) out << "warning: " << w << "\n";
    out << (rep.passed() ? "all checks passed" : "some checks FAILED") << "\n";
}

}  // namespace qwi

#endif
