#ifndef QWI_SCATTERING_HPP
#define QWI_SCATTERING_HPP

// Reflection and transmission from chained impedances, energy sweeps, resonance
// extraction and the built-in example profiles.
//
// For incidence from the left, the outgoing wave e^{i k_R x} fixes the load
// psi'/psi = i k_R at the right end. Carrying it back to the left end gives the wave
// (u', u) there, magnitude included (log_scale). Matching to A e^{ik_L x} + B e^{-ik_L x}:
//
//   Gamma = B/A = (i k_L u - u') / (i k_L u + u'),   T = 4 k_L k_R / |i k_L u + u'|^2.
//
// T comes from the transmitted amplitude directly rather than from 1 - R, so tiny
// transmissions keep their relative accuracy.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "qwi/chain.hpp"
#include "qwi/core.hpp"
#include "qwi/errors.hpp"

namespace qwi {

enum class Status { ok, evanescent_lead, fallback_basis_used, failed };

inline const char* status_name(Status s) {
    switch (s) {
        case Status::ok: return "ok";
        case Status::evanescent_lead: return "evanescent_lead";
        case Status::fallback_basis_used: return "fallback_basis_used";
        default: return "failed";
    }
}

enum class Incidence { from_left, from_right };

struct ScatteringResult {
    double E = 0.0;
    double T = 0.0;
    double R = 0.0;
    cplx z_input{};  // impedance at the input interface, m/s
    Status status = Status::ok;
    std::string message;  // diagnostic for Status::failed
};

inline ScatteringResult transmission(const PotentialProfile& profile, double E, const PhysicalConfig& cfg,
                                     Incidence inc = Incidence::from_left, const ChainOptions& opt = {}) {
    ScatteringResult r;
    r.E = E;
    const double h2m = cfg.hbar2_over_2m();
    if (E < profile.lead_left || E < profile.lead_right) {
        r.T = 0.0;
        r.R = 1.0;
        r.z_input = lead_impedance(E, inc == Incidence::from_left ? profile.lead_left : profile.lead_right, cfg);
        r.status = Status::evanescent_lead;
        return r;
    }
    const double kl = std::sqrt((E - profile.lead_left) / h2m);
    const double kr = std::sqrt((E - profile.lead_right) / h2m);
    const cplx i{0.0, 1.0};
    ChainResult c;
    cplx match, mismatch;
    if (inc == Incidence::from_left) {
        c = chain_impedance_detailed(profile, E, ImpedanceState::from_log_derivative(i * kr), Direction::backward, cfg, opt);
        match = i * kl * c.state.denominator + c.state.numerator;
        mismatch = i * kl * c.state.denominator - c.state.numerator;
        r.T = 4.0 * kl * kr * std::exp(-2.0 * c.state.log_scale) / std::norm(match);
    } else {
        c = chain_impedance_detailed(profile, E, ImpedanceState::from_log_derivative(-i * kl), Direction::forward, cfg, opt);
        match = i * kr * c.state.denominator - c.state.numerator;
        mismatch = i * kr * c.state.denominator + c.state.numerator;
        r.T = 4.0 * kl * kr * std::exp(-2.0 * c.state.log_scale) / std::norm(match);
    }
    r.R = std::norm(mismatch) / std::norm(match);
    r.z_input = c.state.impedance(cfg);
    r.status = c.fallback_basis_used ? Status::fallback_basis_used : Status::ok;
    if (!std::isfinite(r.T) || !std::isfinite(r.R)) {
        r.status = Status::failed;
        r.message = "non-finite transmission";
    }
    return r;
}

using Spectrum = std::vector<ScatteringResult>;

/// Worker count: QWI_THREADS if set and positive, else the hardware concurrency.
inline unsigned default_thread_count() {
    if (const char* env = std::getenv("QWI_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return unsigned(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Independent transmission per grid energy, in grid order. Failures are recorded per
/// entry (Status::failed) rather than aborting the sweep.
inline Spectrum sweep(const PotentialProfile& profile, const std::vector<double>& grid, const PhysicalConfig& cfg,
                      unsigned threads = 0, const ChainOptions& opt = {}) {
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw DomainError("sweep: energy grid must be strictly increasing");
    Spectrum out(grid.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < grid.size();) {
            try {
                out[k] = transmission(profile, grid[k], cfg, Incidence::from_left, opt);
            } catch (const std::exception& e) {
                out[k] = ScatteringResult{grid[k], std::nan(""), std::nan(""), {}, Status::failed, e.what()};
            }
        }
    };
    if (threads == 0) threads = default_thread_count();
    threads = unsigned(std::min<std::size_t>(threads, std::max<std::size_t>(1, grid.size())));
    if (threads <= 1) {
        work();
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return out;
}

/// n points from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = n == 1 ? lo : lo + (hi - lo) * double(k) / double(n - 1);
    return g;
}

struct Resonance {
    double E_peak;
    double T_peak;
    double width;  // full width at half maximum, eV
};

/// Local maxima of T whose topographic prominence is at least `prominence`. Only
/// entries with a usable T take part; failed or evanescent entries split the spectrum.
inline std::vector<Resonance> find_resonances(const Spectrum& s, double prominence) {
    std::vector<Resonance> out;
    const std::size_t n = s.size();
    auto usable = [&](std::size_t k) {
        return s[k].status == Status::ok || s[k].status == Status::fallback_basis_used;
    };
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!usable(k) || !usable(k - 1) || !usable(k + 1)) continue;
        const double t = s[k].T;
        if (!(t > s[k - 1].T && t >= s[k + 1].T)) continue;
        // Lowest point on each side before reaching higher ground or the end.
        double left_min = t, right_min = t;
        std::size_t j = k;
        while (j > 0 && usable(j - 1) && s[j - 1].T < t) left_min = std::min(left_min, s[--j].T);
        bool left_open = !(j > 0 && usable(j - 1));
        j = k;
        while (j + 1 < n && usable(j + 1) && s[j + 1].T <= t) right_min = std::min(right_min, s[++j].T);
        bool right_open = !(j + 1 < n && usable(j + 1));
        double base;
        if (left_open && right_open) base = std::min(left_min, right_min);
        else if (left_open) base = right_min;
        else if (right_open) base = left_min;
        else base = std::max(left_min, right_min);
        if (t - base < prominence) continue;

        // Half-maximum crossings by linear interpolation.
        const double half = 0.5 * t;
        double el = s.front().E, er = s.back().E;
        bool found_l = false, found_r = false;
        for (std::size_t i = k; i > 0 && usable(i - 1); --i)
            if (s[i - 1].T <= half) {
                el = s[i - 1].E + (half - s[i - 1].T) / (s[i].T - s[i - 1].T) * (s[i].E - s[i - 1].E);
                found_l = true;
                break;
            }
        for (std::size_t i = k; i + 1 < n && usable(i + 1); ++i)
            if (s[i + 1].T <= half) {
                er = s[i].E + (s[i].T - half) / (s[i].T - s[i + 1].T) * (s[i + 1].E - s[i].E);
                found_r = true;
                break;
            }
        double width;
        if (found_l && found_r) width = er - el;
        else if (found_l) width = 2.0 * (s[k].E - el);
        else if (found_r) width = 2.0 * (er - s[k].E);
        else width = s.back().E - s.front().E;
        out.push_back({s[k].E, t, width});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Built-in profiles

struct DeformedDoubleBarrierParams {
    double A = 0.1;       // eV
    double B = 1.0;       // dimensionless
    double gamma = 0.3;   // 1/nm
    double C = 0.01;      // eV/nm^2
    double D = 0.4;       // eV
    double F = 0.1;       // eV/nm
    double a = 3.0;       // nm, half width of the parabolic well
    double b = 3.0;       // nm, barrier widths
};

struct DeformedDoubleBarrier {
    PotentialProfile profile;
    double jump_left;   // U2(-a) - U1(-a)
    double jump_right;  // U3(a) - U2(a)
};

/// A (exp[gamma (x + a + b)] + B) on [-a-b, -a], C x^2 on [-a, a], D - F (x - a) on
/// [a, a+b], zero leads. The pieces are not required to meet; the jumps are reported.
inline DeformedDoubleBarrier deformed_double_barrier(const DeformedDoubleBarrierParams& p = {}) {
    DeformedDoubleBarrier d;
    d.profile.lead_left = 0.0;
    d.profile.lead_right = 0.0;
    d.profile.segments = {
        Segment(-p.a - p.b, -p.a, Exponential{p.A, p.B, p.gamma, p.a + p.b}),
        Segment(-p.a, p.a, Parabolic{p.C, 0.0, 0.0}),
        Segment(p.a, p.a + p.b, Linear{p.D, -p.F}),
    };
    const auto& s = d.profile.segments;
    d.jump_left = s[1].potential(-p.a) - s[0].potential(-p.a);
    d.jump_right = s[2].potential(p.a) - s[1].potential(p.a);
    return d;
}

/// Two inverted parabolas of height a x0^2 centred at -x0 and +x0, touching zero at
/// x = -2x0, 0, 2x0; zero leads outside |x| > 2x0.
inline PotentialProfile double_parabolic_hump(double a = 0.005, double x0 = 5.0) {
    const double h = a * x0 * x0;
    return PotentialProfile{0.0, 0.0,
                            {Segment(-2.0 * x0, 0.0, Parabolic{-a, -x0, h}), Segment(0.0, 2.0 * x0, Parabolic{-a, x0, h})}};
}

inline PotentialProfile rectangular_barrier(double height = 0.5, double width = 2.0) {
    return PotentialProfile{0.0, 0.0, {Segment(0.0, width, Constant{height})}};
}

/// Barriers of the given height and width on either side of a well of width `well`,
/// symmetric about x = 0.
inline PotentialProfile rectangular_double_barrier(double height = 0.3, double barrier = 1.5, double well = 5.0) {
    const double w = 0.5 * well;
    return PotentialProfile{0.0,
                            0.0,
                            {Segment(-w - barrier, -w, Constant{height}), Segment(-w, w, Constant{0.0}),
                             Segment(w, w + barrier, Constant{height})}};
}

/// Linear ramp, constant plateau and exponential tail between unequal leads.
inline PotentialProfile asymmetric_three_segment() {
    return PotentialProfile{0.0,
                            0.1,
                            {Segment(0.0, 2.0, Linear{0.05, 0.15}), Segment(2.0, 3.5, Constant{0.25}),
                             Segment(3.5, 6.0, Exponential{0.05, 1.0, -0.4, -3.5})}};
}

// Parameterised families, addressed by name with unit-suffixed parameters.

using FamilyParams = std::map<std::string, double>;

inline std::vector<std::string> builtin_families() {
    return {"deformed_double_barrier", "double_parabolic_hump", "rectangular_barrier", "rectangular_double_barrier",
            "asymmetric_three_segment"};
}

inline FamilyParams builtin_family_defaults(const std::string& family) {
    if (family == "deformed_double_barrier") {
        DeformedDoubleBarrierParams p;
        return {{"A_eV", p.A},         {"B", p.B},         {"gamma_per_nm", p.gamma}, {"C_eV_per_nm2", p.C},
                {"D_eV", p.D},         {"F_eV_per_nm", p.F}, {"a_nm", p.a},           {"b_nm", p.b}};
    }
    if (family == "double_parabolic_hump") return {{"a_eV_per_nm2", 0.005}, {"x0_nm", 5.0}};
    if (family == "rectangular_barrier") return {{"height_eV", 0.5}, {"width_nm", 2.0}};
    if (family == "rectangular_double_barrier") return {{"height_eV", 0.3}, {"barrier_nm", 1.5}, {"well_nm", 5.0}};
    if (family == "asymmetric_three_segment") return {};
    throw DomainError("unknown profile family '" + family + "'");
}

/// Problems with a family name or parameter set; empty when valid.
inline std::vector<std::string> builtin_family_violations(const std::string& family, const FamilyParams& params) {
    const auto known = builtin_families();
    if (std::find(known.begin(), known.end(), family) == known.end())
        return {"unknown profile family '" + family + "'"};
    std::vector<std::string> v;
    const FamilyParams defaults = builtin_family_defaults(family);
    for (const auto& [k, value] : params) {
        if (!defaults.count(k)) v.push_back("family '" + family + "' has no parameter '" + k + "'");
        if (!std::isfinite(value)) v.push_back("parameter '" + k + "' is not finite");
    }
    return v;
}

inline PotentialProfile builtin_family(const std::string& family, const FamilyParams& overrides = {}) {
    if (auto v = builtin_family_violations(family, overrides); !v.empty()) throw ValidationError(std::move(v));
    FamilyParams p = builtin_family_defaults(family);
    for (const auto& [k, value] : overrides) p[k] = value;
    if (family == "deformed_double_barrier")
        return deformed_double_barrier({p["A_eV"], p["B"], p["gamma_per_nm"], p["C_eV_per_nm2"], p["D_eV"],
                                        p["F_eV_per_nm"], p["a_nm"], p["b_nm"]})
            .profile;
    if (family == "double_parabolic_hump") return double_parabolic_hump(p["a_eV_per_nm2"], p["x0_nm"]);
    if (family == "rectangular_barrier") return rectangular_barrier(p["height_eV"], p["width_nm"]);
    if (family == "rectangular_double_barrier")
        return rectangular_double_barrier(p["height_eV"], p["barrier_nm"], p["well_nm"]);
    return asymmetric_three_segment();
}

inline double profile_maximum(const PotentialProfile& p, int samples_per_segment = 400) {
    double m = std::max(p.lead_left, p.lead_right);
    for (const auto& s : p.segments)
        for (int i = 0; i <= samples_per_segment; ++i)
            m = std::max(m, s.potential(s.x_left + s.width() * i / samples_per_segment));
    return m;
}

struct BuiltinProfile {
    std::string name;
    std::string description;
    std::string family;
    FamilyParams params;  // overrides of the family defaults
    PotentialProfile profile;
    double barrier_top;  // highest potential value, eV
};

/// The example systems: the deformed double barrier at three field strengths, the
/// double parabolic hump at three widths, and the rectangular test profiles.
inline std::vector<BuiltinProfile> builtin_profiles() {
    std::vector<BuiltinProfile> v;
    auto add = [&](std::string name, std::string desc, std::string family, FamilyParams params) {
        PotentialProfile p = builtin_family(family, params);
        double top = profile_maximum(p);
        v.push_back({std::move(name), std::move(desc), std::move(family), std::move(params), std::move(p), top});
    };
    char name[64];
    for (double F : {0.1, 0.05, 0.01}) {
        std::snprintf(name, sizeof name, "deformed_double_barrier_F%g", F);
        add(name, "exponential / parabolic / linear double barrier", "deformed_double_barrier", {{"F_eV_per_nm", F}});
    }
    for (double x0 : {2.0, 5.0, 10.0}) {
        std::snprintf(name, sizeof name, "double_parabolic_x0_%g", x0);
        add(name, "two inverted parabolic humps, a = 0.005 eV/nm^2", "double_parabolic_hump", {{"x0_nm", x0}});
    }
    add("rectangular_barrier", "single 0.5 eV, 2 nm barrier", "rectangular_barrier", {});
    add("rectangular_double_barrier", "two 0.3 eV, 1.5 nm barriers around a 5 nm well", "rectangular_double_barrier", {});
    add("asymmetric_three_segment", "linear / constant / exponential between unequal leads", "asymmetric_three_segment", {});
    return v;
}

inline BuiltinProfile builtin_profile(const std::string& name) {
    for (auto& b : builtin_profiles())
        if (b.name == name) return b;
    throw DomainError("unknown built-in profile '" + name + "'");
}

}  // namespace qwi

#endif
