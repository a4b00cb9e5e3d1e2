#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "boltnet/dataset.hpp"
#include "boltnet/errors.hpp"
#include "boltnet/rng.hpp"
#include "boltnet/text.hpp"

namespace boltnet {

/// Metric bolt geometry in mm / mm^2.
struct BoltGeometry {
    std::string designation;
    double nominal_diameter_mm = 0.0;
    double pitch_mm = 0.0;
    double pitch_diameter_mm = 0.0;
    double head_bearing_diameter_mm = 0.0;  // mean friction diameter under the head
    double stress_area_mm2 = 0.0;
    double strength_grade = 8.8;

    /// Grade "a.b" gives a * b * 100 N/mm^2 (8.8 -> 640).
    [[nodiscard]] double proof_stress() const noexcept {
        const double major = std::floor(strength_grade);
        const double minor_tenths = std::round((strength_grade - major) * 10.0);
        return major * minor_tenths * 10.0;
    }

    void validate() const {
        for (const double v : {nominal_diameter_mm, pitch_mm, pitch_diameter_mm, head_bearing_diameter_mm,
                               stress_area_mm2, strength_grade}) {
            if (!(v > 0) || !std::isfinite(v)) throw ConfigError("bolt geometry " + designation + ": dimensions must be positive");
        }
        if (!(pitch_diameter_mm < head_bearing_diameter_mm)) {
            throw ConfigError("bolt geometry " + designation + ": pitch diameter must be below head bearing diameter");
        }
        if (!(proof_stress() > 0)) throw ConfigError("bolt geometry " + designation + ": strength grade has no proof stress");
    }
};

/// Built-in coarse-thread geometries. Head bearing diameter is the mean of
/// the width across flats and the medium clearance hole.
///   M6:  P 1.0, d2 5.350, s 10, dh 6.4,  As 20.1
///   M10: P 1.5, d2 9.026, s 16, dh 10.5, As 58.0
[[nodiscard]] inline BoltGeometry builtin_geometry(std::string_view designation, double strength_grade = 8.8) {
    BoltGeometry g;
    g.designation = std::string(designation);
    g.strength_grade = strength_grade;
    if (designation == "M6") {
        g.nominal_diameter_mm = 6.0;
        g.pitch_mm = 1.0;
        g.pitch_diameter_mm = 5.350;
        g.head_bearing_diameter_mm = (10.0 + 6.4) / 2.0;
        g.stress_area_mm2 = 20.1;
    } else if (designation == "M10") {
        g.nominal_diameter_mm = 10.0;
        g.pitch_mm = 1.5;
        g.pitch_diameter_mm = 9.026;
        g.head_bearing_diameter_mm = (16.0 + 10.5) / 2.0;
        g.stress_area_mm2 = 58.0;
    } else {
        throw ConfigError("unknown bolt designation '" + std::string(designation) + "' (built-in: M6, M10)");
    }
    return g;
}

/// Axial-stress penalty for torsion during torque-controlled tightening.
inline constexpr double kTighteningUtilization = 1.25;

struct TorqueSplit {
    double thread_Nm = 0.0;
    double head_Nm = 0.0;
    double tightening_Nm = 0.0;
};

/// M_G = F (0.16 P + 0.58 d2 mu_G), M_K = F mu_K D_Km / 2, M_A = M_G + M_K.
[[nodiscard]] inline TorqueSplit tightening_torques(const BoltGeometry& g, double preload_N, double mu_head,
                                                    double mu_thread) noexcept {
    TorqueSplit t;
    t.thread_Nm = preload_N * (0.16 * g.pitch_mm + 0.58 * g.pitch_diameter_mm * mu_thread) / 1000.0;
    t.head_Nm = preload_N * mu_head * g.head_bearing_diameter_mm / 2.0 / 1000.0;
    t.tightening_Nm = t.thread_Nm + t.head_Nm;
    return t;
}

/// Remaining axial capacity A_s R_p - u F, floored at zero, in N.
[[nodiscard]] inline double remaining_load_capacity(const BoltGeometry& g, double preload_N) noexcept {
    return std::max(0.0, g.stress_area_mm2 * g.proof_stress() - kTighteningUtilization * preload_N);
}

struct FrictionPair {
    double mu_head = 0.0;
    double mu_thread = 0.0;
};

/// Recovers friction coefficients from measured torques and preload.
[[nodiscard]] inline FrictionPair invert_friction(const BoltSample& s, const BoltGeometry& g,
                                                  ForceUnit preload_unit = ForceUnit::N) {
    const double force_N = convert_force(s.preload, preload_unit, ForceUnit::N);
    if (!(force_N > 0)) throw ValidationError("friction inversion needs a positive preload");
    const double head_Nmm = s.head_torque_Nm * 1000.0;
    const double thread_Nmm = s.thread_torque_Nm * 1000.0;
    FrictionPair mu;
    mu.mu_head = 2.0 * head_Nmm / (force_N * g.head_bearing_diameter_mm);
    mu.mu_thread = (thread_Nmm / force_N - 0.16 * g.pitch_mm) / (0.58 * g.pitch_diameter_mm);
    if (!(mu.mu_head > 0)) throw ValidationError("friction inversion: non-positive head friction coefficient");
    if (!(mu.mu_thread > 0)) throw ValidationError("friction inversion: non-positive thread friction coefficient");
    return mu;
}

struct SampleGroup {
    BoltGeometry geometry;
    double nominal_preload_N = 0.0;
    std::size_t count = 0;
    std::string label;  // defaulted to "<designation>-<kN>kN" when empty
};

struct FrictionRange {
    double lo = 0.08;
    double hi = 0.20;
};

struct SynthConfig {
    std::vector<SampleGroup> groups;
    FrictionRange mu_head;
    FrictionRange mu_thread;
    double noise = 0.0;  // stddev of multiplicative noise, as a fraction
    std::uint64_t seed = 0;

    void validate() const {
        if (groups.empty()) throw ConfigError("synth: at least one sample group is required");
        for (const auto* r : {&mu_head, &mu_thread}) {
            if (!(r->lo > 0 && r->hi < 1 && r->lo <= r->hi)) {
                throw ConfigError("synth: friction range [" + format_double(r->lo) + ", " + format_double(r->hi) +
                                  "] must satisfy 0 < lo <= hi < 1");
            }
        }
        if (!(noise >= 0 && noise <= 0.1)) throw ConfigError("synth: noise fraction must lie in [0, 0.1]");
        for (const auto& grp : groups) {
            grp.geometry.validate();
            if (grp.count < 1) throw ConfigError("synth: group " + grp.geometry.designation + " has no samples");
            if (!(grp.nominal_preload_N > 0)) throw ConfigError("synth: nominal preload must be positive");
            if (!(grp.geometry.stress_area_mm2 * grp.geometry.proof_stress() -
                      kTighteningUtilization * grp.nominal_preload_N >
                  0)) {
                throw ConfigError("synth: preload exceeds proof capacity for group " + group_label(grp));
            }
        }
    }

    [[nodiscard]] static std::string group_label(const SampleGroup& grp) {
        if (!grp.label.empty()) return grp.label;
        return grp.geometry.designation + "-" + format_double(grp.nominal_preload_N / 1000.0) + "kN";
    }

    /// M6 at 8 kN x 20, M10 at 12.5 kN x 9, M10 at 25 kN x 5; all grade 8.8.
    [[nodiscard]] static SynthConfig sample_plan(std::uint64_t seed, double noise) {
        SynthConfig cfg;
        cfg.seed = seed;
        cfg.noise = noise;
        cfg.groups = {
            {builtin_geometry("M6"), 8000.0, 20, ""},
            {builtin_geometry("M10"), 12500.0, 9, ""},
            {builtin_geometry("M10"), 25000.0, 5, ""},
        };
        return cfg;
    }
};

/// Draws samples group by group; each group has its own derived stream.
/// Measured quantities (preload and the three torques) get independent
/// multiplicative Gaussian noise; targets are the drawn friction coefficients
/// and the capacity at the true preload. Noise draws that would break a
/// sample invariant are redrawn.
[[nodiscard]] inline Dataset generate(const SynthConfig& cfg) {
    cfg.validate();
    Dataset d;
    d.preload_unit = ForceUnit::N;
    d.load_unit = ForceUnit::N;
    for (std::size_t gi = 0; gi < cfg.groups.size(); ++gi) {
        const auto& grp = cfg.groups[gi];
        const auto& geo = grp.geometry;
        const std::string label = SynthConfig::group_label(grp);
        Rng rng(derive_seed(cfg.seed, gi));
        const auto jitter = [&](double value) { return value * (1.0 + cfg.noise * rng.normal()); };

        for (std::size_t k = 0; k < grp.count; ++k) {
            const double mu_h = rng.uniform(cfg.mu_head.lo, cfg.mu_head.hi);
            const double mu_t = rng.uniform(cfg.mu_thread.lo, cfg.mu_thread.hi);
            double force = 0.0;
            for (int attempt = 0; attempt < 100 && !(force > 0); ++attempt) force = jitter(grp.nominal_preload_N);
            const TorqueSplit torque = tightening_torques(geo, force, mu_h, mu_t);

            BoltSample s;
            s.bolt_size_mm = geo.nominal_diameter_mm;
            s.strength_grade = geo.strength_grade;
            s.load_capacity = remaining_load_capacity(geo, force);
            s.mu_head = mu_h;
            s.mu_thread = mu_t;
            bool valid = false;
            for (int attempt = 0; attempt < 100 && !valid; ++attempt) {
                s.preload = jitter(force);
                s.thread_torque_Nm = jitter(torque.thread_Nm);
                s.head_torque_Nm = jitter(torque.head_Nm);
                s.tightening_torque_Nm = jitter(torque.tightening_Nm);
                valid = !violated_invariant(s).has_value();
            }
            if (!valid) throw ValidationError("synth: could not draw a valid sample for group " + label);
            d.add(s, label);
        }
    }
    return d;
}

}  // namespace boltnet
