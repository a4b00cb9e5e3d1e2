#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "boltnet/synth.hpp"

namespace boltnet {
namespace {

BoltGeometry geometry_for(const BoltSample& s) { return builtin_geometry(s.bolt_size_mm == 6.0 ? "M6" : "M10"); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TEST(Torques, M6HandValues) {
    const TorqueSplit t = tightening_torques(builtin_geometry("M6"), 8000, 0.12, 0.12);
    EXPECT_NEAR(t.thread_Nm, 8000 * (0.16 * 1.0 + 0.58 * 5.35 * 0.12) / 1000, 1e-12);
    EXPECT_NEAR(t.thread_Nm, 4.25888, 1e-9);
    EXPECT_NEAR(t.head_Nm, 3.936, 1e-9);
    EXPECT_EQ(t.tightening_Nm, t.thread_Nm + t.head_Nm);
}

TEST(Geometry, ProofStressFromGrade) {
    EXPECT_DOUBLE_EQ(builtin_geometry("M6", 8.8).proof_stress(), 640.0);
    EXPECT_DOUBLE_EQ(builtin_geometry("M6", 10.9).proof_stress(), 900.0);
    EXPECT_DOUBLE_EQ(builtin_geometry("M6", 12.9).proof_stress(), 1080.0);
    EXPECT_THROW((void)builtin_geometry("M8"), ConfigError);
}

TEST(Capacity, LinearRuleAndFloor) {
    const BoltGeometry m6 = builtin_geometry("M6");
    EXPECT_DOUBLE_EQ(remaining_load_capacity(m6, 8000), 20.1 * 640 - 1.25 * 8000);
    EXPECT_EQ(remaining_load_capacity(m6, 1e6), 0.0);
}

TEST(Generate, PaperPlan) {
    const Dataset d = generate(SynthConfig::sample_plan(11, 0.01));
    EXPECT_EQ(d.size(), 34U);
    std::map<std::string, std::size_t> counts;
    for (const auto& g : d.group_labels) ++counts[g];
    ASSERT_EQ(counts.size(), 3U);
    EXPECT_EQ(counts["M6-8kN"], 20U);
    EXPECT_EQ(counts["M10-12.5kN"], 9U);
    EXPECT_EQ(counts["M10-25kN"], 5U);
    EXPECT_EQ(d.preload_unit, ForceUnit::N);
}

TEST(Generate, Deterministic) {
    const SynthConfig cfg = SynthConfig::sample_plan(4, 0.02);
    EXPECT_EQ(generate(cfg), generate(cfg));
    EXPECT_NE(generate(cfg), generate(SynthConfig::sample_plan(5, 0.02)));
}

TEST(Generate, CollapsedFrictionRangeInvertsExactly) {
    SynthConfig cfg = SynthConfig::sample_plan(1, 0.0);
    cfg.mu_head = {0.11, 0.11};
    cfg.mu_thread = {0.14, 0.14};
    for (const auto& s : generate(cfg).samples) {
        const FrictionPair mu = invert_friction(s, geometry_for(s));
        EXPECT_NEAR(mu.mu_head, 0.11, 1e-10 * 0.11);
        EXPECT_NEAR(mu.mu_thread, 0.14, 1e-10 * 0.14);
    }
}

TEST(Generate, ConfigErrors) {
    SynthConfig cfg = SynthConfig::sample_plan(1, 0.0);
    cfg.mu_head = {0.2, 0.1};
    EXPECT_THROW((void)generate(cfg), ConfigError);
    cfg = SynthConfig::sample_plan(1, 0.0);
    cfg.mu_thread = {0.1, 1.2};
    EXPECT_THROW((void)generate(cfg), ConfigError);
    cfg = SynthConfig::sample_plan(1, 0.2);
    EXPECT_THROW((void)generate(cfg), ConfigError);
    cfg = SynthConfig::sample_plan(1, 0.0);
    cfg.groups[0].count = 0;
    EXPECT_THROW((void)generate(cfg), ConfigError);
    cfg = SynthConfig::sample_plan(1, 0.0);
    cfg.groups[1].nominal_preload_N = 40000;  // 1.25 * 40 kN > 58 * 640 N
    try {
        (void)generate(cfg);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("preload exceeds proof capacity"), std::string::npos);
    }
    cfg.groups.clear();
    EXPECT_THROW((void)generate(cfg), ConfigError);
}

TEST(Invert, ZeroHeadTorqueIsError) {
    BoltSample s;
    s.preload = 8000;
    s.head_torque_Nm = 0.0;
    s.thread_torque_Nm = 4.0;
    EXPECT_THROW((void)invert_friction(s, builtin_geometry("M6")), ValidationError);
    s.head_torque_Nm = 3.9;
    s.thread_torque_Nm = 0.5;  // below the pure pitch term
    EXPECT_THROW((void)invert_friction(s, builtin_geometry("M6")), ValidationError);
    s.preload = 0;
    EXPECT_THROW((void)invert_friction(s, builtin_geometry("M6")), ValidationError);
}

TEST(Invert, PreloadUnitHonoured) {
    const BoltGeometry g = builtin_geometry("M10");
    const TorqueSplit t = tightening_torques(g, 12500, 0.1, 0.15);
    BoltSample s;
    s.preload = 12.5;
    s.head_torque_Nm = t.head_Nm;
    s.thread_torque_Nm = t.thread_Nm;
    const FrictionPair mu = invert_friction(s, g, ForceUnit::kN);
    EXPECT_NEAR(mu.mu_head, 0.1, 1e-12);
    EXPECT_NEAR(mu.mu_thread, 0.15, 1e-12);
}

TEST(SynthProperty, ZeroNoiseRoundTripAndAdditivity) {
    SynthConfig cfg;
    cfg.seed = 99;
    cfg.groups = {{builtin_geometry("M6"), 8000.0, 5000, ""}, {builtin_geometry("M10"), 12500.0, 5000, ""}};
    const Dataset d = generate(cfg);
    ASSERT_EQ(d.size(), 10000U);
    double worst = 0;
    for (const auto& s : d.samples) {
        const FrictionPair mu = invert_friction(s, geometry_for(s));
        worst = std::max({worst, rel(mu.mu_head, s.mu_head), rel(mu.mu_thread, s.mu_thread)});
        ASSERT_EQ(s.tightening_torque_Nm, s.head_torque_Nm + s.thread_torque_Nm);
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(SynthProperty, NoisyAdditivityWithinNoiseBounds) {
    const Dataset d = generate(SynthConfig::sample_plan(3, 0.01));
    for (const auto& s : d.samples) {
        // Each torque carries independent 1% noise; 6 sigma of the combined spread.
        const double sigma = 0.01 * std::sqrt(s.tightening_torque_Nm * s.tightening_torque_Nm +
                                              s.head_torque_Nm * s.head_torque_Nm +
                                              s.thread_torque_Nm * s.thread_torque_Nm);
        EXPECT_LE(std::abs(s.tightening_torque_Nm - s.head_torque_Nm - s.thread_torque_Nm), 6 * sigma);
    }
}

TEST(SynthProperty, MonotoneInPreload) {
    Rng rng(5);
    for (const auto* name : {"M6", "M10"}) {
        const BoltGeometry g = builtin_geometry(name);
        for (int trial = 0; trial < 50; ++trial) {
            const double mu_h = rng.uniform(0.08, 0.2);
            const double mu_t = rng.uniform(0.08, 0.2);
            std::vector<double> preloads(20);
            // Stay below the preload where the capacity floor kicks in.
            const double top = 0.95 * g.stress_area_mm2 * g.proof_stress() / kTighteningUtilization;
            for (auto& f : preloads) f = rng.uniform(1000, top);
            std::sort(preloads.begin(), preloads.end());
            for (std::size_t i = 1; i < preloads.size(); ++i) {
                if (preloads[i] == preloads[i - 1]) continue;
                const TorqueSplit lo = tightening_torques(g, preloads[i - 1], mu_h, mu_t);
                const TorqueSplit hi = tightening_torques(g, preloads[i], mu_h, mu_t);
                EXPECT_LT(lo.thread_Nm, hi.thread_Nm);
                EXPECT_LT(lo.head_Nm, hi.head_Nm);
                EXPECT_LT(lo.tightening_Nm, hi.tightening_Nm);
                EXPECT_GT(remaining_load_capacity(g, preloads[i - 1]), remaining_load_capacity(g, preloads[i]));
            }
        }
    }
}

TEST(SynthProperty, GeneratedSamplesAreValid) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        for (const double noise : {0.0, 0.01, 0.1}) {
            for (const auto& s : generate(SynthConfig::sample_plan(seed, noise)).samples) {
                ASSERT_FALSE(violated_invariant(s).has_value()) << *violated_invariant(s);
            }
        }
    }
}

// With 1% noise on preload and torques, the head estimate 2 M_K / (F D_Km) has
// relative spread sqrt(2) * 1%. The thread estimate subtracts the pitch term,
// amplifying that spread by 1 + 0.16 P / (0.58 d2 mu_G).
TEST(SynthProperty, NoisyInversionMatchesErrorModel) {
    SynthConfig cfg;
    cfg.seed = 77;
    cfg.noise = 0.01;
    cfg.groups = {{builtin_geometry("M6"), 8000.0, 5000, ""}, {builtin_geometry("M10"), 25000.0, 5000, ""}};
    const Dataset d = generate(cfg);
    std::vector<double> head_err;
    std::size_t thread_inside = 0;
    for (const auto& s : d.samples) {
        const BoltGeometry g = geometry_for(s);
        const FrictionPair mu = invert_friction(s, g);
        head_err.push_back(rel(mu.mu_head, s.mu_head));
        const double amplification = 1 + 0.16 * g.pitch_mm / (0.58 * g.pitch_diameter_mm * s.mu_thread);
        const double sigma = std::sqrt(2.0) * cfg.noise * amplification;
        thread_inside += rel(mu.mu_thread, s.mu_thread) <= 1.96 * sigma ? 1 : 0;
    }
    std::sort(head_err.begin(), head_err.end());
    const double head_p95 = head_err[head_err.size() * 95 / 100];
    EXPECT_LE(head_p95, 0.03);
    EXPECT_NEAR(head_p95, 1.96 * std::sqrt(2.0) * 0.01, 0.002);
    EXPECT_NEAR(static_cast<double>(thread_inside) / static_cast<double>(d.size()), 0.95, 0.01);
}

}  // namespace
}  // namespace boltnet
