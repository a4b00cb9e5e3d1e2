#include <gtest/gtest.h>

#include <cmath>

#include "boltnet/preprocess.hpp"
#include "boltnet/synth.hpp"
#include "test_util.hpp"

namespace boltnet {
namespace {

/// Dataset whose first feature (bolt size) takes the given values; every
/// other feature varies so only bolt size can be degenerate.
Dataset with_bolt_sizes(std::initializer_list<double> sizes) {
    Dataset d;
    double k = 0;
    for (const double v : sizes) {
        BoltSample s = testing::valid_sample(8.0 + k);
        s.bolt_size_mm = v;
        s.strength_grade = 8.8 + k;
        s.tightening_torque_Nm += k;
        s.head_torque_Nm += k;
        s.thread_torque_Nm += k;
        d.add(s, "g");
        k += 1;
    }
    return d;
}

Dataset training_set() {
    SynthConfig cfg = SynthConfig::sample_plan(21, 0.02);
    cfg.groups[0].geometry = builtin_geometry("M6", 10.9);
    return convert_units(generate(cfg), ForceUnit::kN, ForceUnit::MN);
}

TEST(Fit, StandardizationUsesPopulationStddev) {
    const ScalerParams p = fit(with_bolt_sizes({1, 2, 3}), ScalingMethod::standardization);
    EXPECT_DOUBLE_EQ(p.mean[0], 2.0);
    EXPECT_DOUBLE_EQ(p.stddev[0], std::sqrt(2.0 / 3.0));
}

TEST(Fit, NormalizationUsesRange) {
    const ScalerParams p = fit(with_bolt_sizes({1, 2, 3}), ScalingMethod::normalization);
    EXPECT_EQ(p.min[0], 1.0);
    EXPECT_EQ(p.max[0], 3.0);
}

TEST(Fit, ConstantColumnRejectedByName) {
    for (const auto method : {ScalingMethod::standardization, ScalingMethod::normalization}) {
        try {
            (void)fit(with_bolt_sizes({5, 5, 5}), method);
            FAIL();
        } catch (const ValidationError& e) {
            EXPECT_NE(std::string(e.what()).find("bolt_size"), std::string::npos) << e.what();
        }
    }
}

TEST(Fit, ConstantColumnCenteredOnRequest) {
    const Dataset d = with_bolt_sizes({5, 5, 5});
    const ScalerParams p = fit(d, ScalingMethod::normalization, DegeneratePolicy::center);
    EXPECT_TRUE(p.constant[0]);
    EXPECT_FALSE(p.constant[1]);
    EXPECT_EQ(transform(p, d.samples[1].inputs())[0], 0.0);
    const InputRow x{7, 9, 1, 1, 1, 1};
    EXPECT_EQ(inverse_transform(p, transform(p, x)), x);
}

TEST(Fit, EmptyTrainingSet) { EXPECT_THROW((void)fit(Dataset{}, ScalingMethod::normalization), ValidationError); }

TEST(Transform, AtTrainingMeanIsZero) {
    const Dataset d = training_set();
    const ScalerParams p = fit(d, ScalingMethod::standardization);
    for (const double z : transform(p, p.mean)) EXPECT_EQ(z, 0.0);
}

TEST(Transform, AtTrainingMinIsZero) {
    const ScalerParams p = fit(training_set(), ScalingMethod::normalization);
    for (const double z : transform(p, p.min)) EXPECT_EQ(z, 0.0);
}

TEST(Transform, MaxMapsToOneAndOutOfRangeIsNotClipped) {
    const ScalerParams p = fit(with_bolt_sizes({1, 2, 3}), ScalingMethod::normalization);
    InputRow x = p.min;
    x[0] = 3;
    EXPECT_EQ(transform(p, x)[0], 1.0);
    x[0] = 5;
    EXPECT_EQ(transform(p, x)[0], 2.0);
    x[0] = -1;
    EXPECT_EQ(transform(p, x)[0], -1.0);
}

TEST(Transform, NoneIsIdentity) {
    const ScalerParams p = fit(training_set(), ScalingMethod::none);
    const InputRow x{1, 2, 3, 4, 5, 6};
    EXPECT_EQ(transform(p, x), x);
    EXPECT_EQ(inverse_transform(p, x), x);
}

TEST(InverseTransform, Examples) {
    const ScalerParams std_p = fit(training_set(), ScalingMethod::standardization);
    EXPECT_EQ(inverse_transform(std_p, InputRow{}), std_p.mean);
    const ScalerParams norm_p = fit(training_set(), ScalingMethod::normalization);
    InputRow ones;
    ones.fill(1.0);
    EXPECT_EQ(inverse_transform(norm_p, ones), norm_p.max);
}

TEST(ScalerProperty, NormalizationAttainsUnitInterval) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SynthConfig cfg = SynthConfig::sample_plan(seed, 0.03);
        cfg.groups[1].geometry = builtin_geometry("M10", 10.9);
        const Dataset d = generate(cfg);
        const ScalerParams p = fit(d, ScalingMethod::normalization);
        for (std::size_t f = 0; f < kNumInputs; ++f) {
            bool zero = false;
            bool one = false;
            for (const auto& s : d.samples) {
                const double z = transform(p, s.inputs())[f];
                EXPECT_GE(z, 0.0);
                EXPECT_LE(z, 1.0);
                zero |= z == 0.0;
                one |= z == 1.0;
            }
            EXPECT_TRUE(zero && one) << "feature " << f << " seed " << seed;
        }
    }
}

TEST(ScalerProperty, StandardizationMomentsAndInverse) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SynthConfig cfg = SynthConfig::sample_plan(seed, 0.03);
        cfg.groups[2].geometry = builtin_geometry("M10", 12.9);
        const Dataset d = generate(cfg);
        const ScalerParams p = fit(d, ScalingMethod::standardization);
        for (std::size_t f = 0; f < kNumInputs; ++f) {
            double sum = 0;
            double sq = 0;
            for (const auto& s : d.samples) {
                const double z = transform(p, s.inputs())[f];
                sum += z;
                sq += z * z;
            }
            const double n = static_cast<double>(d.size());
            EXPECT_NEAR(sum / n, 0.0, 1e-10);
            EXPECT_NEAR(std::sqrt(sq / n - (sum / n) * (sum / n)), 1.0, 1e-10);
        }
        for (const auto& s : d.samples) {
            const InputRow x = s.inputs();
            const InputRow back = inverse_transform(p, transform(p, x));
            for (std::size_t f = 0; f < kNumInputs; ++f) {
                EXPECT_NEAR(back[f], x[f], 1e-12 * std::max(1.0, std::abs(x[f])));
            }
        }
    }
}

TEST(ScalerProperty, TestRowsNeverTouchParameters) {
    const Dataset d = generate(SynthConfig::sample_plan(5, 0.01));
    const SplitDataset sp = split(d, 3);
    const ScalerParams p = fit(sp.train, ScalingMethod::normalization, DegeneratePolicy::center);
    const auto before = fingerprint(p);

    Dataset mutated = sp.test;
    for (auto& s : mutated.samples) {
        s.preload *= 3;
        s.tightening_torque_Nm += 100;
    }
    for (const auto& s : mutated.samples) (void)transform(p, s.inputs());
    EXPECT_EQ(fingerprint(p), before);
    // Refitting on the unchanged training rows reproduces the same parameters.
    EXPECT_EQ(fingerprint(fit(sp.train, ScalingMethod::normalization, DegeneratePolicy::center)), before);
}

}  // namespace
}  // namespace boltnet
