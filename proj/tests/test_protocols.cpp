#include <gtest/gtest.h>

#include <numbers>

#include "sqz/protocols.hpp"

using namespace sqz;

namespace {

constexpr double pi = std::numbers::pi;

const BranchEntry* find_branch(const ProtocolReport& report, int m, int n)
{
    for (const auto& b : report.branches) {
        if (b.counts[0] == m && b.counts[1] == n) {
            return &b;
        }
    }
    return nullptr;
}

} // namespace

TEST(Superposition, NormalizationClosedForm)
{
    const double k = svs_overlap(0.5);
    const SuperpositionSpec equal{1.0, 1.0, SqueezeParam(0.5, 0.0)};
    EXPECT_NEAR(superposition_normalization(equal), 2.0 + 2.0 * k, 1e-15);
    const TruncationSpec t = default_truncation(0.5);
    EXPECT_NEAR(superposition_unnormalized(equal, t).squared_norm(), 2.0 + 2.0 * k, 1e-9);
    const SuperpositionSpec mixed{cplx(0.3, 0.1), cplx(-0.2, 0.7), SqueezeParam(0.5, 1.0)};
    EXPECT_NEAR(superposition_unnormalized(mixed, t).squared_norm(), superposition_normalization(mixed), 1e-9);
    EXPECT_NEAR(build_superposition(mixed, t).squared_norm(), 1.0, 1e-13);
}

TEST(Superposition, DegenerateCases)
{
    const TruncationSpec t{16, 1e-10};
    EXPECT_THROW(build_superposition({1.0, -1.0, SqueezeParam(0.0, 0.0)}, t), degenerate_state);
    EXPECT_THROW(build_superposition({0.0, 0.0, SqueezeParam(0.5, 0.0)}, default_truncation(0.5)),
                 std::invalid_argument);
}

TEST(Teleport, SuccessProbabilityIsOneQuarter)
{
    for (double r : {0.3, 0.5, 0.9}) {
        for (double phi : {0.0, pi / 3.0}) {
            const SuperpositionSpec spec{0.6, cplx(0.0, 0.8), SqueezeParam(r, phi)};
            const auto report = teleport(spec, default_truncation(r));
            EXPECT_NEAR(report.success_probability, 0.25, 1e-6) << "r=" << r << " phi=" << phi;
            EXPECT_NEAR(report.success_probability, teleport_success_probability(r), 1e-9);
        }
    }
}

TEST(Teleport, OddOddBranchesReproduceInput)
{
    const SuperpositionSpec spec{cplx(0.2, -0.4), cplx(0.9, 0.1), SqueezeParam(0.5, 0.7)};
    const auto report = teleport(spec, default_truncation(0.5));
    int successes = 0;
    for (const auto& b : report.branches) {
        if (b.success) {
            ++successes;
            EXPECT_GE(b.fidelity_to_target, 1.0 - 1e-8) << b.counts[0] << "," << b.counts[1];
            ASSERT_TRUE(b.conditional_state.has_value());
            EXPECT_EQ(b.conditional_state->num_modes(), 1);
        }
    }
    EXPECT_GT(successes, 5);
    EXPECT_GE(report.min_success_fidelity, 1.0 - 1e-8);
    EXPECT_NEAR(report.mean_success_fidelity, 1.0, 1e-8);
}

TEST(Teleport, SomeFailureBranchDistortsTheInput)
{
    const SuperpositionSpec spec{0.6, cplx(0.0, 0.8), SqueezeParam(0.5, 0.0)};
    ProtocolOptions opts;
    opts.keep_failure_states = true;
    const auto report = teleport(spec, default_truncation(0.5), opts);
    double worst = 1.0;
    for (const auto& b : report.branches) {
        if (!b.success && b.probability > 1e-6) {
            worst = std::min(worst, b.fidelity_to_target);
            EXPECT_TRUE(b.conditional_state.has_value());
        }
    }
    EXPECT_LT(worst, 1.0 - 1e-3);
}

TEST(Teleport, BranchProbabilitiesMatchClosedForm)
{
    const double r = 0.5;
    const SuperpositionSpec spec{0.6, cplx(0.0, 0.8), SqueezeParam(r, 0.0)};
    const auto report = teleport(spec, default_truncation(r));
    for (int n = 0; n <= 5; ++n) {
        const BranchEntry* b = find_branch(report, 2 * n + 1, 2 * n + 1);
        ASSERT_NE(b, nullptr) << "n=" << n;
        EXPECT_NEAR(b->probability, teleport_branch_probability(r, n), 1e-8) << "n=" << n;
    }
    EXPECT_NEAR(teleport_branch_probability(0.5, 0), 0.238598857311152038, 1e-15);
    EXPECT_NEAR(report.total_probability(), 1.0, 1e-9);
}

TEST(Teleport, SuccessBranchesHaveEqualCounts)
{
    const SuperpositionSpec spec{0.6, cplx(0.0, 0.8), SqueezeParam(0.7, 0.2)};
    for (const auto& b : teleport(spec, default_truncation(0.7)).branches) {
        if (b.success) {
            EXPECT_EQ(b.counts[0], b.counts[1]);
        }
    }
}

TEST(Teleport, MixedParityOutcomesNeverOccur)
{
    const SuperpositionSpec spec{0.6, cplx(0.0, 0.8), SqueezeParam(0.5, 0.3)};
    double mixed = 0.0;
    for (const auto& b : teleport(spec, default_truncation(0.5), ProtocolOptions{0.0, false}).branches) {
        if ((b.counts[0] + b.counts[1]) % 2 == 1) {
            mixed += b.probability;
        }
    }
    EXPECT_LT(mixed, 1e-12);
}

TEST(Teleport, IndependentOfInputState)
{
    const double r = 0.6;
    const TruncationSpec t = default_truncation(r);
    const std::vector<SuperpositionSpec> specs{
        {0.6, cplx(0.0, 0.8), SqueezeParam(r, 0.0)},
        {1.0, 0.0, SqueezeParam(r, 0.0)},
        {cplx(0.3, 0.3), cplx(-0.5, 0.2), SqueezeParam(r, 0.0)},
    };
    const auto reference = teleport(specs[0], t);
    for (std::size_t i = 1; i < specs.size(); ++i) {
        const auto other = teleport(specs[i], t);
        for (const auto& b : reference.branches) {
            if (!b.success) {
                continue;
            }
            const BranchEntry* o = find_branch(other, b.counts[0], b.counts[1]);
            ASSERT_NE(o, nullptr);
            EXPECT_NEAR(o->probability, b.probability, 1e-10);
        }
    }
}

TEST(Teleport, IndependentOfSqueezing)
{
    for (double r : {0.2, 0.4, 0.8, 1.0}) {
        const SuperpositionSpec spec{1.0, cplx(0.0, 1.0), SqueezeParam(r, 0.0)};
        EXPECT_NEAR(teleport(spec, default_truncation(r)).success_probability, 0.25, 1e-6) << "r=" << r;
    }
}

TEST(TeleportClosedForm, GeometricSumIsOneQuarter)
{
    for (double r : {0.05, 0.3, 1.0, 2.0}) {
        EXPECT_NEAR(teleport_success_probability(r), 0.25, 1e-12);
    }
    EXPECT_THROW(teleport_success_probability(0.0), std::invalid_argument);
}

TEST(TeleportClosedForm, PartialSumsIncreaseToLimit)
{
    double prev = 0.0;
    for (int terms = 1; terms <= 40; ++terms) {
        const double p = teleport_success_partial_sum(0.7, terms);
        if (terms <= 10) {
            EXPECT_GT(p, prev);
        }
        EXPECT_GE(p, prev);
        EXPECT_LE(p, 0.25 + 1e-15);
        prev = p;
    }
    EXPECT_NEAR(prev, 0.25, 1e-10);
}

TEST(Concentrate, RecoversMaximalEntanglement)
{
    const double r = 0.5;
    for (double eta : {pi / 8.0, pi / 6.0, pi / 4.0}) {
        const auto report = concentrate(eta, SqueezeParam(r, 0.0), default_truncation(r));
        EXPECT_GE(report.min_success_fidelity, 1.0 - 1e-8) << "eta=" << eta;
        ASSERT_TRUE(report.success_entropy.has_value());
        EXPECT_NEAR(*report.success_entropy, 1.0, 1e-6) << "eta=" << eta;
        EXPECT_NEAR(report.success_probability, concentrate_success_probability(eta, r), 1e-6) << "eta=" << eta;
    }
}

TEST(Concentrate, EntropyGainOverInputChannel)
{
    const SqueezeParam xi(0.5, 0.0);
    const TruncationSpec t = default_truncation(0.5);
    const double before = entropy_fock(build_partial_channel(pi / 8.0, xi, t), 0);
    const double after = entropy_after_concentration(pi / 8.0, xi, t);
    EXPECT_GT(after - before, 0.1);
}

TEST(Concentrate, BranchProbabilitiesMatchClosedForm)
{
    const double eta = pi / 6.0;
    const double r = 0.5;
    const auto report = concentrate(eta, SqueezeParam(r, 0.0), default_truncation(r));
    for (int n = 0; n <= 5; ++n) {
        const BranchEntry* b = find_branch(report, 2 * n + 1, 2 * n + 1);
        ASSERT_NE(b, nullptr) << "n=" << n;
        EXPECT_NEAR(b->probability, concentrate_branch_probability(eta, r, n), 1e-8) << "n=" << n;
    }
    EXPECT_NEAR(concentrate_branch_probability(eta, r, 0), 0.115135714671405181, 1e-15);
    EXPECT_NEAR(concentrate_success_probability(eta, r), 0.120637328243004721, 1e-15);
}

TEST(Concentrate, QuarterPiIsOneQuarterForAnySqueezing)
{
    for (double r : {0.3, 0.6, 1.0}) {
        EXPECT_NEAR(concentrate_success_probability(pi / 4.0, r), 0.25, 1e-12);
    }
    for (double r : {0.3, 0.6}) {
        EXPECT_NEAR(concentrate(pi / 4.0, SqueezeParam(r, 0.0), default_truncation(r)).success_probability, 0.25, 1e-6);
    }
}

TEST(Concentrate, SymmetricUnderEtaReflection)
{
    for (double eta : {pi / 10.0, pi / 6.0}) {
        EXPECT_NEAR(concentrate_success_probability(eta, 0.5), concentrate_success_probability(pi / 2.0 - eta, 0.5),
                    1e-14);
    }
}

TEST(Concentrate, RejectsBadArguments)
{
    EXPECT_THROW(concentrate(0.0, SqueezeParam(0.5, 0.0), default_truncation(0.5)), std::invalid_argument);
    EXPECT_THROW(concentrate(pi / 4.0, SqueezeParam(0.0, 0.0), TruncationSpec{16, 1e-10}), degenerate_state);
    EXPECT_THROW(concentrate_success_probability(pi / 4.0, 0.0), std::invalid_argument);
}
