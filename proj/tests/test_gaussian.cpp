#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "sqz/entanglement.hpp"
#include "sqz/gaussian.hpp"

using namespace sqz;

namespace {

constexpr double pi = std::numbers::pi;

TruncationSpec cut(int n) { return TruncationSpec{n, 1e-10}; }

} // namespace

TEST(SqueezeParam, ValidatesAndReducesAngle)
{
    EXPECT_THROW(SqueezeParam(-0.1, 0.0), std::invalid_argument);
    EXPECT_THROW(SqueezeParam(std::nan(""), 0.0), std::invalid_argument);
    EXPECT_NEAR(SqueezeParam(0.5, 3.0 * pi).phi(), pi, 1e-12);
    EXPECT_NEAR(SqueezeParam(0.5, -pi).phi(), pi, 1e-12);
    const SqueezeParam xi(0.7, pi / 3.0);
    EXPECT_NEAR(std::abs(xi.negated().value() + xi.value()), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(xi.negated().negated().value() - xi.value()), 0.0, 1e-15);
}

TEST(SvsTail, MonotoneInCutoffAndDefaultMeetsTolerance)
{
    for (double r : {0.1, 0.5, 1.0, 1.2}) {
        double prev = 1.0;
        for (int n = 0; n <= 120; n += 2) {
            const double t = svs_tail(r, n);
            EXPECT_LE(t, prev);
            prev = t;
        }
        const TruncationSpec spec = default_truncation(r);
        EXPECT_LE(svs_tail(r, spec.n_max), 1e-10);
        EXPECT_GE(spec.n_max, 16);
    }
    EXPECT_EQ(default_truncation(0.3).n_max, 22);
    EXPECT_EQ(default_truncation(0.5).n_max, 30);
    EXPECT_EQ(default_truncation(0.9).n_max, 62);
}

TEST(SvsClosedForm, NormalizedEvenOnlyAndVacuumAtZero)
{
    const TruncationSpec t = cut(30);
    const FockState v = svs_closed_form(SqueezeParam(0.5, 1.0), t);
    EXPECT_NEAR(v.squared_norm(), 1.0, 1e-14);
    for (int n = 1; n <= t.n_max; n += 2) {
        EXPECT_EQ(v.amplitudes()[n], cplx(0.0));
    }
    const FockState zero = svs_closed_form(SqueezeParam(0.0, 0.0), t);
    EXPECT_EQ(zero.amplitudes()[0], cplx(1.0));
    EXPECT_EQ(zero.amplitudes().tail(t.n_max).norm(), 0.0);
}

TEST(SvsClosedForm, ThrowsWhenCutoffTooSmall)
{
    EXPECT_THROW(svs_closed_form(SqueezeParam(1.0, 0.0), cut(10)), truncation_error);
}

TEST(SvsClosedForm, MatchesSteppedTaylorOracle)
{
    for (const SqueezeParam xi : {SqueezeParam(0.3, 0.0), SqueezeParam(0.5, pi / 3.0), SqueezeParam(0.9, -2.0)}) {
        const TruncationSpec t = default_truncation(xi.r());
        const FockState v = svs_closed_form(xi, t);
        const Vector ref = oracle::stepped_squeeze_vacuum(xi.value(), t.n_max);
        EXPECT_LT((v.amplitudes() - ref).cwiseAbs().maxCoeff(), 1e-9) << "r=" << xi.r();
    }
}

TEST(SvsClosedForm, OverlapMatchesClosedForm)
{
    for (int i = 1; i <= 20; ++i) {
        const double r = 0.06 * i;
        const TruncationSpec t = default_truncation(r);
        const cplx k = inner(svs_closed_form(SqueezeParam(r, 0.4), t), svs_closed_form(SqueezeParam(r, 0.4 + pi), t));
        EXPECT_NEAR(k.real(), svs_overlap(r), 1e-10);
        EXPECT_NEAR(k.imag(), 0.0, 1e-12);
    }
}

TEST(SvsOverlap, FrozenValues)
{
    EXPECT_NEAR(svs_overlap(0.3), 0.918450155219000788, 1e-15);
    EXPECT_NEAR(svs_overlap(0.5), 0.805018182194592049, 1e-15);
    EXPECT_NEAR(svs_overlap(0.7), 0.681851884509371777, 1e-15);
    EXPECT_NEAR(svs_overlap(1.0), 0.515560111756213828, 1e-15);
    EXPECT_DOUBLE_EQ(svs_overlap(0.0), 1.0);
}

TEST(SqueezeOp, ZeroIsIdentity)
{
    const ModeOperator s = squeeze_op(SqueezeParam(0.0, 0.0), cut(12));
    EXPECT_LT((s.matrix() - ModeOperator::identity(1, cut(12)).matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SqueezeOp, UnitaryAndInverseOnLowSubspace)
{
    const TruncationSpec t = cut(40);
    const SqueezeParam xi(0.4, 0.7);
    const ModeOperator s = squeeze_op(xi, t);
    const ModeOperator sinv = squeeze_op(xi.negated(), t);
    EXPECT_LT(s.unitarity_error(), 1e-12);
    const Matrix prod = (sinv * s).matrix();
    EXPECT_LT((prod.topLeftCorner(6, 6) - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((s.adjoint().matrix() - sinv.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SqueezeOp, VacuumImageMatchesClosedForm)
{
    for (double r : {0.1, 0.4, 0.7, 1.0}) {
        const SqueezeParam xi(r, pi / 5.0);
        const TruncationSpec t = default_truncation(r);
        const FockState numeric = apply(squeeze_op(xi, t), vacuum(1, t));
        EXPECT_GE(fidelity(numeric, svs_closed_form(xi, t)), 1.0 - 1e-10) << "r=" << r;
    }
}

TEST(BeamSplitter, SinglePhotonOutput)
{
    const TruncationSpec t = cut(3);
    const FockState out = apply(beam_splitter_op(t), basis_state({1, 0}, t));
    EXPECT_NEAR(std::abs(out.amplitude({1, 0}) - cplx(1.0 / std::sqrt(2.0), 0.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(out.amplitude({0, 1}) - cplx(0.0, 1.0 / std::sqrt(2.0))), 0.0, 1e-14);
}

TEST(BeamSplitter, HongOuMandel)
{
    const TruncationSpec t = cut(3);
    const FockState out = apply(beam_splitter_op(t), basis_state({1, 1}, t));
    EXPECT_NEAR(std::abs(out.amplitude({1, 1})), 0.0, 1e-14);
    EXPECT_NEAR(std::norm(out.amplitude({2, 0})), 0.5, 1e-14);
    EXPECT_NEAR(std::norm(out.amplitude({0, 2})), 0.5, 1e-14);
}

TEST(BeamSplitter, SectorsMatchBinomialExpansion)
{
    const BeamSplitter bs(cut(12));
    for (int total = 0; total <= 12; ++total) {
        const Matrix& u = bs.sector(total);
        for (int n = 0; n <= total; ++n) {
            const auto image = oracle::beam_splitter_image(n, total - n);
            for (int p = 0; p <= total; ++p) {
                ASSERT_LT(std::abs(u(p, n) - image[static_cast<std::size_t>(p)]), 1e-11)
                    << "N=" << total << " n=" << n << " p=" << p;
            }
        }
    }
    EXPECT_THROW(bs.sector(13), std::invalid_argument);
}

TEST(BeamSplitter, DenseOperatorIsUnitaryAndConservesPhotons)
{
    const TruncationSpec t = cut(8);
    const ModeOperator u = beam_splitter_op(t);
    EXPECT_LT(u.unitarity_error(), 1e-12);
    const int dim = t.dim();
    for (int i = 0; i < dim * dim; ++i) {
        for (int j = 0; j < dim * dim; ++j) {
            if ((i / dim + i % dim) != (j / dim + j % dim)) {
                ASSERT_EQ(u.matrix()(i, j), cplx(0.0));
            }
        }
    }
}

TEST(BeamSplitter, BlockedApplyMatchesDenseOnLowSectors)
{
    std::mt19937_64 rng(99);
    const TruncationSpec t = cut(6);
    const FockState s = truncate_total_photons(oracle::random_state(3, t, rng), 6);
    const FockState blocked = BeamSplitter(t).apply(s, 2, 0);
    const FockState dense = apply_on_modes(beam_splitter_op(t), s, {2, 0});
    EXPECT_LT((blocked.amplitudes() - dense.amplitudes()).norm(), 1e-12);
}

TEST(BeamSplitter, BlockedApplyProjectsHighSectorsIntoTail)
{
    const TruncationSpec t = cut(3);
    Vector v = Vector::Zero(16);
    v[encode(std::vector<int>{1, 0}, 4)] = 0.6;
    v[encode(std::vector<int>{3, 2}, 4)] = 0.8;
    const FockState out = BeamSplitter(t).apply(FockState(2, t, v), 0, 1);
    EXPECT_NEAR(out.squared_norm(), 0.36, 1e-14);
    EXPECT_NEAR(out.truncation_tail(), 0.64, 1e-14);
}

TEST(TwoModeSqueeze, IdentityAtZero)
{
    const TruncationSpec t = cut(6);
    const ModeOperator s2 = two_mode_squeeze_op(SqueezeParam(0.0, 0.0), t);
    EXPECT_LT((s2.matrix() - ModeOperator::identity(2, t).matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(TwoModeSqueeze, VacuumOnEqualPairsWithThermalAmplitudes)
{
    const TruncationSpec t = cut(30);
    const double r = 0.5;
    const double theta = 0.9;
    const FockState v = two_mode_squeezed_vacuum(SqueezeParam(r, theta), t);
    for (int a = 0; a <= t.n_max; ++a) {
        for (int b = 0; b <= t.n_max; ++b) {
            if (a != b) {
                ASSERT_EQ(v.amplitude({a, b}), cplx(0.0));
            }
        }
    }
    for (int n = 0; n <= 8; ++n) {
        EXPECT_LT(std::abs(v.amplitude({n, n}) - oracle::tms_amplitude(r, theta, n)), 1e-9) << "n=" << n;
    }
    const FockState via_op = apply(two_mode_squeeze_op(SqueezeParam(r, theta), t), vacuum(2, t));
    EXPECT_LT((via_op.amplitudes() - v.amplitudes()).norm(), 1e-12);
    EXPECT_LT(two_mode_squeeze_op(SqueezeParam(r, theta), cut(8)).unitarity_error(), 1e-12);
}

TEST(BeamSplitterCases, EqualInputsGiveTwoModeSqueezedVacuum)
{
    for (double r : {0.1, 0.3, 0.5, 0.8}) {
        for (double phi : {0.0, pi / 3.0}) {
            EXPECT_GE(verify_case1(SqueezeParam(r, phi), default_truncation(r)), 1.0 - 1e-9) << r << " " << phi;
        }
    }
}

TEST(BeamSplitterCases, OppositeInputsGiveRotatedProduct)
{
    for (double r : {0.1, 0.3, 0.5, 0.8}) {
        for (double phi : {0.0, pi / 3.0}) {
            EXPECT_GE(verify_case2(SqueezeParam(r, phi), default_truncation(r)), 1.0 - 1e-9) << r << " " << phi;
        }
    }
}

TEST(BeamSplitterCases, GeneralOutputMatchesDirectEvolution)
{
    const TruncationSpec t = cut(26);
    const std::vector<std::pair<SqueezeParam, SqueezeParam>> inputs{
        {SqueezeParam(0.3, 0.0), SqueezeParam(0.2, 1.0)},
        {SqueezeParam(0.25, -0.5), SqueezeParam(0.25, 2.6)},
        {SqueezeParam(0.3, 0.4), SqueezeParam(0.3, 0.4)},
    };
    for (const auto& [x1, x2] : inputs) {
        const FockState direct =
            BeamSplitter(t).apply(tensor(svs_closed_form(x1, t), svs_closed_form(x2, t)), 0, 1);
        const FockState generated = truncate_total_photons(general_bs_output(x1, x2, t), t.n_max);
        EXPECT_GE(fidelity(direct, generated), 1.0 - 1e-8);
    }
}
