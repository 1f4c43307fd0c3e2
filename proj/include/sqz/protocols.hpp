#ifndef SQZ_PROTOCOLS_HPP
#define SQZ_PROTOCOLS_HPP

// Teleportation of a superposition of |xi> and |-xi> over a maximally
// entangled squeezed channel, and entanglement concentration of partially
// entangled channels, both driven by 50/50 beam splitting followed by
// photon counting with odd-odd post-selection.
//
// Mode layout
//   teleport:    0 = input, (1, 2) = channel; BS and counting on (0, 1), receiver is 2
//   concentrate: (0, 1) and (2, 3) are two channel copies; BS and counting on (1, 2),
//                output pair is (0, 3)

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sqz/entanglement.hpp"
#include "sqz/errors.hpp"
#include "sqz/fock.hpp"
#include "sqz/gaussian.hpp"

namespace sqz {

struct SuperpositionSpec {
    cplx c_plus{1.0, 0.0};
    cplx c_minus{0.0, 0.0};
    SqueezeParam xi{0.5, 0.0};

    void validate() const
    {
        if (c_plus == cplx(0.0) && c_minus == cplx(0.0)) {
            throw std::invalid_argument("SuperpositionSpec: C+ and C- cannot both vanish");
        }
    }
};

/// N_Psi = |C+|^2 + |C-|^2 + 2 k Re(C+ C-^*)
inline double superposition_normalization(const SuperpositionSpec& spec)
{
    return std::norm(spec.c_plus) + std::norm(spec.c_minus) +
           2.0 * svs_overlap(spec.xi.r()) * std::real(spec.c_plus * std::conj(spec.c_minus));
}

inline FockState superposition_unnormalized(const SuperpositionSpec& spec, const TruncationSpec& trunc)
{
    spec.validate();
    return combine(spec.c_plus, svs_closed_form(spec.xi, trunc), spec.c_minus,
                   svs_closed_form(spec.xi.negated(), trunc));
}

/// (C+|xi> + C-|-xi>) / sqrt(N_Psi)
inline FockState build_superposition(const SuperpositionSpec& spec, const TruncationSpec& trunc)
{
    const FockState raw = superposition_unnormalized(spec, trunc);
    if (raw.squared_norm() < 1e-12) {
        throw degenerate_state("build_superposition: C+|xi> + C-|-xi> vanishes");
    }
    return normalize(raw);
}

struct BranchEntry {
    std::vector<int> counts;
    double probability = 0.0;
    /// |<target|conditional>|^2
    double fidelity_to_target = 0.0;
    bool success = false;
    /// Receiver-side state; kept for success branches, and for failures on request.
    std::optional<FockState> conditional_state;
};

struct ProtocolReport {
    std::vector<BranchEntry> branches;
    double success_probability = 0.0;
    /// Probability-weighted over success branches.
    double mean_success_fidelity = 0.0;
    double min_success_fidelity = 1.0;
    double truncation_tail = 0.0;
    /// Probability-weighted entropy (bits) of the two-mode conditional states
    /// on success branches; concentration only.
    std::optional<double> success_entropy;

    double total_probability() const
    {
        double p = 0.0;
        for (const auto& b : branches) {
            p += b.probability;
        }
        return p;
    }
};

struct ProtocolOptions {
    double probability_floor = 1e-14;
    bool keep_failure_states = false;
};

inline bool odd_odd(const std::vector<int>& counts)
{
    return counts.size() == 2 && counts[0] % 2 == 1 && counts[1] % 2 == 1;
}

namespace detail {

/// Counts `measured` on the normalized `state`, compares each conditional
/// state with `target` and fills the report.
inline ProtocolReport post_select(const FockState& state, std::span<const int> measured, const FockState& target,
                                  const ProtocolOptions& options, bool with_entropy)
{
    ProtocolReport report;
    report.truncation_tail = state.truncation_tail();
    double fid_sum = 0.0;
    double entropy_sum = 0.0;
    visit_outcomes(state, measured, options.probability_floor,
                   [&](std::vector<int> counts, double p, const Vector& residual) {
                       FockState conditional(target.num_modes(), state.trunc(), residual, state.truncation_tail());
                       BranchEntry entry;
                       entry.success = odd_odd(counts);
                       entry.counts = std::move(counts);
                       entry.probability = p;
                       entry.fidelity_to_target = fidelity(target, conditional);
                       if (entry.success) {
                           report.success_probability += p;
                           fid_sum += p * entry.fidelity_to_target;
                           report.min_success_fidelity = std::min(report.min_success_fidelity, entry.fidelity_to_target);
                           if (with_entropy) {
                               entropy_sum += p * entropy_fock(conditional, 0);
                           }
                       }
                       if (entry.success || options.keep_failure_states) {
                           entry.conditional_state.emplace(std::move(conditional));
                       }
                       report.branches.push_back(std::move(entry));
                   });
    if (report.success_probability > 0.0) {
        report.mean_success_fidelity = fid_sum / report.success_probability;
        if (with_entropy) {
            report.success_entropy = entropy_sum / report.success_probability;
        }
    }
    return report;
}

} // namespace detail

/// Full teleportation run: input superposition on mode 0, |Phi>_- on modes
/// (1, 2), beam splitter on (0, 1), photon counting on (0, 1).
inline ProtocolReport teleport(const SuperpositionSpec& spec, const TruncationSpec& trunc,
                               const ProtocolOptions& options = {})
{
    spec.validate();
    const FockState target = build_superposition(spec, trunc);
    const FockState channel = build_ess(EssKind::PhiMinus, spec.xi, trunc);
    const FockState mixed = BeamSplitter(trunc).apply(tensor(target, channel), 0, 1);
    const std::vector<int> measured{0, 1};
    return detail::post_select(normalize(mixed), measured, target, options, false);
}

/// P(2n+1, 2n+1) = sech^2 r tanh^{2(2n+1)} r / N_-
inline double teleport_branch_probability(double r, int n)
{
    const double sech = 1.0 / std::cosh(r);
    const double t = std::tanh(r);
    return sech * sech * std::pow(t, 2.0 * (2 * n + 1)) / ess_normalization(EssKind::PhiMinus, r);
}

/// Sum of the first `terms` odd branch probabilities.
inline double teleport_success_partial_sum(double r, int terms)
{
    double p = 0.0;
    for (int n = 0; n < terms; ++n) {
        p += teleport_branch_probability(r, n);
    }
    return p;
}

/// Geometric-series value of the infinite sum: sech^2 r tanh^2 r / (N_- (1 - tanh^4 r)).
inline double teleport_success_probability(double r)
{
    if (!(r > 0.0)) {
        throw std::invalid_argument("teleport_success_probability: requires r > 0");
    }
    const double sech = 1.0 / std::cosh(r);
    const double t2 = std::tanh(r) * std::tanh(r);
    return sech * sech * t2 / (ess_normalization(EssKind::PhiMinus, r) * (1.0 - t2 * t2));
}

/// Full concentration run on two copies of the partially entangled channel.
/// Success branches are compared against |Phi>_- on the surviving pair.
inline ProtocolReport concentrate(double eta, const SqueezeParam& xi, const TruncationSpec& trunc,
                                  const ProtocolOptions& options = {})
{
    check_eta(eta);
    if (!(xi.r() > 0.0)) {
        throw degenerate_state("concentrate: requires r > 0");
    }
    const FockState channel = build_partial_channel(eta, xi, trunc);
    const FockState target = build_ess(EssKind::PhiMinus, xi, trunc);
    const FockState mixed = BeamSplitter(trunc).apply(tensor(channel, channel), 1, 2);
    const std::vector<int> measured{1, 2};
    return detail::post_select(normalize(mixed), measured, target, options, true);
}

/// P(2n+1, 2n+1) = N_- sin^2(2 eta) sech^2 r tanh^{2(2n+1)} r / (4 N_eta^2)
inline double concentrate_branch_probability(double eta, double r, int n)
{
    const double sech = 1.0 / std::cosh(r);
    const double t = std::tanh(r);
    const double s2 = std::sin(2.0 * eta);
    const double n_eta = partial_channel_normalization(eta, r);
    return ess_normalization(EssKind::PhiMinus, r) / (4.0 * n_eta * n_eta) * s2 * s2 * sech * sech *
           std::pow(t, 2.0 * (2 * n + 1));
}

/// (1/4) sin^2(2 eta) N_- tanh^2 r / (N_eta^2 (1 + tanh^2 r))
inline double concentrate_success_probability(double eta, double r)
{
    check_eta(eta);
    if (!(r > 0.0)) {
        throw std::invalid_argument("concentrate_success_probability: requires r > 0");
    }
    const double t2 = std::tanh(r) * std::tanh(r);
    const double s2 = std::sin(2.0 * eta);
    const double n_eta = partial_channel_normalization(eta, r);
    return 0.25 * s2 * s2 * ess_normalization(EssKind::PhiMinus, r) * t2 / (n_eta * n_eta * (1.0 + t2));
}

/// Entropy of the post-selected output pair, probability-weighted over
/// success branches.
inline double entropy_after_concentration(double eta, const SqueezeParam& xi, const TruncationSpec& trunc)
{
    const ProtocolReport report = concentrate(eta, xi, trunc);
    if (!report.success_entropy) {
        throw std::runtime_error("entropy_after_concentration: no success branch above the probability floor");
    }
    return *report.success_entropy;
}

} // namespace sqz

#endif
