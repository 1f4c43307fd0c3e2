#ifndef SQZ_ENTANGLEMENT_HPP
#define SQZ_ENTANGLEMENT_HPP

// Entangled squeezed states built from the two nonorthogonal squeezed
// vacua |xi>, |-xi>, their two-qubit form, and entropies of entanglement.

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sqz/errors.hpp"
#include "sqz/fock.hpp"
#include "sqz/gaussian.hpp"
#include "sqz/linalg.hpp"

namespace sqz {

/// k = <xi|-xi> = sqrt(sech^2 r / (1 + tanh^2 r)); real, in (0, 1].
inline double svs_overlap(double r)
{
    const double sech = 1.0 / std::cosh(r);
    const double t = std::tanh(r);
    return std::sqrt(sech * sech / (1.0 + t * t));
}

enum class EssKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline constexpr std::array<EssKind, 4> all_ess_kinds{EssKind::PhiPlus, EssKind::PhiMinus, EssKind::PsiPlus,
                                                      EssKind::PsiMinus};

inline std::string_view to_string(EssKind kind)
{
    switch (kind) {
    case EssKind::PhiPlus: return "PhiPlus";
    case EssKind::PhiMinus: return "PhiMinus";
    case EssKind::PsiPlus: return "PsiPlus";
    case EssKind::PsiMinus: return "PsiMinus";
    }
    return "?";
}

inline bool is_minus(EssKind kind) { return kind == EssKind::PhiMinus || kind == EssKind::PsiMinus; }

/// N_{+-} = 2 (1 +- k^2)
inline double ess_normalization(EssKind kind, double r)
{
    const double k = svs_overlap(r);
    return 2.0 * (is_minus(kind) ? 1.0 - k * k : 1.0 + k * k);
}

/// Unnormalized superposition:
///   Phi: |xi>|xi> +- |-xi>|-xi>,   Psi: |xi>|-xi> +- |-xi>|xi>
inline FockState ess_unnormalized(EssKind kind, const SqueezeParam& xi, const TruncationSpec& trunc)
{
    const FockState p = svs_closed_form(xi, trunc);
    const FockState m = svs_closed_form(xi.negated(), trunc);
    const double sign = is_minus(kind) ? -1.0 : 1.0;
    if (kind == EssKind::PhiPlus || kind == EssKind::PhiMinus) {
        return combine(1.0, tensor(p, p), sign, tensor(m, m));
    }
    return combine(1.0, tensor(p, m), sign, tensor(m, p));
}

inline FockState build_ess(EssKind kind, const SqueezeParam& xi, const TruncationSpec& trunc)
{
    const FockState raw = ess_unnormalized(kind, xi, trunc);
    if (raw.squared_norm() < 1e-12) {
        throw degenerate_state("build_ess: " + std::string(to_string(kind)) +
                               " vanishes identically (|xi> and |-xi> coincide at r = 0)");
    }
    return normalize(raw);
}

/// Two-mode state in the orthonormal basis |0> = |xi>, |1> = (|-xi> - k|xi>)/M.
struct QubitEmbedding {
    double k = 1.0;
    double M = 0.0;
    /// coeffs(i, j): amplitude on |i>_1 |j>_2
    Eigen::Matrix2cd coeffs = Eigen::Matrix2cd::Zero();

    double squared_norm() const { return coeffs.squaredNorm(); }
};

/// Coefficients of |Phi'>_{+-} and |Psi'>_{+-}, each divided by sqrt(N_{+-}):
///   Phi: (1 +- k^2)|00> +- M^2|11> +- Mk|10> +- kM|01>
///   Psi: (k +- k)|00> + M|01> +- M|10>
inline QubitEmbedding embed_qubit(EssKind kind, const SqueezeParam& xi)
{
    if (!(xi.r() > 0.0)) {
        throw degenerate_state("embed_qubit: basis degenerates at r = 0 (k = 1)");
    }
    QubitEmbedding e;
    e.k = svs_overlap(xi.r());
    e.M = std::sqrt(1.0 - e.k * e.k);
    const double s = is_minus(kind) ? -1.0 : 1.0;
    const double k = e.k;
    const double m = e.M;
    if (kind == EssKind::PhiPlus || kind == EssKind::PhiMinus) {
        e.coeffs << 1.0 + s * k * k, s * k * m,
                    s * m * k,       s * m * m;
    } else {
        e.coeffs << k + s * k, m,
                    s * m,     0.0;
    }
    e.coeffs /= std::sqrt(ess_normalization(kind, xi.r()));
    return e;
}

/// The embedding basis {|0>, |1>} realized as Fock states.
inline std::array<FockState, 2> qubit_basis(const SqueezeParam& xi, const TruncationSpec& trunc)
{
    const FockState zero = svs_closed_form(xi, trunc);
    const FockState minus = svs_closed_form(xi.negated(), trunc);
    const cplx k = inner(zero, minus);
    FockState one = normalize(combine(1.0, minus, -k, zero));
    return {zero, one};
}

/// Maps a two-qubit coefficient array back into the two-mode Fock space.
inline FockState embedding_to_fock(const QubitEmbedding& e, const SqueezeParam& xi, const TruncationSpec& trunc)
{
    const auto basis = qubit_basis(xi, trunc);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(basis_size(2, trunc)));
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            v += e.coeffs(i, j) * tensor(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]).amplitudes();
        }
    }
    return FockState(2, trunc, std::move(v));
}

/// Entropy (bits) of the reduced state of one mode of a two-mode pure state.
inline double entropy_fock(const FockState& state, int kept_mode)
{
    if (state.num_modes() != 2) {
        throw std::invalid_argument("entropy_fock: expected a two-mode state");
    }
    return von_neumann_entropy_bits(reduced_density(normalize(state), {kept_mode}));
}

/// Binary entropy of the Schmidt weights (1 +- k)^2 / (2 (1 + k^2)).
inline double plus_family_entropy(double k)
{
    double s = 0.0;
    for (const double sign : {1.0, -1.0}) {
        const double lambda = (1.0 + sign * k) * (1.0 + sign * k) / (2.0 * (1.0 + k * k));
        if (lambda > 0.0) {
            s -= lambda * std::log2(lambda);
        }
    }
    return s;
}

/// Closed-form entropy: exactly 1 for the minus families, plus_family_entropy(k) otherwise.
inline double entropy_formula(EssKind kind, const SqueezeParam& xi)
{
    if (!(xi.r() > 0.0)) {
        throw std::invalid_argument("entropy_formula: requires r > 0");
    }
    return is_minus(kind) ? 1.0 : plus_family_entropy(svs_overlap(xi.r()));
}

/// N_eta = 1 - sin(2 eta) sech^2 r / (1 + tanh^2 r)
inline double partial_channel_normalization(double eta, double r)
{
    const double k = svs_overlap(r);
    return 1.0 - std::sin(2.0 * eta) * k * k;
}

inline void check_eta(double eta)
{
    if (!(eta > 0.0 && eta < std::numbers::pi / 2.0)) {
        throw std::invalid_argument("eta must lie in the open interval (0, pi/2)");
    }
}

/// cos(eta)|xi>|-xi> - sin(eta)|-xi>|xi>, before normalization.
inline FockState partial_channel_unnormalized(double eta, const SqueezeParam& xi, const TruncationSpec& trunc)
{
    check_eta(eta);
    const FockState p = svs_closed_form(xi, trunc);
    const FockState m = svs_closed_form(xi.negated(), trunc);
    return combine(std::cos(eta), tensor(p, m), -std::sin(eta), tensor(m, p));
}

inline FockState build_partial_channel(double eta, const SqueezeParam& xi, const TruncationSpec& trunc)
{
    const FockState raw = partial_channel_unnormalized(eta, xi, trunc);
    if (raw.squared_norm() < 1e-12) {
        throw degenerate_state("build_partial_channel: state vanishes (r = 0 with eta = pi/4)");
    }
    return normalize(raw);
}

} // namespace sqz

#endif
