#ifndef SQZ_GAUSSIAN_HPP
#define SQZ_GAUSSIAN_HPP

// Squeezing and beam-splitter unitaries on truncated Fock spaces, plus the
// closed-form number-basis expansion of the squeezed vacuum.
//
// Conventions:
//   S(xi)      = exp(-(xi/2) a^dag^2 + (xi^*/2) a^2)
//   S_2(zeta)  = exp(-zeta a^dag b^dag + zeta^* a b)
//   U_BS       = exp(i (pi/4) (a^dag b + b^dag a))

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqz/errors.hpp"
#include "sqz/fock.hpp"
#include "sqz/linalg.hpp"

namespace sqz {

/// Complex squeezing parameter xi = r e^{i phi}, r >= 0, phi in (-pi, pi].
class SqueezeParam {
public:
    SqueezeParam(double r, double phi) : r_(r), phi_(reduce_angle(phi))
    {
        if (!std::isfinite(r) || r < 0.0) {
            throw std::invalid_argument("SqueezeParam: amplitude r must be finite and >= 0");
        }
        if (!std::isfinite(phi)) {
            throw std::invalid_argument("SqueezeParam: angle must be finite");
        }
    }

    static SqueezeParam from_complex(cplx xi) { return SqueezeParam(std::abs(xi), std::arg(xi)); }

    double r() const { return r_; }
    double phi() const { return phi_; }
    cplx value() const { return std::polar(r_, phi_); }

    /// -xi: same amplitude, angle shifted by pi.
    SqueezeParam negated() const { return SqueezeParam(r_, phi_ > 0.0 ? phi_ - std::numbers::pi : phi_ + std::numbers::pi); }

    /// Same amplitude, angle advanced by `delta`.
    SqueezeParam rotated(double delta) const { return SqueezeParam(r_, phi_ + delta); }

    static double reduce_angle(double phi)
    {
        double p = std::remainder(phi, 2.0 * std::numbers::pi);
        if (p <= -std::numbers::pi) {
            p += 2.0 * std::numbers::pi;
        }
        return p;
    }

private:
    double r_;
    double phi_;
};

/// Probability weight of the squeezed vacuum of amplitude r beyond photon
/// number n_max, summed directly from the closed-form weights
/// |c_2n|^2 = sech(r) tanh(r)^{2n} (2n)! / (4^n (n!)^2).
inline double svs_tail(double r, int n_max)
{
    const double t2 = std::tanh(r) * std::tanh(r);
    double w = 1.0 / std::cosh(r);
    double tail = 0.0;
    for (long n = 0; n < 100000000L; ++n) {
        if (2 * n > n_max) {
            tail += w;
            if (w < 1e-30 * (tail > 0.0 ? tail : 1.0) || w == 0.0) {
                break;
            }
        }
        w *= t2 * static_cast<double>(2 * n + 1) / static_cast<double>(2 * n + 2);
    }
    return tail;
}

/// Per-mode cutoff for squeezing amplitude r: starts from
/// max(16, ceil(10 (1 + 4r))) and grows until the squeezed-vacuum tail is
/// within `tail_tolerance`.
inline TruncationSpec default_truncation(double r, double tail_tolerance = 1e-10)
{
    TruncationSpec spec{std::max(16, static_cast<int>(std::ceil(10.0 * (1.0 + 4.0 * r)))), tail_tolerance};
    spec.validate();
    while (svs_tail(r, spec.n_max) > tail_tolerance) {
        ++spec.n_max;
    }
    return spec;
}

/// Closed-form squeezed vacuum S(xi)|0>:
///   c_2n = (cosh r)^{-1/2} (-e^{i phi} tanh r / 2)^n sqrt((2n)!) / n!,  c_odd = 0,
/// renormalized after truncation. Throws truncation_error when the discarded
/// tail exceeds trunc.tail_tolerance.
inline FockState svs_closed_form(const SqueezeParam& xi, const TruncationSpec& trunc)
{
    trunc.validate();
    const double tail = svs_tail(xi.r(), trunc.n_max);
    if (tail > trunc.tail_tolerance) {
        throw truncation_error("svs_closed_form: tail weight " + std::to_string(tail) + " beyond n_max=" +
                               std::to_string(trunc.n_max) + " exceeds tolerance at r=" + std::to_string(xi.r()));
    }
    const cplx ratio = -std::polar(std::tanh(xi.r()), xi.phi());
    Vector v = Vector::Zero(trunc.dim());
    cplx c = 1.0 / std::sqrt(std::cosh(xi.r()));
    for (int n = 0; 2 * n <= trunc.n_max; ++n) {
        v[2 * n] = c;
        c *= ratio * std::sqrt(static_cast<double>(2 * n + 1) / static_cast<double>(2 * n + 2));
    }
    v.normalize();
    return FockState(1, trunc, std::move(v), tail);
}

/// Single-mode squeeze operator by exponentiating the truncated generator.
inline ModeOperator squeeze_op(const SqueezeParam& xi, const TruncationSpec& trunc)
{
    trunc.validate();
    const Matrix a = annihilation(trunc).matrix();
    const Matrix ad = a.adjoint();
    const cplx z = xi.value();
    const Matrix g = -0.5 * z * (ad * ad) + 0.5 * std::conj(z) * (a * a);
    return ModeOperator(1, trunc, exp_anti_hermitian(g));
}

namespace detail {

/// Generator a^dag b + b^dag a restricted to the chain |k, N-k>, k = lo..hi.
inline Matrix bs_chain_hamiltonian(int total, int lo, int hi)
{
    const int n = hi - lo + 1;
    Matrix h = Matrix::Zero(n, n);
    for (int j = 0; j + 1 < n; ++j) {
        const int k = lo + j;
        const double e = std::sqrt(static_cast<double>(k + 1) * static_cast<double>(total - k));
        h(j + 1, j) = e;
        h(j, j + 1) = e;
    }
    return h;
}

inline Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Chain of two-mode states (j + max(d,0), j + max(-d,0)) at fixed photon
/// difference d, restricted to the box.
inline std::vector<std::pair<int, int>> difference_chain(int d, int n_max)
{
    std::vector<std::pair<int, int>> chain;
    for (int j = 0;; ++j) {
        const int na = j + std::max(d, 0);
        const int nb = j + std::max(-d, 0);
        if (na > n_max || nb > n_max) {
            break;
        }
        chain.emplace_back(na, nb);
    }
    return chain;
}

/// exp(-zeta a^dag b^dag + zeta^* a b) on one difference chain.
inline Matrix tms_chain_unitary(cplx zeta, const std::vector<std::pair<int, int>>& chain)
{
    const auto n = static_cast<Eigen::Index>(chain.size());
    Matrix g = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        const auto [na, nb] = chain[static_cast<std::size_t>(j)];
        const double e = std::sqrt(static_cast<double>(na + 1) * static_cast<double>(nb + 1));
        g(j + 1, j) = -zeta * e;
        g(j, j + 1) = std::conj(zeta) * e;
    }
    return exp_anti_hermitian(g);
}

} // namespace detail

/// 50/50 beam splitter on the truncated two-mode box. Each total-photon
/// sector N is exponentiated separately on the in-box part of its chain, so
/// the result is exactly unitary and has structural zeros between sectors.
/// Sectors with N <= n_max are complete and therefore exact.
inline ModeOperator beam_splitter_op(const TruncationSpec& trunc)
{
    trunc.validate();
    const int dim = trunc.dim();
    Matrix u = Matrix::Zero(dim * dim, dim * dim);
    for (int total = 0; total <= 2 * trunc.n_max; ++total) {
        const int lo = std::max(0, total - trunc.n_max);
        const int hi = std::min(total, trunc.n_max);
        const Matrix block = exp_i_hermitian(detail::bs_chain_hamiltonian(total, lo, hi), std::numbers::pi / 4.0);
        for (int i = lo; i <= hi; ++i) {
            for (int j = lo; j <= hi; ++j) {
                u(i * dim + (total - i), j * dim + (total - j)) = block(i - lo, j - lo);
            }
        }
    }
    return ModeOperator(2, trunc, std::move(u));
}

/// Sector-blocked beam splitter acting on two modes of a larger state.
///
/// Sectors of the two beam-splitter modes with total photon number
/// N <= n_max are transformed by the exact (N+1)x(N+1) unitary. Higher
/// sectors are only partially represented in the box, and evolving them
/// would break the interference that keeps e.g. S(xi)|0> x S(-xi)|0> free of
/// odd counts, so they are projected out instead; their weight is added to
/// the state's truncation tail. The result is not renormalized.
class BeamSplitter {
public:
    explicit BeamSplitter(const TruncationSpec& trunc) : trunc_(trunc)
    {
        trunc_.validate();
        sectors_.reserve(static_cast<std::size_t>(trunc_.n_max + 1));
        for (int total = 0; total <= trunc_.n_max; ++total) {
            sectors_.push_back(exp_i_hermitian(detail::bs_chain_hamiltonian(total, 0, total), std::numbers::pi / 4.0));
        }
    }

    const TruncationSpec& trunc() const { return trunc_; }

    /// Unitary on |k, N-k>, k = 0..N (k counts photons in the first mode).
    const Matrix& sector(int total) const
    {
        if (total < 0 || total > trunc_.n_max) {
            throw std::invalid_argument("BeamSplitter::sector: total photon number outside [0, n_max]");
        }
        return sectors_[static_cast<std::size_t>(total)];
    }

    FockState apply(const FockState& s, int mode_a, int mode_b) const
    {
        if (s.trunc().n_max != trunc_.n_max) {
            throw std::invalid_argument("BeamSplitter::apply: truncation mismatch");
        }
        const std::vector<int> targets{mode_a, mode_b};
        detail::check_modes(targets, s.num_modes(), "BeamSplitter::apply");
        const int dim = trunc_.dim();
        const auto rest = detail::complement(targets, s.num_modes());
        const auto r_off = mode_offsets(rest, s.num_modes(), dim);
        const auto one_a = mode_offsets(std::vector<int>{mode_a}, s.num_modes(), dim);
        const auto one_b = mode_offsets(std::vector<int>{mode_b}, s.num_modes(), dim);
        const std::size_t stride_a = one_a[1];
        const std::size_t stride_b = one_b[1];

        const Vector& in = s.amplitudes();
        Vector out = Vector::Zero(in.size());
        double dropped = 0.0;
        Vector gathered(dim);
        for (std::size_t r : r_off) {
            for (int total = 0; total <= 2 * trunc_.n_max; ++total) {
                const int lo = std::max(0, total - trunc_.n_max);
                const int hi = std::min(total, trunc_.n_max);
                if (total > trunc_.n_max) {
                    for (int k = lo; k <= hi; ++k) {
                        dropped += std::norm(in[static_cast<Eigen::Index>(r + k * stride_a + (total - k) * stride_b)]);
                    }
                    continue;
                }
                auto g = gathered.head(total + 1);
                for (int k = 0; k <= total; ++k) {
                    g[k] = in[static_cast<Eigen::Index>(r + k * stride_a + (total - k) * stride_b)];
                }
                const Vector result = sectors_[static_cast<std::size_t>(total)] * g;
                for (int k = 0; k <= total; ++k) {
                    out[static_cast<Eigen::Index>(r + k * stride_a + (total - k) * stride_b)] = result[k];
                }
            }
        }
        return FockState(s.num_modes(), s.trunc(), std::move(out),
                         detail::combine_tails(s.truncation_tail(), dropped));
    }

private:
    TruncationSpec trunc_;
    std::vector<Matrix> sectors_;
};

/// Two-mode squeeze operator S_2(zeta), exponentiated per photon-difference
/// block.
inline ModeOperator two_mode_squeeze_op(const SqueezeParam& zeta, const TruncationSpec& trunc)
{
    trunc.validate();
    const int dim = trunc.dim();
    Matrix u = Matrix::Zero(dim * dim, dim * dim);
    for (int d = -trunc.n_max; d <= trunc.n_max; ++d) {
        const auto chain = detail::difference_chain(d, trunc.n_max);
        const Matrix block = detail::tms_chain_unitary(zeta.value(), chain);
        for (std::size_t i = 0; i < chain.size(); ++i) {
            for (std::size_t j = 0; j < chain.size(); ++j) {
                u(chain[i].first * dim + chain[i].second, chain[j].first * dim + chain[j].second) =
                    block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    }
    return ModeOperator(2, trunc, std::move(u));
}

/// S_2(zeta)|0,0>, using only the zero-difference block.
inline FockState two_mode_squeezed_vacuum(const SqueezeParam& zeta, const TruncationSpec& trunc)
{
    trunc.validate();
    const int dim = trunc.dim();
    const auto chain = detail::difference_chain(0, trunc.n_max);
    const Matrix block = detail::tms_chain_unitary(zeta.value(), chain);
    Vector v = Vector::Zero(dim * dim);
    for (std::size_t i = 0; i < chain.size(); ++i) {
        v[chain[i].first * dim + chain[i].second] = block(static_cast<Eigen::Index>(i), 0);
    }
    return FockState(2, trunc, std::move(v));
}

/// Output of the beam splitter for inputs S(xi1)|0> x S(xi2)|0>, built from
/// the transformed generator in the output-mode operators:
///   -(xi1-xi2)/4 A1^dag^2 + (xi1-xi2)^*/4 A1^2 + (xi1-xi2)/4 A2^dag^2
///   - (xi1-xi2)^*/4 A2^2 - (i/2)(xi1+xi2) A1^dag A2^dag - (i/2)(xi1+xi2)^* A1 A2
/// exponentiated on the two-mode box (blocked by total-photon parity) and
/// applied to vacuum. Dense in (n_max+1)^2; meant for moderate cutoffs.
inline FockState general_bs_output(const SqueezeParam& xi1, const SqueezeParam& xi2, const TruncationSpec& trunc)
{
    trunc.validate();
    const int dim = trunc.dim();
    const Matrix a = annihilation(trunc).matrix();
    const Matrix id = Matrix::Identity(dim, dim);
    const Matrix a1 = detail::kron(a, id);
    const Matrix a2 = detail::kron(id, a);
    const Matrix a1d = a1.adjoint();
    const Matrix a2d = a2.adjoint();
    const cplx diff = xi1.value() - xi2.value();
    const cplx sum = xi1.value() + xi2.value();
    const cplx i{0.0, 1.0};
    const Matrix g = -0.25 * diff * (a1d * a1d) + 0.25 * std::conj(diff) * (a1 * a1) + 0.25 * diff * (a2d * a2d) -
                     0.25 * std::conj(diff) * (a2 * a2) - 0.5 * i * sum * (a1d * a2d) -
                     0.5 * i * std::conj(sum) * (a1 * a2);
    std::vector<std::vector<Eigen::Index>> parity(2);
    for (int n1 = 0; n1 < dim; ++n1) {
        for (int n2 = 0; n2 < dim; ++n2) {
            parity[static_cast<std::size_t>((n1 + n2) % 2)].push_back(n1 * dim + n2);
        }
    }
    const Matrix u = exp_anti_hermitian_blocked(g, parity);
    return FockState(2, trunc, u.col(0));
}

// The Case 1/2 checks compare on total photon number <= n_max, the part of
// the two-mode space that BeamSplitter::apply represents exactly.

/// Fidelity between BS(|xi>|xi>) and S_2(r e^{i(phi + pi/2)})|0,0>.
inline double verify_case1(const SqueezeParam& xi, const TruncationSpec& trunc)
{
    const FockState sv = svs_closed_form(xi, trunc);
    const FockState out = BeamSplitter(trunc).apply(tensor(sv, sv), 0, 1);
    const FockState expected = two_mode_squeezed_vacuum(xi.rotated(std::numbers::pi / 2.0), trunc);
    return fidelity(out, truncate_total_photons(expected, trunc.n_max));
}

/// Fidelity between BS(|xi>|-xi>) and S(r e^{i phi})|0> x S(r e^{i(phi + pi)})|0>,
/// first factor on the first output mode.
inline double verify_case2(const SqueezeParam& xi, const TruncationSpec& trunc)
{
    const FockState plus = svs_closed_form(xi, trunc);
    const FockState minus = svs_closed_form(xi.negated(), trunc);
    const FockState out = BeamSplitter(trunc).apply(tensor(plus, minus), 0, 1);
    const FockState expected =
        tensor(svs_closed_form(SqueezeParam(xi.r(), xi.phi()), trunc),
               svs_closed_form(SqueezeParam(xi.r(), xi.phi() + std::numbers::pi), trunc));
    return fidelity(out, truncate_total_photons(expected, trunc.n_max));
}

} // namespace sqz

#endif
