#ifndef SQZ_FOCK_HPP
#define SQZ_FOCK_HPP

// Pure states and dense operators on truncated multi-mode Fock spaces.
//
// Basis convention: a k-mode basis state |n_0, ..., n_{k-1}> with cutoff
// n_max sits at flat index n_0*D^{k-1} + n_1*D^{k-2} + ... + n_{k-1},
// D = n_max + 1 (mode 0 varies slowest). Every module goes through
// encode/decode or mode_offsets below; nothing else computes flat indices.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sqz/errors.hpp"

namespace sqz {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

struct TruncationSpec {
    int n_max = 16;
    double tail_tolerance = 1e-10;

    int dim() const { return n_max + 1; }

    void validate() const
    {
        if (n_max < 1) {
            throw std::invalid_argument("TruncationSpec: n_max must be >= 1, got " + std::to_string(n_max));
        }
        if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0)) {
            throw std::invalid_argument("TruncationSpec: tail_tolerance must lie in (0, 1)");
        }
    }

    friend bool operator==(const TruncationSpec&, const TruncationSpec&) = default;
};

inline std::size_t basis_size(int num_modes, const TruncationSpec& trunc)
{
    std::size_t n = 1;
    for (int i = 0; i < num_modes; ++i) {
        n *= static_cast<std::size_t>(trunc.dim());
    }
    return n;
}

inline std::size_t encode(std::span<const int> counts, int dim)
{
    std::size_t index = 0;
    for (int c : counts) {
        if (c < 0 || c >= dim) {
            throw std::invalid_argument("encode: photon count " + std::to_string(c) + " outside [0, " +
                                        std::to_string(dim - 1) + "]");
        }
        index = index * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c);
    }
    return index;
}

inline std::vector<int> decode(std::size_t index, int num_modes, int dim)
{
    std::vector<int> counts(static_cast<std::size_t>(num_modes));
    for (int m = num_modes - 1; m >= 0; --m) {
        counts[static_cast<std::size_t>(m)] = static_cast<int>(index % static_cast<std::size_t>(dim));
        index /= static_cast<std::size_t>(dim);
    }
    if (index != 0) {
        throw std::invalid_argument("decode: flat index out of range");
    }
    return counts;
}

namespace detail {

inline void check_modes(std::span<const int> modes, int num_modes, const char* who)
{
    std::vector<int> seen(static_cast<std::size_t>(num_modes), 0);
    for (int m : modes) {
        if (m < 0 || m >= num_modes) {
            throw std::invalid_argument(std::string(who) + ": mode index " + std::to_string(m) + " out of range");
        }
        if (seen[static_cast<std::size_t>(m)]++) {
            throw std::invalid_argument(std::string(who) + ": duplicate mode index " + std::to_string(m));
        }
    }
}

inline std::vector<int> complement(std::span<const int> modes, int num_modes)
{
    std::vector<int> rest;
    for (int m = 0; m < num_modes; ++m) {
        if (std::find(modes.begin(), modes.end(), m) == modes.end()) {
            rest.push_back(m);
        }
    }
    return rest;
}

} // namespace detail

/// Flat-index contribution of every basis configuration of the listed modes,
/// enumerated in the listed order with the first listed mode slowest. For a
/// partition (A, B) of all modes, flat = offsets(A)[a] + offsets(B)[b].
inline std::vector<std::size_t> mode_offsets(std::span<const int> modes, int num_modes, int dim)
{
    std::vector<std::size_t> stride(static_cast<std::size_t>(num_modes));
    std::size_t s = 1;
    for (int m = num_modes - 1; m >= 0; --m) {
        stride[static_cast<std::size_t>(m)] = s;
        s *= static_cast<std::size_t>(dim);
    }
    std::vector<std::size_t> offsets{0};
    for (int m : modes) {
        std::vector<std::size_t> next;
        next.reserve(offsets.size() * static_cast<std::size_t>(dim));
        for (std::size_t base : offsets) {
            for (int n = 0; n < dim; ++n) {
                next.push_back(base + static_cast<std::size_t>(n) * stride[static_cast<std::size_t>(m)]);
            }
        }
        offsets = std::move(next);
    }
    return offsets;
}

class FockState {
public:
    FockState(int num_modes, TruncationSpec trunc, Vector amplitudes, double truncation_tail = 0.0)
        : num_modes_(num_modes), trunc_(trunc), amplitudes_(std::move(amplitudes)), tail_(truncation_tail)
    {
        trunc_.validate();
        if (num_modes_ < 1) {
            throw std::invalid_argument("FockState: num_modes must be positive");
        }
        if (static_cast<std::size_t>(amplitudes_.size()) != basis_size(num_modes_, trunc_)) {
            throw std::invalid_argument("FockState: amplitude vector length does not match (n_max+1)^num_modes");
        }
    }

    int num_modes() const { return num_modes_; }
    const TruncationSpec& trunc() const { return trunc_; }
    const Vector& amplitudes() const { return amplitudes_; }
    std::size_t size() const { return static_cast<std::size_t>(amplitudes_.size()); }

    cplx amplitude(std::span<const int> counts) const
    {
        if (static_cast<int>(counts.size()) != num_modes_) {
            throw std::invalid_argument("FockState::amplitude: wrong number of photon counts");
        }
        return amplitudes_[static_cast<Eigen::Index>(encode(counts, trunc_.dim()))];
    }
    cplx amplitude(std::initializer_list<int> counts) const
    {
        return amplitude(std::span<const int>(counts.begin(), counts.size()));
    }

    double squared_norm() const { return amplitudes_.squaredNorm(); }
    double norm() const { return amplitudes_.norm(); }

    /// Estimated probability weight discarded by truncation while building
    /// this state (cutoff tails, sectors projected out). Diagnostic only.
    double truncation_tail() const { return tail_; }

    /// Weight on basis states with any mode at the cutoff n_max.
    double edge_weight() const
    {
        const int dim = trunc_.dim();
        double w = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            std::size_t idx = i;
            bool edge = false;
            for (int m = 0; m < num_modes_; ++m) {
                if (static_cast<int>(idx % static_cast<std::size_t>(dim)) == trunc_.n_max) {
                    edge = true;
                    break;
                }
                idx /= static_cast<std::size_t>(dim);
            }
            if (edge) {
                w += std::norm(amplitudes_[static_cast<Eigen::Index>(i)]);
            }
        }
        return w;
    }

    FockState with_tail(double tail) const { return FockState(num_modes_, trunc_, amplitudes_, tail); }

private:
    int num_modes_;
    TruncationSpec trunc_;
    Vector amplitudes_;
    double tail_;
};

namespace detail {

inline void check_same_shape(const FockState& a, const FockState& b, const char* who)
{
    if (a.num_modes() != b.num_modes() || a.trunc().n_max != b.trunc().n_max) {
        throw std::invalid_argument(std::string(who) + ": states have different shapes");
    }
}

inline double combine_tails(double a, double b) { return 1.0 - (1.0 - a) * (1.0 - b); }

} // namespace detail

/// Rescales to unit norm. Throws degenerate_state for a zero vector.
inline FockState normalize(const FockState& s, double min_squared_norm = 1e-300)
{
    const double n2 = s.squared_norm();
    if (!(n2 > min_squared_norm)) {
        throw degenerate_state("normalize: state has vanishing norm");
    }
    return FockState(s.num_modes(), s.trunc(), s.amplitudes() / std::sqrt(n2), s.truncation_tail());
}

inline FockState vacuum(int num_modes, const TruncationSpec& trunc)
{
    trunc.validate();
    Vector v = Vector::Zero(static_cast<Eigen::Index>(basis_size(num_modes, trunc)));
    v[0] = 1.0;
    return FockState(num_modes, trunc, std::move(v));
}

/// Single basis state |counts>.
inline FockState basis_state(std::span<const int> counts, const TruncationSpec& trunc)
{
    const int k = static_cast<int>(counts.size());
    Vector v = Vector::Zero(static_cast<Eigen::Index>(basis_size(k, trunc)));
    v[static_cast<Eigen::Index>(encode(counts, trunc.dim()))] = 1.0;
    return FockState(k, trunc, std::move(v));
}
inline FockState basis_state(std::initializer_list<int> counts, const TruncationSpec& trunc)
{
    return basis_state(std::span<const int>(counts.begin(), counts.size()), trunc);
}

/// Linear combination alpha*a + beta*b of same-shape states (not normalized).
inline FockState combine(cplx alpha, const FockState& a, cplx beta, const FockState& b)
{
    detail::check_same_shape(a, b, "combine");
    return FockState(a.num_modes(), a.trunc(), alpha * a.amplitudes() + beta * b.amplitudes(),
                     std::max(a.truncation_tail(), b.truncation_tail()));
}

/// Kronecker product; the modes of `a` come first (slower).
inline FockState tensor(const FockState& a, const FockState& b)
{
    if (a.trunc() != b.trunc()) {
        throw std::invalid_argument("tensor: mismatched truncation specs");
    }
    const auto na = static_cast<Eigen::Index>(a.size());
    const auto nb = static_cast<Eigen::Index>(b.size());
    Vector v(na * nb);
    for (Eigen::Index i = 0; i < na; ++i) {
        v.segment(i * nb, nb) = a.amplitudes()[i] * b.amplitudes();
    }
    return FockState(a.num_modes() + b.num_modes(), a.trunc(), std::move(v),
                     detail::combine_tails(a.truncation_tail(), b.truncation_tail()));
}

/// <a|b>, conjugate-linear in `a`.
inline cplx inner(const FockState& a, const FockState& b)
{
    detail::check_same_shape(a, b, "inner");
    return a.amplitudes().dot(b.amplitudes());
}

/// |<a|b>|^2 / (<a|a><b|b>); insensitive to global phase and scale.
inline double fidelity(const FockState& a, const FockState& b)
{
    const double den = a.squared_norm() * b.squared_norm();
    if (!(den > 0.0)) {
        throw degenerate_state("fidelity: zero vector");
    }
    return std::norm(inner(a, b)) / den;
}

class ModeOperator {
public:
    ModeOperator(int num_modes, TruncationSpec trunc, Matrix matrix)
        : num_modes_(num_modes), trunc_(trunc), matrix_(std::move(matrix))
    {
        trunc_.validate();
        const auto n = static_cast<Eigen::Index>(basis_size(num_modes_, trunc_));
        if (matrix_.rows() != n || matrix_.cols() != n) {
            throw std::invalid_argument("ModeOperator: matrix dimension does not match (n_max+1)^num_modes");
        }
    }

    static ModeOperator identity(int num_modes, const TruncationSpec& trunc)
    {
        const auto n = static_cast<Eigen::Index>(basis_size(num_modes, trunc));
        return ModeOperator(num_modes, trunc, Matrix::Identity(n, n));
    }

    int num_modes() const { return num_modes_; }
    const TruncationSpec& trunc() const { return trunc_; }
    const Matrix& matrix() const { return matrix_; }

    ModeOperator adjoint() const { return ModeOperator(num_modes_, trunc_, matrix_.adjoint()); }

    /// max |(U^dagger U - I)_{ij}|
    double unitarity_error() const
    {
        const Matrix g = matrix_.adjoint() * matrix_;
        return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
    }

    friend ModeOperator operator*(const ModeOperator& a, const ModeOperator& b)
    {
        if (a.num_modes_ != b.num_modes_ || a.trunc_ != b.trunc_) {
            throw std::invalid_argument("ModeOperator product: shape mismatch");
        }
        return ModeOperator(a.num_modes_, a.trunc_, a.matrix_ * b.matrix_);
    }

private:
    int num_modes_;
    TruncationSpec trunc_;
    Matrix matrix_;
};

/// Single-mode annihilation operator on the truncated space.
inline ModeOperator annihilation(const TruncationSpec& trunc)
{
    trunc.validate();
    Matrix a = Matrix::Zero(trunc.dim(), trunc.dim());
    for (int n = 1; n <= trunc.n_max; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return ModeOperator(1, trunc, std::move(a));
}

inline ModeOperator creation(const TruncationSpec& trunc) { return annihilation(trunc).adjoint(); }

inline FockState apply(const ModeOperator& op, const FockState& s)
{
    if (op.num_modes() != s.num_modes() || op.trunc().n_max != s.trunc().n_max) {
        throw std::invalid_argument("apply: operator and state dimensions differ");
    }
    return FockState(s.num_modes(), s.trunc(), op.matrix() * s.amplitudes(), s.truncation_tail());
}

/// Lifts `op` (acting on target_modes.size() modes, in the listed order) to
/// the full total_modes space, identity on the remaining modes.
inline ModeOperator embed(const ModeOperator& op, std::span<const int> target_modes, int total_modes)
{
    if (static_cast<int>(target_modes.size()) != op.num_modes()) {
        throw std::invalid_argument("embed: number of target modes differs from operator arity");
    }
    detail::check_modes(target_modes, total_modes, "embed");
    const int dim = op.trunc().dim();
    const auto rest = detail::complement(target_modes, total_modes);
    const auto t_off = mode_offsets(target_modes, total_modes, dim);
    const auto r_off = mode_offsets(rest, total_modes, dim);
    const auto n = static_cast<Eigen::Index>(basis_size(total_modes, op.trunc()));
    Matrix big = Matrix::Zero(n, n);
    const Matrix& small = op.matrix();
    for (std::size_t r : r_off) {
        for (Eigen::Index j = 0; j < small.cols(); ++j) {
            for (Eigen::Index i = 0; i < small.rows(); ++i) {
                if (small(i, j) != cplx(0.0)) {
                    big(static_cast<Eigen::Index>(t_off[static_cast<std::size_t>(i)] + r),
                        static_cast<Eigen::Index>(t_off[static_cast<std::size_t>(j)] + r)) = small(i, j);
                }
            }
        }
    }
    return ModeOperator(total_modes, op.trunc(), std::move(big));
}
inline ModeOperator embed(const ModeOperator& op, std::initializer_list<int> target_modes, int total_modes)
{
    return embed(op, std::span<const int>(target_modes.begin(), target_modes.size()), total_modes);
}

/// Applies `op` to the listed modes of `s` without materializing the
/// embedded operator. Equivalent to apply(embed(op, modes, k), s).
inline FockState apply_on_modes(const ModeOperator& op, const FockState& s, std::span<const int> target_modes)
{
    if (static_cast<int>(target_modes.size()) != op.num_modes() || op.trunc().n_max != s.trunc().n_max) {
        throw std::invalid_argument("apply_on_modes: operator does not match state/modes");
    }
    detail::check_modes(target_modes, s.num_modes(), "apply_on_modes");
    const int dim = s.trunc().dim();
    const auto rest = detail::complement(target_modes, s.num_modes());
    const auto t_off = mode_offsets(target_modes, s.num_modes(), dim);
    const auto r_off = mode_offsets(rest, s.num_modes(), dim);
    const auto nt = static_cast<Eigen::Index>(t_off.size());
    Vector out(static_cast<Eigen::Index>(s.size()));
    Vector gathered(nt);
    for (std::size_t r : r_off) {
        for (Eigen::Index i = 0; i < nt; ++i) {
            gathered[i] = s.amplitudes()[static_cast<Eigen::Index>(t_off[static_cast<std::size_t>(i)] + r)];
        }
        const Vector result = op.matrix() * gathered;
        for (Eigen::Index i = 0; i < nt; ++i) {
            out[static_cast<Eigen::Index>(t_off[static_cast<std::size_t>(i)] + r)] = result[i];
        }
    }
    return FockState(s.num_modes(), s.trunc(), std::move(out), s.truncation_tail());
}
inline FockState apply_on_modes(const ModeOperator& op, const FockState& s, std::initializer_list<int> modes)
{
    return apply_on_modes(op, s, std::span<const int>(modes.begin(), modes.size()));
}

struct MeasurementRecord {
    std::vector<int> counts;
    double probability = 0.0;
    /// Normalized state of the unmeasured modes; absent when every mode was measured.
    std::optional<FockState> residual;
};

struct MeasureOptions {
    /// Outcomes with probability at or below this value are not reported.
    double probability_floor = 1e-14;
    bool keep_residuals = true;
};

/// Projective photon counting on `measured_modes`, streaming each outcome
/// with probability above `probability_floor` to
/// fn(counts, probability, residual) in lexicographic order of the count
/// tuple (listed-mode order). `residual` is the normalized amplitude vector
/// on the remaining modes (ascending mode order), empty if none remain.
template <typename Fn>
void visit_outcomes(const FockState& s, std::span<const int> measured_modes, double probability_floor, Fn&& fn)
{
    if (measured_modes.empty()) {
        throw std::invalid_argument("measure_photons: no modes to measure");
    }
    detail::check_modes(measured_modes, s.num_modes(), "measure_photons");
    const int dim = s.trunc().dim();
    const int k = static_cast<int>(measured_modes.size());
    const auto rest = detail::complement(measured_modes, s.num_modes());
    const auto m_off = mode_offsets(measured_modes, s.num_modes(), dim);
    const auto r_off = rest.empty() ? std::vector<std::size_t>{0} : mode_offsets(rest, s.num_modes(), dim);
    const Vector& amp = s.amplitudes();
    Vector residual(rest.empty() ? 0 : static_cast<Eigen::Index>(r_off.size()));

    for (std::size_t o = 0; o < m_off.size(); ++o) {
        double p = 0.0;
        for (std::size_t r : r_off) {
            p += std::norm(amp[static_cast<Eigen::Index>(m_off[o] + r)]);
        }
        if (!(p > probability_floor)) {
            continue;
        }
        if (!rest.empty()) {
            const double scale = 1.0 / std::sqrt(p);
            for (std::size_t j = 0; j < r_off.size(); ++j) {
                residual[static_cast<Eigen::Index>(j)] = scale * amp[static_cast<Eigen::Index>(m_off[o] + r_off[j])];
            }
        }
        fn(decode(o, k, dim), p, static_cast<const Vector&>(residual));
    }
}

/// Projective photon counting on `measured_modes`; one record per outcome
/// above the probability floor, lexicographic in the count tuple.
inline std::vector<MeasurementRecord> measure_photons(const FockState& s, std::span<const int> measured_modes,
                                                      const MeasureOptions& options = {})
{
    const int remaining = s.num_modes() - static_cast<int>(measured_modes.size());
    std::vector<MeasurementRecord> records;
    visit_outcomes(s, measured_modes, options.probability_floor,
                   [&](std::vector<int> counts, double p, const Vector& residual) {
                       MeasurementRecord rec{std::move(counts), p, std::nullopt};
                       if (remaining > 0 && options.keep_residuals) {
                           rec.residual.emplace(remaining, s.trunc(), residual, s.truncation_tail());
                       }
                       records.push_back(std::move(rec));
                   });
    return records;
}
inline std::vector<MeasurementRecord> measure_photons(const FockState& s, std::initializer_list<int> modes,
                                                      const MeasureOptions& options = {})
{
    return measure_photons(s, std::span<const int>(modes.begin(), modes.size()), options);
}

/// Reduced density matrix on `kept_modes` (listed order, first slowest).
/// Passing every mode returns the full projector |s><s|.
inline Matrix reduced_density(const FockState& s, std::span<const int> kept_modes)
{
    if (kept_modes.empty()) {
        throw std::invalid_argument("reduced_density: kept_modes must be nonempty");
    }
    detail::check_modes(kept_modes, s.num_modes(), "reduced_density");
    const int dim = s.trunc().dim();
    const auto traced = detail::complement(kept_modes, s.num_modes());
    const auto k_off = mode_offsets(kept_modes, s.num_modes(), dim);
    const auto t_off = mode_offsets(traced, s.num_modes(), dim);
    Matrix psi(static_cast<Eigen::Index>(k_off.size()), static_cast<Eigen::Index>(t_off.size()));
    for (std::size_t i = 0; i < k_off.size(); ++i) {
        for (std::size_t j = 0; j < t_off.size(); ++j) {
            psi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                s.amplitudes()[static_cast<Eigen::Index>(k_off[i] + t_off[j])];
        }
    }
    return psi * psi.adjoint();
}
inline Matrix reduced_density(const FockState& s, std::initializer_list<int> kept_modes)
{
    return reduced_density(s, std::span<const int>(kept_modes.begin(), kept_modes.size()));
}

/// Copy of `s` with every basis state of total photon number above
/// `max_total` removed (not renormalized).
inline FockState truncate_total_photons(const FockState& s, int max_total)
{
    const int dim = s.trunc().dim();
    Vector v = s.amplitudes();
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::size_t idx = i;
        int n = 0;
        for (int m = 0; m < s.num_modes(); ++m) {
            n += static_cast<int>(idx % static_cast<std::size_t>(dim));
            idx /= static_cast<std::size_t>(dim);
        }
        if (n > max_total) {
            v[static_cast<Eigen::Index>(i)] = 0.0;
        }
    }
    return FockState(s.num_modes(), s.trunc(), std::move(v), s.truncation_tail());
}

/// Mean total photon number <N>.
inline double mean_photon_number(const FockState& s)
{
    const int dim = s.trunc().dim();
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::size_t idx = i;
        int n = 0;
        for (int m = 0; m < s.num_modes(); ++m) {
            n += static_cast<int>(idx % static_cast<std::size_t>(dim));
            idx /= static_cast<std::size_t>(dim);
        }
        total += n * std::norm(s.amplitudes()[static_cast<Eigen::Index>(i)]);
    }
    return total;
}

} // namespace sqz

#endif
