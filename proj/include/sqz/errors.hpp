#ifndef SQZ_ERRORS_HPP
#define SQZ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sqz {

// Precondition violations (bad shapes, out-of-range parameters) are reported
// as std::invalid_argument. The two classes below cover failures that depend
// on the numerical content of a state rather than on argument validity.

/// A superposition collapsed to (numerically) the zero vector, e.g. the
/// minus-family entangled states at r = 0.
class degenerate_state : public std::domain_error {
public:
    explicit degenerate_state(const std::string& what) : std::domain_error(what) {}
};

/// The Fock cutoff is too small for the requested state: the weight lost
/// beyond n_max exceeds the configured tail tolerance.
class truncation_error : public std::runtime_error {
public:
    explicit truncation_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sqz

#endif
