#ifndef SQZ_SQZ_HPP
#define SQZ_SQZ_HPP

#include "sqz/errors.hpp"
#include "sqz/fock.hpp"
#include "sqz/linalg.hpp"
#include "sqz/gaussian.hpp"
#include "sqz/entanglement.hpp"
#include "sqz/protocols.hpp"

#endif
