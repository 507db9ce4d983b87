#pragma once

#include "errors.hpp"
#include "oracle.hpp"
#include "phase.hpp"
#include "specfun.hpp"
#include "state.hpp"
#include "wigner.hpp"

namespace pbphase {

inline constexpr const char* version = "1.0.0";

} // namespace pbphase
