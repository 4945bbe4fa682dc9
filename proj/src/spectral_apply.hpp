#pragma once

#include <complex>
#include <functional>

#include "fhlab/lattice.hpp"

namespace fhlab::detail {

using Multiplier = std::function<std::complex<double>(double xi2, double theta)>;

// Zero-pads in space (lat.pad) and time (time_pad), applies m(|xi|^2, theta)
// on the space-time spectrum and crops back. The multiplier is evaluated once
// per distinct |xi|^2 and theta. Throws if the imaginary residue exceeds imag_tol.
Field apply_multiplier(const Field& fld, const Multiplier& m, SpatialSymbol sym, int time_pad,
                       double imag_tol, const char* who);

// Applies m(|xi|^2) slice by slice in space only.
Field apply_space_multiplier(const Field& fld, const std::function<double(double)>& m,
                             SpatialSymbol sym);

}  // namespace fhlab::detail
