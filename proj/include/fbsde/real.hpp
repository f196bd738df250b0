#pragma once

#include <cmath>
#include <limits>

namespace fbsde {

// Working precision. Extended precision (x87 80-bit long double on x86-64)
// is selected at configure time with -DFBSDE_LONG_DOUBLE=ON.
#ifdef FBSDE_LONG_DOUBLE
using Real = long double;
#else
using Real = double;
#endif

inline constexpr bool kExtendedPrecision = sizeof(Real) > sizeof(double);

/// Default stopping tolerance for the implicit Y solve and the coupled
/// fixed-point loop, scaled to the arithmetic in use.
inline constexpr Real kDefaultEpsilon0 = kExtendedPrecision ? Real(1e-16L) : Real(1e-12);

inline bool is_finite(Real v) { return std::isfinite(v); }

}  // namespace fbsde
