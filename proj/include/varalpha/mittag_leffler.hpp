#pragma once

namespace varalpha {

// E_alpha(z) for alpha in (0,1] and z <= 0, relative accuracy ~1e-10 over
// the working domain. Strategy, in order:
//   - Taylor series sum z^m / Gamma(alpha m + 1), accepted only when a
//     runtime cancellation monitor certifies max_term * eps small against
//     the sum (the alternating series loses digits like max_term/value,
//     catastrophically so for small alpha well before |z| = 10);
//   - large-|z| asymptotic series -sum_k z^(-k)/Gamma(1-alpha k) truncated
//     at its smallest term, accepted only when that term plus the
//     beyond-all-orders exponential component (bounded by e^{z}) is
//     negligible against the sum; pole terms at rational alpha vanish and
//     are skipped;
//   - otherwise adaptive Gauss-Kronrod quadrature of the completely
//     monotone spectral representation
//       E_alpha(-x) = sinc(alpha pi) * int_0^inf exp(-(u x)^(1/alpha)) /
//                     ((u-1)^2 + 4 u sin^2((1-alpha) pi / 2)) du,
//     with dedicated panels for the denominator dip at u = 1 whose width
//     pi (1-alpha) carries the exponential component as alpha -> 1.
// The dip eventually outruns double resolution: within ~1e-6 of alpha = 1
// accuracy degrades to ~1e-4 at large |z| (alpha = 1 itself is exact).
// Validated against a cross-checked high-precision reference grid.
double mittag_leffler(double alpha, double z);

}  // namespace varalpha
