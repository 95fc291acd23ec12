#pragma once

namespace fomas {
namespace fracsim {

/// One-parameter Mittag-Leffler function E_q(z) = Σ z^k / Γ(qk + 1) for
/// 0 < q ≤ 1 and real z.
///
/// The power series is summed in extended precision until a term drops
/// below 1e-16 of the running sum. For large negative z, where the series
/// cancels catastrophically, the asymptotic expansion
/// E_q(z) ≈ -Σ_{k≥1} z^{-k} / Γ(1 - qk) is used instead. Throws
/// NumericalError when the series fails to converge within 1000 terms and
/// std::invalid_argument for q outside (0, 1].
double MittagLeffler(double q, double z);

}  // namespace fracsim
}  // namespace fomas
