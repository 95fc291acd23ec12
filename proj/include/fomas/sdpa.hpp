#pragma once

#include <ostream>
#include <string>

#include "fomas/lmi.hpp"

namespace fomas {
namespace lmi {

/// Writes the equality-eliminated max-t problem in SDPA sparse format:
/// decision vector (z, t), objective min -t, one block per constraint with
/// F_0 = F_k0 and F_i = -F_ki so that Σ F_i y_i - F_0 ⪰ 0. Entries are
/// 1-based and upper triangular. The radius bound used by Solve() is not
/// part of the export.
void WriteSdpa(const Problem& p, std::ostream& os);
std::string ToSdpa(const Problem& p);

}  // namespace lmi
}  // namespace fomas
