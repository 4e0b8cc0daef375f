#pragma once

// Built-in quantum groups.

#include <string>
#include <vector>

#include "qpb/hopf.hpp"

namespace qpb {

/// Laurent polynomials in z, z⁻¹ (generators "z", "zi"), z grouplike, z* = z⁻¹.
HopfPtr make_u1();

/// Functions on a finite group given by its multiplication table; element 0
/// must be the neutral element. Generators "d<g>", with d0 expressed through
/// the others so that the normal words are 1 and d<g> for g ≠ 0.
HopfPtr make_finite_group(const std::string& name, const std::vector<std::vector<int>>& table);

/// Functions on ℤ_n.
HopfPtr make_cyclic(int n);

/// Functions on the symmetric group S3 (elements ordered e, (12), (23), (13), (123), (132)).
HopfPtr make_s3();

/// Polynomial functions on SU_q(2); generators "gamma", "gamma*", "alpha",
/// "alpha*" in this order, fundamental matrix u = [[α, −qγ*], [γ, α*]].
HopfPtr make_su_q_2();

/// Entries of the su_q_2 fundamental matrix, row-major.
std::vector<std::vector<AlgElement>> su_q_2_fundamental(const HopfStructure& h);

/// Accepts "u1", "su_q_2", "s3", "cyclic(n)" or "cyclicN".
HopfPtr make_preset(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace qpb
