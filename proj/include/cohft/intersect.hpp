#pragma once

#include <map>
#include <vector>

#include "cohft/scalar.hpp"

namespace cohft {

struct IntersectCaps {
  int gMax = 2;
  int pointsMax = 8;   // n + number of forgotten points
  int degreeMax = 12;  // total psi/kappa degree
};

/// Sorted multiset of kappa indices -> coefficient. Index 0 stands for kappa_0 = 2g - 2 + n.
using KappaPoly = std::map<std::vector<int>, Scalar>;

/// <tau_{k_1} ... tau_{k_n}>_g for the point, via the DVV recursion. Memoized.
Scalar psi_correlator(int g, std::vector<int> powers, const IntersectCaps& caps = {});

/// (n-3)! / prod k_j!  for sum k_j = n - 3.
Scalar genus0_closed_form(const std::vector<int>& powers);

/// The kappa polynomial P with (p_m)_* prod_j psi_{n+j}^{c_j} = P, obtained by
/// forgetting one point at a time (requires every c_j >= 1).
KappaPoly kappa_pushforward(const std::vector<int>& extraPowers);

/// Integral over the (g, n) space of prod psi_i^{a_i} * prod kappa_{b}.
Scalar kappa_integral(int g, std::vector<int> ancestorPowers, std::vector<int> kappaIndices,
                      const IntersectCaps& caps = {});

/// Integral of prod psi^{a} * (p_m)_*(prod psi_{extra}^{c}); every c_j >= 2.
Scalar mixed_integral(int g, const std::vector<int>& ancestorPowers, const std::vector<int>& extraPowers,
                      const IntersectCaps& caps = {});

}  // namespace cohft
