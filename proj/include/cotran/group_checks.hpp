#pragma once

#include "cotran/group.hpp"
#include "cotran/report.hpp"

namespace cotran {

// Distance from the identity of the ordered product of letter maps along
// relation word `relation_index`, started at base point `eta`.  Plain
// operator norm (the products are identity-scale by construction).
double relation_residual(const GroupHandle& g, const std::vector<GeneratorMap>& maps, int dim,
                         std::size_t relation_index, const GroupElement& eta);

// For every relation word p and every base point eta in the window, forms the
// ordered product of letter maps along p starting at eta and records the
// worst distance from the identity.
VerificationReport check_preserves_relations(const GroupHandle& g,
                                             const std::vector<GeneratorMap>& maps, int dim,
                                             const std::vector<GroupElement>& window,
                                             double tol);

}  // namespace cotran
