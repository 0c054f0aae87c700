#pragma once

#include "dss/types.hpp"

#include <utility>
#include <vector>

namespace dss {

/// One compatibility condition: DOF `a` of one model moves together with DOF
/// `b` of another. `sign` = -1 flips the orientation of the condition, which
/// must leave all coupled responses unchanged.
struct InterfacePair {
    DofLabel a;
    DofLabel b;
    int sign = +1;
};

struct InterfacePairing {
    std::vector<InterfacePair> pairs;
};

/// Signed Boolean compatibility map over the concatenated DOF list of all
/// models, together with the Boolean nullspace basis L used to retain one
/// DOF per pair (B_M * L == 0 exactly, in integer arithmetic).
struct InterfaceMap {
    IMat B_M;  ///< n_pairs x n_global, entries in {-1, 0, +1}
    IMat L;    ///< n_global x n_unique Boolean nullspace basis of B_M
    std::vector<DofLabel> column_labels;  ///< concatenated global DOF list
    std::vector<DofLabel> unique_labels;  ///< kept labels, one per L column
    /// Resolved (a, b) global column index per pair, in pairing order.
    std::vector<std::pair<Index, Index>> pair_columns;
    /// Global index of the kept DOF per L column.
    std::vector<Index> kept_columns;
};

/// Builds B_M and L from per-model DOF lists. Each pair keeps the DOF of the
/// model listed first (`a` side); unpaired DOFs keep their global order.
InterfaceMap build_mapping(const std::vector<std::vector<DofLabel>>& model_dofs,
                           const InterfacePairing& pairing);

/// Closed-form pseudoinverse (L^T L)^-1 L^T of a Boolean retention matrix;
/// L^T L is diagonal so entries are exact (1 or 1/2 for doubled columns).
Mat boolean_pinv(const IMat& L);

/// State-level compatibility map pairing the interface states of models that
/// are in coupling form: two rows per interface pair (derivative state and
/// output state), plus the Boolean nullspace L_T keeping the `a`-side states.
struct StateReductionMap {
    IMat B_T;  ///< 2*n_pairs x n_states_total
    IMat L_T;  ///< n_states_total x (n_states_total - 2*n_pairs)
    std::vector<Index> kept_states;
};

/// Derives the state pairing from the coupling-form tags of the models being
/// coupled. Every model owning a paired DOF must expose that DOF as one of
/// its leading interface outputs with matching Deriv/Output state tags.
StateReductionMap build_state_reduction(const std::vector<const StateSpaceModel*>& models,
                                        const InterfacePairing& pairing);

}  // namespace dss
