#pragma once

#include "dss/interface_map.hpp"
#include "dss/lmsss.hpp"
#include "dss/types.hpp"

#include <vector>

namespace dss {

/// Frequency-based coupling: per frequency,
/// Y_c = Y - Y B_M^T (B_M Y B_M^T)^-1 B_M Y on the block-diagonal FRF of the
/// components. With retain_unique the paired rows/columns collapse via the
/// Boolean pseudoinverse of L.
FrfMatrix lmfbs_couple(const std::vector<FrfMatrix>& frfs,
                       const InterfacePairing& pairing,
                       bool retain_unique);

/// Frequency-based decoupling: couples the assembly FRF with the negated
/// FRF of the removed component, retains the unique set and keeps the
/// requested DOFs.
FrfMatrix lmfbs_decouple(const FrfMatrix& assembly, const FrfMatrix& removed,
                         const InterfacePairing& pairing,
                         const std::vector<DofLabel>& keep);

/// Boolean interface-collection matrix of the classical primal method: one
/// row per coupled DOF with a 1 in every column of its interface group.
struct ClassicalCouplingMatrix {
    IMat T_SJ;  ///< n_pairs x n_interface_total
    std::vector<DofLabel> coupled_labels;    ///< one per row, `a`-side label
    std::vector<Index> interface_columns;    ///< global DOF index per column
};

ClassicalCouplingMatrix classical_interface_matrix(const CouplingProblem& p);

/// Classical state-space coupling on acceleration models partitioned into
/// interface/internal DOFs. Performs exactly two factorizations: the stacked
/// interface feed-through D^JJ and the collected operator
/// S = T_SJ (D^JJ)^-1 T_SJ^T. Output order: internal DOFs first, coupled
/// interface DOFs last.
StateSpaceModel classical_couple(const CouplingProblem& p);

/// Couples two models that are in structured coupling form by eliminating
/// the shared interface force between their leading state blocks. Produces
/// the minimal-order coupled model directly.
StateSpaceModel sjovall_couple(const StateSpaceModel& a,
                               const StateSpaceModel& b,
                               const InterfacePairing& pairing);

/// Z(w) = -w^2 H(w)^-1 for a square accelerance matrix. The throwing
/// overload names the first singular frequency; the marker overload records
/// failed frequencies and fills their entries with NaN instead.
FrfMatrix dynamic_stiffness(const FrfMatrix& accelerance);
FrfMatrix dynamic_stiffness(const FrfMatrix& accelerance,
                            std::vector<std::size_t>& failed_frequencies);

}  // namespace dss
