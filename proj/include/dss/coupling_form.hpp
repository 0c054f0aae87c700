#pragma once

#include "dss/interface_map.hpp"
#include "dss/types.hpp"

#include <string>
#include <vector>

namespace dss {

enum class CouplingFormKind { Ucf, Sacf, Ncf };

/// Record of a coupling-form change of state coordinates z = T x. The first
/// n_J rows of T are C^J A, the next n_J rows are C^J, the rest is N_block.
struct CouplingFormTransform {
    CouplingFormKind kind = CouplingFormKind::Ucf;
    Mat T;
    Mat N_block;
    double condition_number = 0.0;
    /// NCF only: max |entry| of the projection residual of the output-side
    /// nullspace onto the input-side nullspace. Zero means NCF is exact.
    double ncf_residual = 0.0;
};

/// Transformed model plus transform record. `ok` is false only for the NCF
/// route when the assembled transform is rank deficient; the diagnostic then
/// explains which directions were lost.
struct CouplingFormResult {
    bool ok = true;
    std::string diagnostic;
    StateSpaceModel model;
    CouplingFormTransform transform;
};

/// Unconstrained coupling form: N_block spans the nullspace of the stacked
/// observation rows [C^J A; C^J], so T is always full rank when C^J has full
/// row rank. Works on displacement models; interface DOFs are moved first.
CouplingFormResult ucf_transform(const StateSpaceModel& disp_model,
                                 const std::vector<DofLabel>& interface);

/// Structured coupling form: N_block spans the left nullspace of
/// [B^J, A B^J], which simultaneously removes the interface inputs from the
/// internal state equations and decouples them from the first state block.
CouplingFormResult sacf_transform(const StateSpaceModel& disp_model,
                                  const std::vector<DofLabel>& interface);

/// Combined form: projects the output-side nullspace onto the input-side
/// one. Only valid when the projection loses no rank; otherwise the result
/// carries ok = false plus diagnostics instead of throwing.
CouplingFormResult ncf_transform(const StateSpaceModel& disp_model,
                                 const std::vector<DofLabel>& interface);

/// Removes the duplicated interface states of a coupled model built from
/// coupling-form components: A <- pinv(L_T) A L_T, B <- pinv(L_T) B,
/// C <- C L_T. The result has n - 2*n_pairs states and identical FRFs.
StateSpaceModel reduce_minimal(const StateSpaceModel& coupled,
                               const StateReductionMap& reduction);

std::string to_string(CouplingFormKind k);

}  // namespace dss
