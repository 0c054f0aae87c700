#pragma once

#include "dss/interface_map.hpp"
#include "dss/types.hpp"

#include <vector>

namespace dss {

/// A set of models to couple plus the resolved interface mapping. Models must
/// be collocated (inputs and outputs are the same DOF list) and share one
/// output kind; every paired DOF resolves to exactly one model.
struct CouplingProblem {
    std::vector<StateSpaceModel> models;
    InterfacePairing pairing;
    InterfaceMap map;
    std::vector<Index> state_offset;  ///< per model, into the stacked state
    std::vector<Index> dof_offset;    ///< per model, into the global DOF list
};

CouplingProblem make_problem(std::vector<StateSpaceModel> models,
                             InterfacePairing pairing);

/// Couples acceleration models through rigid compatibility, eliminating the
/// interface forces analytically. Performs exactly one factorization of the
/// n_pairs x n_pairs interface operator B_M D B_M^T; its condition number
/// must stay below 1e12. Displacement inputs are converted on the fly.
StateSpaceModel couple_accel(const CouplingProblem& p);

/// Same coupling expressed on displacement models (feed-through must be
/// zero). The interface operator becomes C A B and the coupled feed-through
/// vanishes identically; it is set to exact zero after verifying the closed
/// form numerically.
StateSpaceModel couple_disp(const CouplingProblem& p);

/// Velocity-output variant built from displacement models; the coupled
/// feed-through C B is zero whenever the components obey Newton's second law.
StateSpaceModel couple_vel(const CouplingProblem& p);

/// Collapses each interface pair to a single DOF: B <- B pinv(L)^T,
/// C <- pinv(L) C, D <- pinv(L) D pinv(L)^T. Keeps the `a`-side label.
StateSpaceModel retain_unique_dofs(const StateSpaceModel& coupled,
                                   const InterfaceMap& map);

struct DecoupleOptions {
    /// When set, both models must be in coupling form; the duplicated
    /// interface states are removed so the result has minimal order.
    bool coupling_form_reduction = false;
};

/// Removes a substructure from an assembly model by coupling the assembly
/// with the negative form of the removed model, then retaining the unique
/// DOF set and selecting the requested rows/columns.
StateSpaceModel decouple(const StateSpaceModel& assembly,
                         const StateSpaceModel& removed,
                         const InterfacePairing& pairing,
                         const std::vector<DofLabel>& keep,
                         const DecoupleOptions& options = {});

/// Frequency response of the interface force vector (one output per pair)
/// to unit external inputs of the coupled problem.
FrfMatrix interface_forces_frf(const CouplingProblem& p,
                               const std::vector<double>& freq_hz);

/// Eigenvalue summary of a coupled model; reported, never altered.
struct StabilitySummary {
    double max_real_part = 0.0;
    int right_half_plane_poles = 0;
};

StabilitySummary stability_summary(const StateSpaceModel& m);

}  // namespace dss
