#pragma once

#include "dss/types.hpp"

#include <cstdint>
#include <vector>

namespace dss {

/// Additive complex Gaussian noise: independent real and imaginary parts of
/// standard deviation sigma on every FRF entry, reproducible from seed.
struct NoiseSpec {
    double sigma = 5e-3;
    std::uint64_t seed = 0;
};

/// First-order realization of M q'' + V q' + K q = f with states [q'; q],
/// collocated force inputs and responses at every DOF of the system.
StateSpaceModel build_model(const MechanicalSystem& sys, OutputKind kind);

/// Rewrites the output equation of a displacement model to acceleration
/// (C <- C A A, D <- D + C A B). States, A and B are untouched.
StateSpaceModel to_acceleration(const StateSpaceModel& disp_model);

/// Rewrites the output equation of a displacement model to velocity
/// (C <- C A, D <- C B).
StateSpaceModel to_velocity(const StateSpaceModel& disp_model);

/// Negates B and D of an acceleration model, the form used to remove a
/// substructure during decoupling. Involutive.
StateSpaceModel negative_form(const StateSpaceModel& accel_model);

/// Similarity transform to a real block-diagonal state matrix (one 2x2 block
/// per complex pole pair, 1x1 blocks for isolated real poles; repeated real
/// poles share a block). Eigenvalues and FRFs are preserved; state tags are
/// reset to Internal since transformed states have no physical meaning.
StateSpaceModel to_modal_form(const StateSpaceModel& m);

/// Evaluates H(w) = C (iwI - A)^-1 B + D over the grid (Hz).
FrfMatrix synth_frf(const StateSpaceModel& m, const std::vector<double>& freq_hz);

/// Adds NoiseSpec noise to every entry of the FRF.
FrfMatrix perturb_frf(const FrfMatrix& f, const NoiseSpec& noise);

/// Result of reordering inputs/outputs so the given interface DOFs come
/// first. perm maps new position -> old position (same for inputs and
/// outputs on collocated models; separate otherwise).
struct PartitionedModel {
    StateSpaceModel model;
    std::vector<Index> output_perm;
    std::vector<Index> input_perm;
};

/// Stable reorder: the listed interface DOFs first (in list order, with kind
/// promoted to Interface), remaining DOFs after them in original order.
PartitionedModel partition_interface_first(const StateSpaceModel& m,
                                           const std::vector<DofLabel>& interface);

/// Uniform grid [fmin, fmax] with step df (inclusive of fmax within half a
/// step).
std::vector<double> frequency_grid(double fmin, double fmax, double df);

}  // namespace dss
