#pragma once

#include "dss/types.hpp"

namespace dss {

/// Worst-entry relative deviation between two FRFs on the same grid.
struct ComparisonResult {
    double max_rel_err = 0.0;
    double argmax_freq_hz = 0.0;
    DofLabel argmax_out;
    DofLabel argmax_in;
    double tolerance = 0.0;
    bool pass = false;
};

/// Entrywise |a - b| / max(|a|, |b|, floor) with
/// floor = 1e-12 * max |entry| over both FRFs, so deep anti-resonances do
/// not dominate. `b` is reordered to match the labels of `a`; grids must
/// match exactly.
ComparisonResult compare_frf(const FrfMatrix& a, const FrfMatrix& b, double tolerance);

/// Reorders rows/columns of `f` to the given label order (matched by
/// component/node/direction). Throws when the label sets differ.
FrfMatrix align_frf(const FrfMatrix& f, const std::vector<DofLabel>& outputs,
                    const std::vector<DofLabel>& inputs);

}  // namespace dss
