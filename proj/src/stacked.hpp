#pragma once

// Internal helpers shared by the time-domain coupling routines. Not part of
// the public headers.

#include "dss/factory.hpp"
#include "dss/types.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace dss::detail {

/// Block-diagonal concatenation of a model set over the global DOF list.
struct Stacked {
    Mat A, B, C, D;
    std::vector<DofLabel> labels;
    std::vector<StateTag> tags;
};

inline Stacked stack_models(const std::vector<StateSpaceModel>& models) {
    Index n = 0, nd = 0;
    for (const StateSpaceModel& m : models) {
        n += m.n();
        nd += m.n_out();
    }
    Stacked s;
    s.A = Mat::Zero(n, n);
    s.B = Mat::Zero(n, nd);
    s.C = Mat::Zero(nd, n);
    s.D = Mat::Zero(nd, nd);
    Index so = 0, doff = 0;
    for (const StateSpaceModel& m : models) {
        s.A.block(so, so, m.n(), m.n()) = m.A;
        s.B.block(so, doff, m.n(), m.n_in()) = m.B;
        s.C.block(doff, so, m.n_out(), m.n()) = m.C;
        s.D.block(doff, doff, m.n_out(), m.n_in()) = m.D;
        s.labels.insert(s.labels.end(), m.outputs.begin(), m.outputs.end());
        s.tags.insert(s.tags.end(), m.state_tags.begin(), m.state_tags.end());
        so += m.n();
        doff += m.n_out();
    }
    return s;
}

inline std::vector<StateSpaceModel> as_acceleration(
    const std::vector<StateSpaceModel>& models, const char* op) {
    std::vector<StateSpaceModel> out;
    out.reserve(models.size());
    for (const StateSpaceModel& m : models) {
        if (m.kind == OutputKind::Acceleration)
            out.push_back(m);
        else if (m.kind == OutputKind::Displacement)
            out.push_back(to_acceleration(m));
        else
            throw std::invalid_argument(
                std::string(op) +
                ": velocity models cannot be coupled directly; supply "
                "displacement or acceleration models");
    }
    return out;
}

}  // namespace dss::detail
