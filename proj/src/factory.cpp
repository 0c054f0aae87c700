#include "dss/factory.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace dss {

namespace {

void require_kind(const StateSpaceModel& m, OutputKind kind, const char* op) {
    if (m.kind != kind)
        throw std::invalid_argument(std::string(op) + " expects a " +
                                    to_string(kind) + " model, got " +
                                    to_string(m.kind));
}

ResponseKind response_kind_for(OutputKind kind) {
    switch (kind) {
        case OutputKind::Displacement: return ResponseKind::Receptance;
        case OutputKind::Velocity: return ResponseKind::Mobility;
        case OutputKind::Acceleration: return ResponseKind::Accelerance;
    }
    return ResponseKind::Accelerance;
}

std::vector<Index> partition_permutation(const std::vector<DofLabel>& labels,
                                         const std::vector<DofLabel>& interface,
                                         const char* which) {
    std::vector<bool> taken(labels.size(), false);
    std::vector<Index> perm;
    perm.reserve(labels.size());
    for (const DofLabel& l : interface) {
        Index i = find_dof(labels, l);
        if (i < 0)
            throw std::invalid_argument("interface DOF " + to_string(l) +
                                        " not found among " + which);
        if (taken[static_cast<std::size_t>(i)])
            throw std::invalid_argument("interface DOF " + to_string(l) +
                                        " listed twice");
        taken[static_cast<std::size_t>(i)] = true;
        perm.push_back(i);
    }
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!taken[i]) perm.push_back(static_cast<Index>(i));
    return perm;
}

}  // namespace

StateSpaceModel build_model(const MechanicalSystem& sys, OutputKind kind) {
    ensure_valid(sys, "build_model");
    const Index nd = sys.M.rows();
    Eigen::LLT<Mat> llt(sys.M);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("build_model: mass matrix singular");
    Mat minv = llt.solve(Mat::Identity(nd, nd));
    Mat minv_v = llt.solve(sys.V);
    Mat minv_k = llt.solve(sys.K);

    StateSpaceModel m;
    m.kind = kind;
    m.inputs = sys.dofs;
    m.outputs = sys.dofs;
    m.state_tags.assign(static_cast<std::size_t>(2 * nd), StateTag::Internal);

    m.A = Mat::Zero(2 * nd, 2 * nd);
    m.A.topLeftCorner(nd, nd) = -minv_v;
    m.A.topRightCorner(nd, nd) = -minv_k;
    m.A.bottomLeftCorner(nd, nd) = Mat::Identity(nd, nd);

    m.B = Mat::Zero(2 * nd, nd);
    m.B.topRows(nd) = minv;

    m.C = Mat::Zero(nd, 2 * nd);
    switch (kind) {
        case OutputKind::Displacement:
            m.C.rightCols(nd) = Mat::Identity(nd, nd);
            m.D = Mat::Zero(nd, nd);
            break;
        case OutputKind::Velocity:
            m.C.leftCols(nd) = Mat::Identity(nd, nd);
            m.D = Mat::Zero(nd, nd);
            break;
        case OutputKind::Acceleration:
            m.C = m.A.topRows(nd);
            m.D = minv;
            break;
    }
    return m;
}

StateSpaceModel to_acceleration(const StateSpaceModel& m) {
    require_kind(m, OutputKind::Displacement, "to_acceleration");
    ensure_valid(m, "to_acceleration");
    StateSpaceModel out = m;
    out.kind = OutputKind::Acceleration;
    Mat ca = m.C * m.A;
    out.C = ca * m.A;
    out.D = m.D + ca * m.B;
    return out;
}

StateSpaceModel to_velocity(const StateSpaceModel& m) {
    require_kind(m, OutputKind::Displacement, "to_velocity");
    ensure_valid(m, "to_velocity");
    StateSpaceModel out = m;
    out.kind = OutputKind::Velocity;
    out.C = m.C * m.A;
    out.D = m.C * m.B;
    return out;
}

StateSpaceModel negative_form(const StateSpaceModel& m) {
    require_kind(m, OutputKind::Acceleration, "negative_form");
    ensure_valid(m, "negative_form");
    StateSpaceModel out = m;
    out.B = -m.B;
    out.D = -m.D;
    return out;
}

FrfMatrix synth_frf(const StateSpaceModel& m, const std::vector<double>& freq_hz) {
    ensure_valid(m, "synth_frf");
    FrfMatrix f;
    f.kind = response_kind_for(m.kind);
    f.freq_hz = freq_hz;
    f.outputs = m.outputs;
    f.inputs = m.inputs;
    f.H.reserve(freq_hz.size());

    const Index n = m.n();
    const CMat a = m.A.cast<std::complex<double>>();
    const CMat b = m.B.cast<std::complex<double>>();
    for (double fr : freq_hz) {
        std::complex<double> s(0.0, 2.0 * M_PI * fr);
        CMat resolvent = CMat::Identity(n, n) * s - a;
        Eigen::PartialPivLU<CMat> lu(resolvent);
        CMat x = lu.solve(b);
        if (!x.allFinite() || lu.rcond() < 1e-15)
            throw std::runtime_error("synth_frf: (iwI - A) is singular at " +
                                     std::to_string(fr) + " Hz");
        f.H.push_back(m.C * x + m.D.cast<std::complex<double>>());
    }
    ensure_valid(f, "synth_frf");
    return f;
}

FrfMatrix perturb_frf(const FrfMatrix& f, const NoiseSpec& noise) {
    ensure_valid(f, "perturb_frf");
    if (noise.sigma < 0.0)
        throw std::invalid_argument("perturb_frf: sigma must be non-negative");
    FrfMatrix out = f;
    if (noise.sigma == 0.0) return out;
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> gauss(0.0, noise.sigma);
    for (CMat& h : out.H) {
        for (Index i = 0; i < h.rows(); ++i) {
            for (Index j = 0; j < h.cols(); ++j) {
                double re = gauss(rng);
                double im = gauss(rng);
                h(i, j) += std::complex<double>(re, im);
            }
        }
    }
    return out;
}

PartitionedModel partition_interface_first(const StateSpaceModel& m,
                                           const std::vector<DofLabel>& interface) {
    ensure_valid(m, "partition_interface_first");
    PartitionedModel result;
    result.output_perm = partition_permutation(m.outputs, interface, "outputs");
    result.input_perm = partition_permutation(m.inputs, interface, "inputs");

    StateSpaceModel& out = result.model;
    out = m;
    const Index no = m.n_out();
    const Index ni = m.n_in();
    for (Index i = 0; i < no; ++i) {
        Index src = result.output_perm[static_cast<std::size_t>(i)];
        out.C.row(i) = m.C.row(src);
        out.D.row(i) = m.D.row(src);
        out.outputs[static_cast<std::size_t>(i)] = m.outputs[static_cast<std::size_t>(src)];
        if (i < static_cast<Index>(interface.size()))
            out.outputs[static_cast<std::size_t>(i)].kind = DofKind::Interface;
    }
    Mat d_rows = out.D;
    for (Index j = 0; j < ni; ++j) {
        Index src = result.input_perm[static_cast<std::size_t>(j)];
        out.B.col(j) = m.B.col(src);
        out.D.col(j) = d_rows.col(src);
        out.inputs[static_cast<std::size_t>(j)] = m.inputs[static_cast<std::size_t>(src)];
        if (j < static_cast<Index>(interface.size()))
            out.inputs[static_cast<std::size_t>(j)].kind = DofKind::Interface;
    }
    return result;
}

std::vector<double> frequency_grid(double fmin, double fmax, double df) {
    if (!(df > 0.0) || !(fmax >= fmin) || fmin < 0.0)
        throw std::invalid_argument("frequency_grid: need 0 <= fmin <= fmax and df > 0");
    std::vector<double> grid;
    for (Index k = 0;; ++k) {
        double f = fmin + static_cast<double>(k) * df;
        if (f > fmax + 0.5 * df) break;
        grid.push_back(f);
    }
    return grid;
}

}  // namespace dss
