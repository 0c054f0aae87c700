#include "dss/lmsss.hpp"

#include "dss/coupling_form.hpp"
#include "dss/factory.hpp"
#include "dss/solve_stats.hpp"

#include "stacked.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dss {

namespace {

using detail::Stacked;

// Factors the interface operator, recording the factorization and rejecting
// near-singular operators (condition number above 1e12).
Eigen::PartialPivLU<Mat> factor_interface(const Mat& w, const char* op) {
    Eigen::PartialPivLU<Mat> lu(w);
    solve_stats::record_factorization(static_cast<std::size_t>(w.rows()));
    if (!(lu.rcond() > 1e-12))
        throw std::runtime_error(std::string(op) +
                                 ": interface feed-through operator is singular "
                                 "or near-singular (condition number above 1e12)");
    return lu;
}

void require_displacement_components(const CouplingProblem& p, const char* op) {
    for (std::size_t i = 0; i < p.models.size(); ++i) {
        const StateSpaceModel& m = p.models[i];
        if (m.kind != OutputKind::Displacement)
            throw std::invalid_argument(std::string(op) + ": model " +
                                        std::to_string(i) +
                                        " is not a displacement model");
        if (m.D.size() > 0 && m.D.cwiseAbs().maxCoeff() != 0.0)
            throw std::invalid_argument(std::string(op) + ": model " +
                                        std::to_string(i) +
                                        " has non-zero displacement feed-through");
    }
}

struct AccelCoupling {
    Mat a_bar, b_bar, c_bar, d_bar;
    Mat bm_c, bm_d;  // B_M C_D and B_M D_D, reused for interface forces
    Eigen::PartialPivLU<Mat> lu;
    Stacked diag;
};

AccelCoupling couple_accel_pieces(const CouplingProblem& p, const char* op) {
    AccelCoupling out;
    out.diag = detail::stack_models(detail::as_acceleration(p.models, op));
    const Stacked& d = out.diag;
    if (p.pairing.pairs.empty()) {
        out.a_bar = d.A;
        out.b_bar = d.B;
        out.c_bar = d.C;
        out.d_bar = d.D;
        return out;
    }
    Mat bm = p.map.B_M.cast<double>();
    out.bm_c = bm * d.C;
    out.bm_d = bm * d.D;
    out.lu = factor_interface(out.bm_d * bm.transpose(), op);
    Mat g_c = out.lu.solve(out.bm_c);
    Mat g_d = out.lu.solve(out.bm_d);
    Mat b_bmt = d.B * bm.transpose();
    Mat d_bmt = d.D * bm.transpose();
    out.a_bar = d.A - b_bmt * g_c;
    out.b_bar = d.B - b_bmt * g_d;
    out.c_bar = d.C - d_bmt * g_c;
    out.d_bar = d.D - d_bmt * g_d;
    return out;
}

StateSpaceModel coupled_model(const CouplingProblem& p, OutputKind kind,
                              Mat a, Mat b, Mat c, Mat d,
                              const std::vector<StateTag>& tags,
                              const char* op) {
    StateSpaceModel m;
    m.kind = kind;
    m.inputs = p.map.column_labels;
    m.outputs = p.map.column_labels;
    m.state_tags = tags;
    m.A = std::move(a);
    m.B = std::move(b);
    m.C = std::move(c);
    m.D = std::move(d);
    ensure_valid(m, op);
    return m;
}

}  // namespace

CouplingProblem make_problem(std::vector<StateSpaceModel> models,
                             InterfacePairing pairing) {
    if (models.empty())
        throw std::invalid_argument("make_problem: no models given");
    CouplingProblem p;
    std::vector<std::vector<DofLabel>> dof_lists;
    Index so = 0, doff = 0;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const StateSpaceModel& m = models[i];
        ensure_valid(m, "make_problem: model " + std::to_string(i));
        if (m.kind != models.front().kind)
            throw std::invalid_argument(
                "make_problem: models mix output kinds (" +
                to_string(models.front().kind) + " vs " + to_string(m.kind) + ")");
        if (m.inputs.size() != m.outputs.size())
            throw std::invalid_argument("make_problem: model " + std::to_string(i) +
                                        " is not collocated");
        for (std::size_t k = 0; k < m.inputs.size(); ++k)
            if (!m.inputs[k].same_dof(m.outputs[k]))
                throw std::invalid_argument(
                    "make_problem: model " + std::to_string(i) +
                    " is not collocated (input " + std::to_string(k) +
                    " differs from output " + std::to_string(k) + ")");
        p.state_offset.push_back(so);
        p.dof_offset.push_back(doff);
        so += m.n();
        doff += m.n_out();
        dof_lists.push_back(m.outputs);
    }
    p.map = build_mapping(dof_lists, pairing);
    p.models = std::move(models);
    p.pairing = std::move(pairing);
    return p;
}

StateSpaceModel couple_accel(const CouplingProblem& p) {
    AccelCoupling pieces = couple_accel_pieces(p, "couple_accel");
    return coupled_model(p, OutputKind::Acceleration, std::move(pieces.a_bar),
                         std::move(pieces.b_bar), std::move(pieces.c_bar),
                         std::move(pieces.d_bar), pieces.diag.tags,
                         "couple_accel");
}

StateSpaceModel couple_disp(const CouplingProblem& p) {
    require_displacement_components(p, "couple_disp");
    Stacked d = detail::stack_models(p.models);
    if (p.pairing.pairs.empty())
        return coupled_model(p, OutputKind::Displacement, std::move(d.A),
                             std::move(d.B), std::move(d.C), std::move(d.D),
                             d.tags, "couple_disp");

    Mat bm = p.map.B_M.cast<double>();
    Mat ca = d.C * d.A;
    Mat w = ca * d.B;  // acceleration feed-through of the stacked model
    auto lu = factor_interface(bm * w * bm.transpose(), "couple_disp");
    Mat caa = ca * d.A;
    Mat g_caa = lu.solve(bm * caa);
    Mat g_w = lu.solve(bm * w);
    Mat g_c = lu.solve(bm * d.C);
    Mat b_bmt = d.B * bm.transpose();
    Mat w_bmt = w * bm.transpose();

    Mat a_bar = d.A - b_bmt * g_caa;
    Mat b_bar = d.B - b_bmt * g_w;
    Mat c_bar = d.C - w_bmt * g_c;

    // The coupled feed-through vanishes identically; verify the closed form
    // and emit an exact zero.
    Mat d_closed = (w - w_bmt * g_w) - c_bar * a_bar * b_bar;
    double scale = std::max(w.cwiseAbs().maxCoeff(), 1.0);
    if (d_closed.cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::runtime_error(
            "couple_disp: coupled displacement feed-through did not vanish");
    Mat d_bar = Mat::Zero(d.D.rows(), d.D.cols());
    return coupled_model(p, OutputKind::Displacement, std::move(a_bar),
                         std::move(b_bar), std::move(c_bar), std::move(d_bar),
                         d.tags, "couple_disp");
}

StateSpaceModel couple_vel(const CouplingProblem& p) {
    require_displacement_components(p, "couple_vel");
    Stacked d = detail::stack_models(p.models);
    Mat ca = d.C * d.A;
    Mat cb = d.C * d.B;
    if (p.pairing.pairs.empty())
        return coupled_model(p, OutputKind::Velocity, std::move(d.A),
                             std::move(d.B), std::move(ca), std::move(cb),
                             d.tags, "couple_vel");

    Mat bm = p.map.B_M.cast<double>();
    Mat w = ca * d.B;
    auto lu = factor_interface(bm * w * bm.transpose(), "couple_vel");
    Mat caa = ca * d.A;
    Mat b_bmt = d.B * bm.transpose();
    Mat w_bmt = w * bm.transpose();

    Mat a_bar = d.A - b_bmt * lu.solve(bm * caa);
    Mat b_bar = d.B - b_bmt * lu.solve(bm * w);
    Mat c_bar = ca - w_bmt * lu.solve(bm * ca);
    Mat d_bar = cb - w_bmt * lu.solve(bm * cb);
    return coupled_model(p, OutputKind::Velocity, std::move(a_bar),
                         std::move(b_bar), std::move(c_bar), std::move(d_bar),
                         d.tags, "couple_vel");
}

StateSpaceModel retain_unique_dofs(const StateSpaceModel& coupled,
                                   const InterfaceMap& map) {
    ensure_valid(coupled, "retain_unique_dofs");
    if (coupled.outputs.size() != map.column_labels.size() ||
        coupled.inputs.size() != map.column_labels.size())
        throw std::invalid_argument(
            "retain_unique_dofs: model size does not match the interface map");
    for (std::size_t i = 0; i < map.column_labels.size(); ++i)
        if (!coupled.outputs[i].same_dof(map.column_labels[i]))
            throw std::invalid_argument(
                "retain_unique_dofs: model DOF order does not match the map at "
                "index " + std::to_string(i));

    Mat l_pinv = boolean_pinv(map.L);
    StateSpaceModel out = coupled;
    out.B = coupled.B * l_pinv.transpose();
    out.C = l_pinv * coupled.C;
    out.D = l_pinv * coupled.D * l_pinv.transpose();
    out.inputs = map.unique_labels;
    out.outputs = map.unique_labels;
    ensure_valid(out, "retain_unique_dofs");
    return out;
}

StateSpaceModel decouple(const StateSpaceModel& assembly,
                         const StateSpaceModel& removed,
                         const InterfacePairing& pairing,
                         const std::vector<DofLabel>& keep,
                         const DecoupleOptions& options) {
    auto to_accel_if_needed = [](const StateSpaceModel& m, const char* role) {
        if (m.kind == OutputKind::Acceleration) return m;
        if (m.kind == OutputKind::Displacement) return to_acceleration(m);
        throw std::invalid_argument(std::string("decouple: ") + role +
                                    " must be an acceleration or displacement "
                                    "model");
    };
    StateSpaceModel asm_accel = to_accel_if_needed(assembly, "assembly");
    StateSpaceModel rem_accel = to_accel_if_needed(removed, "removed model");

    // The removed copy gets a distinct component id so labels stay globally
    // unique when decoupling a component from its own assembly.
    for (DofLabel& l : rem_accel.inputs) l.component += "#rm";
    for (DofLabel& l : rem_accel.outputs) l.component += "#rm";

    InterfacePairing resolved;
    for (std::size_t i = 0; i < pairing.pairs.size(); ++i) {
        InterfacePair pair = pairing.pairs[i];
        if (find_dof(asm_accel.outputs, pair.a) < 0)
            throw std::invalid_argument("decouple: pair " + std::to_string(i) +
                                        " side a: DOF " + to_string(pair.a) +
                                        " not found in the assembly");
        pair.b.component += "#rm";
        resolved.pairs.push_back(pair);
    }

    CouplingProblem p = make_problem(
        {std::move(asm_accel), negative_form(rem_accel)}, std::move(resolved));
    StateSpaceModel coupled = couple_accel(p);
    StateSpaceModel retained = retain_unique_dofs(coupled, p.map);

    if (options.coupling_form_reduction) {
        StateReductionMap reduction = build_state_reduction(
            {&p.models[0], &p.models[1]}, p.pairing);
        retained = reduce_minimal(retained, reduction);
    }

    std::vector<Index> rows;
    for (const DofLabel& l : keep) {
        Index i = find_dof(retained.outputs, l);
        if (i < 0)
            throw std::invalid_argument("decouple: keep DOF " + to_string(l) +
                                        " not present after decoupling");
        rows.push_back(i);
    }
    StateSpaceModel out = retained;
    out.B = Mat::Zero(retained.n(), static_cast<Index>(rows.size()));
    out.C = Mat::Zero(static_cast<Index>(rows.size()), retained.n());
    out.D = Mat::Zero(static_cast<Index>(rows.size()), static_cast<Index>(rows.size()));
    out.inputs.clear();
    out.outputs.clear();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.B.col(static_cast<Index>(i)) = retained.B.col(rows[i]);
        out.C.row(static_cast<Index>(i)) = retained.C.row(rows[i]);
        for (std::size_t j = 0; j < rows.size(); ++j)
            out.D(static_cast<Index>(i), static_cast<Index>(j)) =
                retained.D(rows[i], rows[j]);
        out.outputs.push_back(retained.outputs[static_cast<std::size_t>(rows[i])]);
        out.inputs.push_back(retained.inputs[static_cast<std::size_t>(rows[i])]);
    }
    ensure_valid(out, "decouple");
    return out;
}

FrfMatrix interface_forces_frf(const CouplingProblem& p,
                               const std::vector<double>& freq_hz) {
    if (p.pairing.pairs.empty())
        throw std::invalid_argument("interface_forces_frf: no pairs to report");
    AccelCoupling pieces = couple_accel_pieces(p, "interface_forces_frf");

    FrfMatrix f;
    f.kind = ResponseKind::DynamicStiffness;  // force-valued outputs
    f.freq_hz = freq_hz;
    f.inputs = p.map.column_labels;
    for (const InterfacePair& pair : p.pairing.pairs) {
        DofLabel l;
        l.component = "lambda";
        l.node = pair.a.component + "." + pair.a.node;
        l.direction = pair.a.direction;
        l.kind = DofKind::Interface;
        f.outputs.push_back(l);
    }

    const Index n = pieces.a_bar.rows();
    const CMat a_bar = pieces.a_bar.cast<std::complex<double>>();
    const CMat b_bar = pieces.b_bar.cast<std::complex<double>>();
    for (double fr : freq_hz) {
        std::complex<double> s(0.0, 2.0 * M_PI * fr);
        CMat resolvent = CMat::Identity(n, n) * s - a_bar;
        Eigen::PartialPivLU<CMat> lu(resolvent);
        CMat x = lu.solve(b_bar);
        if (!x.allFinite())
            throw std::runtime_error(
                "interface_forces_frf: coupled resolvent is singular at " +
                std::to_string(fr) + " Hz");
        CMat rhs = pieces.bm_c.cast<std::complex<double>>() * x +
                   pieces.bm_d.cast<std::complex<double>>();
        // Real factorization applied to real and imaginary parts separately.
        Mat lam_re = pieces.lu.solve(rhs.real());
        Mat lam_im = pieces.lu.solve(rhs.imag());
        f.H.push_back(lam_re.cast<std::complex<double>>() +
                      std::complex<double>(0.0, 1.0) *
                          lam_im.cast<std::complex<double>>());
    }
    ensure_valid(f, "interface_forces_frf");
    return f;
}

StabilitySummary stability_summary(const StateSpaceModel& m) {
    StabilitySummary s;
    if (m.n() == 0) return s;
    Eigen::EigenSolver<Mat> eig(m.A, false);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("stability_summary: eigenvalue solver failed");
    s.max_real_part = eig.eigenvalues().real().maxCoeff();
    for (Index i = 0; i < m.n(); ++i)
        if (eig.eigenvalues()(i).real() > 0.0) ++s.right_half_plane_poles;
    return s;
}

}  // namespace dss
