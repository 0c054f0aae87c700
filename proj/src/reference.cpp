#include "dss/reference.hpp"

#include "dss/factory.hpp"
#include "dss/solve_stats.hpp"

#include "stacked.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace dss {

namespace {

void require_collocated_frf(const FrfMatrix& f, const char* op,
                            std::size_t index) {
    if (f.outputs.size() != f.inputs.size())
        throw std::invalid_argument(std::string(op) + ": FRF " +
                                    std::to_string(index) + " is not square");
    for (std::size_t i = 0; i < f.outputs.size(); ++i)
        if (!f.outputs[i].same_dof(f.inputs[i]))
            throw std::invalid_argument(
                std::string(op) + ": FRF " + std::to_string(index) +
                " is not collocated at index " + std::to_string(i));
}

void require_same_grid(const FrfMatrix& a, const FrfMatrix& b, const char* op) {
    if (a.freq_hz != b.freq_hz)
        throw std::invalid_argument(std::string(op) +
                                    ": frequency grids do not match");
    if (a.kind != b.kind)
        throw std::invalid_argument(std::string(op) +
                                    ": response kinds do not match (" +
                                    to_string(a.kind) + " vs " +
                                    to_string(b.kind) + ")");
}

}  // namespace

FrfMatrix lmfbs_couple(const std::vector<FrfMatrix>& frfs,
                       const InterfacePairing& pairing, bool retain_unique) {
    if (frfs.empty())
        throw std::invalid_argument("lmfbs_couple: no FRFs given");
    std::vector<std::vector<DofLabel>> dof_lists;
    Index total = 0;
    for (std::size_t i = 0; i < frfs.size(); ++i) {
        ensure_valid(frfs[i], "lmfbs_couple: FRF " + std::to_string(i));
        require_collocated_frf(frfs[i], "lmfbs_couple", i);
        require_same_grid(frfs.front(), frfs[i], "lmfbs_couple");
        dof_lists.push_back(frfs[i].outputs);
        total += static_cast<Index>(frfs[i].outputs.size());
    }
    InterfaceMap map = build_mapping(dof_lists, pairing);

    CMat bm = map.B_M.cast<double>().cast<std::complex<double>>();
    CMat l_pinv =
        boolean_pinv(map.L).cast<std::complex<double>>();

    FrfMatrix out;
    out.kind = frfs.front().kind;
    out.freq_hz = frfs.front().freq_hz;
    out.outputs = retain_unique ? map.unique_labels : map.column_labels;
    out.inputs = out.outputs;
    out.H.reserve(frfs.front().n_freq());

    for (std::size_t k = 0; k < frfs.front().n_freq(); ++k) {
        CMat y = CMat::Zero(total, total);
        Index off = 0;
        for (const FrfMatrix& f : frfs) {
            Index nd = static_cast<Index>(f.outputs.size());
            y.block(off, off, nd, nd) = f.H[k];
            off += nd;
        }
        CMat yc = y;
        if (!pairing.pairs.empty()) {
            CMat bmy = bm * y;
            Eigen::PartialPivLU<CMat> lu(bmy * bm.transpose());
            CMat g = lu.solve(bmy);
            if (!g.allFinite())
                throw std::runtime_error(
                    "lmfbs_couple: interface operator is singular at " +
                    std::to_string(frfs.front().freq_hz[k]) + " Hz");
            yc -= y * bm.transpose() * g;
        }
        if (retain_unique)
            out.H.push_back(l_pinv * yc * l_pinv.transpose());
        else
            out.H.push_back(std::move(yc));
    }
    ensure_valid(out, "lmfbs_couple");
    return out;
}

FrfMatrix lmfbs_decouple(const FrfMatrix& assembly, const FrfMatrix& removed,
                         const InterfacePairing& pairing,
                         const std::vector<DofLabel>& keep) {
    ensure_valid(assembly, "lmfbs_decouple: assembly");
    ensure_valid(removed, "lmfbs_decouple: removed FRF");
    require_same_grid(assembly, removed, "lmfbs_decouple");

    FrfMatrix negated = removed;
    for (DofLabel& l : negated.outputs) l.component += "#rm";
    for (DofLabel& l : negated.inputs) l.component += "#rm";
    for (CMat& h : negated.H) h = -h;

    InterfacePairing resolved;
    for (std::size_t i = 0; i < pairing.pairs.size(); ++i) {
        InterfacePair pair = pairing.pairs[i];
        if (find_dof(assembly.outputs, pair.a) < 0)
            throw std::invalid_argument("lmfbs_decouple: pair " +
                                        std::to_string(i) + " side a: DOF " +
                                        to_string(pair.a) +
                                        " not found in the assembly");
        if (find_dof(removed.outputs, pair.b) < 0)
            throw std::invalid_argument("lmfbs_decouple: pair " +
                                        std::to_string(i) + " side b: DOF " +
                                        to_string(pair.b) +
                                        " not found in the removed FRF");
        pair.b.component += "#rm";
        resolved.pairs.push_back(pair);
    }

    FrfMatrix coupled = lmfbs_couple({assembly, negated}, resolved, true);

    std::vector<Index> rows;
    for (const DofLabel& l : keep) {
        Index i = find_dof(coupled.outputs, l);
        if (i < 0)
            throw std::invalid_argument("lmfbs_decouple: keep DOF " +
                                        to_string(l) +
                                        " not present after decoupling");
        rows.push_back(i);
    }
    FrfMatrix out;
    out.kind = coupled.kind;
    out.freq_hz = coupled.freq_hz;
    for (Index r : rows) {
        out.outputs.push_back(coupled.outputs[static_cast<std::size_t>(r)]);
        out.inputs.push_back(coupled.inputs[static_cast<std::size_t>(r)]);
    }
    for (const CMat& h : coupled.H) {
        CMat sel(rows.size(), rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < rows.size(); ++j)
                sel(static_cast<Index>(i), static_cast<Index>(j)) =
                    h(rows[i], rows[j]);
        out.H.push_back(std::move(sel));
    }
    ensure_valid(out, "lmfbs_decouple");
    return out;
}

ClassicalCouplingMatrix classical_interface_matrix(const CouplingProblem& p) {
    ClassicalCouplingMatrix cm;
    std::vector<Index> cols;
    for (const auto& [a, b] : p.map.pair_columns) {
        cols.push_back(a);
        cols.push_back(b);
    }
    std::sort(cols.begin(), cols.end());
    cm.interface_columns = cols;
    std::map<Index, Index> local;
    for (std::size_t i = 0; i < cols.size(); ++i)
        local[cols[i]] = static_cast<Index>(i);

    const Index n_pairs = static_cast<Index>(p.pairing.pairs.size());
    cm.T_SJ = IMat::Zero(n_pairs, static_cast<Index>(cols.size()));
    for (Index i = 0; i < n_pairs; ++i) {
        const auto& [a, b] = p.map.pair_columns[static_cast<std::size_t>(i)];
        cm.T_SJ(i, local[a]) = 1;
        cm.T_SJ(i, local[b]) = p.pairing.pairs[static_cast<std::size_t>(i)].sign;
        DofLabel l = p.map.column_labels[static_cast<std::size_t>(a)];
        l.kind = DofKind::Interface;
        cm.coupled_labels.push_back(l);
    }
    return cm;
}

StateSpaceModel classical_couple(const CouplingProblem& p) {
    detail::Stacked d =
        detail::stack_models(detail::as_acceleration(p.models, "classical_couple"));
    if (p.pairing.pairs.empty()) {
        StateSpaceModel m;
        m.kind = OutputKind::Acceleration;
        m.inputs = d.labels;
        m.outputs = d.labels;
        m.state_tags = d.tags;
        m.A = std::move(d.A);
        m.B = std::move(d.B);
        m.C = std::move(d.C);
        m.D = std::move(d.D);
        ensure_valid(m, "classical_couple");
        return m;
    }

    ClassicalCouplingMatrix cm = classical_interface_matrix(p);
    const Index n = d.A.rows();
    const Index n_total = static_cast<Index>(d.labels.size());
    const Index n_pairs = static_cast<Index>(p.pairing.pairs.size());
    const Index n_jj = static_cast<Index>(cm.interface_columns.size());

    std::vector<Index> internal_cols;
    {
        std::vector<bool> is_interface(static_cast<std::size_t>(n_total), false);
        for (Index c : cm.interface_columns)
            is_interface[static_cast<std::size_t>(c)] = true;
        for (Index c = 0; c < n_total; ++c)
            if (!is_interface[static_cast<std::size_t>(c)])
                internal_cols.push_back(c);
    }
    const Index n_int = static_cast<Index>(internal_cols.size());

    auto rows_of = [&](const Mat& m, const std::vector<Index>& idx) {
        Mat out(static_cast<Index>(idx.size()), m.cols());
        for (std::size_t i = 0; i < idx.size(); ++i)
            out.row(static_cast<Index>(i)) = m.row(idx[i]);
        return out;
    };
    auto cols_of = [&](const Mat& m, const std::vector<Index>& idx) {
        Mat out(m.rows(), static_cast<Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i)
            out.col(static_cast<Index>(i)) = m.col(idx[i]);
        return out;
    };

    Mat c_j = rows_of(d.C, cm.interface_columns);
    Mat c_i = rows_of(d.C, internal_cols);
    Mat b_j = cols_of(d.B, cm.interface_columns);
    Mat b_i = cols_of(d.B, internal_cols);
    Mat d_jj = cols_of(rows_of(d.D, cm.interface_columns), cm.interface_columns);
    Mat d_ji = cols_of(rows_of(d.D, cm.interface_columns), internal_cols);
    Mat d_ij = cols_of(rows_of(d.D, internal_cols), cm.interface_columns);
    Mat d_ii = cols_of(rows_of(d.D, internal_cols), internal_cols);

    // First factorization: the stacked interface feed-through block.
    Eigen::PartialPivLU<Mat> lu_djj(d_jj);
    solve_stats::record_factorization(static_cast<std::size_t>(n_jj));
    if (!(lu_djj.rcond() > 1e-12))
        throw std::runtime_error(
            "classical_couple: interface feed-through block is singular or "
            "near-singular (condition number above 1e12)");

    Mat t = cm.T_SJ.cast<double>();
    Mat x = lu_djj.solve(t.transpose());  // (D^JJ)^-1 T^T

    // Second factorization: the collected interface operator.
    Eigen::PartialPivLU<Mat> lu_s(t * x);
    solve_stats::record_factorization(static_cast<std::size_t>(n_pairs));
    if (!(lu_s.rcond() > 1e-12))
        throw std::runtime_error(
            "classical_couple: collected interface operator is singular or "
            "near-singular (condition number above 1e12)");

    Mat z_c = lu_djj.solve(c_j);
    Mat z_d = lu_djj.solve(d_ji);
    Mat c_q = lu_s.solve(t * z_c);             // coupled acceleration from x
    Mat d_q_int = lu_s.solve(t * z_d);         // ... from internal forces
    Mat s_inv = lu_s.solve(Mat::Identity(n_pairs, n_pairs));

    // Interface force recovery u^J = F_x x + F_i u^I + F_q f_q.
    Mat f_x = x * c_q - z_c;
    Mat f_i = x * d_q_int - z_d;
    Mat f_q = x * s_inv;

    StateSpaceModel out;
    out.kind = OutputKind::Acceleration;
    out.state_tags = d.tags;
    out.A = d.A + b_j * f_x;
    out.B = Mat::Zero(n, n_int + n_pairs);
    out.B.leftCols(n_int) = b_i + b_j * f_i;
    out.B.rightCols(n_pairs) = b_j * f_q;
    out.C = Mat::Zero(n_int + n_pairs, n);
    out.C.topRows(n_int) = c_i + d_ij * f_x;
    out.C.bottomRows(n_pairs) = c_q;
    out.D = Mat::Zero(n_int + n_pairs, n_int + n_pairs);
    out.D.topLeftCorner(n_int, n_int) = d_ii + d_ij * f_i;
    out.D.topRightCorner(n_int, n_pairs) = d_ij * f_q;
    out.D.bottomLeftCorner(n_pairs, n_int) = d_q_int;
    out.D.bottomRightCorner(n_pairs, n_pairs) = s_inv;
    for (Index c : internal_cols)
        out.outputs.push_back(d.labels[static_cast<std::size_t>(c)]);
    out.outputs.insert(out.outputs.end(), cm.coupled_labels.begin(),
                       cm.coupled_labels.end());
    out.inputs = out.outputs;
    ensure_valid(out, "classical_couple");
    return out;
}

namespace {

struct SacfBlocks {
    Index n_j = 0, n_w = 0;
    Mat a_vv, a_vd, a_vi;   // derivative-state rows of A
    Mat a_wd, a_ww;         // internal-state rows of A
    Mat b_vv, b_vi, b_wi;   // input blocks
    Mat c_iv, c_id, c_iw;   // internal output rows
};

SacfBlocks read_sacf(const StateSpaceModel& m, Index n_j, const char* which) {
    std::string who = std::string("sjovall_couple: ") + which;
    ensure_valid(m, who);
    if (m.kind != OutputKind::Displacement)
        throw std::invalid_argument(who + " is not a displacement model");
    if (m.D.size() > 0 && m.D.cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument(who + " has non-zero feed-through");
    if (m.inputs.size() != m.outputs.size())
        throw std::invalid_argument(who + " is not collocated");
    if (m.n() < 2 * n_j || static_cast<Index>(m.outputs.size()) < n_j)
        throw std::invalid_argument(who + " is too small for the pairing");
    for (Index i = 0; i < n_j; ++i) {
        if (m.state_tags[static_cast<std::size_t>(i)] !=
                StateTag::DerivInterfaceOutput ||
            m.state_tags[static_cast<std::size_t>(n_j + i)] !=
                StateTag::InterfaceOutput)
            throw std::invalid_argument(
                who + " does not carry coupling-form state tags");
    }

    const Index n = m.n();
    const Index n_w = n - 2 * n_j;
    const Index n_i = static_cast<Index>(m.outputs.size()) - n_j;
    double a_scale = std::max(m.A.cwiseAbs().maxCoeff(), 1.0);
    double b_scale = std::max(m.B.cwiseAbs().maxCoeff(), 1.0);

    // Structural zeros of the coupling form, up to transform round-off: the
    // output-state rows integrate the derivative states and take no input,
    // and the internal rows are decoupled from both derivative states and
    // interface inputs.
    Mat d_rows_a = m.A.middleRows(n_j, n_j);
    Mat expect = Mat::Zero(n_j, n);
    expect.leftCols(n_j) = Mat::Identity(n_j, n_j);
    if ((d_rows_a - expect).cwiseAbs().maxCoeff() > 1e-8 * a_scale)
        throw std::invalid_argument(who + " is not in coupling form "
                                    "(output states do not integrate the "
                                    "derivative states)");
    if (m.B.middleRows(n_j, n_j).cwiseAbs().maxCoeff() > 1e-8 * b_scale)
        throw std::invalid_argument(who + " is not in coupling form "
                                    "(output states receive direct input)");
    if (n_w > 0 &&
        m.A.bottomRows(n_w).leftCols(n_j).cwiseAbs().maxCoeff() > 1e-8 * a_scale)
        throw std::invalid_argument(who + " is not in structured coupling form "
                                    "(internal states depend on the derivative "
                                    "states)");
    if (n_w > 0 &&
        m.B.bottomRows(n_w).leftCols(n_j).cwiseAbs().maxCoeff() > 1e-8 * b_scale)
        throw std::invalid_argument(who + " is not in structured coupling form "
                                    "(internal states receive interface input)");

    SacfBlocks b;
    b.n_j = n_j;
    b.n_w = n_w;
    b.a_vv = m.A.topLeftCorner(n_j, n_j);
    b.a_vd = m.A.block(0, n_j, n_j, n_j);
    b.a_vi = m.A.topRightCorner(n_j, n_w);
    b.a_wd = m.A.block(2 * n_j, n_j, n_w, n_j);
    b.a_ww = m.A.bottomRightCorner(n_w, n_w);
    b.b_vv = m.B.topLeftCorner(n_j, n_j);
    b.b_vi = m.B.topRightCorner(n_j, n_i);
    b.b_wi = m.B.bottomRightCorner(n_w, n_i);
    b.c_iv = m.C.bottomRows(n_i).leftCols(n_j);
    b.c_id = m.C.bottomRows(n_i).middleCols(n_j, n_j);
    b.c_iw = m.C.bottomRows(n_i).rightCols(n_w);
    return b;
}

}  // namespace

StateSpaceModel sjovall_couple(const StateSpaceModel& a,
                               const StateSpaceModel& b,
                               const InterfacePairing& pairing) {
    if (pairing.pairs.empty())
        throw std::invalid_argument("sjovall_couple: no pairs given");
    const Index n_j = static_cast<Index>(pairing.pairs.size());
    for (std::size_t i = 0; i < pairing.pairs.size(); ++i) {
        const InterfacePair& pair = pairing.pairs[i];
        if (pair.sign != +1)
            throw std::invalid_argument(
                "sjovall_couple: negative-orientation pairs are not supported");
        if (static_cast<std::size_t>(find_dof(a.outputs, pair.a)) != i)
            throw std::invalid_argument(
                "sjovall_couple: pair " + std::to_string(i) + " side a: DOF " +
                to_string(pair.a) +
                " must be leading output " + std::to_string(i));
        if (static_cast<std::size_t>(find_dof(b.outputs, pair.b)) != i)
            throw std::invalid_argument(
                "sjovall_couple: pair " + std::to_string(i) + " side b: DOF " +
                to_string(pair.b) +
                " must be leading output " + std::to_string(i));
    }
    SacfBlocks alpha = read_sacf(a, n_j, "first model");
    SacfBlocks beta = read_sacf(b, n_j, "second model");

    Eigen::PartialPivLU<Mat> gamma(alpha.b_vv + beta.b_vv);
    solve_stats::record_factorization(static_cast<std::size_t>(n_j));
    if (!(gamma.rcond() > 1e-12))
        throw std::runtime_error(
            "sjovall_couple: combined interface input operator is singular or "
            "near-singular (condition number above 1e12)");

    const Index n_ia = static_cast<Index>(a.outputs.size()) - n_j;
    const Index n_ib = static_cast<Index>(b.outputs.size()) - n_j;
    const Index n = 2 * n_j + alpha.n_w + beta.n_w;
    const Index nd = n_j + n_ia + n_ib;

    Mat a_c = Mat::Zero(n, n);
    // Derivative-state row: each side's equation scaled by the other side's
    // interface input map, summed through the combined operator.
    a_c.block(0, 0, n_j, n_j) =
        alpha.b_vv * gamma.solve(beta.a_vv) + beta.b_vv * gamma.solve(alpha.a_vv);
    a_c.block(0, n_j, n_j, n_j) =
        alpha.b_vv * gamma.solve(beta.a_vd) + beta.b_vv * gamma.solve(alpha.a_vd);
    a_c.block(0, 2 * n_j, n_j, alpha.n_w) = beta.b_vv * gamma.solve(alpha.a_vi);
    a_c.block(0, 2 * n_j + alpha.n_w, n_j, beta.n_w) =
        alpha.b_vv * gamma.solve(beta.a_vi);
    a_c.block(n_j, 0, n_j, n_j) = Mat::Identity(n_j, n_j);
    a_c.block(2 * n_j, n_j, alpha.n_w, n_j) = alpha.a_wd;
    a_c.block(2 * n_j, 2 * n_j, alpha.n_w, alpha.n_w) = alpha.a_ww;
    a_c.block(2 * n_j + alpha.n_w, n_j, beta.n_w, n_j) = beta.a_wd;
    a_c.block(2 * n_j + alpha.n_w, 2 * n_j + alpha.n_w, beta.n_w, beta.n_w) =
        beta.a_ww;

    Mat b_c = Mat::Zero(n, nd);
    b_c.block(0, 0, n_j, n_j) = alpha.b_vv * gamma.solve(beta.b_vv);
    b_c.block(0, n_j, n_j, n_ia) = beta.b_vv * gamma.solve(alpha.b_vi);
    b_c.block(0, n_j + n_ia, n_j, n_ib) = alpha.b_vv * gamma.solve(beta.b_vi);
    b_c.block(2 * n_j, n_j, alpha.n_w, n_ia) = alpha.b_wi;
    b_c.block(2 * n_j + alpha.n_w, n_j + n_ia, beta.n_w, n_ib) = beta.b_wi;

    Mat c_c = Mat::Zero(nd, n);
    c_c.block(0, n_j, n_j, n_j) = Mat::Identity(n_j, n_j);
    c_c.block(n_j, 0, n_ia, n_j) = alpha.c_iv;
    c_c.block(n_j, n_j, n_ia, n_j) = alpha.c_id;
    c_c.block(n_j, 2 * n_j, n_ia, alpha.n_w) = alpha.c_iw;
    c_c.block(n_j + n_ia, 0, n_ib, n_j) = beta.c_iv;
    c_c.block(n_j + n_ia, n_j, n_ib, n_j) = beta.c_id;
    c_c.block(n_j + n_ia, 2 * n_j + alpha.n_w, n_ib, beta.n_w) = beta.c_iw;

    StateSpaceModel out;
    out.kind = OutputKind::Displacement;
    for (Index i = 0; i < n_j; ++i) {
        DofLabel l = a.outputs[static_cast<std::size_t>(i)];
        l.kind = DofKind::Interface;
        out.outputs.push_back(l);
    }
    out.outputs.insert(out.outputs.end(), a.outputs.begin() + n_j, a.outputs.end());
    out.outputs.insert(out.outputs.end(), b.outputs.begin() + n_j, b.outputs.end());
    out.inputs = out.outputs;
    out.state_tags.assign(static_cast<std::size_t>(n), StateTag::Internal);
    for (Index i = 0; i < n_j; ++i) {
        out.state_tags[static_cast<std::size_t>(i)] = StateTag::DerivInterfaceOutput;
        out.state_tags[static_cast<std::size_t>(n_j + i)] = StateTag::InterfaceOutput;
    }
    out.A = std::move(a_c);
    out.B = std::move(b_c);
    out.C = std::move(c_c);
    out.D = Mat::Zero(nd, nd);
    ensure_valid(out, "sjovall_couple");
    return out;
}

namespace {

FrfMatrix dynamic_stiffness_impl(const FrfMatrix& accelerance,
                                 std::vector<std::size_t>* failed) {
    ensure_valid(accelerance, "dynamic_stiffness");
    if (accelerance.kind != ResponseKind::Accelerance)
        throw std::invalid_argument(
            "dynamic_stiffness: expects accelerance data, got " +
            to_string(accelerance.kind));
    require_collocated_frf(accelerance, "dynamic_stiffness", 0);

    const Index nd = static_cast<Index>(accelerance.outputs.size());
    FrfMatrix out;
    out.kind = ResponseKind::DynamicStiffness;
    out.freq_hz = accelerance.freq_hz;
    out.outputs = accelerance.outputs;
    out.inputs = accelerance.inputs;
    out.H.reserve(accelerance.n_freq());
    for (std::size_t k = 0; k < accelerance.n_freq(); ++k) {
        double w = 2.0 * M_PI * accelerance.freq_hz[k];
        Eigen::PartialPivLU<CMat> lu(accelerance.H[k]);
        CMat z = lu.solve(CMat::Identity(nd, nd)) * (-w * w);
        bool ok = z.allFinite() && lu.rcond() > 1e-14;
        if (!ok) {
            if (!failed)
                throw std::runtime_error(
                    "dynamic_stiffness: accelerance matrix is singular at " +
                    std::to_string(accelerance.freq_hz[k]) + " Hz (index " +
                    std::to_string(k) + ")");
            failed->push_back(k);
            z = CMat::Constant(nd, nd,
                               std::complex<double>(
                                   std::numeric_limits<double>::quiet_NaN(),
                                   std::numeric_limits<double>::quiet_NaN()));
        }
        out.H.push_back(std::move(z));
    }
    return out;
}

}  // namespace

FrfMatrix dynamic_stiffness(const FrfMatrix& accelerance) {
    return dynamic_stiffness_impl(accelerance, nullptr);
}

FrfMatrix dynamic_stiffness(const FrfMatrix& accelerance,
                            std::vector<std::size_t>& failed_frequencies) {
    failed_frequencies.clear();
    return dynamic_stiffness_impl(accelerance, &failed_frequencies);
}

}  // namespace dss
