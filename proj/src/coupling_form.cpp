#include "dss/coupling_form.hpp"

#include "dss/factory.hpp"

#include <Eigen/SVD>

#include <stdexcept>
#include <string>
#include <utility>

namespace dss {

namespace {

// Orthonormal rows spanning the nullspace of k (empty when k has full column
// rank).
Mat nullspace_rows(const Mat& k) {
    if (k.rows() == 0) return Mat::Identity(k.cols(), k.cols());
    Eigen::JacobiSVD<Mat> svd(k, Eigen::ComputeFullV);
    Index rank = svd.rank();
    return svd.matrixV().rightCols(k.cols() - rank).transpose();
}

struct PartitionedPieces {
    StateSpaceModel model;  // interface-first reordering of the input
    Index n_j = 0;
    Mat c_j;      // interface rows of C
    Mat b_j;      // interface columns of B
    Mat c_stack;  // [C_J * A; C_J]
};

PartitionedPieces prepare(const StateSpaceModel& m,
                          const std::vector<DofLabel>& interface,
                          const char* op) {
    if (m.kind != OutputKind::Displacement)
        throw std::invalid_argument(std::string(op) +
                                    ": expects a displacement model");
    if (m.D.size() > 0 && m.D.cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument(std::string(op) +
                                    ": displacement feed-through must be zero");
    if (interface.empty())
        throw std::invalid_argument(std::string(op) + ": no interface DOFs given");
    PartitionedPieces pp;
    pp.model = partition_interface_first(m, interface).model;
    pp.n_j = static_cast<Index>(interface.size());
    if (2 * pp.n_j > pp.model.n())
        throw std::invalid_argument(std::string(op) +
                                    ": model has fewer states than twice the "
                                    "interface size");
    pp.c_j = pp.model.C.topRows(pp.n_j);
    pp.b_j = pp.model.B.leftCols(pp.n_j);
    pp.c_stack.resize(2 * pp.n_j, pp.model.n());
    pp.c_stack.topRows(pp.n_j) = pp.c_j * pp.model.A;
    pp.c_stack.bottomRows(pp.n_j) = pp.c_j;
    return pp;
}

CouplingFormResult apply_transform(CouplingFormKind kind,
                                   const PartitionedPieces& pp, Mat n_block,
                                   double ncf_residual, const char* op) {
    const Index n = pp.model.n();
    const Index n_j = pp.n_j;
    CouplingFormResult res;
    res.transform.kind = kind;
    res.transform.N_block = n_block;
    res.transform.ncf_residual = ncf_residual;
    res.transform.T.resize(n, n);
    res.transform.T.topRows(2 * n_j) = pp.c_stack;
    res.transform.T.bottomRows(n - 2 * n_j) = n_block;

    Eigen::JacobiSVD<Mat> svd(res.transform.T,
                              Eigen::ComputeThinU | Eigen::ComputeThinV);
    Index rank = svd.rank();
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(n - 1);
    res.transform.condition_number = smin > 0.0 ? smax / smin
                                                : std::numeric_limits<double>::infinity();
    if (rank < n) {
        res.ok = false;
        res.diagnostic = std::string(op) +
                         ": transformation matrix is rank deficient (rank " +
                         std::to_string(rank) + " of " + std::to_string(n) + ")";
        return res;
    }

    Eigen::PartialPivLU<Mat> lu(res.transform.T);
    StateSpaceModel out = pp.model;
    // A' = T A T^-1 and C' = C T^-1 via two solves with T^T. One refinement
    // pass per solve recovers accuracy lost to uneven row scaling; the stacked
    // rows [C_J A; C_J] differ in norm by the magnitude of A for non-physical
    // input bases.
    Mat t_t = res.transform.T.transpose();
    Mat ta_t = (res.transform.T * pp.model.A).transpose();
    Mat at = lu.transpose().solve(ta_t);
    Mat da = lu.transpose().solve(Mat(ta_t - t_t * at));
    at += da;
    out.A = at.transpose();
    out.B = res.transform.T * pp.model.B;
    Mat c_t = pp.model.C.transpose();
    Mat ct = lu.transpose().solve(c_t);
    Mat dc = lu.transpose().solve(Mat(c_t - t_t * ct));
    ct += dc;
    out.C = ct.transpose();
    out.state_tags.assign(static_cast<std::size_t>(n), StateTag::Internal);
    for (Index i = 0; i < n_j; ++i) {
        out.state_tags[static_cast<std::size_t>(i)] = StateTag::DerivInterfaceOutput;
        out.state_tags[static_cast<std::size_t>(n_j + i)] = StateTag::InterfaceOutput;
    }
    ensure_valid(out, op);
    res.ok = true;
    res.model = std::move(out);
    return res;
}

}  // namespace

CouplingFormResult ucf_transform(const StateSpaceModel& m,
                                 const std::vector<DofLabel>& interface) {
    PartitionedPieces pp = prepare(m, interface, "ucf_transform");
    Mat n_block = nullspace_rows(pp.c_stack);
    return apply_transform(CouplingFormKind::Ucf, pp, std::move(n_block), 0.0,
                           "ucf_transform");
}

CouplingFormResult sacf_transform(const StateSpaceModel& m,
                                  const std::vector<DofLabel>& interface) {
    PartitionedPieces pp = prepare(m, interface, "sacf_transform");
    // Internal rows orthogonal to the interface input directions and their
    // images under A, so transformed internal states receive no interface
    // input and no feedback from the derivative states.
    Mat reach(pp.model.n(), 2 * pp.n_j);
    reach.leftCols(pp.n_j) = pp.b_j;
    reach.rightCols(pp.n_j) = pp.model.A * pp.b_j;
    Mat n_block = nullspace_rows(reach.transpose());
    return apply_transform(CouplingFormKind::Sacf, pp, std::move(n_block), 0.0,
                           "sacf_transform");
}

CouplingFormResult ncf_transform(const StateSpaceModel& m,
                                 const std::vector<DofLabel>& interface) {
    PartitionedPieces pp = prepare(m, interface, "ncf_transform");
    Mat n_c = nullspace_rows(pp.c_stack);
    Mat n_b = nullspace_rows(pp.b_j.transpose());
    // Project the output-complement rows onto the input-complement subspace;
    // the projection residual measures how far the two subspaces are from
    // coinciding.
    Mat n_block = (n_c * n_b.transpose()) * n_b;
    Mat residual = n_c - n_block;
    double mu = residual.size() > 0 ? residual.cwiseAbs().maxCoeff() : 0.0;
    return apply_transform(CouplingFormKind::Ncf, pp, std::move(n_block), mu,
                           "ncf_transform");
}

StateSpaceModel reduce_minimal(const StateSpaceModel& coupled,
                               const StateReductionMap& reduction) {
    ensure_valid(coupled, "reduce_minimal");
    if (coupled.n() != reduction.L_T.rows())
        throw std::invalid_argument(
            "reduce_minimal: state count does not match the reduction map (" +
            std::to_string(coupled.n()) + " vs " +
            std::to_string(reduction.L_T.rows()) + ")");
    Mat l_t = reduction.L_T.cast<double>();
    Mat l_pinv = boolean_pinv(reduction.L_T);
    StateSpaceModel out = coupled;
    out.A = l_pinv * coupled.A * l_t;
    out.B = l_pinv * coupled.B;
    out.C = coupled.C * l_t;
    out.state_tags.clear();
    for (Index k : reduction.kept_states)
        out.state_tags.push_back(coupled.state_tags[static_cast<std::size_t>(k)]);
    ensure_valid(out, "reduce_minimal");
    return out;
}

std::string to_string(CouplingFormKind kind) {
    switch (kind) {
        case CouplingFormKind::Ucf: return "ucf";
        case CouplingFormKind::Sacf: return "sacf";
        case CouplingFormKind::Ncf: return "ncf";
    }
    return "ucf";
}

}  // namespace dss
