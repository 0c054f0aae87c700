#include "dss/compare.hpp"

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>

namespace dss {

namespace {

std::vector<Index> match_labels(const std::vector<DofLabel>& have,
                                const std::vector<DofLabel>& want,
                                const char* axis) {
    if (have.size() != want.size())
        throw std::invalid_argument(std::string("align_frf: ") + axis +
                                    " label counts differ (" +
                                    std::to_string(have.size()) + " vs " +
                                    std::to_string(want.size()) + ")");
    std::vector<Index> perm;
    for (const DofLabel& l : want) {
        Index i = find_dof(have, l);
        if (i < 0)
            throw std::invalid_argument(std::string("align_frf: ") + axis +
                                        " label " + to_string(l) +
                                        " not present");
        perm.push_back(i);
    }
    return perm;
}

}  // namespace

FrfMatrix align_frf(const FrfMatrix& f, const std::vector<DofLabel>& outputs,
                    const std::vector<DofLabel>& inputs) {
    std::vector<Index> rperm = match_labels(f.outputs, outputs, "output");
    std::vector<Index> cperm = match_labels(f.inputs, inputs, "input");
    FrfMatrix out;
    out.kind = f.kind;
    out.freq_hz = f.freq_hz;
    out.outputs = outputs;
    out.inputs = inputs;
    out.H.reserve(f.H.size());
    for (const CMat& h : f.H) {
        CMat p(h.rows(), h.cols());
        for (std::size_t i = 0; i < rperm.size(); ++i)
            for (std::size_t j = 0; j < cperm.size(); ++j)
                p(static_cast<Index>(i), static_cast<Index>(j)) =
                    h(rperm[i], cperm[j]);
        out.H.push_back(std::move(p));
    }
    return out;
}

ComparisonResult compare_frf(const FrfMatrix& a, const FrfMatrix& b,
                             double tolerance) {
    if (a.freq_hz != b.freq_hz)
        throw std::invalid_argument("compare_frf: frequency grids differ");
    FrfMatrix bb = align_frf(b, a.outputs, a.inputs);

    double global_max = 0.0;
    for (std::size_t k = 0; k < a.n_freq(); ++k) {
        global_max = std::max(global_max, a.H[k].cwiseAbs().maxCoeff());
        global_max = std::max(global_max, bb.H[k].cwiseAbs().maxCoeff());
    }
    double floor = 1e-12 * global_max;

    ComparisonResult r;
    r.tolerance = tolerance;
    for (std::size_t k = 0; k < a.n_freq(); ++k) {
        for (Index i = 0; i < a.H[k].rows(); ++i) {
            for (Index j = 0; j < a.H[k].cols(); ++j) {
                double ma = std::abs(a.H[k](i, j));
                double mb = std::abs(bb.H[k](i, j));
                double denom = std::max({ma, mb, floor});
                double err = denom > 0.0
                                 ? std::abs(a.H[k](i, j) - bb.H[k](i, j)) / denom
                                 : 0.0;
                if (err > r.max_rel_err) {
                    r.max_rel_err = err;
                    r.argmax_freq_hz = a.freq_hz[k];
                    r.argmax_out = a.outputs[static_cast<std::size_t>(i)];
                    r.argmax_in = a.inputs[static_cast<std::size_t>(j)];
                }
            }
        }
    }
    r.pass = r.max_rel_err <= tolerance;
    return r;
}

}  // namespace dss
