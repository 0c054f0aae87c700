#include "dss/factory.hpp"

#include <lapacke.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace dss {

namespace {

struct SchurBlock {
    Index start = 0;
    Index size = 1;
    std::complex<double> eig;  // representative eigenvalue (positive imag part)
};

// Diagonal 1x1/2x2 blocks of a canonical real Schur matrix. dgees/dtrexc
// keep exact zeros on the subdiagonal outside 2x2 blocks, so an exact test
// is safe here.
std::vector<SchurBlock> detect_blocks(const Mat& t) {
    std::vector<SchurBlock> blocks;
    const Index n = t.rows();
    Index i = 0;
    while (i < n) {
        SchurBlock blk;
        blk.start = i;
        if (i + 1 < n && t(i + 1, i) != 0.0) {
            blk.size = 2;
            double re = 0.5 * (t(i, i) + t(i + 1, i + 1));
            double prod = t(i, i + 1) * t(i + 1, i);
            double im = prod < 0.0 ? std::sqrt(-prod) : 0.0;
            blk.eig = {re, im};
        } else {
            blk.size = 1;
            blk.eig = {t(i, i), 0.0};
        }
        blocks.push_back(blk);
        i += blk.size;
    }
    return blocks;
}

bool key_less(const SchurBlock& a, const SchurBlock& b) {
    double ma = std::abs(a.eig), mb = std::abs(b.eig);
    if (ma != mb) return ma < mb;
    if (a.eig.real() != b.eig.real()) return a.eig.real() < b.eig.real();
    return std::abs(a.eig.imag()) < std::abs(b.eig.imag());
}

std::vector<std::complex<double>> block_eigs(const SchurBlock& b) {
    if (b.size == 1) return {b.eig};
    return {b.eig, std::conj(b.eig)};
}

double cluster_distance(const std::vector<std::complex<double>>& a,
                        const std::vector<std::complex<double>>& b) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& x : a)
        for (const auto& y : b) d = std::min(d, std::abs(x - y));
    return d;
}

}  // namespace

StateSpaceModel to_modal_form(const StateSpaceModel& m) {
    ensure_valid(m, "to_modal_form");
    const Index n = m.n();
    if (n == 0) return m;

    Mat t = m.A;
    Mat q(n, n);
    std::vector<double> wr(static_cast<std::size_t>(n));
    std::vector<double> wi(static_cast<std::size_t>(n));
    lapack_int sdim = 0;
    lapack_int ln = static_cast<lapack_int>(n);
    lapack_int info = LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, ln,
                                    t.data(), ln, &sdim, wr.data(), wi.data(),
                                    q.data(), ln);
    if (info != 0)
        throw std::runtime_error("to_modal_form: Schur decomposition failed");

    // Order the diagonal blocks by ascending |eig| (then real part) so equal
    // and conjugate poles end up adjacent and the result is reproducible.
    Index pos = 0;
    while (pos < n) {
        auto blocks = detect_blocks(t);
        const SchurBlock* best = nullptr;
        for (const SchurBlock& blk : blocks) {
            if (blk.start < pos) continue;
            if (!best || key_less(blk, *best)) best = &blk;
        }
        if (best->start != pos) {
            lapack_int ifst = static_cast<lapack_int>(best->start) + 1;
            lapack_int ilst = static_cast<lapack_int>(pos) + 1;
            info = LAPACKE_dtrexc(LAPACK_COL_MAJOR, 'V', ln, t.data(), ln,
                                  q.data(), ln, &ifst, &ilst);
            if (info != 0)
                throw std::runtime_error(
                    "to_modal_form: eigenvalue reordering failed");
        }
        pos += (pos + 1 < n && t(pos + 1, pos) != 0.0) ? 2 : 1;
    }

    // Group blocks whose eigenvalues (nearly) coincide: repeated poles, such
    // as the rigid-body pair of a free-floating component, are defective and
    // must stay inside one diagonal block.
    const double thr = 1e-6 * std::max(t.cwiseAbs().maxCoeff(), 1.0);
    auto blocks = detect_blocks(t);
    struct Cluster {
        Index start = 0;
        Index size = 0;
        std::vector<std::complex<double>> eigs;
    };
    std::vector<Cluster> clusters;
    for (const SchurBlock& blk : blocks) {
        auto eigs = block_eigs(blk);
        if (!clusters.empty() &&
            cluster_distance(clusters.back().eigs, eigs) < thr) {
            clusters.back().size += blk.size;
            clusters.back().eigs.insert(clusters.back().eigs.end(), eigs.begin(),
                                        eigs.end());
        } else {
            clusters.push_back(Cluster{blk.start, blk.size, eigs});
        }
    }

    // Kill the coupling between each cluster and everything below it:
    // for T = [T11 T12; 0 T22], S = [I X; 0 I] block-diagonalizes T when
    // T11 X - X T22 = -T12.
    Mat s = Mat::Identity(n, n);
    Index off = 0;
    for (std::size_t c = 0; c + 1 < clusters.size(); ++c) {
        const Index p = clusters[c].size;
        const Index r = n - off - p;
        Mat a11 = t.block(off, off, p, p);
        Mat a22 = t.block(off + p, off + p, r, r);
        Mat rhs = -t.block(off, off + p, p, r);
        double scale = 0.0;
        info = LAPACKE_dtrsyl(LAPACK_COL_MAJOR, 'N', 'N', -1,
                              static_cast<lapack_int>(p),
                              static_cast<lapack_int>(r), a11.data(),
                              static_cast<lapack_int>(p), a22.data(),
                              static_cast<lapack_int>(r), rhs.data(),
                              static_cast<lapack_int>(p), &scale);
        if (info != 0 || !(scale > 1e-100))
            throw std::runtime_error(
                "to_modal_form: eigenvalue clusters could not be separated "
                "(state matrix too close to non-diagonalizable)");
        Mat x = rhs / scale;
        if (!x.allFinite())
            throw std::runtime_error(
                "to_modal_form: cluster separation overflowed");
        Mat si = Mat::Identity(n, n);
        si.block(off, off + p, p, r) = x;
        s = s * si;
        off += p;
    }

    StateSpaceModel out = m;
    out.state_tags.assign(static_cast<std::size_t>(n), StateTag::Internal);
    out.A = Mat::Zero(n, n);
    for (const Cluster& c : clusters)
        out.A.block(c.start, c.start, c.size, c.size) =
            t.block(c.start, c.start, c.size, c.size);
    out.B = s.triangularView<Eigen::Upper>().solve(q.transpose() * m.B);
    out.C = (m.C * q) * s;
    out.D = m.D;
    return out;
}

}  // namespace dss
