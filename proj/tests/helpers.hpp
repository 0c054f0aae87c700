#pragma once

// Shared fixtures for the unit tests: small hand-built mechanical systems and
// an FRF deviation metric written with plain loops, independent of the
// comparison module under test.

#include "dss/factory.hpp"
#include "dss/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dss::test {

inline DofLabel dof(std::string component, std::string node,
                    DofKind kind = DofKind::Internal) {
    return DofLabel{std::move(component), std::move(node), Direction::Scalar,
                    kind};
}

/// Single oscillator m q'' + c q' + k q = f.
inline MechanicalSystem sdof(double m, double c, double k, DofLabel label) {
    MechanicalSystem sys;
    sys.dofs = {std::move(label)};
    sys.M = Mat::Constant(1, 1, m);
    sys.V = Mat::Constant(1, 1, c);
    sys.K = Mat::Constant(1, 1, k);
    return sys;
}

/// Chain of point masses named n1..nN: link i sits between masses i and i+1,
/// an optional ground spring anchors the first mass.
struct ChainSpec {
    std::vector<double> masses;
    std::vector<double> link_k;  // one per adjacent mass pair
    std::vector<double> link_c;
    double ground_k = 0.0;
    double ground_c = 0.0;
};

inline MechanicalSystem chain(const std::string& component,
                              const ChainSpec& s) {
    if (s.link_k.size() + 1 != s.masses.size() ||
        s.link_c.size() != s.link_k.size())
        throw std::logic_error("chain: inconsistent spec");
    const Index n = static_cast<Index>(s.masses.size());
    MechanicalSystem sys;
    sys.M = Mat::Zero(n, n);
    sys.V = Mat::Zero(n, n);
    sys.K = Mat::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        sys.M(i, i) = s.masses[static_cast<std::size_t>(i)];
        sys.dofs.push_back(dof(component, "n" + std::to_string(i + 1)));
    }
    sys.K(0, 0) += s.ground_k;
    sys.V(0, 0) += s.ground_c;
    for (Index i = 0; i + 1 < n; ++i) {
        double k = s.link_k[static_cast<std::size_t>(i)];
        double c = s.link_c[static_cast<std::size_t>(i)];
        sys.K(i, i) += k;
        sys.K(i + 1, i + 1) += k;
        sys.K(i, i + 1) -= k;
        sys.K(i + 1, i) -= k;
        sys.V(i, i) += c;
        sys.V(i + 1, i + 1) += c;
        sys.V(i, i + 1) -= c;
        sys.V(i + 1, i) -= c;
    }
    return sys;
}

/// Worst entrywise |a - b| / max(|a|, |b|, floor) over two FRFs that already
/// share grid and label order, with the floor pinned to 1e-12 of the largest
/// magnitude across both so anti-resonances do not dominate.
inline double max_rel_dev(const FrfMatrix& a, const FrfMatrix& b) {
    if (a.H.size() != b.H.size())
        throw std::logic_error("max_rel_dev: frequency counts differ");
    double global = 0.0;
    for (const CMat& h : a.H)
        global = std::max(global, h.size() ? h.cwiseAbs().maxCoeff() : 0.0);
    for (const CMat& h : b.H)
        global = std::max(global, h.size() ? h.cwiseAbs().maxCoeff() : 0.0);
    const double floor_mag = 1e-12 * global;
    double worst = 0.0;
    for (std::size_t k = 0; k < a.H.size(); ++k) {
        if (a.H[k].rows() != b.H[k].rows() || a.H[k].cols() != b.H[k].cols())
            throw std::logic_error("max_rel_dev: shapes differ");
        for (Index i = 0; i < a.H[k].rows(); ++i) {
            for (Index j = 0; j < a.H[k].cols(); ++j) {
                double num = std::abs(a.H[k](i, j) - b.H[k](i, j));
                double den = std::max(
                    {std::abs(a.H[k](i, j)), std::abs(b.H[k](i, j)), floor_mag});
                if (den > 0.0) worst = std::max(worst, num / den);
            }
        }
    }
    return worst;
}

inline double max_abs(const Mat& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Coarse version of the default grid, dense enough to cross every resonance
/// of the bundled example while keeping unit tests quick.
inline std::vector<double> coarse_grid() {
    return frequency_grid(20.0, 500.0, 5.0);
}

}  // namespace dss::test
