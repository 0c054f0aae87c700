#include "dss/example.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace dss {

namespace {

constexpr const char* kComponentA = "A";
constexpr const char* kComponentB = "B";

Index node_index(const std::vector<std::string>& dofs, const std::string& node) {
    auto it = std::find(dofs.begin(), dofs.end(), node);
    return it == dofs.end() ? -1 : static_cast<Index>(it - dofs.begin());
}

MechanicalSystem build_component(
    const ExampleConfig& config, const std::string& component,
    const std::vector<std::string>& dofs, const std::vector<SpringLink>& links,
    const std::vector<std::string>& interface_nodes) {
    const Index n = static_cast<Index>(dofs.size());
    MechanicalSystem sys;
    sys.M = Mat::Zero(n, n);
    sys.V = Mat::Zero(n, n);
    sys.K = Mat::Zero(n, n);

    for (Index i = 0; i < n; ++i) {
        auto it = config.parameters.find(dofs[static_cast<std::size_t>(i)]);
        if (it == config.parameters.end())
            throw std::invalid_argument("build_example: node " +
                                        dofs[static_cast<std::size_t>(i)] +
                                        " has no parameter row");
        sys.M(i, i) = it->second.m;
        DofLabel l;
        l.component = component;
        l.node = dofs[static_cast<std::size_t>(i)];
        l.direction = Direction::Scalar;
        l.kind = std::find(interface_nodes.begin(), interface_nodes.end(),
                           l.node) != interface_nodes.end()
                     ? DofKind::Interface
                     : DofKind::Internal;
        sys.dofs.push_back(l);
    }

    for (const SpringLink& link : links) {
        auto it = config.parameters.find(link.param);
        if (it == config.parameters.end())
            throw std::invalid_argument("build_example: link " + link.from +
                                        "-" + link.to +
                                        " references unknown parameter " +
                                        link.param);
        if (!it->second.k)
            throw std::invalid_argument("build_example: parameter " +
                                        link.param +
                                        " has no stiffness but is used by link " +
                                        link.from + "-" + link.to);
        double k = *it->second.k;
        double c = it->second.c.value_or(0.0);
        Index i = link.from == "ground" ? -1 : node_index(dofs, link.from);
        Index j = node_index(dofs, link.to);
        if ((link.from != "ground" && i < 0) || j < 0)
            throw std::invalid_argument("build_example: link " + link.from +
                                        "-" + link.to +
                                        " references a node outside component " +
                                        component);
        if (i >= 0) {
            sys.K(i, i) += k;
            sys.V(i, i) += c;
            sys.K(i, j) -= k;
            sys.K(j, i) -= k;
            sys.V(i, j) -= c;
            sys.V(j, i) -= c;
        }
        sys.K(j, j) += k;
        sys.V(j, j) += c;
    }
    ensure_valid(sys, "build_example: component " + component);
    return sys;
}

}  // namespace

ExampleConfig ExampleConfig::table_default() {
    ExampleConfig c;
    c.parameters["a1"] = {10.0, 30.0, 1.5e5};
    c.parameters["a2"] = {3.0, 50.0, 5e5};
    c.parameters["a3"] = {3.0, 50.0, 4.5e5};
    c.parameters["p1"] = {5.0, 50.0, 1e5};
    c.parameters["p2"] = {7.0, 50.0, 1.5e5};
    c.parameters["p3"] = {10.0, 10.0, 5e3};
    c.parameters["p4"] = {1.0, std::nullopt, std::nullopt};
    c.dofs_a = {"a1", "a2", "a3"};
    c.dofs_b = {"p1", "p2", "p3", "p4"};
    c.links_a = {{"ground", "a1", "a1"}, {"a1", "a2", "a2"}, {"a1", "a3", "a3"}};
    c.links_b = {{"p1", "p3", "p1"}, {"p2", "p3", "p2"}, {"p3", "p4", "p3"}};
    c.interface_pairs = {{"a2", "p1"}, {"a3", "p2"}};
    return c;
}

ExampleSystems build_example(const ExampleConfig& config) {
    std::vector<std::string> iface_a, iface_b;
    for (const auto& [na, nb] : config.interface_pairs) {
        if (node_index(config.dofs_a, na) < 0)
            throw std::invalid_argument("build_example: interface node " + na +
                                        " is not a DOF of the first component");
        if (node_index(config.dofs_b, nb) < 0)
            throw std::invalid_argument("build_example: interface node " + nb +
                                        " is not a DOF of the second component");
        iface_a.push_back(na);
        iface_b.push_back(nb);
    }

    ExampleSystems out;
    out.component_a = build_component(config, kComponentA, config.dofs_a,
                                      config.links_a, iface_a);
    out.component_b = build_component(config, kComponentB, config.dofs_b,
                                      config.links_b, iface_b);

    for (const auto& [na, nb] : config.interface_pairs) {
        InterfacePair pair;
        pair.a = {kComponentA, na, Direction::Scalar, DofKind::Interface};
        pair.b = {kComponentB, nb, Direction::Scalar, DofKind::Interface};
        out.pairing.pairs.push_back(pair);
    }

    // Assemble by congruence with the Boolean retention map of the pairing:
    // the kept DOF of each pair carries the sum of both sides.
    InterfaceMap map = build_mapping(
        {out.component_a.dofs, out.component_b.dofs}, out.pairing);
    const Index na = static_cast<Index>(config.dofs_a.size());
    const Index nb = static_cast<Index>(config.dofs_b.size());
    Mat m_diag = Mat::Zero(na + nb, na + nb);
    Mat v_diag = m_diag, k_diag = m_diag;
    m_diag.topLeftCorner(na, na) = out.component_a.M;
    m_diag.bottomRightCorner(nb, nb) = out.component_b.M;
    v_diag.topLeftCorner(na, na) = out.component_a.V;
    v_diag.bottomRightCorner(nb, nb) = out.component_b.V;
    k_diag.topLeftCorner(na, na) = out.component_a.K;
    k_diag.bottomRightCorner(nb, nb) = out.component_b.K;
    Mat l = map.L.cast<double>();
    out.assembled.M = l.transpose() * m_diag * l;
    out.assembled.V = l.transpose() * v_diag * l;
    out.assembled.K = l.transpose() * k_diag * l;
    out.assembled.dofs = map.unique_labels;
    ensure_valid(out.assembled, "build_example: assembled system");
    return out;
}

FrfMatrix oracle_frf(const MechanicalSystem& sys,
                     const std::vector<double>& freq_hz) {
    ensure_valid(sys, "oracle_frf");
    const Index n = sys.M.rows();
    FrfMatrix f;
    f.kind = ResponseKind::Accelerance;
    f.freq_hz = freq_hz;
    f.outputs = sys.dofs;
    f.inputs = sys.dofs;
    f.H.reserve(freq_hz.size());
    for (double fr : freq_hz) {
        double w = 2.0 * M_PI * fr;
        CMat z = (-w * w) * sys.M.cast<std::complex<double>>() +
                 std::complex<double>(0.0, w) * sys.V.cast<std::complex<double>>() +
                 sys.K.cast<std::complex<double>>();
        Eigen::PartialPivLU<CMat> lu(z);
        CMat h = lu.solve(CMat::Identity(n, n)) * (-w * w);
        if (!h.allFinite())
            throw std::runtime_error(
                "oracle_frf: dynamic stiffness is singular at " +
                std::to_string(fr) + " Hz");
        f.H.push_back(std::move(h));
    }
    ensure_valid(f, "oracle_frf");
    return f;
}

}  // namespace dss
