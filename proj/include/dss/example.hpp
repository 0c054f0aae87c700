#pragma once

#include "dss/interface_map.hpp"
#include "dss/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dss {

/// Mass plus optional spring/damper constants of one parameter row. Rows
/// without a spring (free end masses) leave k and c unset.
struct MassSpringParam {
    double m = 0.0;
    std::optional<double> c;
    std::optional<double> k;
};

/// Spring/damper link between two nodes of a component; `from` may be
/// "ground". `param` names the MassSpringParam supplying k and c.
struct SpringLink {
    std::string from;
    std::string to;
    std::string param;
};

/// Two-component chain benchmark: component A grounded at a1 with a2/a3
/// hanging off a1, component B with p1/p2 feeding p3 and p4 hanging off p3,
/// coupled at (a2,p1) and (a3,p2).
struct ExampleConfig {
    std::map<std::string, MassSpringParam> parameters;
    std::vector<std::string> dofs_a;
    std::vector<std::string> dofs_b;
    std::vector<SpringLink> links_a;
    std::vector<SpringLink> links_b;
    std::vector<std::pair<std::string, std::string>> interface_pairs;
    double fmin_hz = 20.0;
    double fmax_hz = 500.0;
    double df_hz = 0.25;

    static ExampleConfig table_default();
};

struct ExampleSystems {
    MechanicalSystem component_a;
    MechanicalSystem component_b;
    MechanicalSystem assembled;
    InterfacePairing pairing;
};

/// Assembles M/V/K for both components and the coupled system. The assembled
/// matrices equal the congruence L^T diag(M_a, M_b) L with the retention map
/// of the interface pairing.
ExampleSystems build_example(const ExampleConfig& config);

/// Direct-inversion accelerance H(w) = -w^2 (-w^2 M + i w V + K)^-1,
/// independent of any state-space code path.
FrfMatrix oracle_frf(const MechanicalSystem& sys,
                     const std::vector<double>& freq_hz);

}  // namespace dss
