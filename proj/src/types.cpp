#include "dss/types.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace dss {

namespace {

std::string index_pair(Index i, Index j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void check_finite(const Mat& m, const std::string& name,
                  std::vector<std::string>& out) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (!std::isfinite(m(i, j))) {
                out.push_back(name + " has a non-finite entry at " + index_pair(i, j));
                return;
            }
        }
    }
}

void check_unique(const std::vector<DofLabel>& labels, const std::string& name,
                  std::vector<std::string>& out) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const DofLabel& l = labels[i];
        std::string key = l.component + "\x1f" + l.node + "\x1f" + to_string(l.direction);
        if (!seen.insert(key).second) {
            out.push_back(name + " repeats DOF " + to_string(l) + " at index " +
                          std::to_string(i));
        }
    }
}

// Tags must read as I* (D+ Y+ I*)* with equal D and Y run lengths per group,
// the pattern produced by stacking coupling-form models after untransformed
// ones.
bool tags_well_formed(const std::vector<StateTag>& tags) {
    std::size_t i = 0;
    const std::size_t n = tags.size();
    while (i < n && tags[i] == StateTag::Internal) ++i;
    while (i < n) {
        std::size_t d = 0;
        while (i < n && tags[i] == StateTag::DerivInterfaceOutput) { ++i; ++d; }
        if (d == 0) return false;
        std::size_t y = 0;
        while (i < n && tags[i] == StateTag::InterfaceOutput) { ++i; ++y; }
        if (y != d) return false;
        while (i < n && tags[i] == StateTag::Internal) ++i;
    }
    return true;
}

bool symmetric_within(const Mat& m, double rel_tol) {
    double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

void throw_violations(const std::vector<std::string>& violations,
                      const std::string& context) {
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << context << ":";
    for (const std::string& v : violations) msg << "\n  - " << v;
    throw std::invalid_argument(msg.str());
}

}  // namespace

std::vector<std::string> validate_model(const StateSpaceModel& m) {
    std::vector<std::string> out;
    const Index n = m.A.rows();
    if (m.A.cols() != n)
        out.push_back("A is not square: " + std::to_string(m.A.rows()) + "x" +
                      std::to_string(m.A.cols()));
    if (m.B.rows() != n)
        out.push_back("B has " + std::to_string(m.B.rows()) + " rows, expected " +
                      std::to_string(n));
    if (m.C.cols() != n)
        out.push_back("C has " + std::to_string(m.C.cols()) + " columns, expected " +
                      std::to_string(n));
    if (m.D.rows() != m.C.rows() || m.D.cols() != m.B.cols())
        out.push_back("D is " + std::to_string(m.D.rows()) + "x" +
                      std::to_string(m.D.cols()) + ", expected " +
                      std::to_string(m.C.rows()) + "x" + std::to_string(m.B.cols()));
    if (static_cast<Index>(m.inputs.size()) != m.B.cols())
        out.push_back("inputs has " + std::to_string(m.inputs.size()) +
                      " labels for " + std::to_string(m.B.cols()) + " input columns");
    if (static_cast<Index>(m.outputs.size()) != m.C.rows())
        out.push_back("outputs has " + std::to_string(m.outputs.size()) +
                      " labels for " + std::to_string(m.C.rows()) + " output rows");
    if (static_cast<Index>(m.state_tags.size()) != n)
        out.push_back("state_tags has " + std::to_string(m.state_tags.size()) +
                      " entries for " + std::to_string(n) + " states");
    else if (!tags_well_formed(m.state_tags))
        out.push_back("state_tags do not form valid coupling-form groups");
    check_finite(m.A, "A", out);
    check_finite(m.B, "B", out);
    check_finite(m.C, "C", out);
    check_finite(m.D, "D", out);
    check_unique(m.inputs, "inputs", out);
    check_unique(m.outputs, "outputs", out);
    return out;
}

std::vector<std::string> validate_system(const MechanicalSystem& s) {
    std::vector<std::string> out;
    const Index n = s.M.rows();
    if (s.M.cols() != n) out.push_back("M is not square");
    if (s.V.rows() != n || s.V.cols() != n) out.push_back("V does not match the size of M");
    if (s.K.rows() != n || s.K.cols() != n) out.push_back("K does not match the size of M");
    if (static_cast<Index>(s.dofs.size()) != n)
        out.push_back("dofs has " + std::to_string(s.dofs.size()) + " labels for " +
                      std::to_string(n) + " DOFs");
    check_finite(s.M, "M", out);
    check_finite(s.V, "V", out);
    check_finite(s.K, "K", out);
    check_unique(s.dofs, "dofs", out);
    if (!out.empty()) return out;

    if (!symmetric_within(s.M, 1e-12)) out.push_back("M is not symmetric");
    if (!symmetric_within(s.V, 1e-12)) out.push_back("V is not symmetric");
    if (!symmetric_within(s.K, 1e-12)) out.push_back("K is not symmetric");

    Eigen::SelfAdjointEigenSolver<Mat> eig_m(s.M);
    if (eig_m.info() != Eigen::Success || eig_m.eigenvalues().minCoeff() <= 0.0)
        out.push_back("M is not positive definite (mass matrix singular)");
    auto check_psd = [&out](const Mat& m, const std::string& name) {
        Eigen::SelfAdjointEigenSolver<Mat> eig(m);
        double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
        if (eig.info() != Eigen::Success ||
            eig.eigenvalues().minCoeff() < -1e-10 * scale)
            out.push_back(name + " is not positive semidefinite");
    };
    check_psd(s.V, "V");
    check_psd(s.K, "K");
    return out;
}

std::vector<std::string> validate_frf(const FrfMatrix& f) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k + 1 < f.freq_hz.size(); ++k) {
        if (!(f.freq_hz[k] < f.freq_hz[k + 1])) {
            out.push_back("freq_hz is not strictly increasing at index " +
                          std::to_string(k + 1));
            break;
        }
    }
    for (double fr : f.freq_hz) {
        if (!std::isfinite(fr) || fr < 0.0) {
            out.push_back("freq_hz contains a negative or non-finite frequency");
            break;
        }
    }
    if (f.H.size() != f.freq_hz.size())
        out.push_back("H has " + std::to_string(f.H.size()) + " matrices for " +
                      std::to_string(f.freq_hz.size()) + " frequencies");
    const Index no = static_cast<Index>(f.outputs.size());
    const Index ni = static_cast<Index>(f.inputs.size());
    for (std::size_t k = 0; k < f.H.size(); ++k) {
        if (f.H[k].rows() != no || f.H[k].cols() != ni) {
            out.push_back("H[" + std::to_string(k) + "] is " +
                          std::to_string(f.H[k].rows()) + "x" +
                          std::to_string(f.H[k].cols()) + ", expected " +
                          std::to_string(no) + "x" + std::to_string(ni));
            break;
        }
        if (!f.H[k].allFinite()) {
            out.push_back("H[" + std::to_string(k) + "] has a non-finite entry");
            break;
        }
    }
    check_unique(f.outputs, "outputs", out);
    check_unique(f.inputs, "inputs", out);
    return out;
}

void ensure_valid(const StateSpaceModel& m, const std::string& context) {
    throw_violations(validate_model(m), context);
}

void ensure_valid(const MechanicalSystem& s, const std::string& context) {
    throw_violations(validate_system(s), context);
}

void ensure_valid(const FrfMatrix& f, const std::string& context) {
    throw_violations(validate_frf(f), context);
}

Index find_dof(const std::vector<DofLabel>& labels, const DofLabel& wanted) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i].same_dof(wanted)) return static_cast<Index>(i);
    return -1;
}

std::string to_string(Direction d) {
    switch (d) {
        case Direction::X: return "x";
        case Direction::Y: return "y";
        case Direction::Z: return "z";
        case Direction::RX: return "Rx";
        case Direction::RY: return "Ry";
        case Direction::RZ: return "Rz";
        case Direction::Scalar: return "scalar";
    }
    return "scalar";
}

std::string to_string(DofKind k) {
    return k == DofKind::Interface ? "interface" : "internal";
}

std::string to_string(OutputKind k) {
    switch (k) {
        case OutputKind::Displacement: return "disp";
        case OutputKind::Velocity: return "vel";
        case OutputKind::Acceleration: return "accel";
    }
    return "accel";
}

std::string to_string(StateTag t) {
    switch (t) {
        case StateTag::DerivInterfaceOutput: return "deriv_interface_output";
        case StateTag::InterfaceOutput: return "interface_output";
        case StateTag::Internal: return "internal";
    }
    return "internal";
}

std::string to_string(ResponseKind k) {
    switch (k) {
        case ResponseKind::Receptance: return "receptance";
        case ResponseKind::Mobility: return "mobility";
        case ResponseKind::Accelerance: return "accelerance";
        case ResponseKind::DynamicStiffness: return "dynamic_stiffness";
    }
    return "accelerance";
}

std::string to_string(const DofLabel& l) {
    return l.component + ":" + l.node + ":" + to_string(l.direction) + ":" +
           to_string(l.kind);
}

Direction direction_from_string(const std::string& s) {
    if (s == "x") return Direction::X;
    if (s == "y") return Direction::Y;
    if (s == "z") return Direction::Z;
    if (s == "Rx") return Direction::RX;
    if (s == "Ry") return Direction::RY;
    if (s == "Rz") return Direction::RZ;
    if (s == "scalar") return Direction::Scalar;
    throw std::invalid_argument("unknown direction \"" + s + "\"");
}

DofKind dof_kind_from_string(const std::string& s) {
    if (s == "interface") return DofKind::Interface;
    if (s == "internal") return DofKind::Internal;
    throw std::invalid_argument("unknown DOF kind \"" + s + "\"");
}

OutputKind output_kind_from_string(const std::string& s) {
    if (s == "disp") return OutputKind::Displacement;
    if (s == "vel") return OutputKind::Velocity;
    if (s == "accel") return OutputKind::Acceleration;
    throw std::invalid_argument("unknown output kind \"" + s + "\"");
}

StateTag state_tag_from_string(const std::string& s) {
    if (s == "deriv_interface_output") return StateTag::DerivInterfaceOutput;
    if (s == "interface_output") return StateTag::InterfaceOutput;
    if (s == "internal") return StateTag::Internal;
    throw std::invalid_argument("unknown state tag \"" + s + "\"");
}

DofLabel dof_label_from_string(const std::string& s) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
        auto pos = s.find(':', start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    if (parts.size() != 4)
        throw std::invalid_argument("malformed DOF label \"" + s + "\"");
    return DofLabel{parts[0], parts[1], direction_from_string(parts[2]),
                    dof_kind_from_string(parts[3])};
}

}  // namespace dss
