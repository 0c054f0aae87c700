#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace dss {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using IMat = Eigen::MatrixXi;
using Index = Eigen::Index;

/// Direction of a physical degree of freedom. Scalar covers 1-D chain models
/// where no spatial direction is meaningful.
enum class Direction { X, Y, Z, RX, RY, RZ, Scalar };

/// Whether a DOF participates in substructure connections.
enum class DofKind { Internal, Interface };

/// Identifies one physical degree of freedom of one component.
struct DofLabel {
    std::string component;
    std::string node;
    Direction direction = Direction::Scalar;
    DofKind kind = DofKind::Internal;

    /// True when component, node and direction match (kind ignored).
    bool same_dof(const DofLabel& other) const {
        return component == other.component && node == other.node &&
               direction == other.direction;
    }
    bool operator==(const DofLabel& other) const = default;
};

/// Physical quantity produced by the output equation of a model.
enum class OutputKind { Displacement, Velocity, Acceleration };

/// Role of a state after a coupling-form transformation. Models whose states
/// have no special meaning carry all-Internal tags.
enum class StateTag { DerivInterfaceOutput, InterfaceOutput, Internal };

/// Linear time-invariant model  x' = A x + B u,  y = C x + D u.
/// Operations treat models as values: they validate inputs and return new
/// instances instead of mutating.
struct StateSpaceModel {
    OutputKind kind = OutputKind::Acceleration;
    std::vector<DofLabel> inputs;
    std::vector<DofLabel> outputs;
    std::vector<StateTag> state_tags;
    Mat A, B, C, D;

    Index n() const { return A.rows(); }
    Index n_in() const { return B.cols(); }
    Index n_out() const { return C.rows(); }
};

/// Second-order mechanical description  M q'' + V q' + K q = f.
struct MechanicalSystem {
    std::vector<DofLabel> dofs;
    Mat M;  ///< mass, symmetric positive definite
    Mat V;  ///< viscous damping, symmetric positive semidefinite
    Mat K;  ///< stiffness, symmetric positive semidefinite
};

/// What an FRF entry relates to a unit force input.
enum class ResponseKind { Receptance, Mobility, Accelerance, DynamicStiffness };

/// Frequency response data on a shared grid: H[k] is the n_out x n_in complex
/// response matrix at freq_hz[k].
struct FrfMatrix {
    ResponseKind kind = ResponseKind::Accelerance;
    std::vector<double> freq_hz;
    std::vector<DofLabel> outputs;
    std::vector<DofLabel> inputs;
    std::vector<CMat> H;

    std::size_t n_freq() const { return freq_hz.size(); }
};

/// Collects every invariant violation of the model; empty means valid.
std::vector<std::string> validate_model(const StateSpaceModel& m);
std::vector<std::string> validate_system(const MechanicalSystem& s);
std::vector<std::string> validate_frf(const FrfMatrix& f);

/// Throws std::invalid_argument listing all violations, prefixed by context.
void ensure_valid(const StateSpaceModel& m, const std::string& context);
void ensure_valid(const MechanicalSystem& s, const std::string& context);
void ensure_valid(const FrfMatrix& f, const std::string& context);

/// Index of the first label whose component/node/direction match, or -1.
Index find_dof(const std::vector<DofLabel>& labels, const DofLabel& wanted);

std::string to_string(Direction d);
std::string to_string(DofKind k);
std::string to_string(OutputKind k);
std::string to_string(StateTag t);
std::string to_string(ResponseKind k);
/// Compact "component:node:direction:kind" form used in CSV files.
std::string to_string(const DofLabel& l);

Direction direction_from_string(const std::string& s);
DofKind dof_kind_from_string(const std::string& s);
OutputKind output_kind_from_string(const std::string& s);
StateTag state_tag_from_string(const std::string& s);
DofLabel dof_label_from_string(const std::string& s);

}  // namespace dss
