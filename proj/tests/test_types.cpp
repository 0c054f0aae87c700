#include "dss/types.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <string>
#include <vector>

using namespace dss;
using Catch::Matchers::ContainsSubstring;
using dss::test::dof;

namespace {

// Damped oscillator in first-order form, the smallest interesting model.
StateSpaceModel tiny_model() {
    StateSpaceModel m;
    m.kind = OutputKind::Displacement;
    m.inputs = {dof("C", "n1")};
    m.outputs = m.inputs;
    m.state_tags = {StateTag::Internal, StateTag::Internal};
    m.A = (Mat(2, 2) << -0.4, -25.0, 1.0, 0.0).finished();
    m.B = (Mat(2, 1) << 0.5, 0.0).finished();
    m.C = (Mat(1, 2) << 0.0, 1.0).finished();
    m.D = Mat::Zero(1, 1);
    return m;
}

// Inert n-state shell used to probe the state-tag grammar in isolation.
StateSpaceModel shell_model(Index n) {
    StateSpaceModel m;
    m.kind = OutputKind::Displacement;
    m.inputs = {dof("C", "n1")};
    m.outputs = m.inputs;
    m.state_tags.assign(static_cast<std::size_t>(n), StateTag::Internal);
    m.A = -Mat::Identity(n, n);
    m.B = Mat::Zero(n, 1);
    m.C = Mat::Zero(1, n);
    m.D = Mat::Zero(1, 1);
    return m;
}

std::vector<StateTag> tags(const std::string& pattern) {
    std::vector<StateTag> out;
    for (char c : pattern) {
        switch (c) {
            case 'D': out.push_back(StateTag::DerivInterfaceOutput); break;
            case 'Y': out.push_back(StateTag::InterfaceOutput); break;
            default: out.push_back(StateTag::Internal); break;
        }
    }
    return out;
}

std::string joined(const std::vector<std::string>& violations) {
    std::string all;
    for (const std::string& v : violations) all += v + "\n";
    return all;
}

}  // namespace

TEST_CASE("a well-formed model validates cleanly") {
    REQUIRE(validate_model(tiny_model()).empty());
}

TEST_CASE("model validation reports dimension mismatches") {
    SECTION("non-square A") {
        StateSpaceModel m = tiny_model();
        m.A = Mat::Zero(2, 3);
        REQUIRE_THAT(joined(validate_model(m)),
                     ContainsSubstring("A is not square"));
    }
    SECTION("B row count") {
        StateSpaceModel m = tiny_model();
        m.B = Mat::Zero(3, 1);
        REQUIRE_THAT(joined(validate_model(m)),
                     ContainsSubstring("B has 3 rows, expected 2"));
    }
    SECTION("C column count") {
        StateSpaceModel m = tiny_model();
        m.C = Mat::Zero(1, 3);
        REQUIRE_THAT(joined(validate_model(m)),
                     ContainsSubstring("C has 3 columns, expected 2"));
    }
    SECTION("D shape") {
        StateSpaceModel m = tiny_model();
        m.D = Mat::Zero(2, 2);
        REQUIRE_THAT(joined(validate_model(m)),
                     ContainsSubstring("D is 2x2, expected 1x1"));
    }
    SECTION("label counts") {
        StateSpaceModel m = tiny_model();
        m.inputs.push_back(dof("C", "n2"));
        REQUIRE_THAT(joined(validate_model(m)),
                     ContainsSubstring("inputs has 2 labels"));
        m = tiny_model();
        m.outputs.clear();
        REQUIRE_THAT(joined(validate_model(m)),
                     ContainsSubstring("outputs has 0 labels"));
    }
    SECTION("tag count") {
        StateSpaceModel m = tiny_model();
        m.state_tags.pop_back();
        REQUIRE_THAT(joined(validate_model(m)),
                     ContainsSubstring("state_tags has 1 entries for 2 states"));
    }
}

TEST_CASE("state tags must pair derivative and output runs of equal length") {
    auto accepts = [](const std::string& pattern) {
        StateSpaceModel m = shell_model(static_cast<Index>(pattern.size()));
        m.state_tags = tags(pattern);
        return validate_model(m).empty();
    };
    // Leading internals, then derivative/output groups of equal run length,
    // optionally separated by more internals.
    REQUIRE(accepts(""));
    REQUIRE(accepts("I"));
    REQUIRE(accepts("II"));
    REQUIRE(accepts("DY"));
    REQUIRE(accepts("DDYY"));
    REQUIRE(accepts("DDYYI"));
    REQUIRE(accepts("IDYIDDYY"));

    REQUIRE_FALSE(accepts("D"));
    REQUIRE_FALSE(accepts("Y"));
    REQUIRE_FALSE(accepts("YD"));
    REQUIRE_FALSE(accepts("DI"));
    REQUIRE_FALSE(accepts("DDY"));
    REQUIRE_FALSE(accepts("DYY"));
    REQUIRE_FALSE(accepts("IYD"));
}

TEST_CASE("model validation rejects non-finite entries and duplicate labels") {
    SECTION("NaN in A") {
        StateSpaceModel m = tiny_model();
        m.A(0, 1) = std::numeric_limits<double>::quiet_NaN();
        REQUIRE_THAT(joined(validate_model(m)),
                     ContainsSubstring("A has a non-finite entry at (0,1)"));
    }
    SECTION("infinity in D") {
        StateSpaceModel m = tiny_model();
        m.D(0, 0) = std::numeric_limits<double>::infinity();
        REQUIRE_THAT(joined(validate_model(m)),
                     ContainsSubstring("D has a non-finite entry"));
    }
    SECTION("repeated output DOF") {
        StateSpaceModel m = tiny_model();
        m.C = Mat::Zero(2, 2);
        m.D = Mat::Zero(2, 1);
        m.outputs = {dof("C", "n1"), dof("C", "n1", DofKind::Interface)};
        REQUIRE_THAT(joined(validate_model(m)),
                     ContainsSubstring("outputs repeats DOF"));
    }
}

TEST_CASE("system validation checks symmetry and definiteness") {
    MechanicalSystem good = test::sdof(2.0, 3.0, 50.0, dof("C", "n1"));
    REQUIRE(validate_system(good).empty());

    SECTION("singular mass") {
        MechanicalSystem s = good;
        s.M(0, 0) = 0.0;
        REQUIRE_THAT(joined(validate_system(s)),
                     ContainsSubstring("M is not positive definite"));
    }
    SECTION("negative damping") {
        MechanicalSystem s = good;
        s.V(0, 0) = -1.0;
        REQUIRE_THAT(joined(validate_system(s)),
                     ContainsSubstring("V is not positive semidefinite"));
    }
    SECTION("asymmetric stiffness") {
        MechanicalSystem s = test::chain(
            "C", {{1.0, 1.0}, {1e4}, {2.0}, 1e4, 2.0});
        s.K(0, 1) += 5.0;
        REQUIRE_THAT(joined(validate_system(s)),
                     ContainsSubstring("K is not symmetric"));
    }
    SECTION("size mismatches") {
        MechanicalSystem s = good;
        s.V = Mat::Zero(2, 2);
        REQUIRE_THAT(joined(validate_system(s)),
                     ContainsSubstring("V does not match the size of M"));
        s = good;
        s.dofs.push_back(dof("C", "n2"));
        REQUIRE_THAT(joined(validate_system(s)),
                     ContainsSubstring("dofs has 2 labels for 1 DOFs"));
    }
}

TEST_CASE("FRF validation") {
    FrfMatrix f;
    f.kind = ResponseKind::Accelerance;
    f.freq_hz = {10.0, 20.0};
    f.outputs = {dof("C", "n1")};
    f.inputs = {dof("C", "n1")};
    f.H = {CMat::Constant(1, 1, {1.0, 2.0}), CMat::Constant(1, 1, {3.0, 4.0})};
    REQUIRE(validate_frf(f).empty());

    SECTION("non-increasing grid") {
        f.freq_hz = {20.0, 10.0};
        REQUIRE_THAT(joined(validate_frf(f)),
                     ContainsSubstring("freq_hz is not strictly increasing"));
    }
    SECTION("negative frequency") {
        f.freq_hz = {-1.0, 10.0};
        REQUIRE_THAT(joined(validate_frf(f)),
                     ContainsSubstring("negative or non-finite frequency"));
    }
    SECTION("matrix count") {
        f.H.pop_back();
        REQUIRE_THAT(joined(validate_frf(f)),
                     ContainsSubstring("H has 1 matrices for 2 frequencies"));
    }
    SECTION("matrix shape") {
        f.H[1] = CMat::Zero(2, 1);
        REQUIRE_THAT(joined(validate_frf(f)),
                     ContainsSubstring("H[1] is 2x1, expected 1x1"));
    }
    SECTION("non-finite entry") {
        f.H[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
        REQUIRE_THAT(joined(validate_frf(f)),
                     ContainsSubstring("H[0] has a non-finite entry"));
    }
}

TEST_CASE("ensure_valid throws one exception listing every violation") {
    StateSpaceModel m = tiny_model();
    m.B = Mat::Zero(3, 1);
    m.state_tags.pop_back();
    try {
        ensure_valid(m, "unit test");
        FAIL("expected ensure_valid to throw");
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        REQUIRE_THAT(msg, ContainsSubstring("unit test:"));
        REQUIRE_THAT(msg, ContainsSubstring("B has 3 rows"));
        REQUIRE_THAT(msg, ContainsSubstring("state_tags has 1 entries"));
    }
}

TEST_CASE("find_dof matches component, node and direction but not kind") {
    std::vector<DofLabel> labels = {dof("A", "n1"),
                                    dof("A", "n2", DofKind::Interface)};
    REQUIRE(find_dof(labels, dof("A", "n2")) == 1);
    REQUIRE(find_dof(labels, dof("A", "n1", DofKind::Interface)) == 0);
    REQUIRE(find_dof(labels, dof("B", "n1")) == -1);
    DofLabel rotated = dof("A", "n1");
    rotated.direction = Direction::RX;
    REQUIRE(find_dof(labels, rotated) == -1);
}

TEST_CASE("enum string forms round-trip") {
    for (Direction d : {Direction::X, Direction::Y, Direction::Z, Direction::RX,
                        Direction::RY, Direction::RZ, Direction::Scalar})
        REQUIRE(direction_from_string(to_string(d)) == d);
    for (DofKind k : {DofKind::Internal, DofKind::Interface})
        REQUIRE(dof_kind_from_string(to_string(k)) == k);
    for (OutputKind k : {OutputKind::Displacement, OutputKind::Velocity,
                         OutputKind::Acceleration})
        REQUIRE(output_kind_from_string(to_string(k)) == k);
    for (StateTag t : {StateTag::DerivInterfaceOutput, StateTag::InterfaceOutput,
                       StateTag::Internal})
        REQUIRE(state_tag_from_string(to_string(t)) == t);

    REQUIRE(to_string(ResponseKind::Receptance) == "receptance");
    REQUIRE(to_string(ResponseKind::DynamicStiffness) == "dynamic_stiffness");

    REQUIRE_THROWS_AS(direction_from_string("sideways"), std::invalid_argument);
    REQUIRE_THROWS_AS(output_kind_from_string("jerk"), std::invalid_argument);
    REQUIRE_THROWS_AS(state_tag_from_string(""), std::invalid_argument);
    REQUIRE_THROWS_AS(dof_kind_from_string("boundary"), std::invalid_argument);
}

TEST_CASE("DOF labels round-trip through their compact string form") {
    DofLabel l = dof("frame", "mount3", DofKind::Interface);
    l.direction = Direction::RY;
    REQUIRE(to_string(l) == "frame:mount3:Ry:interface");
    REQUIRE(dof_label_from_string(to_string(l)) == l);

    REQUIRE_THROWS_WITH(dof_label_from_string("frame:mount3:Ry"),
                        ContainsSubstring("malformed DOF label"));
    REQUIRE_THROWS_WITH(dof_label_from_string("a:b:c:d:e"),
                        ContainsSubstring("malformed DOF label"));
    REQUIRE_THROWS_WITH(dof_label_from_string("frame:mount3:Ry:edge"),
                        ContainsSubstring("unknown DOF kind"));
}
