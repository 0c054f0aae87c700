// Acceptance harness: one pass/fail line per shipped guarantee, each with its
// tolerance pinned next to the check. Runs the bundled two-component example
// end to end plus randomized sweeps; exits with the number of failed criteria.

#include "dss/bench.hpp"
#include "dss/compare.hpp"
#include "dss/coupling_form.hpp"
#include "dss/example.hpp"
#include "dss/factory.hpp"
#include "dss/interface_map.hpp"
#include "dss/lmsss.hpp"
#include "dss/reference.hpp"
#include "dss/solve_stats.hpp"
#include "dss/types.hpp"

#include "helpers.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

using namespace dss;
using dss::test::dof;
using dss::test::max_rel_dev;

namespace {

int failures = 0;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

void criterion(int index, const char* name,
               const std::function<std::string()>& body) {
    try {
        std::string detail = body();
        std::printf("[%2d] PASS %s (%s)\n", index, name, detail.c_str());
    } catch (const std::exception& e) {
        ++failures;
        std::printf("[%2d] FAIL %s (%s)\n", index, name, e.what());
    }
}

// Shared fixtures are memoized so later criteria reuse earlier results; a
// failure inside a builder resurfaces in every criterion that needs it.

const ExampleSystems& example() {
    static ExampleSystems ex = build_example(ExampleConfig::table_default());
    return ex;
}

const std::vector<double>& full_grid() {
    static std::vector<double> g = frequency_grid(20.0, 500.0, 0.25);
    return g;
}

const CouplingProblem& accel_problem() {
    static CouplingProblem p = make_problem(
        {build_model(example().component_a, OutputKind::Acceleration),
         build_model(example().component_b, OutputKind::Acceleration)},
        example().pairing);
    return p;
}

const CouplingProblem& disp_problem() {
    static CouplingProblem p = make_problem(
        {build_model(example().component_a, OutputKind::Displacement),
         build_model(example().component_b, OutputKind::Displacement)},
        example().pairing);
    return p;
}

const StateSpaceModel& coupled_accel() {
    static StateSpaceModel m =
        retain_unique_dofs(couple_accel(accel_problem()), accel_problem().map);
    return m;
}

const FrfMatrix& coupled_accel_frf() {
    static FrfMatrix f = synth_frf(coupled_accel(), full_grid());
    return f;
}

const FrfMatrix& assembled_oracle() {
    static FrfMatrix f = oracle_frf(example().assembled, full_grid());
    return f;
}

std::vector<DofLabel> interface_a() {
    return {dof("A", "a2"), dof("A", "a3")};
}

std::vector<DofLabel> interface_b() {
    return {dof("B", "p1"), dof("B", "p2")};
}

struct MinimalPipeline {
    StateSpaceModel retained;  // coupling-form coupled, duplicated DOFs merged
    StateSpaceModel minimal;   // same model with paired interface states dropped
};

const MinimalPipeline& minimal_pipeline() {
    static MinimalPipeline pipe = [] {
        CouplingFormResult cf_a = ucf_transform(
            build_model(example().component_a, OutputKind::Displacement),
            interface_a());
        CouplingFormResult cf_b = ucf_transform(
            build_model(example().component_b, OutputKind::Displacement),
            interface_b());
        require(cf_a.ok && cf_b.ok, "coupling-form transform failed: " +
                                        cf_a.diagnostic + cf_b.diagnostic);
        CouplingProblem p =
            make_problem({cf_a.model, cf_b.model}, example().pairing);
        MinimalPipeline pipe;
        pipe.retained = retain_unique_dofs(couple_disp(p), p.map);
        pipe.minimal = reduce_minimal(
            pipe.retained,
            build_state_reduction({&p.models[0], &p.models[1]}, p.pairing));
        return pipe;
    }();
    return pipe;
}

InterfacePairing decouple_pairing() {
    InterfacePairing pairs;
    pairs.pairs.push_back({dof("A", "a2", DofKind::Interface),
                           dof("A", "a2", DofKind::Interface), +1});
    pairs.pairs.push_back({dof("A", "a3", DofKind::Interface),
                           dof("A", "a3", DofKind::Interface), +1});
    return pairs;
}

std::vector<DofLabel> decouple_keep() {
    return {dof("A", "a2"), dof("A", "a3"), dof("B", "p3"), dof("B", "p4")};
}

// Randomized grounded chain with light damping, interface DOFs promoted at
// one or both ends.
StateSpaceModel random_displacement_model(std::mt19937_64& rng, int trial,
                                          std::vector<DofLabel>& interface) {
    std::uniform_int_distribution<int> n_dist(3, 6);
    std::uniform_real_distribution<double> mass(0.5, 5.0);
    std::uniform_real_distribution<double> stiffness(1e4, 1e6);
    std::uniform_real_distribution<double> damping(5.0, 50.0);

    const int n = n_dist(rng);
    test::ChainSpec spec;
    for (int i = 0; i < n; ++i) spec.masses.push_back(mass(rng));
    for (int i = 0; i + 1 < n; ++i) {
        spec.link_k.push_back(stiffness(rng));
        spec.link_c.push_back(damping(rng));
    }
    spec.ground_k = stiffness(rng);
    spec.ground_c = damping(rng);

    MechanicalSystem sys = test::chain("R" + std::to_string(trial), spec);
    sys.dofs.back().kind = DofKind::Interface;
    interface = {sys.dofs.back()};
    if (trial % 2 == 1) {
        sys.dofs.front().kind = DofKind::Interface;
        interface.push_back(sys.dofs.front());
    }
    return build_model(sys, OutputKind::Displacement);
}

// Worst max |B_M H(w)| over the grid, relative to the largest FRF entry.
double compatibility_residual(const StateSpaceModel& coupled,
                              const InterfaceMap& map) {
    CMat bm = map.B_M.cast<double>().cast<std::complex<double>>();
    FrfMatrix f = synth_frf(coupled, full_grid());
    double worst = 0.0;
    double scale = 0.0;
    for (const CMat& h : f.H) {
        worst = std::max(worst, (bm * h).cwiseAbs().maxCoeff());
        scale = std::max(scale, h.cwiseAbs().maxCoeff());
    }
    return worst / scale;
}

std::string check_coupling_oracle() {
    constexpr double kTol = 1e-8;
    double dev = max_rel_dev(coupled_accel_frf(), assembled_oracle());
    require(dev < kTol, "worst relative deviation " + sci(dev));
    return "max rel dev " + sci(dev) + " over " +
           std::to_string(full_grid().size()) + " frequencies";
}

std::string check_state_space_vs_frequency_coupling() {
    constexpr double kTol = 1e-10;
    FrfMatrix a = synth_frf(
        build_model(example().component_a, OutputKind::Acceleration),
        full_grid());
    FrfMatrix b = synth_frf(
        build_model(example().component_b, OutputKind::Acceleration),
        full_grid());
    FrfMatrix coupled = lmfbs_couple({a, b}, example().pairing, true);
    double dev = max_rel_dev(coupled, coupled_accel_frf());
    require(dev < kTol, "worst relative deviation " + sci(dev));
    return "max rel dev " + sci(dev) + " at every grid point";
}

// The three coupling methods are compared pairwise on a two-chain pair whose
// coupled FRF entries all stay within a few decades of the peak. On the
// bundled example the assembly's deepest cross entries sit more than seven
// decades below the peak, where any two algebraically distinct routes differ
// by more than 1e-8 relative from double rounding alone, so that example only
// carries the classical-method check here.
std::string check_method_triangle() {
    constexpr double kTol = 1e-8;
    ComparisonResult classical = compare_frf(
        synth_frf(classical_couple(accel_problem()), full_grid()),
        coupled_accel_frf(), kTol);
    require(classical.pass,
            "classical assembly deviates by " + sci(classical.max_rel_err));

    test::ChainSpec s1;
    s1.masses = {2.0, 3.0, 4.0};
    s1.link_k = {4e4, 6e4};
    s1.link_c = {60.0, 80.0};
    s1.ground_k = 2e4;
    s1.ground_c = 40.0;
    MechanicalSystem p = test::chain("P", s1);
    p.dofs.back().kind = DofKind::Interface;

    test::ChainSpec s2;
    s2.masses = {1.5, 2.5, 3.5};
    s2.link_k = {5e4, 7e4};
    s2.link_c = {70.0, 90.0};
    s2.ground_k = 3e4;
    s2.ground_c = 50.0;
    MechanicalSystem q = test::chain("Q", s2);
    q.dofs.front().kind = DofKind::Interface;

    InterfacePairing pairs;
    pairs.pairs.push_back({p.dofs.back(), q.dofs.front(), +1});
    std::vector<double> grid = frequency_grid(2.0, 120.0, 0.5);

    CouplingProblem prob_d = make_problem(
        {build_model(p, OutputKind::Displacement),
         build_model(q, OutputKind::Displacement)}, pairs);
    CouplingProblem prob_a = make_problem(
        {build_model(p, OutputKind::Acceleration),
         build_model(q, OutputKind::Acceleration)}, pairs);

    FrfMatrix lm_disp =
        synth_frf(retain_unique_dofs(couple_disp(prob_d), prob_d.map), grid);
    FrfMatrix lm_accel =
        synth_frf(retain_unique_dofs(couple_accel(prob_a), prob_a.map), grid);
    FrfMatrix classical_frf = synth_frf(classical_couple(prob_a), grid);

    CouplingFormResult cf_p = sacf_transform(prob_d.models[0], {p.dofs.back()});
    CouplingFormResult cf_q = sacf_transform(prob_d.models[1], {q.dofs.front()});
    require(cf_p.ok && cf_q.ok, "structured coupling form failed: " +
                                    cf_p.diagnostic + cf_q.diagnostic);
    FrfMatrix sjovall_frf =
        synth_frf(sjovall_couple(cf_p.model, cf_q.model, pairs), grid);
    FrfMatrix sjovall_accel = sjovall_frf;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double w = 2.0 * M_PI * grid[k];
        sjovall_accel.H[k] *= std::complex<double>(-w * w, 0.0);
    }
    sjovall_accel.kind = ResponseKind::Accelerance;

    ComparisonResult cl = compare_frf(classical_frf, lm_accel, kTol);
    ComparisonResult sj = compare_frf(sjovall_frf, lm_disp, kTol);
    ComparisonResult cs = compare_frf(classical_frf, sjovall_accel, kTol);
    require(cl.pass, "classical vs direct deviates by " + sci(cl.max_rel_err));
    require(sj.pass, "sjovall vs direct deviates by " + sci(sj.max_rel_err));
    require(cs.pass, "classical vs sjovall deviates by " + sci(cs.max_rel_err));
    return "example classical " + sci(classical.max_rel_err) +
           ", pairwise worst " +
           sci(std::max({cl.max_rel_err, sj.max_rel_err, cs.max_rel_err}));
}

std::string check_feedthrough_nullity() {
    const CouplingProblem& p = disp_problem();
    const StateSpaceModel& ma = p.models[0];
    const StateSpaceModel& mb = p.models[1];

    Index rows = ma.n_out() + mb.n_out();
    Mat w = Mat::Zero(rows, rows);
    w.topLeftCorner(ma.n_out(), ma.n_in()) = ma.C * ma.A * ma.B;
    w.bottomRightCorner(mb.n_out(), mb.n_in()) = mb.C * mb.A * mb.B;
    double scale = w.cwiseAbs().maxCoeff();

    double d_disp = test::max_abs(couple_disp(p).D);
    require(d_disp < 1e-10 * scale,
            "displacement feed-through " + sci(d_disp) + " vs bound " +
                sci(1e-10 * scale));

    double d_vel = test::max_abs(couple_vel(p).D);
    require(d_vel < 1e-12, "velocity feed-through " + sci(d_vel));
    return "disp " + sci(d_disp) + " (bound " + sci(1e-10 * scale) + "), vel " +
           sci(d_vel);
}

std::string check_minimal_state_count() {
    constexpr double kTol = 1e-8;
    const MinimalPipeline& pipe = minimal_pipeline();
    const Index expected = 6 + 8 - 2 * 2;
    require(pipe.minimal.n() == expected,
            "got " + std::to_string(pipe.minimal.n()) + " states, expected " +
                std::to_string(expected));
    double dev = max_rel_dev(synth_frf(pipe.minimal, full_grid()),
                             synth_frf(pipe.retained, full_grid()));
    require(dev < kTol, "reduced model deviates by " + sci(dev));
    return std::to_string(pipe.minimal.n()) + " states, max rel dev " +
           sci(dev);
}

std::string check_decoupling_round_trip() {
    constexpr double kTol = 1e-6;
    FrfMatrix oracle_b = oracle_frf(example().component_b, full_grid());

    // Untransformed route: remove A from the 14-state coupled assembly.
    StateSpaceModel plain =
        decouple(coupled_accel(),
                 build_model(example().component_a, OutputKind::Acceleration),
                 decouple_pairing(), decouple_keep());
    require(plain.n() == 14 + 6, "untransformed result has " +
                                     std::to_string(plain.n()) +
                                     " states, expected 20");
    double dev_plain = max_rel_dev(synth_frf(plain, full_grid()), oracle_b);
    require(dev_plain < kTol,
            "untransformed result deviates by " + sci(dev_plain));

    // Coupling-form route: remove the transformed A from the minimal
    // assembly and drop the duplicated interface states.
    CouplingFormResult cf_a = ucf_transform(
        build_model(example().component_a, OutputKind::Displacement),
        interface_a());
    require(cf_a.ok, "coupling-form transform failed: " + cf_a.diagnostic);
    StateSpaceModel reduced =
        decouple(minimal_pipeline().minimal, cf_a.model, decouple_pairing(),
                 decouple_keep(), {.coupling_form_reduction = true});
    require(reduced.n() == (14 - 4) + (6 - 4),
            "reduced result has " + std::to_string(reduced.n()) +
                " states, expected 12");
    double dev_reduced = max_rel_dev(synth_frf(reduced, full_grid()), oracle_b);
    require(dev_reduced < kTol,
            "reduced result deviates by " + sci(dev_reduced));
    return "20 and 12 states, max rel dev " + sci(dev_plain) + " / " +
           sci(dev_reduced);
}

// The invariance grid stops where the modal models' deepest cross entries
// approach 1e-8 of the peak; past that point the entrywise metric reads
// double-representation noise instead of transform quality.
std::string check_transform_invariance() {
    constexpr double kTol = 1e-8;
    std::mt19937_64 rng(2026);
    std::vector<double> grid = frequency_grid(10.0, 200.0, 10.0);
    double worst = 0.0;
    int checked = 0;

    auto check_model = [&](const StateSpaceModel& m,
                           const std::vector<DofLabel>& interface) {
        FrfMatrix original = synth_frf(m, grid);
        for (auto* transform : {&ucf_transform, &sacf_transform}) {
            CouplingFormResult res = (*transform)(m, interface);
            require(res.ok, "transform failed: " + res.diagnostic);
            ComparisonResult r =
                compare_frf(synth_frf(res.model, grid), original, kTol);
            require(r.pass, "transformed response deviates by " +
                                sci(r.max_rel_err) + " at " +
                                sci(r.argmax_freq_hz) + " Hz");
            worst = std::max(worst, r.max_rel_err);
            ++checked;
        }
    };

    for (int trial = 0; trial < 50; ++trial) {
        std::vector<DofLabel> interface;
        StateSpaceModel m = random_displacement_model(rng, trial, interface);
        check_model(m, interface);
    }
    for (const MechanicalSystem* sys :
         {&example().component_a, &example().component_b}) {
        std::vector<DofLabel> interface;
        for (const DofLabel& l : sys->dofs)
            if (l.kind == DofKind::Interface) interface.push_back(l);
        check_model(to_modal_form(build_model(*sys, OutputKind::Displacement)),
                    interface);
    }
    return std::to_string(checked) + " transforms, worst rel dev " + sci(worst);
}

std::string check_normalized_form_diagnostic() {
    constexpr double kResidualTol = 1e-9;
    double worst_residual = 0.0;
    double worst_dev = 0.0;
    struct Case {
        const MechanicalSystem* sys;
        std::vector<DofLabel> interface;
    };
    for (const Case& c : {Case{&example().component_a, interface_a()},
                          Case{&example().component_b, interface_b()}}) {
        StateSpaceModel m = build_model(*c.sys, OutputKind::Displacement);
        CouplingFormResult res = ncf_transform(m, c.interface);
        require(res.ok, "normalized transform failed: " + res.diagnostic);
        require(res.transform.ncf_residual < kResidualTol,
                "residual " + sci(res.transform.ncf_residual));
        // The transform reorders outputs interface-first, so the comparison
        // aligns by label.
        double dev = compare_frf(synth_frf(res.model, test::coarse_grid()),
                                 synth_frf(m, test::coarse_grid()),
                                 kResidualTol)
                         .max_rel_err;
        require(dev < kResidualTol, "response deviates by " + sci(dev));
        worst_residual = std::max(worst_residual, res.transform.ncf_residual);
        worst_dev = std::max(worst_dev, dev);
    }

    // Inputs that only excite one velocity state collapse the projected
    // rows; the transform must refuse rather than return a broken model.
    StateSpaceModel bad;
    bad.kind = OutputKind::Displacement;
    bad.inputs = {dof("N", "j", DofKind::Interface), dof("N", "i")};
    bad.outputs = bad.inputs;
    bad.state_tags.assign(4, StateTag::Internal);
    bad.A = (Mat(4, 4) << -1, 0, -2, 0,
                           0, -1, 0, -2,
                           1, 0, 0, 0,
                           0, 1, 0, 0).finished();
    bad.B = (Mat(4, 2) << 0, 0,
                          1, 1,
                          0, 0,
                          0, 0).finished();
    bad.C = (Mat(2, 4) << 0, 0, 1, 0,
                          0, 0, 0, 1).finished();
    bad.D = Mat::Zero(2, 2);
    CouplingFormResult res = ncf_transform(bad, {dof("N", "j")});
    require(!res.ok, "rank-deficient transform was not rejected");
    require(!res.diagnostic.empty(), "rejection carries no diagnostic");
    return "worst residual " + sci(worst_residual) + ", worst rel dev " +
           sci(worst_dev) + ", rank loss rejected";
}

std::string check_compatibility_invariant() {
    constexpr double kTol = 1e-9;
    double accel =
        compatibility_residual(couple_accel(accel_problem()), accel_problem().map);
    double disp =
        compatibility_residual(couple_disp(disp_problem()), disp_problem().map);
    double vel =
        compatibility_residual(couple_vel(disp_problem()), disp_problem().map);
    for (double r : {accel, disp, vel})
        require(r < kTol, "interface residual " + sci(r));
    return "accel " + sci(accel) + ", disp " + sci(disp) + ", vel " + sci(vel);
}

std::string check_solve_count_and_timing() {
    solve_stats::reset();
    couple_accel(accel_problem());
    std::uint64_t direct_count = solve_stats::factorization_count();
    std::vector<std::size_t> direct_dims = solve_stats::factorization_dims();
    require(direct_count == 1 && direct_dims == std::vector<std::size_t>{2},
            "direct coupling used " + std::to_string(direct_count) +
                " factorizations");

    solve_stats::reset();
    classical_couple(accel_problem());
    std::uint64_t classical_count = solve_stats::factorization_count();
    require(classical_count == 2, "classical coupling used " +
                                      std::to_string(classical_count) +
                                      " factorizations");
    solve_stats::reset();

    BenchReport report = bench_inversions({12}, 10000, 1);
    double ratio = report.results.at(0).ratio;
    require(ratio > 1.0,
            "classical/direct median ratio " + sci(ratio) + " at n_j=12");
    return "1 vs 2 interface factorizations, median speedup " + sci(ratio) +
           " at n_j=12 over 10000 trials";
}

std::string check_noise_calibration() {
    constexpr double kSigma = 5e-3;
    FrfMatrix base;
    base.kind = ResponseKind::Accelerance;
    for (int i = 0; i < 100; ++i) {
        base.freq_hz.push_back(1.0 + i);
        base.H.push_back(CMat::Zero(100, 100));
        base.outputs.push_back(dof("N", "n" + std::to_string(i + 1)));
    }
    base.inputs = base.outputs;

    NoiseSpec noise;
    noise.sigma = kSigma;
    noise.seed = 11;
    FrfMatrix noisy = perturb_frf(base, noise);

    double sum_re = 0.0, sum_im = 0.0;
    std::size_t count = 0;
    for (const CMat& h : noisy.H)
        for (Index j = 0; j < h.cols(); ++j)
            for (Index i = 0; i < h.rows(); ++i) {
                sum_re += h(i, j).real();
                sum_im += h(i, j).imag();
                ++count;
            }
    double mean_re = sum_re / static_cast<double>(count);
    double mean_im = sum_im / static_cast<double>(count);
    double ss_re = 0.0, ss_im = 0.0;
    for (const CMat& h : noisy.H)
        for (Index j = 0; j < h.cols(); ++j)
            for (Index i = 0; i < h.rows(); ++i) {
                ss_re += (h(i, j).real() - mean_re) * (h(i, j).real() - mean_re);
                ss_im += (h(i, j).imag() - mean_im) * (h(i, j).imag() - mean_im);
            }
    double std_re = std::sqrt(ss_re / static_cast<double>(count - 1));
    double std_im = std::sqrt(ss_im / static_cast<double>(count - 1));

    require(count >= 1000000, "only " + std::to_string(count) + " entries");
    require(std::abs(std_re / kSigma - 1.0) < 0.01,
            "real-part sample std " + sci(std_re));
    require(std::abs(std_im / kSigma - 1.0) < 0.01,
            "imaginary-part sample std " + sci(std_im));
    return "sample std " + sci(std_re) + " / " + sci(std_im) + " over " +
           std::to_string(count) + " entries";
}

std::string check_dynamic_stiffness_identity() {
    constexpr double kTol = 1e-9;
    const double m = 2.0, c = 3.0, k = 5e4;
    FrfMatrix accelerance =
        oracle_frf(test::sdof(m, c, k, dof("S", "x")), full_grid());
    FrfMatrix z = dynamic_stiffness(accelerance);

    double worst = 0.0;
    for (std::size_t i = 0; i < z.n_freq(); ++i) {
        double omega = 2.0 * M_PI * z.freq_hz[i];
        std::complex<double> expected(k - omega * omega * m, omega * c);
        worst = std::max(worst, std::abs(z.H[i](0, 0) - expected) /
                                    std::abs(expected));
    }
    require(worst < kTol, "worst relative deviation " + sci(worst));
    return "max rel dev " + sci(worst) + " against k + iwc - w^2 m";
}

}  // namespace

int main() {
    criterion(1, "coupled acceleration FRFs match the assembled oracle",
              check_coupling_oracle);
    criterion(2, "state-space coupling equals frequency-based coupling",
              check_state_space_vs_frequency_coupling);
    criterion(3, "classical and minimal-form assemblies agree with the direct method",
              check_method_triangle);
    criterion(4, "displacement and velocity coupling leave no feed-through",
              check_feedthrough_nullity);
    criterion(5, "coupling-form models reduce to the minimal state count",
              check_minimal_state_count);
    criterion(6, "decoupling recovers the removed component at both state counts",
              check_decoupling_round_trip);
    criterion(7, "coupling-form transforms preserve the response",
              check_transform_invariance);
    criterion(8, "normalized form reports its residual and rejects rank loss",
              check_normalized_form_diagnostic);
    criterion(9, "interface compatibility holds at every frequency",
              check_compatibility_invariant);
    criterion(10, "one interface factorization instead of two, and it is cheaper",
              check_solve_count_and_timing);
    criterion(11, "injected noise matches the requested sigma",
              check_noise_calibration);
    criterion(12, "dynamic stiffness inversion recovers the physical parameters",
              check_dynamic_stiffness_identity);

    if (failures == 0)
        std::printf("all 12 criteria passed\n");
    else
        std::printf("%d of 12 criteria failed\n", failures);
    return failures;
}
