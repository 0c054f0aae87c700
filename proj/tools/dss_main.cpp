#include "dss/compare.hpp"
#include "dss/coupling_form.hpp"
#include "dss/example.hpp"
#include "dss/factory.hpp"
#include "dss/lmsss.hpp"
#include "dss/model_io.hpp"
#include "dss/reference.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace dss;

ResponseKind response_kind_from_string(const std::string& s) {
    if (s == "receptance") return ResponseKind::Receptance;
    if (s == "mobility") return ResponseKind::Mobility;
    if (s == "accelerance") return ResponseKind::Accelerance;
    if (s == "dynamic_stiffness") return ResponseKind::DynamicStiffness;
    throw std::invalid_argument("unknown response kind \"" + s + "\"");
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    if (out.empty())
        throw std::invalid_argument("empty size list \"" + s + "\"");
    return out;
}

// Interface DOFs each model contributes to the pairing, in pairing order.
std::vector<std::vector<DofLabel>> interfaces_per_model(
    const std::vector<StateSpaceModel>& models, const InterfacePairing& pairing) {
    std::vector<std::vector<DofLabel>> ifaces(models.size());
    for (const InterfacePair& pair : pairing.pairs) {
        for (const DofLabel* side : {&pair.a, &pair.b}) {
            for (std::size_t i = 0; i < models.size(); ++i) {
                if (find_dof(models[i].outputs, *side) >= 0) {
                    ifaces[i].push_back(*side);
                    break;
                }
            }
        }
    }
    return ifaces;
}

CouplingFormResult run_transform(const std::string& form,
                                 const StateSpaceModel& m,
                                 const std::vector<DofLabel>& interface) {
    if (form == "ucf") return ucf_transform(m, interface);
    if (form == "sacf") return sacf_transform(m, interface);
    return ncf_transform(m, interface);
}

struct ExampleBuildArgs {
    std::string config;
    std::string out_dir;
};

int cmd_example_build(const ExampleBuildArgs& a) {
    ExampleConfig config = a.config.empty() ? ExampleConfig::table_default()
                                            : load_example_config(a.config);
    ExampleSystems systems = build_example(config);
    std::filesystem::create_directories(a.out_dir);
    auto path = [&](const char* name) {
        return (std::filesystem::path(a.out_dir) / name).string();
    };
    save_model(build_model(systems.component_a, OutputKind::Displacement),
               path("component_a.json"));
    save_model(build_model(systems.component_b, OutputKind::Displacement),
               path("component_b.json"));
    save_model(build_model(systems.assembled, OutputKind::Displacement),
               path("assembled.json"));
    save_pairing(systems.pairing, path("pairing.json"));
    save_example_config(config, path("config.json"));
    std::vector<double> grid =
        frequency_grid(config.fmin_hz, config.fmax_hz, config.df_hz);
    save_frf_csv(oracle_frf(systems.assembled, grid), path("oracle_frf.csv"));
    std::printf("wrote component, assembly, pairing and oracle files to %s\n",
                a.out_dir.c_str());
    return 0;
}

struct CoupleArgs {
    std::vector<std::string> models;
    std::string pairs;
    std::string variant = "accel";
    std::string form = "none";
    bool minimal = false;
    bool retain_unique = false;
    std::string transform_report;
    std::string out;
};

int cmd_couple(const CoupleArgs& a) {
    std::vector<StateSpaceModel> models;
    for (const std::string& path : a.models) models.push_back(load_model(path));
    InterfacePairing pairing = load_pairing(a.pairs);

    std::vector<CouplingFormTransform> transforms;
    std::vector<bool> ok_flags;
    if (a.form != "none") {
        std::vector<std::vector<DofLabel>> ifaces =
            interfaces_per_model(models, pairing);
        bool all_ok = true;
        for (std::size_t i = 0; i < models.size(); ++i) {
            if (ifaces[i].empty()) continue;
            CouplingFormResult res = run_transform(a.form, models[i], ifaces[i]);
            transforms.push_back(res.transform);
            ok_flags.push_back(res.ok);
            if (!res.ok) {
                std::fprintf(stderr, "error: %s\n", res.diagnostic.c_str());
                all_ok = false;
            } else {
                models[i] = res.model;
            }
        }
        if (!a.transform_report.empty())
            save_transform_reports(transforms, ok_flags, a.transform_report);
        if (!all_ok) return 1;
    }

    CouplingProblem p = make_problem(std::move(models), std::move(pairing));
    StateSpaceModel coupled;
    if (a.variant == "accel")
        coupled = couple_accel(p);
    else if (a.variant == "disp")
        coupled = couple_disp(p);
    else
        coupled = couple_vel(p);
    if (a.retain_unique) coupled = retain_unique_dofs(coupled, p.map);
    if (a.minimal) {
        std::vector<const StateSpaceModel*> ptrs;
        for (const StateSpaceModel& m : p.models) ptrs.push_back(&m);
        coupled = reduce_minimal(coupled, build_state_reduction(ptrs, p.pairing));
    }
    save_model(coupled, a.out);
    std::printf("coupled model: %lld states, %lld DOFs -> %s\n",
                static_cast<long long>(coupled.n()),
                static_cast<long long>(coupled.n_out()), a.out.c_str());
    return 0;
}

struct DecoupleArgs {
    std::string assembly, remove, pairs, keep, out;
    std::string form = "none";
};

int cmd_decouple(const DecoupleArgs& a) {
    StateSpaceModel assembly = load_model(a.assembly);
    StateSpaceModel removed = load_model(a.remove);
    InterfacePairing pairing = load_pairing(a.pairs);
    std::vector<DofLabel> keep = load_dof_list(a.keep);

    DecoupleOptions options;
    if (a.form != "none") {
        std::vector<DofLabel> iface_a, iface_b;
        for (const InterfacePair& pair : pairing.pairs) {
            iface_a.push_back(pair.a);
            iface_b.push_back(pair.b);
        }
        CouplingFormResult ra = run_transform(a.form, assembly, iface_a);
        CouplingFormResult rb = run_transform(a.form, removed, iface_b);
        if (!ra.ok || !rb.ok) {
            std::fprintf(stderr, "error: %s\n",
                         (!ra.ok ? ra.diagnostic : rb.diagnostic).c_str());
            return 1;
        }
        assembly = ra.model;
        removed = rb.model;
        options.coupling_form_reduction = true;
    }
    StateSpaceModel result = decouple(assembly, removed, pairing, keep, options);
    save_model(result, a.out);
    std::printf("decoupled model: %lld states, %lld DOFs -> %s\n",
                static_cast<long long>(result.n()),
                static_cast<long long>(result.n_out()), a.out.c_str());
    return 0;
}

struct FrfArgs {
    std::string model, out;
    double fmin = 20.0, fmax = 500.0, df = 0.25;
};

int cmd_frf(const FrfArgs& a) {
    StateSpaceModel m = load_model(a.model);
    FrfMatrix f = synth_frf(m, frequency_grid(a.fmin, a.fmax, a.df));
    save_frf_csv(f, a.out);
    std::printf("synthesized %zu frequencies -> %s\n", f.n_freq(),
                a.out.c_str());
    return 0;
}

struct PerturbArgs {
    std::string in, out;
    double sigma = 5e-3;
    std::uint64_t seed = 0;
};

int cmd_frf_perturb(const PerturbArgs& a) {
    FrfMatrix f = load_frf_csv(a.in, ResponseKind::Accelerance);
    NoiseSpec noise;
    noise.sigma = a.sigma;
    noise.seed = a.seed;
    save_frf_csv(perturb_frf(f, noise), a.out);
    std::printf("perturbed %zu frequencies (sigma=%g, seed=%llu) -> %s\n",
                f.n_freq(), a.sigma, static_cast<unsigned long long>(a.seed),
                a.out.c_str());
    return 0;
}

struct LmfbsCoupleArgs {
    std::vector<std::string> frfs;
    std::string pairs, out;
    std::string kind = "accelerance";
    bool retain_unique = false;
};

int cmd_lmfbs_couple(const LmfbsCoupleArgs& a) {
    ResponseKind kind = response_kind_from_string(a.kind);
    std::vector<FrfMatrix> frfs;
    for (const std::string& path : a.frfs)
        frfs.push_back(load_frf_csv(path, kind));
    FrfMatrix coupled =
        lmfbs_couple(frfs, load_pairing(a.pairs), a.retain_unique);
    save_frf_csv(coupled, a.out);
    std::printf("coupled %zu FRFs over %zu frequencies -> %s\n", frfs.size(),
                coupled.n_freq(), a.out.c_str());
    return 0;
}

struct LmfbsDecoupleArgs {
    std::string assembly, remove, pairs, keep, out;
    std::string kind = "accelerance";
};

int cmd_lmfbs_decouple(const LmfbsDecoupleArgs& a) {
    ResponseKind kind = response_kind_from_string(a.kind);
    FrfMatrix result =
        lmfbs_decouple(load_frf_csv(a.assembly, kind),
                       load_frf_csv(a.remove, kind), load_pairing(a.pairs),
                       load_dof_list(a.keep));
    save_frf_csv(result, a.out);
    std::printf("decoupled FRF over %zu frequencies -> %s\n", result.n_freq(),
                a.out.c_str());
    return 0;
}

int cmd_stiffness(const std::string& in, const std::string& out) {
    FrfMatrix f = load_frf_csv(in, ResponseKind::Accelerance);
    std::vector<std::size_t> failed;
    FrfMatrix z = dynamic_stiffness(f, failed);
    if (!failed.empty())
        std::fprintf(stderr,
                     "warning: accelerance singular at %zu of %zu frequencies; "
                     "entries marked NaN\n",
                     failed.size(), f.n_freq());
    save_frf_csv(z, out);
    std::printf("dynamic stiffness over %zu frequencies -> %s\n", z.n_freq(),
                out.c_str());
    return 0;
}

struct CompareArgs {
    std::string a, b, report;
    double tol = 1e-8;
};

int cmd_compare(const CompareArgs& args) {
    FrfMatrix fa = load_frf_csv(args.a, ResponseKind::Accelerance);
    FrfMatrix fb = load_frf_csv(args.b, ResponseKind::Accelerance);
    ComparisonResult r = compare_frf(fa, fb, args.tol);
    if (!args.report.empty()) save_comparison_report(r, args.report);
    std::printf("max_rel_err=%.6e at %g Hz (%s / %s), tol=%g: %s\n",
                r.max_rel_err, r.argmax_freq_hz,
                to_string(r.argmax_out).c_str(), to_string(r.argmax_in).c_str(),
                r.tolerance, r.pass ? "PASS" : "FAIL");
    return r.pass ? 0 : 1;
}

struct BenchArgs {
    std::string njs = "2,6,12,24";
    int trials = 10000;
    std::uint64_t seed = 1;
    std::string report;
};

int cmd_bench(const BenchArgs& a) {
    BenchReport r = bench_inversions(parse_int_list(a.njs), a.trials, a.seed);
    if (!a.report.empty()) save_bench_report(r, a.report);
    for (const BenchResult& b : r.results)
        std::printf("n_j=%d median %ges vs classical %ges (ratio %.2f)\n",
                    b.n_j, b.lmsss_median_s, b.classical_median_s, b.ratio);
    std::printf("spearman_rho=%.3f over %d trials per size\n", r.spearman_rho,
                r.trials);
    return 0;
}

struct ConvertArgs {
    std::string in, out;
    std::string to = "accel";
};

int cmd_model_convert(const ConvertArgs& a) {
    StateSpaceModel m = load_model(a.in);
    StateSpaceModel result;
    if (a.to == "modal") {
        result = to_modal_form(m);
    } else {
        OutputKind target = output_kind_from_string(a.to);
        if (target == m.kind) {
            result = m;
        } else if (m.kind == OutputKind::Displacement &&
                   target == OutputKind::Acceleration) {
            result = to_acceleration(m);
        } else if (m.kind == OutputKind::Displacement &&
                   target == OutputKind::Velocity) {
            result = to_velocity(m);
        } else {
            throw std::invalid_argument("cannot convert a " + to_string(m.kind) +
                                        " model to " + a.to +
                                        " (only displacement models convert "
                                        "upward)");
        }
    }
    save_model(result, a.out);
    std::printf("wrote %s model -> %s\n",
                a.to == "modal" ? to_string(result.kind).c_str() : a.to.c_str(),
                a.out.c_str());
    return 0;
}

int cmd_model_info(const std::string& in) {
    StateSpaceModel m = load_model(in);
    StabilitySummary s = stability_summary(m);
    int internal = 0, iface = 0, deriv = 0;
    for (StateTag t : m.state_tags) {
        if (t == StateTag::Internal) ++internal;
        else if (t == StateTag::InterfaceOutput) ++iface;
        else ++deriv;
    }
    std::printf("kind: %s\n", to_string(m.kind).c_str());
    std::printf("states: %lld (%d internal, %d interface output, %d derivative)\n",
                static_cast<long long>(m.n()), internal, iface, deriv);
    std::printf("inputs: %lld, outputs: %lld\n",
                static_cast<long long>(m.n_in()),
                static_cast<long long>(m.n_out()));
    for (const DofLabel& l : m.outputs)
        std::printf("  %s\n", to_string(l).c_str());
    std::printf("max pole real part: %g (%d in right half plane)\n",
                s.max_real_part, s.right_half_plane_poles);
    return 0;
}

int cmd_model_validate(const std::string& in) {
    StateSpaceModel m;
    try {
        m = load_model(in);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "invalid: %s\n", e.what());
        return 1;
    }
    std::printf("valid: %s\n", in.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"State-space substructuring: couple, decouple and transform "
                 "collocated structural models"};
    app.require_subcommand(1);
    int rc = 0;

    auto* example = app.add_subcommand("example", "Bundled two-component example");
    example->require_subcommand(1);
    ExampleBuildArgs example_args;
    auto* example_build =
        example->add_subcommand("build", "Write example models and oracle FRF");
    example_build->add_option("--config", example_args.config,
                              "Example config JSON (defaults to the bundled "
                              "two-component chain)");
    example_build->add_option("--out-dir", example_args.out_dir, "Output directory")
        ->required();
    example_build->callback([&] { rc = cmd_example_build(example_args); });

    CoupleArgs couple_args;
    auto* couple = app.add_subcommand("couple", "Couple collocated models");
    couple->add_option("--models", couple_args.models, "Model JSON files")
        ->required()
        ->expected(2, -1);
    couple->add_option("--pairs", couple_args.pairs, "Pairing JSON")->required();
    couple->add_option("--variant", couple_args.variant, "Coupling variant")
        ->check(CLI::IsMember({"accel", "disp", "vel"}));
    couple->add_option("--form", couple_args.form,
                       "Coupling-form transform applied to each model first")
        ->check(CLI::IsMember({"none", "ucf", "sacf", "ncf"}));
    couple->add_flag("--minimal", couple_args.minimal,
                     "Remove duplicated interface states (needs --form)");
    couple->add_flag("--retain-unique", couple_args.retain_unique,
                     "Collapse paired DOFs to one per pair");
    couple->add_option("--transform-report", couple_args.transform_report,
                       "Write per-model transform diagnostics JSON");
    couple->add_option("--out", couple_args.out, "Coupled model JSON")->required();
    couple->callback([&] { rc = cmd_couple(couple_args); });

    DecoupleArgs decouple_args;
    auto* dec = app.add_subcommand("decouple", "Remove a component from an assembly");
    dec->add_option("--assembly", decouple_args.assembly, "Assembly model JSON")
        ->required();
    dec->add_option("--remove", decouple_args.remove, "Model to remove")->required();
    dec->add_option("--pairs", decouple_args.pairs, "Pairing JSON")->required();
    dec->add_option("--keep", decouple_args.keep, "JSON list of DOFs to keep")
        ->required();
    dec->add_option("--form", decouple_args.form,
                    "Transform both models and drop duplicated interface states")
        ->check(CLI::IsMember({"none", "ucf", "sacf", "ncf"}));
    dec->add_option("--out", decouple_args.out, "Result model JSON")->required();
    dec->callback([&] { rc = cmd_decouple(decouple_args); });

    FrfArgs frf_args;
    PerturbArgs perturb_args;
    auto* frf = app.add_subcommand("frf", "Synthesize FRFs from a model");
    frf->require_subcommand(0, 1);
    frf->add_option("--model", frf_args.model, "Model JSON");
    frf->add_option("--fmin", frf_args.fmin, "Start frequency (Hz)");
    frf->add_option("--fmax", frf_args.fmax, "End frequency (Hz)");
    frf->add_option("--df", frf_args.df, "Frequency step (Hz)");
    frf->add_option("--out", frf_args.out, "Output CSV");
    auto* perturb = frf->add_subcommand("perturb", "Add seeded Gaussian noise");
    perturb->add_option("--in", perturb_args.in, "Input CSV")->required();
    perturb->add_option("--sigma", perturb_args.sigma, "Noise std deviation");
    perturb->add_option("--seed", perturb_args.seed, "RNG seed");
    perturb->add_option("--out", perturb_args.out, "Output CSV")->required();
    perturb->callback([&] { rc = cmd_frf_perturb(perturb_args); });
    frf->callback([&] {
        if (perturb->parsed()) return;
        if (frf_args.model.empty() || frf_args.out.empty())
            throw CLI::RequiredError("frf: --model and --out");
        rc = cmd_frf(frf_args);
    });

    auto* lmfbs = app.add_subcommand("lmfbs", "Frequency-based coupling on CSVs");
    lmfbs->require_subcommand(1);
    LmfbsCoupleArgs lmfbs_couple_args;
    auto* lc = lmfbs->add_subcommand("couple", "Couple FRF matrices");
    lc->add_option("--frfs", lmfbs_couple_args.frfs, "FRF CSV files")
        ->required()
        ->expected(2, -1);
    lc->add_option("--pairs", lmfbs_couple_args.pairs, "Pairing JSON")->required();
    lc->add_option("--kind", lmfbs_couple_args.kind, "Response kind of the CSVs")
        ->check(CLI::IsMember(
            {"receptance", "mobility", "accelerance", "dynamic_stiffness"}));
    lc->add_flag("--retain-unique", lmfbs_couple_args.retain_unique,
                 "Collapse paired DOFs to one per pair");
    lc->add_option("--out", lmfbs_couple_args.out, "Output CSV")->required();
    lc->callback([&] { rc = cmd_lmfbs_couple(lmfbs_couple_args); });
    LmfbsDecoupleArgs lmfbs_dec_args;
    auto* ld = lmfbs->add_subcommand("decouple", "Decouple FRF matrices");
    ld->add_option("--assembly", lmfbs_dec_args.assembly, "Assembly FRF CSV")
        ->required();
    ld->add_option("--remove", lmfbs_dec_args.remove, "FRF of removed component")
        ->required();
    ld->add_option("--pairs", lmfbs_dec_args.pairs, "Pairing JSON")->required();
    ld->add_option("--keep", lmfbs_dec_args.keep, "JSON list of DOFs to keep")
        ->required();
    ld->add_option("--kind", lmfbs_dec_args.kind, "Response kind of the CSVs")
        ->check(CLI::IsMember(
            {"receptance", "mobility", "accelerance", "dynamic_stiffness"}));
    ld->add_option("--out", lmfbs_dec_args.out, "Output CSV")->required();
    ld->callback([&] { rc = cmd_lmfbs_decouple(lmfbs_dec_args); });

    std::string stiffness_in, stiffness_out;
    auto* stiff = app.add_subcommand("stiffness",
                                     "Invert accelerance to dynamic stiffness");
    stiff->add_option("--in", stiffness_in, "Accelerance CSV")->required();
    stiff->add_option("--out", stiffness_out, "Output CSV")->required();
    stiff->callback([&] { rc = cmd_stiffness(stiffness_in, stiffness_out); });

    CompareArgs compare_args;
    auto* cmp = app.add_subcommand("compare", "Worst-entry relative FRF deviation");
    cmp->add_option("--a", compare_args.a, "First CSV")->required();
    cmp->add_option("--b", compare_args.b, "Second CSV")->required();
    cmp->add_option("--tol", compare_args.tol, "Pass/fail tolerance");
    cmp->add_option("--report", compare_args.report, "Write comparison JSON");
    cmp->callback([&] { rc = cmd_compare(compare_args); });

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench",
                                     "Time interface factorizations per method");
    bench->add_option("--njs", bench_args.njs, "Comma-separated interface sizes");
    bench->add_option("--trials", bench_args.trials, "Trials per size");
    bench->add_option("--seed", bench_args.seed, "RNG seed");
    bench->add_option("--report", bench_args.report, "Write bench JSON");
    bench->callback([&] { rc = cmd_bench(bench_args); });

    auto* model = app.add_subcommand("model", "Inspect and convert model files");
    model->require_subcommand(1);
    ConvertArgs convert_args;
    auto* conv = model->add_subcommand("convert", "Change output kind or state basis");
    conv->add_option("--in", convert_args.in, "Input model JSON")->required();
    conv->add_option("--to", convert_args.to, "Target form")
        ->check(CLI::IsMember({"disp", "vel", "accel", "modal"}));
    conv->add_option("--out", convert_args.out, "Output model JSON")->required();
    conv->callback([&] { rc = cmd_model_convert(convert_args); });
    std::string info_in;
    auto* info = model->add_subcommand("info", "Print model summary");
    info->add_option("--in", info_in, "Model JSON")->required();
    info->callback([&] { rc = cmd_model_info(info_in); });
    std::string validate_in;
    auto* val = model->add_subcommand("validate", "Check model invariants");
    val->add_option("--in", validate_in, "Model JSON")->required();
    val->callback([&] { rc = cmd_model_validate(validate_in); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return rc;
}
