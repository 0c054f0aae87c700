#pragma once

#include "dss/bench.hpp"
#include "dss/compare.hpp"
#include "dss/coupling_form.hpp"
#include "dss/example.hpp"
#include "dss/interface_map.hpp"
#include "dss/types.hpp"

#include <string>
#include <vector>

namespace dss {

/// Canonical JSON model files: fixed key order, shortest round-trip number
/// formatting, so save(load(x)) reproduces x byte for byte.
StateSpaceModel load_model(const std::string& path);
void save_model(const StateSpaceModel& m, const std::string& path);

InterfacePairing load_pairing(const std::string& path);
void save_pairing(const InterfacePairing& p, const std::string& path);

/// Plain JSON array of DofLabel objects (the --keep argument of decoupling).
std::vector<DofLabel> load_dof_list(const std::string& path);
void save_dof_list(const std::vector<DofLabel>& labels, const std::string& path);

/// CSV columns freq_hz,out_label,in_label,re,im in ascending frequency, then
/// output, then input order. The format does not carry the response kind;
/// callers state what the file holds.
FrfMatrix load_frf_csv(const std::string& path, ResponseKind kind);
void save_frf_csv(const FrfMatrix& f, const std::string& path);

ExampleConfig load_example_config(const std::string& path);
void save_example_config(const ExampleConfig& c, const std::string& path);

void save_comparison_report(const ComparisonResult& r, const std::string& path);
void save_bench_report(const BenchReport& r, const std::string& path);
void save_transform_reports(const std::vector<CouplingFormTransform>& transforms,
                            const std::vector<bool>& ok_flags,
                            const std::string& path);

}  // namespace dss
