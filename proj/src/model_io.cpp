#include "dss/model_io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace dss {

namespace {

using json = nlohmann::ordered_json;

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
}

json label_to_json(const DofLabel& l) {
    json j;
    j["component"] = l.component;
    j["node"] = l.node;
    j["direction"] = to_string(l.direction);
    j["kind"] = to_string(l.kind);
    return j;
}

DofLabel label_from_json(const json& j, const std::string& where) {
    try {
        DofLabel l;
        l.component = j.at("component").get<std::string>();
        l.node = j.at("node").get<std::string>();
        l.direction = direction_from_string(j.at("direction").get<std::string>());
        l.kind = dof_kind_from_string(j.at("kind").get<std::string>());
        return l;
    } catch (const json::exception& e) {
        throw std::runtime_error(where + ": bad DOF label: " + e.what());
    }
}

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array())
        throw std::runtime_error(where + ": expected an array of rows");
    Index rows = static_cast<Index>(j.size());
    Index cols = rows > 0 ? static_cast<Index>(j.at(0).size()) : 0;
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const json& row = j.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            throw std::runtime_error(where + ": row " + std::to_string(i) +
                                     " has inconsistent length");
        for (Index c = 0; c < cols; ++c)
            m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw std::runtime_error("number formatting failed");
    return std::string(buf, end);
}

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [end, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || end != last)
        throw std::runtime_error(where + ": bad number \"" + s + "\"");
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(line.substr(start));
            break;
        }
        parts.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

}  // namespace

StateSpaceModel load_model(const std::string& path) {
    json j = parse_file(path);
    StateSpaceModel m;
    try {
        m.kind = output_kind_from_string(j.at("output_kind").get<std::string>());
        for (const json& l : j.at("inputs"))
            m.inputs.push_back(label_from_json(l, path));
        for (const json& l : j.at("outputs"))
            m.outputs.push_back(label_from_json(l, path));
        for (const json& t : j.at("state_tags"))
            m.state_tags.push_back(state_tag_from_string(t.get<std::string>()));
        m.A = matrix_from_json(j.at("A"), path + ": A");
        m.B = matrix_from_json(j.at("B"), path + ": B");
        m.C = matrix_from_json(j.at("C"), path + ": C");
        m.D = matrix_from_json(j.at("D"), path + ": D");
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    if (m.B.rows() == 0) m.B.resize(m.A.rows(), 0);
    if (m.C.rows() == 0) m.C.resize(0, m.A.rows());
    ensure_valid(m, path);
    return m;
}

void save_model(const StateSpaceModel& m, const std::string& path) {
    ensure_valid(m, "save_model");
    json j;
    j["output_kind"] = to_string(m.kind);
    j["inputs"] = json::array();
    for (const DofLabel& l : m.inputs) j["inputs"].push_back(label_to_json(l));
    j["outputs"] = json::array();
    for (const DofLabel& l : m.outputs) j["outputs"].push_back(label_to_json(l));
    j["state_tags"] = json::array();
    for (StateTag t : m.state_tags) j["state_tags"].push_back(to_string(t));
    j["A"] = matrix_to_json(m.A);
    j["B"] = matrix_to_json(m.B);
    j["C"] = matrix_to_json(m.C);
    j["D"] = matrix_to_json(m.D);
    write_file(path, j.dump(2) + "\n");
}

InterfacePairing load_pairing(const std::string& path) {
    json j = parse_file(path);
    InterfacePairing p;
    try {
        for (const json& pj : j.at("pairs")) {
            InterfacePair pair;
            pair.a = label_from_json(pj.at("a"), path);
            pair.b = label_from_json(pj.at("b"), path);
            std::string sign = pj.value("sign", "+");
            if (sign != "+" && sign != "-")
                throw std::runtime_error(path + ": pair sign must be + or -");
            pair.sign = sign == "+" ? +1 : -1;
            p.pairs.push_back(std::move(pair));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return p;
}

void save_pairing(const InterfacePairing& p, const std::string& path) {
    json j;
    j["pairs"] = json::array();
    for (const InterfacePair& pair : p.pairs) {
        json pj;
        pj["a"] = label_to_json(pair.a);
        pj["b"] = label_to_json(pair.b);
        pj["sign"] = pair.sign >= 0 ? "+" : "-";
        j["pairs"].push_back(std::move(pj));
    }
    write_file(path, j.dump(2) + "\n");
}

std::vector<DofLabel> load_dof_list(const std::string& path) {
    json j = parse_file(path);
    if (!j.is_array())
        throw std::runtime_error(path + ": expected an array of DOF labels");
    std::vector<DofLabel> labels;
    for (const json& l : j) labels.push_back(label_from_json(l, path));
    return labels;
}

void save_dof_list(const std::vector<DofLabel>& labels,
                   const std::string& path) {
    json j = json::array();
    for (const DofLabel& l : labels) j.push_back(label_to_json(l));
    write_file(path, j.dump(2) + "\n");
}

FrfMatrix load_frf_csv(const std::string& path, ResponseKind kind) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "freq_hz,out_label,in_label,re,im")
        throw std::runtime_error(path + ": missing or malformed CSV header");

    FrfMatrix f;
    f.kind = kind;
    struct Row {
        std::size_t freq, out, in;
        std::complex<double> value;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    auto index_of = [](std::vector<DofLabel>& list, const DofLabel& l) {
        Index i = find_dof(list, l);
        if (i >= 0) return static_cast<std::size_t>(i);
        list.push_back(l);
        return list.size() - 1;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> parts = split(line, ',');
        std::string where = path + ":" + std::to_string(line_no);
        if (parts.size() != 5)
            throw std::runtime_error(where + ": expected 5 fields, got " +
                                     std::to_string(parts.size()));
        double freq = parse_double(parts[0], where);
        if (f.freq_hz.empty() || freq > f.freq_hz.back())
            f.freq_hz.push_back(freq);
        else if (freq != f.freq_hz.back())
            throw std::runtime_error(where +
                                     ": frequencies out of ascending order");
        std::size_t fi = f.freq_hz.size() - 1;
        Row r;
        r.freq = fi;
        r.out = index_of(f.outputs, dof_label_from_string(parts[1]));
        r.in = index_of(f.inputs, dof_label_from_string(parts[2]));
        r.value = {parse_double(parts[3], where), parse_double(parts[4], where)};
        rows.push_back(r);
    }
    if (f.freq_hz.empty())
        throw std::runtime_error(path + ": no data rows");

    const std::size_t nf = f.freq_hz.size();
    const std::size_t no = f.outputs.size();
    const std::size_t ni = f.inputs.size();
    if (rows.size() != nf * no * ni)
        throw std::runtime_error(path + ": incomplete FRF grid (" +
                                 std::to_string(rows.size()) + " rows for " +
                                 std::to_string(nf * no * ni) + " cells)");
    f.H.assign(nf, CMat::Zero(static_cast<Index>(no), static_cast<Index>(ni)));
    std::vector<char> seen(nf * no * ni, 0);
    for (const Row& r : rows) {
        std::size_t cell = (r.freq * no + r.out) * ni + r.in;
        if (seen[cell])
            throw std::runtime_error(path + ": duplicate entry for " +
                                     to_string(f.outputs[r.out]) + "/" +
                                     to_string(f.inputs[r.in]));
        seen[cell] = 1;
        f.H[r.freq](static_cast<Index>(r.out), static_cast<Index>(r.in)) =
            r.value;
    }
    return f;
}

void save_frf_csv(const FrfMatrix& f, const std::string& path) {
    std::string text = "freq_hz,out_label,in_label,re,im\n";
    for (std::size_t k = 0; k < f.n_freq(); ++k) {
        std::string freq = format_double(f.freq_hz[k]);
        for (std::size_t i = 0; i < f.outputs.size(); ++i) {
            for (std::size_t j = 0; j < f.inputs.size(); ++j) {
                const std::complex<double>& v =
                    f.H[k](static_cast<Index>(i), static_cast<Index>(j));
                text += freq;
                text += ',';
                text += to_string(f.outputs[i]);
                text += ',';
                text += to_string(f.inputs[j]);
                text += ',';
                text += format_double(v.real());
                text += ',';
                text += format_double(v.imag());
                text += '\n';
            }
        }
    }
    write_file(path, text);
}

ExampleConfig load_example_config(const std::string& path) {
    json j = parse_file(path);
    ExampleConfig c;
    try {
        for (const auto& [name, pj] : j.at("parameters").items()) {
            MassSpringParam p;
            p.m = pj.at("m").get<double>();
            if (pj.contains("c")) p.c = pj.at("c").get<double>();
            if (pj.contains("k")) p.k = pj.at("k").get<double>();
            c.parameters[name] = p;
        }
        c.dofs_a = j.at("dofs_a").get<std::vector<std::string>>();
        c.dofs_b = j.at("dofs_b").get<std::vector<std::string>>();
        auto links = [&](const char* key) {
            std::vector<SpringLink> out;
            for (const json& lj : j.at(key))
                out.push_back({lj.at("from").get<std::string>(),
                               lj.at("to").get<std::string>(),
                               lj.at("param").get<std::string>()});
            return out;
        };
        c.links_a = links("links_a");
        c.links_b = links("links_b");
        for (const json& pj : j.at("interface_pairs")) {
            if (!pj.is_array() || pj.size() != 2)
                throw std::runtime_error(path +
                                         ": interface pairs must be 2-element "
                                         "arrays");
            c.interface_pairs.emplace_back(pj.at(0).get<std::string>(),
                                           pj.at(1).get<std::string>());
        }
        c.fmin_hz = j.value("fmin_hz", c.fmin_hz);
        c.fmax_hz = j.value("fmax_hz", c.fmax_hz);
        c.df_hz = j.value("df_hz", c.df_hz);
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return c;
}

void save_example_config(const ExampleConfig& c, const std::string& path) {
    json j;
    j["parameters"] = json::object();
    for (const auto& [name, p] : c.parameters) {
        json pj;
        pj["m"] = p.m;
        if (p.c) pj["c"] = *p.c;
        if (p.k) pj["k"] = *p.k;
        j["parameters"][name] = std::move(pj);
    }
    j["dofs_a"] = c.dofs_a;
    j["dofs_b"] = c.dofs_b;
    auto links = [](const std::vector<SpringLink>& ls) {
        json out = json::array();
        for (const SpringLink& l : ls) {
            json lj;
            lj["from"] = l.from;
            lj["to"] = l.to;
            lj["param"] = l.param;
            out.push_back(std::move(lj));
        }
        return out;
    };
    j["links_a"] = links(c.links_a);
    j["links_b"] = links(c.links_b);
    j["interface_pairs"] = json::array();
    for (const auto& [a, b] : c.interface_pairs)
        j["interface_pairs"].push_back(json::array({a, b}));
    j["fmin_hz"] = c.fmin_hz;
    j["fmax_hz"] = c.fmax_hz;
    j["df_hz"] = c.df_hz;
    write_file(path, j.dump(2) + "\n");
}

void save_comparison_report(const ComparisonResult& r, const std::string& path) {
    json j;
    j["max_rel_err"] = r.max_rel_err;
    j["argmax_freq_hz"] = r.argmax_freq_hz;
    j["argmax_out"] = to_string(r.argmax_out);
    j["argmax_in"] = to_string(r.argmax_in);
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    write_file(path, j.dump(2) + "\n");
}

void save_bench_report(const BenchReport& r, const std::string& path) {
    json j;
    j["trials"] = r.trials;
    j["results"] = json::array();
    for (const BenchResult& b : r.results) {
        json bj;
        bj["n_j"] = b.n_j;
        bj["lmsss_mean_s"] = b.lmsss_mean_s;
        bj["lmsss_median_s"] = b.lmsss_median_s;
        bj["classical_mean_s"] = b.classical_mean_s;
        bj["classical_median_s"] = b.classical_median_s;
        bj["ratio"] = b.ratio;
        j["results"].push_back(std::move(bj));
    }
    j["spearman_rho"] = r.spearman_rho;
    write_file(path, j.dump(2) + "\n");
}

void save_transform_reports(const std::vector<CouplingFormTransform>& transforms,
                            const std::vector<bool>& ok_flags,
                            const std::string& path) {
    if (transforms.size() != ok_flags.size())
        throw std::invalid_argument(
            "save_transform_reports: transform and flag counts differ");
    json j = json::array();
    for (std::size_t i = 0; i < transforms.size(); ++i) {
        const CouplingFormTransform& t = transforms[i];
        json tj;
        tj["kind"] = to_string(t.kind);
        tj["ok"] = static_cast<bool>(ok_flags[i]);
        tj["n_states"] = t.T.rows();
        tj["condition_number"] = t.condition_number;
        tj["ncf_residual"] = t.ncf_residual;
        j.push_back(std::move(tj));
    }
    write_file(path, j.dump(2) + "\n");
}

}  // namespace dss
