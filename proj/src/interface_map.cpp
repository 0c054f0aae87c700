#include "dss/interface_map.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace dss {

namespace {

struct ResolvedSide {
    std::size_t model = 0;
    Index local = 0;
};

// Locates `wanted` across the per-model label lists, requiring exactly one
// match so pairs are unambiguous even if two models share label names.
ResolvedSide resolve_side(const std::vector<std::vector<DofLabel>>& lists,
                          const DofLabel& wanted, const char* side,
                          std::size_t pair_index) {
    ResolvedSide found;
    int matches = 0;
    for (std::size_t s = 0; s < lists.size(); ++s) {
        Index i = find_dof(lists[s], wanted);
        if (i >= 0) {
            found = ResolvedSide{s, i};
            ++matches;
        }
    }
    if (matches == 0)
        throw std::invalid_argument("pair " + std::to_string(pair_index) + " side " +
                                    side + ": DOF " + to_string(wanted) +
                                    " not found in any model");
    if (matches > 1)
        throw std::invalid_argument("pair " + std::to_string(pair_index) + " side " +
                                    side + ": DOF " + to_string(wanted) +
                                    " is ambiguous across models");
    return found;
}

// Boolean nullspace of a signed pairing: every dropped index maps onto its
// kept partner, all other indices map onto themselves.
IMat retention_matrix(Index n_total,
                      const std::vector<std::pair<Index, Index>>& pairs,
                      std::vector<Index>& kept_out) {
    std::vector<Index> partner(static_cast<std::size_t>(n_total), -1);
    std::vector<bool> dropped(static_cast<std::size_t>(n_total), false);
    for (const auto& [keep, drop] : pairs) {
        partner[static_cast<std::size_t>(drop)] = keep;
        dropped[static_cast<std::size_t>(drop)] = true;
    }
    kept_out.clear();
    std::vector<Index> unique_col(static_cast<std::size_t>(n_total), -1);
    for (Index i = 0; i < n_total; ++i) {
        if (!dropped[static_cast<std::size_t>(i)]) {
            unique_col[static_cast<std::size_t>(i)] =
                static_cast<Index>(kept_out.size());
            kept_out.push_back(i);
        }
    }
    IMat L = IMat::Zero(n_total, static_cast<Index>(kept_out.size()));
    for (Index i = 0; i < n_total; ++i) {
        Index target = dropped[static_cast<std::size_t>(i)]
                           ? partner[static_cast<std::size_t>(i)]
                           : i;
        L(i, unique_col[static_cast<std::size_t>(target)]) = 1;
    }
    return L;
}

}  // namespace

InterfaceMap build_mapping(const std::vector<std::vector<DofLabel>>& model_dofs,
                           const InterfacePairing& pairing) {
    InterfaceMap map;
    std::vector<Index> offset;
    Index total = 0;
    for (const auto& list : model_dofs) {
        offset.push_back(total);
        total += static_cast<Index>(list.size());
        map.column_labels.insert(map.column_labels.end(), list.begin(), list.end());
    }

    const Index n_pairs = static_cast<Index>(pairing.pairs.size());
    map.B_M = IMat::Zero(n_pairs, total);
    std::vector<bool> used(static_cast<std::size_t>(total), false);
    for (std::size_t p = 0; p < pairing.pairs.size(); ++p) {
        const InterfacePair& pair = pairing.pairs[p];
        ResolvedSide a = resolve_side(model_dofs, pair.a, "a", p);
        ResolvedSide b = resolve_side(model_dofs, pair.b, "b", p);
        if (a.model == b.model)
            throw std::invalid_argument("pair " + std::to_string(p) +
                                        " connects two DOFs of the same model");
        Index ga = offset[a.model] + a.local;
        Index gb = offset[b.model] + b.local;
        for (Index g : {ga, gb}) {
            if (used[static_cast<std::size_t>(g)])
                throw std::invalid_argument("DOF " + to_string(map.column_labels[g]) +
                                            " appears in more than one pair");
            used[static_cast<std::size_t>(g)] = true;
            if (map.column_labels[g].kind != DofKind::Interface)
                throw std::invalid_argument("pair " + std::to_string(p) +
                                            " references internal DOF " +
                                            to_string(map.column_labels[g]));
        }
        int sign = pair.sign >= 0 ? 1 : -1;
        map.B_M(static_cast<Index>(p), ga) = sign;
        map.B_M(static_cast<Index>(p), gb) = -sign;
        map.pair_columns.emplace_back(ga, gb);
    }

    map.L = retention_matrix(total, map.pair_columns, map.kept_columns);
    map.unique_labels.reserve(map.kept_columns.size());
    for (Index g : map.kept_columns) map.unique_labels.push_back(map.column_labels[g]);
    return map;
}

Mat boolean_pinv(const IMat& L) {
    const Index rows = L.rows();
    const Index cols = L.cols();
    std::vector<Index> col_sum(static_cast<std::size_t>(cols), 0);
    for (Index i = 0; i < rows; ++i) {
        Index ones_in_row = 0;
        for (Index j = 0; j < cols; ++j) {
            int v = L(i, j);
            if (v != 0 && v != 1)
                throw std::invalid_argument("retention matrix entries must be 0 or 1");
            if (v == 1) {
                ++ones_in_row;
                ++col_sum[static_cast<std::size_t>(j)];
            }
        }
        if (ones_in_row > 1)
            throw std::invalid_argument(
                "retention matrix row " + std::to_string(i) +
                " maps one DOF onto several unique DOFs");
    }
    Mat pinv = Mat::Zero(cols, rows);
    for (Index j = 0; j < cols; ++j) {
        Index s = col_sum[static_cast<std::size_t>(j)];
        if (s == 0)
            throw std::invalid_argument("retention matrix column " + std::to_string(j) +
                                        " is empty (rank deficient)");
        double w = 1.0 / static_cast<double>(s);
        for (Index i = 0; i < rows; ++i)
            if (L(i, j) == 1) pinv(j, i) = w;
    }
    return pinv;
}

StateReductionMap build_state_reduction(const std::vector<const StateSpaceModel*>& models,
                                        const InterfacePairing& pairing) {
    // Leading interface outputs and state offsets per model, read off the
    // coupling-form tags.
    std::vector<std::vector<DofLabel>> leading;
    std::vector<Index> n_lead;
    std::vector<Index> state_offset;
    Index total_states = 0;
    for (const StateSpaceModel* m : models) {
        Index nj = 0;
        while (nj < m->n() &&
               m->state_tags[static_cast<std::size_t>(nj)] == StateTag::DerivInterfaceOutput)
            ++nj;
        for (Index i = 0; i < nj; ++i) {
            if (nj + i >= m->n() ||
                m->state_tags[static_cast<std::size_t>(nj + i)] != StateTag::InterfaceOutput)
                throw std::invalid_argument(
                    "state tags do not pair derivative and output blocks");
        }
        if (nj > m->n_out())
            throw std::invalid_argument("more tagged interface states than outputs");
        leading.emplace_back(m->outputs.begin(), m->outputs.begin() + nj);
        n_lead.push_back(nj);
        state_offset.push_back(total_states);
        total_states += m->n();
    }

    const Index n_pairs = static_cast<Index>(pairing.pairs.size());
    StateReductionMap red;
    red.B_T = IMat::Zero(2 * n_pairs, total_states);
    std::vector<std::pair<Index, Index>> state_pairs;
    for (std::size_t p = 0; p < pairing.pairs.size(); ++p) {
        const InterfacePair& pair = pairing.pairs[p];
        ResolvedSide a = resolve_side(leading, pair.a, "a", p);
        ResolvedSide b = resolve_side(leading, pair.b, "b", p);
        if (a.model == b.model)
            throw std::invalid_argument("pair " + std::to_string(p) +
                                        " connects two DOFs of the same model");
        int sign = pair.sign >= 0 ? 1 : -1;
        Index row_d = static_cast<Index>(p);
        Index row_y = n_pairs + static_cast<Index>(p);
        Index a_d = state_offset[a.model] + a.local;
        Index a_y = a_d + n_lead[a.model];
        Index b_d = state_offset[b.model] + b.local;
        Index b_y = b_d + n_lead[b.model];
        red.B_T(row_d, a_d) = sign;
        red.B_T(row_d, b_d) = -sign;
        red.B_T(row_y, a_y) = sign;
        red.B_T(row_y, b_y) = -sign;
        state_pairs.emplace_back(a_d, b_d);
        state_pairs.emplace_back(a_y, b_y);
    }

    red.L_T = retention_matrix(total_states, state_pairs, red.kept_states);
    return red;
}

}  // namespace dss
