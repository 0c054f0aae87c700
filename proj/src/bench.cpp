#include "dss/bench.hpp"

#include "dss/example.hpp"
#include "dss/factory.hpp"
#include "dss/lmsss.hpp"
#include "dss/reference.hpp"
#include "dss/solve_stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace dss {

namespace {

// Keeps the optimizer from dropping the factorizations under test.
volatile double g_sink = 0.0;

Mat random_spd(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Mat m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = dist(rng);
    return m * m.transpose() + static_cast<double>(n) * Mat::Identity(n, n);
}

double median(std::vector<double> v) {
    std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                     v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(),
                     v.begin() + static_cast<std::ptrdiff_t>(mid - 1), v.end());
    return 0.5 * (hi + v[mid - 1]);
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> rx = ranks(x), ry = ranks(y);
    double n = static_cast<double>(x.size());
    double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    double den = std::sqrt(dx * dy);
    return den > 0.0 ? num / den : 0.0;
}

// Confirms the instrumented factorization counts on the bundled two-component
// example before trusting the timings: one interface-sized factorization per
// coupling against two for the classical route.
void confirm_counts() {
    ExampleSystems ex = build_example(ExampleConfig::table_default());
    StateSpaceModel a = build_model(ex.component_a, OutputKind::Acceleration);
    StateSpaceModel b = build_model(ex.component_b, OutputKind::Acceleration);
    CouplingProblem p = make_problem({a, b}, ex.pairing);
    std::size_t n_j = ex.pairing.pairs.size();

    solve_stats::reset();
    couple_accel(p);
    if (solve_stats::factorization_count() != 1 ||
        solve_stats::factorization_dims() != std::vector<std::size_t>{n_j})
        throw std::logic_error(
            "bench_inversions: coupling did not perform exactly one "
            "interface-sized factorization");

    solve_stats::reset();
    classical_couple(p);
    if (solve_stats::factorization_count() != 2 ||
        solve_stats::factorization_dims() !=
            std::vector<std::size_t>{2 * n_j, n_j})
        throw std::logic_error(
            "bench_inversions: classical coupling did not perform exactly two "
            "factorizations (2 n_j then n_j)");
}

}  // namespace

BenchReport bench_inversions(const std::vector<int>& n_js, int trials,
                             std::uint64_t seed) {
    if (n_js.empty() || trials < 1)
        throw std::invalid_argument(
            "bench_inversions: need at least one size and one trial");
    confirm_counts();

    std::mt19937_64 rng(seed);
    BenchReport report;
    report.trials = trials;

    for (int n_j : n_js) {
        if (n_j < 1)
            throw std::invalid_argument("bench_inversions: sizes must be >= 1");
        Mat w_small = random_spd(n_j, rng);
        Mat w_large = random_spd(2 * n_j, rng);

        for (int i = 0; i < 8; ++i) {  // warm-up, untimed
            Eigen::PartialPivLU<Mat> lu_s(w_small);
            Eigen::PartialPivLU<Mat> lu_l(w_large);
            g_sink = g_sink + lu_s.matrixLU()(0, 0) + lu_l.matrixLU()(0, 0);
        }

        std::vector<double> t_lmsss, t_classical;
        t_lmsss.reserve(static_cast<std::size_t>(trials));
        t_classical.reserve(static_cast<std::size_t>(trials));
        for (int i = 0; i < trials; ++i) {
            auto t0 = std::chrono::steady_clock::now();
            {
                Eigen::PartialPivLU<Mat> lu(w_small);
                g_sink = g_sink + lu.matrixLU()(0, 0);
            }
            auto t1 = std::chrono::steady_clock::now();
            {
                Eigen::PartialPivLU<Mat> lu_l(w_large);
                Eigen::PartialPivLU<Mat> lu_s(w_small);
                g_sink = g_sink + lu_l.matrixLU()(0, 0) + lu_s.matrixLU()(0, 0);
            }
            auto t2 = std::chrono::steady_clock::now();
            t_lmsss.push_back(std::chrono::duration<double>(t1 - t0).count());
            t_classical.push_back(std::chrono::duration<double>(t2 - t1).count());
        }

        BenchResult r;
        r.n_j = n_j;
        r.lmsss_mean_s = std::accumulate(t_lmsss.begin(), t_lmsss.end(), 0.0) /
                         static_cast<double>(trials);
        r.classical_mean_s =
            std::accumulate(t_classical.begin(), t_classical.end(), 0.0) /
            static_cast<double>(trials);
        r.lmsss_median_s = median(t_lmsss);
        r.classical_median_s = median(t_classical);
        r.ratio = r.lmsss_median_s > 0.0
                      ? r.classical_median_s / r.lmsss_median_s
                      : std::numeric_limits<double>::infinity();
        report.results.push_back(r);
    }

    std::vector<double> sizes, ratios;
    for (const BenchResult& r : report.results) {
        sizes.push_back(static_cast<double>(r.n_j));
        ratios.push_back(r.ratio);
    }
    report.spearman_rho = spearman(sizes, ratios);
    return report;
}

}  // namespace dss
