// Serial reference vs OpenMP for the independent-job kernels. Prints wall
// times, the speedup, and whether both runs agree bit for bit.
//
//   bench_kernels [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <vector>

#include "spectra/scattering.hpp"
#include "spectra/sweep.hpp"

using namespace spectra;

namespace {

template <class F>
auto timed(F&& f, double& seconds) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = f();
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

template <class Run, class Same>
void compare(const char* name, Run&& run, Same&& same) {
    double ts = 0, tp = 0;
    const auto s = timed([&] { return run(Execution::serial); }, ts);
    const auto p = timed([&] { return run(Execution::parallel); }, tp);
    std::printf("%-22s serial %8.3f s  parallel %8.3f s  speedup %5.2f  identical %s\n", name, ts, tp, ts / tp,
                same(s, p) ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) set_thread_count(std::atoi(argv[1]));
    std::printf("threads: %d\n", thread_count());

    std::vector<double> ks(400);
    for (std::size_t i = 0; i < ks.size(); ++i) ks[i] = 0.05 * static_cast<double>(i + 1);
    const auto well = Potential::square_well(1.0, 0.0, 2.0);
    compare(
        "jost sweep (400 k)", [&](Execution e) { return jost_coefficients(well, ks, {}, e); },
        [](const ScatteringData& a, const ScatteringData& b) { return a.a == b.a && a.b == b.b; });

    const std::vector<double> scan_k{0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5};
    compare(
        "embedded scan (8 k)",
        [&](Execution e) {
            ScanConfig c;
            c.horizon = 2e3;
            c.window = {20.0, 2e3};
            c.exec = e;
            return embedded_scan(Potential::wigner_von_neumann(), scan_k, c);
        },
        [](const ScanResult& a, const ScanResult& b) {
            for (std::size_t i = 0; i < a.rows.size(); ++i)
                if (a.rows[i].forward_slope != b.rows[i].forward_slope ||
                    a.rows[i].subordinate_slope != b.rows[i].subordinate_slope)
                    return false;
            return true;
        });

    std::vector<std::uint64_t> seeds(16);
    std::iota(seeds.begin(), seeds.end(), 0);
    compare(
        "ensemble (16 seeds)",
        [&](Execution e) {
            EnsembleConfig c;
            c.alpha = 0.5;
            c.horizon_n = 2000;
            c.exec = e;
            return random_ensemble(seeds, c);
        },
        [](const std::vector<EnsembleRow>& a, const std::vector<EnsembleRow>& b) {
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i].final_log_R2 != b[i].final_log_R2 || a[i].sup_log_R != b[i].sup_log_R) return false;
            return true;
        });

    std::vector<TreePotential> trees;
    for (std::uint64_t s = 0; s < 64; ++s) trees.push_back(TreePotential::random(8, s));
    compare(
        "entropy (64 trees)", [&](Execution e) { return verify_pearson_many(trees, {}, e); },
        [](const std::vector<EntropyReport>& a, const std::vector<EntropyReport>& b) {
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i].s_root != b[i].s_root) return false;
            return true;
        });
}
