#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "desclab/descendants.hpp"
#include "desclab/graph.hpp"
#include "desclab/results.hpp"
#include "desclab/rng.hpp"

namespace desclab {

// Disjoint stream-id blocks (top bits) so adding a consumer never perturbs
// another's draws; the low 32 bits index replicates inside a block.
namespace stream_block {
constexpr uint64_t reference = 0;
constexpr uint64_t experiment = 1;
constexpr uint64_t battery_base = 16;  // battery check c uses base + c
constexpr uint64_t shift = 40;
constexpr uint64_t point_shift = 32;   // sub-series within a check
} // namespace stream_block

inline uint64_t stream_id_for(uint64_t block, uint64_t point, uint64_t index) {
    return (block << stream_block::shift) | (point << stream_block::point_shift) |
           index;
}

int resolve_threads(int requested);  // 0 means all hardware threads

// Dynamic parallel map over [0, count); results must be written to
// index-addressed slots so the outcome is independent of scheduling.
void parallel_for(int64_t count, int threads,
                  const std::function<void(int64_t)>& body);

struct ExperimentConfig {
    ModelParams params;
    int64_t replicates = 2000;
    enum class Pipeline { graph_bfs, recursion } pipeline = Pipeline::recursion;
    bool record_xi = false;
    std::vector<double> t_grid;             // curve probes, in scaled time
    std::vector<double> moments_p = {1.0, 2.0};
    std::vector<std::string> checks;        // battery selection; empty = all
    double scale = 1.0;                     // battery replicate multiplier
    int64_t beta_tilde_K = 100000;
    int64_t product_samples = 2000;
    int64_t xi_replicates = 2000;
    int threads = 0;
    std::string out_path;
    OutputFormat format = OutputFormat::csv;
};

ExperimentConfig config_from_json(const std::string& text);

// Raw per-replicate outputs of a distribution run, index-ordered.
struct DistributionSamples {
    std::vector<double> x_scaled;            // X / n^nu
    std::vector<double> xi;                  // filled when record_xi
    std::vector<int64_t> y_n1;               // filled when record_xi
    std::vector<std::vector<double>> y_probes;  // per t_grid entry, scaled
};

DistributionSamples collect_distribution_samples(const ExperimentConfig& config,
                                                 uint64_t block, uint64_t point);

ResultTable run_distribution_experiment(const ExperimentConfig& config);

// truncation-K approximation of the a.s. limit of k^{-kappa} Phi_k
double beta_tilde_sample(int m, double rho, int64_t K, RngStream& stream);

VerificationReport run_theory_battery(const ExperimentConfig& config);

} // namespace desclab
