#ifndef TOPK_EXPERIMENT_HPP
#define TOPK_EXPERIMENT_HPP

#include "topk/boosters.hpp"
#include "topk/data.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace topk {

// fullbbm / fullada are the same boosters with k = m and rho = 0, so every
// label is revealed and every pair weight is exactly 1.
enum class RunAlgorithm { TopBBM, TopAdaptive, FullBBM, FullAdaptive };

std::string_view to_string(RunAlgorithm a);
// Throws ConfigError on an unknown name.
RunAlgorithm parse_algorithm(std::string_view name);
SchemeKind parse_scheme(std::string_view name);
bool is_full_information(RunAlgorithm a);
Algorithm base_algorithm(RunAlgorithm a);

struct ExperimentConfig {
    RunAlgorithm algorithm = RunAlgorithm::TopBBM;
    std::filesystem::path train_path;
    std::filesystem::path test_path;
    std::size_t label_count = 0;  // 0: infer from the dataset
    std::size_t k = 3;
    double rho = 0.02;
    double gamma = 0.1;
    std::size_t learners = 50;
    std::size_t loops = 1;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    SchemeKind scheme = SchemeKind::Uniform;
    std::filesystem::path out_dir;  // empty: write nothing
    bool freeze = false;            // no updates during the test pass
    bool prob_clip = true;
    bool grad_clip = true;
    bool diagnostics = false;       // empirical edges (costly: keeps per-round detail)
    bool shuffle_loops = true;      // reshuffle the training set every loop
    std::size_t threads = 0;        // 0: one per hardware thread

    // Booster settings for m labels; full-information variants get k = m,
    // rho = 0 and no probability clipping.
    BoosterConfig booster_config(std::size_t m) const;
    // Throws ConfigError.
    void validate(std::size_t m) const;
};

struct Preset {
    std::size_t learners;
    double rho;
    std::size_t loops;
};

// Hyperparameters tuned per benchmark (k = 3). Full-information variants use
// the learner count of their top-k counterpart and a single training loop.
// Dataset names: emotions, scene, yeast, mediamill, m-reduced.
std::optional<Preset> preset_for(std::string_view dataset, RunAlgorithm algorithm);

struct CurvePoint {
    std::size_t round = 0;
    double avg_loss = 0.0;  // cumulative average weighted rank loss up to this round
    bool explored = false;
    std::size_t expert = 0;  // 1-based
};

struct SeedResult {
    std::uint64_t seed = 0;
    double train_loss = 0.0;  // average over the training stream
    double test_loss = 0.0;   // average over the test stream
    double wall_seconds = 0.0;
    std::vector<CurvePoint> curve;  // training rounds, then test rounds
    std::vector<std::optional<double>> edges;  // with diagnostics only
    std::vector<double> alphas;
    std::vector<double> expert_weights;
};

struct Stat {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for a single seed
};
Stat mean_std(const std::vector<double>& values);

struct RunSummary {
    ExperimentConfig config;
    std::string dataset;
    std::size_t m = 0;
    std::size_t dim = 0;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::vector<SeedResult> seeds;  // in config.seeds order
    Stat train_loss;
    Stat test_loss;
    double wall_seconds = 0.0;
};

// One seed: `loops` passes over train, then a prequential pass over test.
SeedResult run_seed(const ExperimentConfig& config, const MultilabelDataset& train, const MultilabelDataset& test,
                    std::uint64_t seed);

// All seeds (in parallel); writes curves.csv and summary.txt when out_dir is set.
RunSummary run_experiment(const ExperimentConfig& config, const MultilabelDataset& train,
                          const MultilabelDataset& test);
// Loads train/test from the config paths, then run_experiment.
RunSummary run(const ExperimentConfig& config);

// Curve CSV: seed,round,avg_weighted_rank_loss,explored,expert_index.
void write_curves(const RunSummary& summary, const std::filesystem::path& path);
// Flat key=value record.
void write_summary(const RunSummary& summary, const std::filesystem::path& path);

// Mean and std across seeds of the cumulative average loss at every round.
struct BandPoint {
    std::size_t round;
    double mean;
    double std;
};
std::vector<BandPoint> curve_band(const RunSummary& summary);

// One run per k; writes curve_k{K}.csv (round,mean,std) and summary_k{K}.txt
// into out_dir. Returns the curve file paths.
std::vector<std::filesystem::path> sweep_k(const ExperimentConfig& config, const MultilabelDataset& train,
                                           const MultilabelDataset& test, const std::vector<std::size_t>& k_values);

// Synthetic multilabel data: Gaussian features, each label relevant when a
// noisy random linear score clears a per-label quantile chosen so the mean
// number of relevant labels is about `mean_labels`.
struct SyntheticSpec {
    std::string name = "synthetic";
    std::size_t rows = 500;
    std::size_t dim = 20;
    std::size_t m = 6;
    double mean_labels = 2.0;
    double noise = 0.5;
};
// Train and test share the generating model; test rows follow the train rows.
ReducedDataset make_synthetic(const SyntheticSpec& spec, std::size_t test_rows, std::uint64_t seed);

// Shortest round-trip decimal.
std::string format_real(double v);

}  // namespace topk

#endif  // TOPK_EXPERIMENT_HPP
