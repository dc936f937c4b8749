#ifndef TOPK_WEAKLEARN_HPP
#define TOPK_WEAKLEARN_HPP

#include "topk/core.hpp"
#include "topk/rng.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace topk {

// Probability distribution over the m labels.
using WeakPrediction = std::vector<double>;

bool is_distribution(std::span<const double> p, double tol = 1e-12);

// Online weak learner: predicts a distribution over labels and learns from a
// full cost vector. Lower cost means a better label.
class WeakLearner {
public:
    virtual ~WeakLearner() = default;

    virtual std::size_t label_count() const = 0;
    virtual std::size_t feature_count() const = 0;
    virtual WeakPrediction predict(std::span<const double> x) const = 0;
    virtual void update(std::span<const double> x, std::span<const double> cost) = 0;
};

// Cost vector to per-label example weights: w_l = max cost - cost[l].
std::vector<double> importance_weights(std::span<const double> cost);

struct StumpConfig {
    std::size_t max_features = 20;
    std::size_t warmup = 64;         // observations buffered to place thresholds
    std::size_t bins = 8;            // threshold candidates per feature = bins - 1
    double smoothing = 1.0;          // additive smoothing on leaf label weights
    std::size_t grace_period = 50;   // updates between split attempts at a leaf
    double split_confidence = 1e-4;  // delta in the Hoeffding bound
    double tie_threshold = 0.2;      // split anyway once the bound drops below this
    std::size_t max_depth = 1;
};

// Streaming decision stump over a random feature subset. Each update is a
// weighted multi-label example; leaves keep label-weight histograms and
// split once the Hoeffding bound separates the best threshold from the
// runner-up by weighted label-entropy gain.
class StumpLearner final : public WeakLearner {
public:
    StumpLearner(std::size_t label_count, std::size_t feature_count, Rng& rng, StumpConfig config = {});

    std::size_t label_count() const override { return m_; }
    std::size_t feature_count() const override { return dim_; }
    WeakPrediction predict(std::span<const double> x) const override;
    void update(std::span<const double> x, std::span<const double> cost) override;

    const std::vector<std::size_t>& feature_subset() const { return features_; }
    std::size_t updates() const { return updates_; }
    std::size_t node_count() const { return nodes_.size(); }
    bool has_split() const { return nodes_.size() > 1; }

private:
    struct Node {
        std::vector<double> label_weight;  // m
        std::vector<double> bin_weight;    // features x bins x m, empty until thresholds exist
        std::size_t seen_since_check = 0;
        std::size_t seen = 0;
        std::size_t depth = 0;
        // Internal nodes only.
        std::size_t split_slot = 0;
        double threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        bool is_leaf = true;
    };

    void check_dim(std::span<const double> x) const;
    std::size_t leaf_for(std::span<const double> x) const;
    std::size_t bin_of(std::size_t slot, double v) const;
    void accumulate(std::size_t node, std::span<const double> xs, std::span<const double> w);
    void build_thresholds();
    void try_split(std::size_t node);
    std::size_t bin_count() const { return thresholds_.empty() ? 0 : thresholds_[0].size() + 1; }

    std::size_t m_;
    std::size_t dim_;
    StumpConfig cfg_;
    std::vector<std::size_t> features_;
    std::vector<std::vector<double>> thresholds_;  // per feature slot, ascending
    bool thresholds_ready_ = false;
    std::vector<std::vector<double>> warm_x_;
    std::vector<std::vector<double>> warm_w_;
    std::vector<Node> nodes_;
    std::size_t updates_ = 0;
};

}  // namespace topk

#endif  // TOPK_WEAKLEARN_HPP
