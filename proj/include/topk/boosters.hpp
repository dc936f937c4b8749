#ifndef TOPK_BOOSTERS_HPP
#define TOPK_BOOSTERS_HPP

// Online multilabel-ranking boosters under top-k feedback.
//
// One round:
//   1. every weak learner predicts a distribution h^i over the labels
//   2. experts s^j = sum_{i <= j} alpha^i h^i
//   3. pick an expert (BBM: the last; Adaptive: drawn from the Hedge weights)
//   4. randomize its ranking and play it
//   5. ask the oracle for relevance of the played top-k, and nothing else
//   6. build a cost vector for every learner from that feedback
//   7. learners update, then alpha and the Hedge weights (Adaptive only)
//
// PRNG draw order per round: expert draw (Adaptive only), explore coin,
// permutation or swap indices.

#include "topk/core.hpp"
#include "topk/potential.hpp"
#include "topk/randomize.hpp"
#include "topk/rng.hpp"
#include "topk/weaklearn.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace topk {

enum class Algorithm { TopBBM, TopAdaptive };

std::string_view to_string(Algorithm a);

inline constexpr double kAlphaBound = 2.0;
inline constexpr double kHedgeExponentCap = 50.0;
// Log Hedge weights are kept within this distance of the largest one so
// that every weight stays a positive finite double.
inline constexpr double kHedgeLogFloor = 700.0;

struct BoosterConfig {
    Algorithm algorithm = Algorithm::TopBBM;
    std::size_t learners = 50;
    std::size_t k = 3;
    double rho = 0.02;
    double gamma = 0.1;  // BBM edge
    SchemeKind scheme = SchemeKind::Uniform;
    bool clip_probabilities = true;
    bool clip_gradients = true;  // Adaptive: cost entries and the SGD derivative to [-1, 1]
    bool record_detail = false;  // keep predictions, experts and cost vectors in each record
    StumpConfig stump{};

    RandomizationScheme scheme_for() const { return {scheme, rho, k, clip_probabilities}; }
    // Throws ConfigError.
    void validate(std::size_t m) const;
};

// Answers relevance queries for the current example.
class FeedbackOracle {
public:
    virtual ~FeedbackOracle() = default;
    virtual Feedback reveal(std::span<const Label> labels) = 0;
};

// Oracle over a known relevance set that logs every label it was asked about.
class AuditingOracle final : public FeedbackOracle {
public:
    explicit AuditingOracle(RelevanceSet truth) : truth_(std::move(truth)) {}

    void reset(RelevanceSet truth) {
        truth_ = std::move(truth);
        queried_.clear();
    }
    Feedback reveal(std::span<const Label> labels) override;

    const RelevanceSet& truth() const { return truth_; }
    // Every label queried since the last reset, in query order.
    const std::vector<Label>& queried() const { return queried_; }

private:
    RelevanceSet truth_;
    std::vector<Label> queried_;
};

struct RoundRecord {
    std::size_t t = 0;
    std::size_t expert = 0;  // 1-based i_t
    bool explored = false;
    Ranking base_ranking;
    Ranking played_ranking;
    ScoreVector played_scores;
    Feedback feedback;
    double estimated_rank_loss = 0.0;  // of the chosen expert, from this round's feedback
    std::vector<double> learner_losses;  // c^i . h^i with h^i issued before the update
    // Filled by the harness, never by the booster.
    double weighted_rank_loss = std::numeric_limits<double>::quiet_NaN();

    // Only with record_detail.
    std::vector<WeakPrediction> predictions;  // h^i
    std::vector<ScoreVector> experts;         // s^j
    std::vector<CostVector> costs;            // c^i
    std::vector<double> alphas_before;
    std::vector<double> alphas_after;
    std::vector<double> sgd_derivatives;      // g'^i (after clipping)
    std::vector<double> hedge_losses;         // L^rnk estimate per expert
    double learning_rate = 0.0;
};

class Booster {
public:
    // Stump learners seeded from `seed`.
    Booster(const BoosterConfig& config, std::size_t label_count, std::size_t feature_count, std::uint64_t seed);
    Booster(const BoosterConfig& config, std::vector<std::unique_ptr<WeakLearner>> learners, std::uint64_t seed);

    // Plays one example. With learn = false nothing but the PRNG advances.
    RoundRecord round(std::span<const double> x, FeedbackOracle& oracle, bool learn = true);

    const BoosterConfig& config() const { return cfg_; }
    std::size_t label_count() const { return m_; }
    std::size_t learner_count() const { return learners_.size(); }
    std::size_t rounds_played() const { return played_; }
    std::size_t rounds_learned() const { return learned_; }

    const std::vector<double>& alphas() const { return alphas_; }
    // Hedge weights nu^i, normalized to sum to 1 (Adaptive).
    std::vector<double> expert_probabilities() const;
    const std::vector<double>& log_expert_weights() const { return log_nu_; }
    void set_expert_weights(std::span<const double> nu);

    // eta_t = 8 rho sqrt(2) / (m^2 sqrt(t)); with rho = 0 the 1/rho importance
    // scale is dropped: 8 sqrt(2) / (m^2 sqrt(t)).
    double learning_rate(std::size_t t) const;

private:
    void init(std::uint64_t seed);
    std::size_t draw_expert();
    void bbm_costs(RoundRecord& rec, const std::vector<ScoreVector>& experts, const PairWeightTable& table,
                   std::vector<CostVector>& costs);
    void adaptive_update(RoundRecord& rec, const std::vector<WeakPrediction>& h,
                         const std::vector<ScoreVector>& experts, const PairWeightTable& table, bool learn,
                         std::vector<CostVector>& costs);

    BoosterConfig cfg_;
    std::size_t m_;
    std::vector<std::unique_ptr<WeakLearner>> learners_;
    std::vector<double> alphas_;
    std::vector<double> log_nu_;
    Rng rng_;
    std::optional<PotentialEvaluator> potential_;
    std::size_t played_ = 0;
    std::size_t learned_ = 0;
};

// Sets rec.weighted_rank_loss from the played scores and the true relevance set.
double score_round(RoundRecord& rec, const RelevanceSet& truth);

// Empirical edge gamma_i = -sum_t c^i_t . h^i_t / sum_t w^i[t], where c^i_t is
// the full-information logistic gradient at s^{i-1}_t and
// w^i[t] = sum_{a in R} sum_{b not in R} 1 / (1 + exp(s^{i-1}[a] - s^{i-1}[b])).
// Needs records made with record_detail.
class EdgeTracker {
public:
    explicit EdgeTracker(std::size_t learners) : numerator_(learners, 0.0), weight_(learners, 0.0) {}

    void observe(const RoundRecord& rec, const RelevanceSet& truth);
    // Throws UndefinedEdgeError when the weight norm is zero.
    double edge(std::size_t learner) const;
    std::vector<std::optional<double>> edges() const;

private:
    std::vector<double> numerator_;
    std::vector<double> weight_;
};

struct EdgeObservation {
    ScoreVector s_prev;
    WeakPrediction h;
    RelevanceSet truth;
};

double empirical_edge(std::span<const EdgeObservation> history);

}  // namespace topk

#endif  // TOPK_BOOSTERS_HPP
