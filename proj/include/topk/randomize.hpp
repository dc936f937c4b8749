#ifndef TOPK_RANDOMIZE_HPP
#define TOPK_RANDOMIZE_HPP

// Randomized prediction under top-k feedback and the importance-weighted
// pairwise estimator built on it.
//
// With probability 1 - rho the base ranking is played unchanged. Otherwise:
//   Uniform:    a uniformly random permutation of the labels (scores are
//               shuffled along with them).
//   SingleSwap: swap a uniform label of the top-k with a uniform label of its
//               complement, then repeat once on the resulting ranking.
//
// PRNG draw order per round: explore coin, then the permutation (Uniform,
// Fisher-Yates) or the four swap indices (SingleSwap: in1, out1, in2, out2).

#include "topk/core.hpp"
#include "topk/losses.hpp"
#include "topk/rng.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace topk {

enum class SchemeKind { Uniform, SingleSwap };

std::string_view to_string(SchemeKind kind);

inline constexpr double kMinInclusionProb = 0.005;
inline constexpr double kMaxInclusionProb = 0.995;

struct RandomizationScheme {
    SchemeKind kind = SchemeKind::Uniform;
    double rho = 0.1;
    std::size_t k = 2;
    // Clamp inclusion probabilities to [0.005, 0.995] before forming weights.
    bool clip_probabilities = false;

    // Throws ConfigError. rho == 0 is accepted only together with k == m.
    void validate(std::size_t m) const;
};

struct RandomizedPrediction {
    Ranking base_ranking;
    Ranking final_ranking;
    bool explored = false;
    ScoreVector perturbed_scores;
};

RandomizedPrediction randomize(const RandomizationScheme& scheme, std::span<const double> s, Rng& rng);

// Exact Pr[a, b both in the top-k of the final ranking | base ranking], unclipped.
double pair_inclusion_prob(const RandomizationScheme& scheme, const Ranking& base, Label a, Label b);

// Conditional probability, given exploration, that labels with the given base
// membership both end in the top-k after the two single-swap rounds. Exact,
// from enumerating all (k(m-k))^2 equally likely swap sequences; cached.
double single_swap_pair_prob(std::size_t m, std::size_t k, bool a_in_top, bool b_in_top);

// Importance weights 1(a, b in revealed top-k) / Pr[a, b in top-k] for one round.
class PairWeightTable {
public:
    PairWeightTable(const RandomizationScheme& scheme, const Ranking& base, const Ranking& final_ranking);

    std::size_t m() const { return base_mask_.size(); }
    std::size_t k() const { return k_; }

    // Probability used in the denominator (clipped when the scheme says so).
    double inclusion_prob(Label a, Label b) const;
    double weight(Label a, Label b) const;
    bool revealed(Label l) const { return revealed_mask_.at(l) != 0; }
    const std::vector<Label>& revealed_labels() const { return revealed_; }

    // Throws InformationBarrierViolation unless the feedback covers exactly the
    // revealed top-k.
    void check_feedback(const Feedback& feedback) const;

private:
    std::size_t k_ = 0;
    bool clip_ = false;
    // Inclusion probability indexed by how many of the two labels sit in the
    // base top-k: [0] neither, [1] one, [2] both.
    double pattern_prob_[3] = {0.0, 0.0, 0.0};
    std::vector<char> base_mask_;
    std::vector<char> revealed_mask_;
    std::vector<Label> revealed_;
};

// Revealed (relevant, irrelevant) pairs with their importance weights.
std::vector<WeightedPair> revealed_pairs(const PairWeightTable& table, const Feedback& feedback);

// Sum over revealed (relevant a, irrelevant b) of weight(a, b) * atoms(a, b).
// atoms is never called for a pair outside the revealed top-k.
template <typename PairFn>
double estimate_pairwise_sum(PairFn&& atoms, const PairWeightTable& table, const Feedback& feedback) {
    table.check_feedback(feedback);
    double total = 0.0;
    for (const auto& ra : feedback.revealed()) {
        if (!ra.relevant) continue;
        for (const auto& rb : feedback.revealed()) {
            if (rb.relevant) continue;
            total += table.weight(ra.label, rb.label) * atoms(ra.label, rb.label);
        }
    }
    return total;
}

// Estimator of loss(kind, s, R) from one round's feedback.
double estimate_loss(LossKind kind, std::span<const double> s, const PairWeightTable& table,
                     const Feedback& feedback);

}  // namespace topk

#endif  // TOPK_RANDOMIZE_HPP
