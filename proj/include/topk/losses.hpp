#ifndef TOPK_LOSSES_HPP
#define TOPK_LOSSES_HPP

// Pairwise-decomposable ranking losses.
//
// Every loss here has the form
//
//     L(s, R) = sum_{a in R} sum_{b not in R} f(s[a], s[b])
//
// where the atom f takes the score of a relevant label first and the score of
// an irrelevant label second. All three atoms depend only on s[b] - s[a].

#include "topk/core.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace topk {

enum class LossKind { Rank, Hinge, Logistic };

std::string_view to_string(LossKind kind);

// log(1 + e^x) without overflow.
double softplus(double x);
// 1 / (1 + e^-x) without overflow.
double sigmoid(double x);

inline double rank_atom(double x_rel, double x_irr) { return x_rel <= x_irr ? 1.0 : 0.0; }
inline double hinge_atom(double x_rel, double x_irr) {
    const double v = x_irr - x_rel + 1.0;
    return v > 0.0 ? v : 0.0;
}
inline double logistic_atom(double x_rel, double x_irr) { return softplus(x_irr - x_rel); }

double atom(LossKind kind, double x_rel, double x_irr);

// Rank is non-convex; it is used for evaluation and expert selection only.
constexpr bool is_convex(LossKind kind) { return kind != LossKind::Rank; }

double loss(LossKind kind, std::span<const double> s, const RelevanceSet& relevant);

// Rank loss over |R|(m - |R|); 0 when R is empty or full.
double weighted_rank_loss(std::span<const double> s, const RelevanceSet& relevant);

struct WeightedPair {
    Label relevant;
    Label irrelevant;
    double weight;
};

// Gradient of sum_p w_p * log(1 + exp(s[b_p] - s[a_p])) with respect to s.
ScoreVector logistic_gradient(std::span<const double> s, std::span<const WeightedPair> pairs);

}  // namespace topk

#endif  // TOPK_LOSSES_HPP
