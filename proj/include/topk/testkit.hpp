#ifndef TOPK_TESTKIT_HPP
#define TOPK_TESTKIT_HPP

// Reference implementations for tests. Nothing here calls the production
// pairwise sums, estimators or potentials, so agreement between the two is
// evidence rather than a tautology.

#include "topk/core.hpp"
#include "topk/losses.hpp"
#include "topk/randomize.hpp"
#include "topk/rng.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace topk::testkit {

inline constexpr std::size_t kMaxUniformLabels = 7;
inline constexpr std::size_t kMaxSwapChoices = 64;

struct Outcome {
    Ranking ranking;
    double probability = 0.0;
    bool explored = false;
};

struct OutcomeEnumeration {
    RandomizationScheme scheme;
    Ranking base;
    std::vector<Outcome> outcomes;

    double total_probability() const;
};

// Full support of the randomized ranking given the base ranking.
//   Uniform:    the unexplored base at 1 - rho, then all m! permutations at
//               rho / m! each (the base appears again among them).
//   SingleSwap: the unexplored base at 1 - rho, then the (k(m-k))^2 swap
//               sequences at rho / (k(m-k))^2 each, merged by final ranking.
// Throws ScaleGuardError for Uniform with m > 7 or SingleSwap with k(m-k) > 64.
OutcomeEnumeration enumerate_outcomes(const RandomizationScheme& scheme, const Ranking& base);

// Sum over outcomes of probability * estimator(outcome).
double expected_estimator(const OutcomeEnumeration& e, const std::function<double(const Outcome&)>& estimator);

// Pr[a and b both in the top-k], summed over the enumeration.
double enumerated_pair_prob(const OutcomeEnumeration& e, Label a, Label b);

// Relevance bits of the top-k of `played`.
Feedback feedback_for(const Ranking& played, std::size_t k, const RelevanceSet& truth);

double reference_atom(LossKind kind, double x_rel, double x_irr);
double reference_loss(LossKind kind, std::span<const double> s, const RelevanceSet& truth);
// Largest atom value over all ordered label pairs at s.
double max_atom(LossKind kind, std::span<const double> s);
// Gradient of the full-information logistic loss at s.
std::vector<double> reference_logistic_gradient(std::span<const double> s, const RelevanceSet& truth);

// (fn(x + h) - fn(x - h)) / (2h)
double finite_diff(const std::function<double(double)>& fn, double x, double h);

// Lambda^n(s_a, s_b) by the one-step recursion
//   Lambda^n = p Lambda^{n-1}(s_a + 1, s_b) + q Lambda^{n-1}(s_a, s_b + 1) + r Lambda^{n-1}(s_a, s_b)
// with p = (1 - gamma)/m + gamma, q = (1 - gamma)/m, r = 1 - p - q, memoized on the
// count offsets. Refuses n > 64.
double lambda_recursive(LossKind atom, double gamma, std::size_t m, int n, double s_a, double s_b);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};
// n-step walks where each step adds 1 to s_a w.p. p, to s_b w.p. q, else nothing.
MonteCarloEstimate lambda_monte_carlo(LossKind atom, double gamma, std::size_t m, int n, double s_a, double s_b,
                                      std::size_t samples, Rng& rng);

// (N + 1) (m^2 / 4) exp(-gamma^2 N / 2)
double potential_zero_bound(int n_learners, std::size_t m, double gamma);

// Seeded generators for property tests.
std::vector<double> random_scores(std::size_t m, Rng& rng, double scale = 2.0);
// Scores on a coarse grid so that ties occur.
std::vector<double> random_tied_scores(std::size_t m, Rng& rng);
RelevanceSet random_relevance(std::size_t m, Rng& rng, bool allow_degenerate = false);
Ranking random_ranking(std::size_t m, Rng& rng);

}  // namespace topk::testkit

#endif  // TOPK_TESTKIT_HPP
