#ifndef TOPK_POTENTIAL_HPP
#define TOPK_POTENTIAL_HPP

// Surrogate potentials for boost-by-majority ranking.
//
// Lambda^{a,b,n}(s) is the expected pairwise atom after n more weak learners
// each add e_l for a label l drawn from u^gamma_{a}, the near-uniform
// distribution favouring the relevant label a. Only the counts landing on a
// and on b move the atom, so the expectation is an exact trinomial sum and
// no random walks are needed.

#include "topk/core.hpp"
#include "topk/losses.hpp"
#include "topk/randomize.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace topk {

// u^gamma_F: (1 - |F| gamma)/m on every label plus gamma on each favoured one.
class BiasedUniform {
public:
    BiasedUniform(std::size_t m, double gamma, RelevanceSet favored);

    std::size_t m() const { return m_; }
    double gamma() const { return gamma_; }
    double prob(Label l) const;
    std::vector<double> probs() const;

private:
    std::size_t m_;
    double gamma_;
    RelevanceSet favored_;
};

struct PotentialSpec {
    LossKind atom = LossKind::Hinge;
    double gamma = 0.1;
    int n = 0;  // remaining weak learners, N - i
    std::size_t m = 2;

    // Throws ContractViolation for n < 0, m < 2, a non-convex atom, or
    // gamma outside [0, 1].
    void validate() const;
};

// Exact Lambda^{n}(s_a, s_b) by the bivariate count sum, O(n^2).
double lambda_exact(const PotentialSpec& spec, double s_a, double s_b);

// Distribution of (count_b - count_a) after n draws from u^gamma_a, indexed
// by d + n for d in [-n, n]. Weights are formed in log space.
std::vector<double> count_difference_distribution(int n, std::size_t m, double gamma);

// Fast Lambda evaluation for one (atom, gamma, m). Since every atom here
// depends only on s_b - s_a, Lambda reduces to an O(n) sum over the count
// difference; the per-n distributions are built lazily and reused. Not
// thread-safe; each booster owns one.
class PotentialEvaluator {
public:
    PotentialEvaluator(LossKind atom, double gamma, std::size_t m);

    LossKind atom() const { return atom_; }
    double gamma() const { return gamma_; }
    std::size_t m() const { return m_; }

    double lambda(int n, double s_a, double s_b);

    // Phi^n(s) = sum_{a in R} sum_{b not in R} Lambda^n(s_a, s_b). Full information.
    double phi(int n, std::span<const double> s, const RelevanceSet& relevant);

    // Importance-weighted Phi^n from one round's feedback.
    double phi_hat(int n, std::span<const double> s, const PairWeightTable& table, const Feedback& feedback);

    // c[l] = phi_hat(n, s_prev + e_l). Only pairs touching l change when e_l
    // is added, so each entry is the base value plus per-pair corrections.
    CostVector cost_vector(int n, std::span<const double> s_prev, const PairWeightTable& table,
                           const Feedback& feedback);

private:
    const std::vector<double>& distribution(int n);

    LossKind atom_;
    double gamma_;
    std::size_t m_;
    std::vector<std::vector<double>> dists_;
};

double phi_hat(const PotentialSpec& spec, std::span<const double> s, const PairWeightTable& table,
               const Feedback& feedback);

CostVector bbm_cost_vector(const PotentialSpec& spec, std::span<const double> s_prev,
                           const PairWeightTable& table, const Feedback& feedback);

// Ground-truth potential Upsilon^n(s): E L(s + X, R) with X the sum of n
// draws from u^gamma_R, by enumerating every count vector. Refuses m > 6 or
// n > 6.
double upsilon_bruteforce(LossKind atom, const RelevanceSet& relevant, double gamma, int n,
                          std::span<const double> s);

}  // namespace topk

#endif  // TOPK_POTENTIAL_HPP
