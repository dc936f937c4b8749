#include "topk/potential.hpp"

#include "topk/errors.hpp"

#include <cmath>
#include <limits>

namespace topk {

namespace {

// e * log(x) with the convention 0 * log(0) = 0.
double xlogy(int e, double x) {
    if (e == 0) return 0.0;
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    return e * std::log(x);
}

double log_trinomial(int n, int i, int j, double p, double q, double r) {
    return std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - i - j + 1.0) +
           xlogy(i, p) + xlogy(j, q) + xlogy(n - i - j, r);
}

struct PairDrawProbs {
    double p;  // favoured label a
    double q;  // label b
    double r;  // any other label
};

PairDrawProbs pair_draw_probs(std::size_t m, double gamma) {
    const double base = (1.0 - gamma) / static_cast<double>(m);
    PairDrawProbs out{base + gamma, base, 0.0};
    out.r = static_cast<double>(m - 2) * base;
    return out;
}

}  // namespace

BiasedUniform::BiasedUniform(std::size_t m, double gamma, RelevanceSet favored)
    : m_(m), gamma_(gamma), favored_(std::move(favored)) {
    if (favored_.m() != m_) throw ContractViolation("favoured set has the wrong label count");
    if (gamma_ < 0.0 || static_cast<double>(favored_.size()) * gamma_ > 1.0) {
        throw ContractViolation("biased uniform needs gamma >= 0 and |F| gamma <= 1");
    }
}

double BiasedUniform::prob(Label l) const {
    const double base = (1.0 - static_cast<double>(favored_.size()) * gamma_) / static_cast<double>(m_);
    return favored_.contains(l) ? base + gamma_ : base;
}

std::vector<double> BiasedUniform::probs() const {
    std::vector<double> out(m_);
    for (Label l = 0; l < m_; ++l) out[l] = prob(l);
    return out;
}

void PotentialSpec::validate() const {
    if (n < 0) throw ContractViolation("potential needs n >= 0");
    if (m < 2) throw ContractViolation("potential needs m >= 2");
    if (!is_convex(atom)) throw ContractViolation("potentials require a convex atom");
    if (gamma < 0.0 || gamma > 1.0) throw ContractViolation("potential needs gamma in [0, 1]");
}

double lambda_exact(const PotentialSpec& spec, double s_a, double s_b) {
    spec.validate();
    const auto pr = pair_draw_probs(spec.m, spec.gamma);
    double total = 0.0;
    for (int i = 0; i <= spec.n; ++i) {
        for (int j = 0; i + j <= spec.n; ++j) {
            const double lw = log_trinomial(spec.n, i, j, pr.p, pr.q, pr.r);
            if (std::isinf(lw)) continue;
            total += std::exp(lw) * atom(spec.atom, s_a + i, s_b + j);
        }
    }
    return total;
}

std::vector<double> count_difference_distribution(int n, std::size_t m, double gamma) {
    if (n < 0) throw ContractViolation("potential needs n >= 0");
    const auto pr = pair_draw_probs(m, gamma);
    std::vector<double> dist(static_cast<std::size_t>(2 * n + 1), 0.0);
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; i + j <= n; ++j) {
            const double lw = log_trinomial(n, i, j, pr.p, pr.q, pr.r);
            if (std::isinf(lw)) continue;
            dist[static_cast<std::size_t>(j - i + n)] += std::exp(lw);
        }
    }
    return dist;
}

PotentialEvaluator::PotentialEvaluator(LossKind atom, double gamma, std::size_t m)
    : atom_(atom), gamma_(gamma), m_(m) {
    PotentialSpec{atom, gamma, 0, m}.validate();
}

const std::vector<double>& PotentialEvaluator::distribution(int n) {
    if (n < 0) throw ContractViolation("potential needs n >= 0");
    const auto idx = static_cast<std::size_t>(n);
    if (dists_.size() <= idx) dists_.resize(idx + 1);
    if (dists_[idx].empty()) dists_[idx] = count_difference_distribution(n, m_, gamma_);
    return dists_[idx];
}

double PotentialEvaluator::lambda(int n, double s_a, double s_b) {
    const auto& dist = distribution(n);
    double total = 0.0;
    for (int d = -n; d <= n; ++d) {
        const double w = dist[static_cast<std::size_t>(d + n)];
        if (w == 0.0) continue;
        total += w * topk::atom(atom_, s_a, s_b + d);
    }
    return total;
}

double PotentialEvaluator::phi(int n, std::span<const double> s, const RelevanceSet& relevant) {
    if (s.size() != m_ || relevant.m() != m_) throw ContractViolation("score length differs from m");
    double total = 0.0;
    const auto irr = relevant.complement();
    for (Label a : relevant.members()) {
        for (Label b : irr) total += lambda(n, s[a], s[b]);
    }
    return total;
}

double PotentialEvaluator::phi_hat(int n, std::span<const double> s, const PairWeightTable& table,
                                   const Feedback& feedback) {
    if (s.size() != m_) throw ContractViolation("score length differs from m");
    return estimate_pairwise_sum([&](Label a, Label b) { return lambda(n, s[a], s[b]); }, table, feedback);
}

CostVector PotentialEvaluator::cost_vector(int n, std::span<const double> s_prev, const PairWeightTable& table,
                                           const Feedback& feedback) {
    if (s_prev.size() != m_) throw ContractViolation("score length differs from m");
    const auto pairs = revealed_pairs(table, feedback);
    CostVector cost(m_, 0.0);
    if (pairs.empty()) return cost;

    double base = 0.0;
    for (const auto& p : pairs) base += p.weight * lambda(n, s_prev[p.relevant], s_prev[p.irrelevant]);
    for (auto& c : cost) c = base;
    for (const auto& p : pairs) {
        const double sa = s_prev[p.relevant];
        const double sb = s_prev[p.irrelevant];
        const double here = lambda(n, sa, sb);
        cost[p.relevant] += p.weight * (lambda(n, sa + 1.0, sb) - here);
        cost[p.irrelevant] += p.weight * (lambda(n, sa, sb + 1.0) - here);
    }
    return cost;
}

double phi_hat(const PotentialSpec& spec, std::span<const double> s, const PairWeightTable& table,
               const Feedback& feedback) {
    PotentialEvaluator eval(spec.atom, spec.gamma, spec.m);
    return eval.phi_hat(spec.n, s, table, feedback);
}

CostVector bbm_cost_vector(const PotentialSpec& spec, std::span<const double> s_prev,
                           const PairWeightTable& table, const Feedback& feedback) {
    spec.validate();
    PotentialEvaluator eval(spec.atom, spec.gamma, spec.m);
    return eval.cost_vector(spec.n, s_prev, table, feedback);
}

double upsilon_bruteforce(LossKind atom_kind, const RelevanceSet& relevant, double gamma, int n,
                          std::span<const double> s) {
    const std::size_t m = relevant.m();
    if (m > 6 || n > 6) throw ScaleGuardError("upsilon enumeration limited to m <= 6 and n <= 6");
    if (n < 0) throw ContractViolation("potential needs n >= 0");
    if (s.size() != m) throw ContractViolation("score length differs from m");
    const BiasedUniform u(m, gamma, relevant);
    const auto probs = u.probs();

    std::vector<int> counts(m, 0);
    double total = 0.0;
    // Enumerate compositions of n into m non-negative parts.
    auto recurse = [&](auto&& self, std::size_t label, int left) -> void {
        if (label + 1 == m) {
            counts[label] = left;
            double lw = std::lgamma(n + 1.0);
            std::vector<double> shifted(s.begin(), s.end());
            for (Label l = 0; l < m; ++l) {
                lw += xlogy(counts[l], probs[l]) - std::lgamma(counts[l] + 1.0);
                shifted[l] += counts[l];
            }
            if (!std::isinf(lw)) total += std::exp(lw) * loss(atom_kind, shifted, relevant);
            return;
        }
        for (int c = 0; c <= left; ++c) {
            counts[label] = c;
            self(self, label + 1, left - c);
        }
    };
    recurse(recurse, 0, n);
    return total;
}

}  // namespace topk
