#include "topk/losses.hpp"

#include "topk/errors.hpp"

#include <cmath>

namespace topk {

std::string_view to_string(LossKind kind) {
    switch (kind) {
        case LossKind::Rank: return "rank";
        case LossKind::Hinge: return "hinge";
        case LossKind::Logistic: return "logistic";
    }
    return "?";
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double atom(LossKind kind, double x_rel, double x_irr) {
    switch (kind) {
        case LossKind::Rank: return rank_atom(x_rel, x_irr);
        case LossKind::Hinge: return hinge_atom(x_rel, x_irr);
        case LossKind::Logistic: return logistic_atom(x_rel, x_irr);
    }
    return 0.0;
}

double loss(LossKind kind, std::span<const double> s, const RelevanceSet& relevant) {
    if (s.size() != relevant.m()) throw ContractViolation("score length differs from m");
    require_finite(s);
    const auto rel = relevant.members();
    const auto irr = relevant.complement();
    double total = 0.0;
    for (Label a : rel) {
        for (Label b : irr) {
            total += atom(kind, s[a], s[b]);
        }
    }
    return total;
}

double weighted_rank_loss(std::span<const double> s, const RelevanceSet& relevant) {
    const std::size_t r = relevant.size();
    const std::size_t m = relevant.m();
    if (r == 0 || r == m) return 0.0;
    return loss(LossKind::Rank, s, relevant) / static_cast<double>(r * (m - r));
}

ScoreVector logistic_gradient(std::span<const double> s, std::span<const WeightedPair> pairs) {
    ScoreVector g(s.size(), 0.0);
    for (const auto& p : pairs) {
        if (p.relevant == p.irrelevant) throw ContractViolation("logistic pair needs a != b");
        if (p.relevant >= s.size() || p.irrelevant >= s.size()) {
            throw ContractViolation("logistic pair label outside [1, m]");
        }
        // d/ds[b] softplus(s[b] - s[a]) = sigmoid(s[b] - s[a]) = 1 / (1 + exp(s[a] - s[b]))
        const double slope = p.weight * sigmoid(s[p.irrelevant] - s[p.relevant]);
        g[p.irrelevant] += slope;
        g[p.relevant] -= slope;
    }
    return g;
}

}  // namespace topk
