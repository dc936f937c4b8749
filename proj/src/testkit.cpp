#include "topk/testkit.hpp"

#include "topk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace topk::testkit {

double OutcomeEnumeration::total_probability() const {
    double total = 0.0;
    for (const auto& o : outcomes) total += o.probability;
    return total;
}

OutcomeEnumeration enumerate_outcomes(const RandomizationScheme& scheme, const Ranking& base) {
    const std::size_t m = base.size();
    const std::size_t k = scheme.k;
    if (k < 1 || k > m) throw ContractViolation("k out of range");
    OutcomeEnumeration e{scheme, base, {}};
    e.outcomes.push_back({base, 1.0 - scheme.rho, false});

    if (scheme.kind == SchemeKind::Uniform) {
        if (m > kMaxUniformLabels) throw ScaleGuardError("uniform enumeration refuses m > 7");
        double perms = 1.0;
        for (std::size_t i = 2; i <= m; ++i) perms *= static_cast<double>(i);
        std::vector<Label> order(m);
        std::iota(order.begin(), order.end(), Label{0});
        do {
            e.outcomes.push_back({Ranking(order), scheme.rho / perms, true});
        } while (std::next_permutation(order.begin(), order.end()));
        return e;
    }

    const std::size_t choices = k * (m - k);
    if (choices > kMaxSwapChoices) throw ScaleGuardError("single-swap enumeration refuses k(m-k) > 64");
    if (choices == 0) {
        // Nothing outside the top-k to swap with.
        e.outcomes.push_back({base, scheme.rho, true});
        return e;
    }
    const double each = scheme.rho / static_cast<double>(choices * choices);
    std::map<std::vector<Label>, double> merged;
    for (std::size_t i1 = 0; i1 < k; ++i1) {
        for (std::size_t o1 = k; o1 < m; ++o1) {
            std::vector<Label> once = base.order();
            std::swap(once[i1], once[o1]);
            for (std::size_t i2 = 0; i2 < k; ++i2) {
                for (std::size_t o2 = k; o2 < m; ++o2) {
                    std::vector<Label> twice = once;
                    std::swap(twice[i2], twice[o2]);
                    merged[twice] += each;
                }
            }
        }
    }
    for (const auto& [order, p] : merged) e.outcomes.push_back({Ranking(order), p, true});
    return e;
}

double expected_estimator(const OutcomeEnumeration& e, const std::function<double(const Outcome&)>& estimator) {
    double total = 0.0;
    for (const auto& o : e.outcomes) total += o.probability * estimator(o);
    return total;
}

double enumerated_pair_prob(const OutcomeEnumeration& e, Label a, Label b) {
    double total = 0.0;
    for (const auto& o : e.outcomes) {
        if (o.ranking.position_of(a) < e.scheme.k && o.ranking.position_of(b) < e.scheme.k) total += o.probability;
    }
    return total;
}

Feedback feedback_for(const Ranking& played, std::size_t k, const RelevanceSet& truth) {
    std::vector<RevealedLabel> revealed;
    for (std::size_t pos = 0; pos < k; ++pos) {
        const Label l = played.at(pos);
        revealed.push_back({l, truth.contains(l)});
    }
    return Feedback(played.size(), std::move(revealed));
}

double reference_atom(LossKind kind, double x_rel, double x_irr) {
    const double margin = x_rel - x_irr;
    switch (kind) {
        case LossKind::Rank: return margin <= 0.0 ? 1.0 : 0.0;
        case LossKind::Hinge: return std::max(0.0, 1.0 - margin);
        case LossKind::Logistic:
            // log(1 + exp(-margin))
            return margin >= 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
    }
    return 0.0;
}

double reference_loss(LossKind kind, std::span<const double> s, const RelevanceSet& truth) {
    double total = 0.0;
    for (std::size_t a = 0; a < s.size(); ++a) {
        if (!truth.contains(a)) continue;
        for (std::size_t b = 0; b < s.size(); ++b) {
            if (truth.contains(b)) continue;
            total += reference_atom(kind, s[a], s[b]);
        }
    }
    return total;
}

double max_atom(LossKind kind, std::span<const double> s) {
    double z = 0.0;
    for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = 0; b < s.size(); ++b) {
            if (a != b) z = std::max(z, reference_atom(kind, s[a], s[b]));
        }
    }
    return z;
}

std::vector<double> reference_logistic_gradient(std::span<const double> s, const RelevanceSet& truth) {
    std::vector<double> g(s.size(), 0.0);
    for (std::size_t a = 0; a < s.size(); ++a) {
        if (!truth.contains(a)) continue;
        for (std::size_t b = 0; b < s.size(); ++b) {
            if (truth.contains(b)) continue;
            // d/dx log(1 + e^x) at x = s_b - s_a
            const double x = s[b] - s[a];
            const double d = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
            g[b] += d;
            g[a] -= d;
        }
    }
    return g;
}

double finite_diff(const std::function<double(double)>& fn, double x, double h) {
    return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

namespace {

struct Walk {
    LossKind atom;
    double p, q, r;
    double s_a, s_b;
    std::map<std::tuple<int, int, int>, double> memo;

    double value(int n, int da, int db) {
        if (n == 0) return reference_atom(atom, s_a + da, s_b + db);
        const auto key = std::make_tuple(n, da, db);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        const double v = p * value(n - 1, da + 1, db) + q * value(n - 1, da, db + 1) + r * value(n - 1, da, db);
        memo.emplace(key, v);
        return v;
    }
};

void walk_probs(double gamma, std::size_t m, double& p, double& q) {
    if (m < 2) throw ContractViolation("m must be at least 2");
    const double base = (1.0 - gamma) / static_cast<double>(m);
    p = base + gamma;
    q = base;
}

}  // namespace

double lambda_recursive(LossKind atom, double gamma, std::size_t m, int n, double s_a, double s_b) {
    if (n < 0 || n > 64) throw ScaleGuardError("recursive potential refuses n outside [0, 64]");
    double p = 0.0, q = 0.0;
    walk_probs(gamma, m, p, q);
    Walk w{atom, p, q, 1.0 - p - q, s_a, s_b, {}};
    return w.value(n, 0, 0);
}

MonteCarloEstimate lambda_monte_carlo(LossKind atom, double gamma, std::size_t m, int n, double s_a, double s_b,
                                      std::size_t samples, Rng& rng) {
    if (samples < 2) throw ContractViolation("need at least 2 samples");
    double p = 0.0, q = 0.0;
    walk_probs(gamma, m, p, q);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double a = s_a, b = s_b;
        for (int step = 0; step < n; ++step) {
            const double u = rng.uniform();
            if (u < p) {
                a += 1.0;
            } else if (u < p + q) {
                b += 1.0;
            }
        }
        const double v = reference_atom(atom, a, b);
        sum += v;
        sum_sq += v * v;
    }
    const double ns = static_cast<double>(samples);
    const double mean = sum / ns;
    const double var = std::max(0.0, (sum_sq - ns * mean * mean) / (ns - 1.0));
    return {mean, std::sqrt(var / ns)};
}

double potential_zero_bound(int n_learners, std::size_t m, double gamma) {
    const double md = static_cast<double>(m);
    return (n_learners + 1) * (md * md / 4.0) * std::exp(-gamma * gamma * n_learners / 2.0);
}

std::vector<double> random_scores(std::size_t m, Rng& rng, double scale) {
    std::vector<double> s(m);
    for (auto& v : s) v = scale * (2.0 * rng.uniform() - 1.0);
    return s;
}

std::vector<double> random_tied_scores(std::size_t m, Rng& rng) {
    std::vector<double> s(m);
    for (auto& v : s) v = static_cast<double>(rng.below(4)) * 0.5;
    return s;
}

RelevanceSet random_relevance(std::size_t m, Rng& rng, bool allow_degenerate) {
    for (;;) {
        RelevanceSet r(m);
        for (Label l = 0; l < m; ++l) {
            if (rng.below(2)) r.insert(l);
        }
        if (allow_degenerate || (r.size() > 0 && r.size() < m)) return r;
    }
}

Ranking random_ranking(std::size_t m, Rng& rng) {
    std::vector<Label> order(m);
    std::iota(order.begin(), order.end(), Label{0});
    rng.shuffle(order);
    return Ranking(order);
}

}  // namespace topk::testkit
