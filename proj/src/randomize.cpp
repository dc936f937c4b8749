#include "topk/randomize.hpp"

#include "topk/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

namespace topk {

std::string_view to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::Uniform: return "uniform";
        case SchemeKind::SingleSwap: return "singleswap";
    }
    return "?";
}

void RandomizationScheme::validate(std::size_t m) const {
    if (m < 2) throw ConfigError("need at least 2 labels");
    const std::size_t min_k = kind == SchemeKind::SingleSwap ? 3 : 2;
    if (k < min_k || k > m) {
        throw ConfigError("k=" + std::to_string(k) + " must lie in [" + std::to_string(min_k) + ", " +
                          std::to_string(m) + "] for the " + std::string(to_string(kind)) + " scheme");
    }
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");
    if (rho == 0.0 && k != m) throw ConfigError("rho = 0 requires k = m (full information)");
    if (kind == SchemeKind::SingleSwap && rho >= 0.25) {
        throw ConfigError("single-swap randomization requires rho < 0.25");
    }
}

RandomizedPrediction randomize(const RandomizationScheme& scheme, std::span<const double> s, Rng& rng) {
    const std::size_t m = s.size();
    RandomizedPrediction out;
    out.base_ranking = rank_of_scores(s);
    out.perturbed_scores.assign(s.begin(), s.end());

    const double coin = rng.uniform();
    out.explored = coin < scheme.rho;
    if (!out.explored) {
        out.final_ranking = out.base_ranking;
        return out;
    }

    if (scheme.kind == SchemeKind::Uniform) {
        std::vector<Label> order(m);
        std::iota(order.begin(), order.end(), Label{0});
        rng.shuffle(order);
        out.final_ranking = Ranking(std::move(order));
        // The p-th highest score moves to the label played at position p.
        std::vector<double> sorted(s.begin(), s.end());
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        for (std::size_t p = 0; p < m; ++p) {
            out.perturbed_scores[out.final_ranking.at(p)] = sorted[p];
        }
        return out;
    }

    Ranking r = out.base_ranking;
    const std::size_t k = scheme.k;
    if (k < m) {
        for (int round = 0; round < 2; ++round) {
            const std::size_t in_pos = rng.below(k);
            const std::size_t out_pos = k + rng.below(m - k);
            std::swap(out.perturbed_scores[r.at(in_pos)], out.perturbed_scores[r.at(out_pos)]);
            r.swap_positions(in_pos, out_pos);
        }
    }
    out.final_ranking = std::move(r);
    return out;
}

namespace {

struct SwapPatternProbs {
    double both_out = 0.0;
    double one_in = 0.0;
    double both_in = 0.0;
};

SwapPatternProbs enumerate_single_swap(std::size_t m, std::size_t k) {
    SwapPatternProbs probs;
    if (k >= m) {
        probs = {1.0, 1.0, 1.0};
        return probs;
    }
    // Canonical base: identity ranking, top-k = {0, ..., k-1}. Representative
    // labels per pattern; by symmetry the probability depends only on it.
    const Label in_a = 0;
    const Label in_b = 1;
    const Label out_a = k;
    const Label out_b = k + 1;  // valid only when m - k >= 2
    const std::size_t outside = m - k;

    std::size_t hits_both_in = 0, hits_one_in = 0, hits_both_out = 0;
    const auto base = Ranking::identity(m);
    for (std::size_t i1 = 0; i1 < k; ++i1) {
        for (std::size_t j1 = 0; j1 < outside; ++j1) {
            Ranking r1 = base;
            r1.swap_positions(i1, k + j1);
            for (std::size_t i2 = 0; i2 < k; ++i2) {
                for (std::size_t j2 = 0; j2 < outside; ++j2) {
                    Ranking r2 = r1;
                    r2.swap_positions(i2, k + j2);
                    auto in_top = [&](Label l) { return r2.position_of(l) < k; };
                    if (in_top(in_a) && in_top(in_b)) ++hits_both_in;
                    if (in_top(in_a) && in_top(out_a)) ++hits_one_in;
                    if (outside >= 2 && in_top(out_a) && in_top(out_b)) ++hits_both_out;
                }
            }
        }
    }
    const double total = static_cast<double>(k * outside) * static_cast<double>(k * outside);
    probs.both_in = static_cast<double>(hits_both_in) / total;
    probs.one_in = static_cast<double>(hits_one_in) / total;
    probs.both_out = static_cast<double>(hits_both_out) / total;
    return probs;
}

const SwapPatternProbs& cached_single_swap(std::size_t m, std::size_t k) {
    static std::mutex mu;
    static std::map<std::pair<std::size_t, std::size_t>, SwapPatternProbs> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({m, k});
    if (it == cache.end()) {
        it = cache.emplace(std::make_pair(m, k), enumerate_single_swap(m, k)).first;
    }
    return it->second;
}

// Probability of the exploration branch putting both labels in the top-k,
// by number of the two labels already in the base top-k.
double explored_pair_prob(const RandomizationScheme& scheme, std::size_t m, int in_count) {
    const std::size_t k = scheme.k;
    if (scheme.kind == SchemeKind::Uniform) {
        return static_cast<double>(k * (k - 1)) / static_cast<double>(m * (m - 1));
    }
    const auto& p = cached_single_swap(m, k);
    switch (in_count) {
        case 0: return p.both_out;
        case 1: return p.one_in;
        default: return p.both_in;
    }
}

double mixture_prob(const RandomizationScheme& scheme, std::size_t m, int in_count) {
    const double stay = in_count == 2 ? 1.0 - scheme.rho : 0.0;
    if (scheme.rho == 0.0) return stay;
    return stay + scheme.rho * explored_pair_prob(scheme, m, in_count);
}

}  // namespace

double single_swap_pair_prob(std::size_t m, std::size_t k, bool a_in_top, bool b_in_top) {
    if (k < 1 || k > m) throw ContractViolation("single-swap probability needs 1 <= k <= m");
    const auto& p = cached_single_swap(m, k);
    const int in_count = static_cast<int>(a_in_top) + static_cast<int>(b_in_top);
    return in_count == 2 ? p.both_in : in_count == 1 ? p.one_in : p.both_out;
}

double pair_inclusion_prob(const RandomizationScheme& scheme, const Ranking& base, Label a, Label b) {
    if (a == b) throw ContractViolation("pair inclusion probability needs a != b");
    const std::size_t m = base.size();
    const int in_count = static_cast<int>(base.position_of(a) < scheme.k) +
                         static_cast<int>(base.position_of(b) < scheme.k);
    return mixture_prob(scheme, m, in_count);
}

PairWeightTable::PairWeightTable(const RandomizationScheme& scheme, const Ranking& base,
                                 const Ranking& final_ranking)
    : k_(scheme.k),
      clip_(scheme.clip_probabilities),
      base_mask_(top_k_mask(base, scheme.k)),
      revealed_mask_(top_k_mask(final_ranking, scheme.k)),
      revealed_(top_k(final_ranking, scheme.k)) {
    if (base.size() != final_ranking.size()) throw ContractViolation("ranking sizes differ");
    const std::size_t m = base.size();
    for (int c = 0; c <= 2; ++c) {
        // Patterns that cannot occur for this (m, k) are left at 0.
        const bool possible = (c == 2 && k_ >= 2) || (c == 1 && k_ < m) || (c == 0 && m - k_ >= 2);
        pattern_prob_[c] = possible ? mixture_prob(scheme, m, c) : 0.0;
    }
}

double PairWeightTable::inclusion_prob(Label a, Label b) const {
    if (a == b) throw ContractViolation("pair inclusion probability needs a != b");
    const int c = static_cast<int>(base_mask_.at(a)) + static_cast<int>(base_mask_.at(b));
    const double p = pattern_prob_[c];
    return clip_ ? std::clamp(p, kMinInclusionProb, kMaxInclusionProb) : p;
}

double PairWeightTable::weight(Label a, Label b) const {
    if (!revealed_mask_.at(a) || !revealed_mask_.at(b)) return 0.0;
    return 1.0 / inclusion_prob(a, b);
}

void PairWeightTable::check_feedback(const Feedback& feedback) const {
    if (feedback.m() != m() || feedback.k() != k_) {
        throw InformationBarrierViolation("feedback does not match the revealed top-k");
    }
    for (const auto& r : feedback.revealed()) {
        if (!revealed_mask_[r.label]) {
            throw InformationBarrierViolation("feedback reveals label " + std::to_string(r.label + 1) +
                                              " outside the played top-k");
        }
    }
}

std::vector<WeightedPair> revealed_pairs(const PairWeightTable& table, const Feedback& feedback) {
    table.check_feedback(feedback);
    std::vector<WeightedPair> pairs;
    for (const auto& ra : feedback.revealed()) {
        if (!ra.relevant) continue;
        for (const auto& rb : feedback.revealed()) {
            if (rb.relevant) continue;
            pairs.push_back({ra.label, rb.label, table.weight(ra.label, rb.label)});
        }
    }
    return pairs;
}

double estimate_loss(LossKind kind, std::span<const double> s, const PairWeightTable& table,
                     const Feedback& feedback) {
    if (s.size() != table.m()) throw ContractViolation("score length differs from m");
    return estimate_pairwise_sum([&](Label a, Label b) { return atom(kind, s[a], s[b]); }, table,
                                 feedback);
}

}  // namespace topk
