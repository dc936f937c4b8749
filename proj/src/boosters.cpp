#include "topk/boosters.hpp"

#include "topk/errors.hpp"
#include "topk/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace topk {

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::TopBBM: return "topbbm";
        case Algorithm::TopAdaptive: return "topada";
    }
    return "?";
}

void BoosterConfig::validate(std::size_t m) const {
    if (learners < 1 || learners > 100) throw ConfigError("number of weak learners must lie in [1, 100]");
    scheme_for().validate(m);
    if (algorithm == Algorithm::TopBBM && !(gamma > 0.0 && gamma < 1.0)) {
        throw ConfigError("gamma must lie in (0, 1)");
    }
}

Feedback AuditingOracle::reveal(std::span<const Label> labels) {
    std::vector<RevealedLabel> out;
    out.reserve(labels.size());
    for (Label l : labels) {
        queried_.push_back(l);
        out.push_back({l, truth_.contains(l)});
    }
    return Feedback(truth_.m(), std::move(out));
}

Booster::Booster(const BoosterConfig& config, std::size_t label_count, std::size_t feature_count,
                 std::uint64_t seed)
    : cfg_(config), m_(label_count) {
    cfg_.validate(m_);
    Rng learner_rng = Rng::derive(seed, 2);
    for (std::size_t i = 0; i < cfg_.learners; ++i) {
        learners_.push_back(std::make_unique<StumpLearner>(m_, feature_count, learner_rng, cfg_.stump));
    }
    init(seed);
}

Booster::Booster(const BoosterConfig& config, std::vector<std::unique_ptr<WeakLearner>> learners,
                 std::uint64_t seed)
    : cfg_(config), learners_(std::move(learners)) {
    if (learners_.empty()) throw ConfigError("booster needs at least one weak learner");
    m_ = learners_.front()->label_count();
    for (const auto& wl : learners_) {
        if (wl->label_count() != m_) throw ConfigError("weak learners disagree on the label count");
    }
    cfg_.learners = learners_.size();
    cfg_.validate(m_);
    init(seed);
}

void Booster::init(std::uint64_t seed) {
    rng_ = Rng::derive(seed, 1);
    const std::size_t n = learners_.size();
    if (cfg_.algorithm == Algorithm::TopBBM) {
        alphas_.assign(n, 1.0);
        potential_.emplace(LossKind::Hinge, cfg_.gamma, m_);
    } else {
        alphas_.assign(n, 0.0);
    }
    log_nu_.assign(n, 0.0);
}

std::vector<double> Booster::expert_probabilities() const {
    const double top = *std::max_element(log_nu_.begin(), log_nu_.end());
    std::vector<double> p(log_nu_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(log_nu_[i] - top);
        total += p[i];
    }
    for (auto& v : p) v /= total;
    return p;
}

void Booster::set_expert_weights(std::span<const double> nu) {
    if (nu.size() != log_nu_.size()) throw ContractViolation("expert weight count differs from N");
    for (std::size_t i = 0; i < nu.size(); ++i) {
        if (!(nu[i] > 0.0) || !std::isfinite(nu[i])) throw ContractViolation("expert weights must be positive");
        log_nu_[i] = std::log(nu[i]);
    }
}

double Booster::learning_rate(std::size_t t) const {
    const double m2 = static_cast<double>(m_ * m_);
    const double scale = cfg_.rho > 0.0 ? cfg_.rho : 1.0;
    return 8.0 * scale * std::sqrt(2.0) / (m2 * std::sqrt(static_cast<double>(t)));
}

std::size_t Booster::draw_expert() {
    const auto p = expert_probabilities();
    const double u = rng_.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return i;
    }
    return p.size() - 1;
}

RoundRecord Booster::round(std::span<const double> x, FeedbackOracle& oracle, bool learn) {
    const std::size_t n = learners_.size();
    RoundRecord rec;
    rec.t = ++played_;

    std::vector<WeakPrediction> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = learners_[i]->predict(x);

    std::vector<ScoreVector> experts(n, ScoreVector(m_, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        for (Label l = 0; l < m_; ++l) {
            experts[j][l] = (j ? experts[j - 1][l] : 0.0) + alphas_[j] * h[j][l];
        }
    }

    const std::size_t chosen = cfg_.algorithm == Algorithm::TopBBM ? n - 1 : draw_expert();
    rec.expert = chosen + 1;

    const auto scheme = cfg_.scheme_for();
    auto played = randomize(scheme, experts[chosen], rng_);
    rec.explored = played.explored;
    rec.base_ranking = played.base_ranking;
    rec.played_ranking = played.final_ranking;
    rec.played_scores = std::move(played.perturbed_scores);

    const auto top = top_k(rec.played_ranking, cfg_.k);
    rec.feedback = oracle.reveal(top);
    const PairWeightTable table(scheme, rec.base_ranking, rec.played_ranking);
    table.check_feedback(rec.feedback);

    rec.estimated_rank_loss = estimate_loss(LossKind::Rank, experts[chosen], table, rec.feedback);

    std::vector<CostVector> costs;
    if (cfg_.algorithm == Algorithm::TopBBM) {
        bbm_costs(rec, experts, table, costs);
    } else {
        adaptive_update(rec, h, experts, table, learn, costs);
    }

    rec.learner_losses.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        rec.learner_losses[i] = std::inner_product(costs[i].begin(), costs[i].end(), h[i].begin(), 0.0);
    }
    if (learn) {
        for (std::size_t i = 0; i < n; ++i) learners_[i]->update(x, costs[i]);
    }

    if (cfg_.record_detail) {
        rec.predictions = std::move(h);
        rec.experts = std::move(experts);
        rec.costs = std::move(costs);
    }
    return rec;
}

void Booster::bbm_costs(RoundRecord& rec, const std::vector<ScoreVector>& experts, const PairWeightTable& table,
                        std::vector<CostVector>& costs) {
    const std::size_t n = learners_.size();
    const ScoreVector zero(m_, 0.0);
    costs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const ScoreVector& s_prev = i ? experts[i - 1] : zero;
        costs[i] = potential_->cost_vector(static_cast<int>(n - 1 - i), s_prev, table, rec.feedback);
    }
    if (cfg_.record_detail) {
        rec.alphas_before = alphas_;
        rec.alphas_after = alphas_;
    }
}

void Booster::adaptive_update(RoundRecord& rec, const std::vector<WeakPrediction>& h,
                              const std::vector<ScoreVector>& experts, const PairWeightTable& table, bool learn,
                              std::vector<CostVector>& costs) {
    const std::size_t n = learners_.size();
    const auto pairs = revealed_pairs(table, rec.feedback);
    const ScoreVector zero(m_, 0.0);
    const double eta = learning_rate(learn ? learned_ + 1 : std::max<std::size_t>(learned_, 1));
    auto clip = [&](double v) { return cfg_.clip_gradients ? std::clamp(v, -1.0, 1.0) : v; };

    costs.resize(n);
    std::vector<double> derivative(n, 0.0);
    std::vector<double> hedge(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const ScoreVector& s_prev = i ? experts[i - 1] : zero;
        costs[i] = logistic_gradient(s_prev, pairs);
        for (auto& c : costs[i]) c = clip(c);

        // d/d alpha of the estimated logistic loss at s^{i-1} + alpha h^i,
        // evaluated at the current alpha, where that point is s^i.
        const ScoreVector& s_cur = experts[i];
        double g = 0.0;
        double rank = 0.0;
        for (const auto& p : pairs) {
            const double diff = s_cur[p.irrelevant] - s_cur[p.relevant];
            g += p.weight * (h[i][p.irrelevant] - h[i][p.relevant]) * sigmoid(diff);
            rank += p.weight * rank_atom(s_cur[p.relevant], s_cur[p.irrelevant]);
        }
        derivative[i] = clip(g);
        hedge[i] = rank;
    }

    if (cfg_.record_detail) {
        rec.alphas_before = alphas_;
        rec.sgd_derivatives = derivative;
        rec.hedge_losses = hedge;
        rec.learning_rate = eta;
    }
    if (learn) {
        ++learned_;
        for (std::size_t i = 0; i < n; ++i) {
            alphas_[i] = std::clamp(alphas_[i] - eta * derivative[i], -kAlphaBound, kAlphaBound);
            log_nu_[i] -= std::min(hedge[i], kHedgeExponentCap);
        }
        // Renormalize so the weights sum to 1, flooring hopeless experts.
        const double top = *std::max_element(log_nu_.begin(), log_nu_.end());
        double total = 0.0;
        for (double v : log_nu_) total += std::exp(v - top);
        const double log_norm = top + std::log(total);
        for (auto& v : log_nu_) v = std::max(v - log_norm, top - log_norm - kHedgeLogFloor);
    }
    if (cfg_.record_detail) rec.alphas_after = alphas_;
}

double score_round(RoundRecord& rec, const RelevanceSet& truth) {
    rec.weighted_rank_loss = weighted_rank_loss(rec.played_scores, truth);
    return rec.weighted_rank_loss;
}

namespace {

struct EdgeTerms {
    double cost_dot_h = 0.0;
    double weight = 0.0;
};

EdgeTerms edge_terms(std::span<const double> s_prev, std::span<const double> h, const RelevanceSet& truth) {
    EdgeTerms out;
    const auto irr = truth.complement();
    for (Label a : truth.members()) {
        for (Label b : irr) {
            const double sig = sigmoid(s_prev[b] - s_prev[a]);
            out.cost_dot_h += sig * (h[b] - h[a]);
            out.weight += sig;
        }
    }
    return out;
}

}  // namespace

void EdgeTracker::observe(const RoundRecord& rec, const RelevanceSet& truth) {
    const std::size_t n = numerator_.size();
    if (rec.predictions.size() != n || rec.experts.size() != n) {
        throw ContractViolation("empirical edges need rounds recorded with detail");
    }
    const ScoreVector zero(truth.m(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto terms = edge_terms(i ? rec.experts[i - 1] : zero, rec.predictions[i], truth);
        numerator_[i] += terms.cost_dot_h;
        weight_[i] += terms.weight;
    }
}

double EdgeTracker::edge(std::size_t learner) const {
    if (!(weight_.at(learner) > 0.0)) {
        throw UndefinedEdgeError("learner " + std::to_string(learner + 1) + " has zero edge weight");
    }
    return -numerator_[learner] / weight_[learner];
}

std::vector<std::optional<double>> EdgeTracker::edges() const {
    std::vector<std::optional<double>> out(numerator_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (weight_[i] > 0.0) out[i] = -numerator_[i] / weight_[i];
    }
    return out;
}

double empirical_edge(std::span<const EdgeObservation> history) {
    double num = 0.0, weight = 0.0;
    for (const auto& obs : history) {
        const auto terms = edge_terms(obs.s_prev, obs.h, obs.truth);
        num += terms.cost_dot_h;
        weight += terms.weight;
    }
    if (!(weight > 0.0)) throw UndefinedEdgeError("empirical edge undefined: weight norm is zero");
    return -num / weight;
}

}  // namespace topk
