#include "topk/core.hpp"

#include "topk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace topk {

void require_finite(std::span<const double> scores, const char* what) {
    for (double v : scores) {
        if (!std::isfinite(v)) {
            throw ContractViolation(std::string(what) + " must be finite");
        }
    }
}

RelevanceSet::RelevanceSet(std::size_t m, std::span<const Label> members) : member_(m, 0) {
    for (Label l : members) {
        insert(l);
    }
}

void RelevanceSet::insert(Label l) {
    if (l >= member_.size()) {
        throw ContractViolation("relevant label " + std::to_string(l + 1) + " outside [1, " +
                                std::to_string(member_.size()) + "]");
    }
    if (!member_[l]) {
        member_[l] = 1;
        ++count_;
    }
}

void RelevanceSet::erase(Label l) {
    if (member_.at(l)) {
        member_[l] = 0;
        --count_;
    }
}

std::vector<Label> RelevanceSet::members() const {
    std::vector<Label> out;
    out.reserve(count_);
    for (Label l = 0; l < member_.size(); ++l) {
        if (member_[l]) out.push_back(l);
    }
    return out;
}

std::vector<Label> RelevanceSet::complement() const {
    std::vector<Label> out;
    out.reserve(member_.size() - count_);
    for (Label l = 0; l < member_.size(); ++l) {
        if (!member_[l]) out.push_back(l);
    }
    return out;
}

Ranking::Ranking(std::vector<Label> order) : order_(std::move(order)), position_(order_.size(), order_.size()) {
    for (std::size_t p = 0; p < order_.size(); ++p) {
        const Label l = order_[p];
        if (l >= order_.size() || position_[l] != order_.size()) {
            throw ContractViolation("ranking is not a permutation");
        }
        position_[l] = p;
    }
}

Ranking Ranking::identity(std::size_t m) {
    std::vector<Label> order(m);
    std::iota(order.begin(), order.end(), Label{0});
    return Ranking(std::move(order));
}

void Ranking::swap_positions(std::size_t i, std::size_t j) {
    std::swap(order_.at(i), order_.at(j));
    position_[order_[i]] = i;
    position_[order_[j]] = j;
}

std::string Ranking::to_string() const {
    std::string out = "(";
    for (std::size_t p = 0; p < order_.size(); ++p) {
        if (p) out += ',';
        out += std::to_string(order_[p] + 1);
    }
    return out + ")";
}

Ranking rank_of_scores(std::span<const double> scores) {
    require_finite(scores);
    std::vector<Label> order(scores.size());
    std::iota(order.begin(), order.end(), Label{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Label a, Label b) { return scores[a] > scores[b]; });
    return Ranking(std::move(order));
}

std::vector<Label> top_k(const Ranking& r, std::size_t k) {
    if (k < 1 || k > r.size()) {
        throw ContractViolation("top_k requires 1 <= k <= m (k=" + std::to_string(k) +
                                ", m=" + std::to_string(r.size()) + ")");
    }
    std::vector<Label> out(r.order().begin(), r.order().begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<char> top_k_mask(const Ranking& r, std::size_t k) {
    std::vector<char> mask(r.size(), 0);
    for (Label l : top_k(r, k)) mask[l] = 1;
    return mask;
}

Feedback::Feedback(std::size_t m, std::vector<RevealedLabel> revealed)
    : m_(m), revealed_(std::move(revealed)), state_(m, kHidden) {
    for (const auto& r : revealed_) {
        if (r.label >= m_) {
            throw ContractViolation("feedback label outside [1, m]");
        }
        if (state_[r.label] != kHidden) {
            throw ContractViolation("feedback reveals label " + std::to_string(r.label + 1) + " twice");
        }
        state_[r.label] = r.relevant ? kRelevant : kIrrelevant;
    }
}

bool Feedback::relevant(Label l) const {
    const char st = state_.at(l);
    if (st == kHidden) {
        throw InformationBarrierViolation("relevance of label " + std::to_string(l + 1) +
                                          " was not revealed");
    }
    return st == kRelevant;
}

std::vector<Label> Feedback::revealed_relevant() const {
    std::vector<Label> out;
    for (const auto& r : revealed_) {
        if (r.relevant) out.push_back(r.label);
    }
    return out;
}

std::vector<Label> Feedback::revealed_irrelevant() const {
    std::vector<Label> out;
    for (const auto& r : revealed_) {
        if (!r.relevant) out.push_back(r.label);
    }
    return out;
}

}  // namespace topk
