#ifndef TOPK_CORE_HPP
#define TOPK_CORE_HPP

// Label-space primitives shared by every other module.
//
// Labels are 0-based indices internally. LabelId carries the 1-based value
// used in every serialized output and in user-facing messages.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace topk {

using Label = std::size_t;

// Per-label scores. Length is the label count m.
using ScoreVector = std::vector<double>;

// Per-label costs handed to a weak learner.
using CostVector = std::vector<double>;

struct LabelId {
    std::size_t value = 1;  // 1..m

    static LabelId from_index(Label l) { return LabelId{l + 1}; }
    Label index() const { return value - 1; }

    friend bool operator==(LabelId, LabelId) = default;
    friend auto operator<=>(LabelId, LabelId) = default;
};

// Throws ContractViolation if any entry is NaN or infinite.
void require_finite(std::span<const double> scores, const char* what = "scores");

// Subset of [m]; the complement is implied by m.
class RelevanceSet {
public:
    RelevanceSet() = default;
    explicit RelevanceSet(std::size_t m) : member_(m, 0) {}
    RelevanceSet(std::size_t m, std::span<const Label> members);

    std::size_t m() const { return member_.size(); }
    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }
    bool contains(Label l) const { return member_.at(l) != 0; }

    void insert(Label l);
    void erase(Label l);

    std::vector<Label> members() const;
    std::vector<Label> complement() const;

    friend bool operator==(const RelevanceSet&, const RelevanceSet&) = default;

private:
    std::vector<char> member_;
    std::size_t count_ = 0;
};

// Permutation of [m], highest-ranked label first.
class Ranking {
public:
    Ranking() = default;
    explicit Ranking(std::vector<Label> order);

    static Ranking identity(std::size_t m);

    std::size_t size() const { return order_.size(); }
    Label at(std::size_t position) const { return order_.at(position); }
    std::size_t position_of(Label l) const { return position_.at(l); }
    const std::vector<Label>& order() const { return order_; }

    // Exchanges the labels at two positions.
    void swap_positions(std::size_t i, std::size_t j);

    // 1-based rendering, e.g. "(2,3,4,1)".
    std::string to_string() const;

    friend bool operator==(const Ranking& a, const Ranking& b) { return a.order_ == b.order_; }
    friend bool operator<(const Ranking& a, const Ranking& b) { return a.order_ < b.order_; }

private:
    std::vector<Label> order_;
    std::vector<std::size_t> position_;
};

// Descending score order; ties prefer the smaller label. Exact equality is a tie.
Ranking rank_of_scores(std::span<const double> scores);

// The first k labels of r, sorted ascending. Requires 1 <= k <= m.
std::vector<Label> top_k(const Ranking& r, std::size_t k);

// Membership mask of top_k(r, k).
std::vector<char> top_k_mask(const Ranking& r, std::size_t k);

struct RevealedLabel {
    Label label;
    bool relevant;
};

// Relevance bits for the top-k of the played ranking, in rank order.
class Feedback {
public:
    Feedback() = default;
    Feedback(std::size_t m, std::vector<RevealedLabel> revealed);

    std::size_t m() const { return m_; }
    std::size_t k() const { return revealed_.size(); }
    const std::vector<RevealedLabel>& revealed() const { return revealed_; }

    bool is_revealed(Label l) const { return state_.at(l) != kHidden; }
    // Throws InformationBarrierViolation when l was not revealed.
    bool relevant(Label l) const;

    std::vector<Label> revealed_relevant() const;
    std::vector<Label> revealed_irrelevant() const;

private:
    static constexpr char kHidden = 0;
    static constexpr char kRelevant = 1;
    static constexpr char kIrrelevant = 2;

    std::size_t m_ = 0;
    std::vector<RevealedLabel> revealed_;
    std::vector<char> state_;
};

}  // namespace topk

#endif  // TOPK_CORE_HPP
