#include "topk/weaklearn.hpp"

#include "topk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace topk {

bool is_distribution(std::span<const double> p, double tol) {
    double sum = 0.0;
    for (double v : p) {
        if (!std::isfinite(v) || v < 0.0) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

std::vector<double> importance_weights(std::span<const double> cost) {
    require_finite(cost, "cost vector");
    std::vector<double> w(cost.size(), 0.0);
    if (cost.empty()) return w;
    const double top = *std::max_element(cost.begin(), cost.end());
    for (std::size_t l = 0; l < cost.size(); ++l) w[l] = top - cost[l];
    return w;
}

namespace {

double entropy(std::span<const double> w) {
    double total = 0.0;
    for (double v : w) total += v;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double v : w) {
        if (v > 0.0) {
            const double p = v / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

}  // namespace

StumpLearner::StumpLearner(std::size_t label_count, std::size_t feature_count, Rng& rng, StumpConfig config)
    : m_(label_count), dim_(feature_count), cfg_(config) {
    if (m_ < 2) throw ContractViolation("weak learner needs at least 2 labels");
    if (dim_ == 0) throw ContractViolation("weak learner needs at least one feature");
    if (cfg_.bins < 2) throw ContractViolation("stump needs at least 2 bins");

    std::vector<std::size_t> all(dim_);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const std::size_t keep = std::min(cfg_.max_features, dim_);
    // Partial Fisher-Yates: the first `keep` slots end up a uniform subset.
    for (std::size_t i = 0; i < keep; ++i) {
        const std::size_t j = i + rng.below(dim_ - i);
        std::swap(all[i], all[j]);
    }
    features_.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep));
    std::sort(features_.begin(), features_.end());

    Node root;
    root.label_weight.assign(m_, 0.0);
    nodes_.push_back(std::move(root));
}

void StumpLearner::check_dim(std::span<const double> x) const {
    if (x.size() != dim_) {
        throw ContractViolation("feature vector has " + std::to_string(x.size()) + " entries, expected " +
                                std::to_string(dim_));
    }
}

std::size_t StumpLearner::leaf_for(std::span<const double> x) const {
    std::size_t node = 0;
    while (!nodes_[node].is_leaf) {
        const Node& n = nodes_[node];
        node = x[features_[n.split_slot]] < n.threshold ? n.left : n.right;
    }
    return node;
}

WeakPrediction StumpLearner::predict(std::span<const double> x) const {
    check_dim(x);
    const Node& leaf = nodes_[leaf_for(x)];
    WeakPrediction p(m_);
    double total = 0.0;
    for (std::size_t l = 0; l < m_; ++l) {
        p[l] = leaf.label_weight[l] + cfg_.smoothing;
        total += p[l];
    }
    if (!(total > 0.0)) return WeakPrediction(m_, 1.0 / static_cast<double>(m_));
    for (auto& v : p) v /= total;
    return p;
}

std::size_t StumpLearner::bin_of(std::size_t slot, double v) const {
    const auto& t = thresholds_[slot];
    return static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), v) - t.begin());
}

void StumpLearner::accumulate(std::size_t node_idx, std::span<const double> xs, std::span<const double> w) {
    Node& node = nodes_[node_idx];
    for (std::size_t l = 0; l < m_; ++l) node.label_weight[l] += w[l];
    if (node.bin_weight.empty()) return;
    const std::size_t bins = bin_count();
    for (std::size_t slot = 0; slot < features_.size(); ++slot) {
        double* cell = node.bin_weight.data() + (slot * bins + bin_of(slot, xs[slot])) * m_;
        for (std::size_t l = 0; l < m_; ++l) cell[l] += w[l];
    }
    ++node.seen;
    ++node.seen_since_check;
}

void StumpLearner::build_thresholds() {
    const std::size_t bins = cfg_.bins;
    thresholds_.assign(features_.size(), {});
    for (std::size_t slot = 0; slot < features_.size(); ++slot) {
        std::vector<double> v;
        v.reserve(warm_x_.size());
        for (const auto& row : warm_x_) v.push_back(row[slot]);
        std::sort(v.begin(), v.end());
        auto& t = thresholds_[slot];
        for (std::size_t i = 1; i < bins; ++i) t.push_back(v[i * v.size() / bins]);
    }
    thresholds_ready_ = true;

    Node& root = nodes_[0];
    if (cfg_.max_depth > 0) root.bin_weight.assign(features_.size() * bin_count() * m_, 0.0);
    // Replay the buffered examples into the root's bin statistics.
    for (std::size_t i = 0; i < warm_x_.size(); ++i) {
        if (root.bin_weight.empty()) break;
        const std::size_t bins_n = bin_count();
        for (std::size_t slot = 0; slot < features_.size(); ++slot) {
            double* cell = root.bin_weight.data() + (slot * bins_n + bin_of(slot, warm_x_[i][slot])) * m_;
            for (std::size_t l = 0; l < m_; ++l) cell[l] += warm_w_[i][l];
        }
        ++root.seen;
        ++root.seen_since_check;
    }
    warm_x_.clear();
    warm_w_.clear();
}

void StumpLearner::try_split(std::size_t node_idx) {
    Node& node = nodes_[node_idx];
    node.seen_since_check = 0;
    const std::size_t bins = bin_count();

    double best_gain = 0.0, second_gain = 0.0;
    std::size_t best_slot = 0, best_cut = 0;
    bool found = false;
    std::vector<double> left(m_), right(m_), slot_total(m_);
    for (std::size_t slot = 0; slot < features_.size(); ++slot) {
        const double* base = node.bin_weight.data() + slot * bins * m_;
        std::fill(slot_total.begin(), slot_total.end(), 0.0);
        for (std::size_t b = 0; b < bins; ++b) {
            for (std::size_t l = 0; l < m_; ++l) slot_total[l] += base[b * m_ + l];
        }
        const double total = std::accumulate(slot_total.begin(), slot_total.end(), 0.0);
        if (total <= 0.0) continue;
        std::fill(left.begin(), left.end(), 0.0);
        double slot_best = 0.0;
        bool slot_found = false;
        std::size_t slot_cut = 0;
        // Cut i sends bins [0, i] left (x < thresholds[i]) and the rest right.
        for (std::size_t cut = 0; cut + 1 < bins; ++cut) {
            for (std::size_t l = 0; l < m_; ++l) left[l] += base[cut * m_ + l];
            if (cut > 0 && thresholds_[slot][cut] == thresholds_[slot][cut - 1]) continue;
            double wl = 0.0;
            for (std::size_t l = 0; l < m_; ++l) {
                right[l] = slot_total[l] - left[l];
                wl += left[l];
            }
            const double wr = total - wl;
            if (wl <= 0.0 || wr <= 0.0) continue;
            const double gain = entropy(slot_total) - (wl * entropy(left) + wr * entropy(right)) / total;
            if (!slot_found || gain > slot_best) {
                slot_best = gain;
                slot_cut = cut;
                slot_found = true;
            }
        }
        if (!slot_found) continue;
        // Rank features by their best cut; the runner-up is another feature.
        if (!found || slot_best > best_gain) {
            second_gain = found ? best_gain : 0.0;
            best_gain = slot_best;
            best_slot = slot;
            best_cut = slot_cut;
            found = true;
        } else if (slot_best > second_gain) {
            second_gain = slot_best;
        }
    }
    if (!found || best_gain <= 0.0) return;

    const double range = std::log2(static_cast<double>(m_));
    const double n = static_cast<double>(node.seen);
    const double eps = std::sqrt(range * range * std::log(1.0 / cfg_.split_confidence) / (2.0 * n));
    if (!(best_gain - second_gain > eps || eps < cfg_.tie_threshold)) return;

    // Split: children inherit the label weights of their side.
    Node lchild, rchild;
    lchild.label_weight.assign(m_, 0.0);
    rchild.label_weight.assign(m_, 0.0);
    const double* base = node.bin_weight.data() + best_slot * bins * m_;
    for (std::size_t b = 0; b < bins; ++b) {
        auto& dst = b <= best_cut ? lchild.label_weight : rchild.label_weight;
        for (std::size_t l = 0; l < m_; ++l) dst[l] += base[b * m_ + l];
    }
    lchild.depth = rchild.depth = node.depth + 1;
    if (lchild.depth < cfg_.max_depth) {
        lchild.bin_weight.assign(features_.size() * bins * m_, 0.0);
        rchild.bin_weight.assign(features_.size() * bins * m_, 0.0);
    }
    node.is_leaf = false;
    node.split_slot = best_slot;
    node.threshold = thresholds_[best_slot][best_cut];
    node.bin_weight.clear();
    node.bin_weight.shrink_to_fit();
    node.left = nodes_.size();
    node.right = nodes_.size() + 1;
    nodes_.push_back(std::move(lchild));  // invalidates `node`
    nodes_.push_back(std::move(rchild));
}

void StumpLearner::update(std::span<const double> x, std::span<const double> cost) {
    check_dim(x);
    if (cost.size() != m_) throw ContractViolation("cost vector length differs from m");
    const auto w = importance_weights(cost);
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) return;

    std::vector<double> xs(features_.size());
    for (std::size_t slot = 0; slot < features_.size(); ++slot) xs[slot] = x[features_[slot]];

    ++updates_;
    if (!thresholds_ready_) {
        Node& root = nodes_[0];
        for (std::size_t l = 0; l < m_; ++l) root.label_weight[l] += w[l];
        warm_x_.push_back(xs);
        warm_w_.push_back(w);
        if (warm_x_.size() >= cfg_.warmup) build_thresholds();
        if (thresholds_ready_ && nodes_[0].is_leaf && !nodes_[0].bin_weight.empty() &&
            nodes_[0].seen_since_check >= cfg_.grace_period) {
            try_split(0);
        }
        return;
    }

    const std::size_t leaf = leaf_for(x);
    accumulate(leaf, xs, w);
    const Node& node = nodes_[leaf];
    if (!node.bin_weight.empty() && node.seen_since_check >= cfg_.grace_period) try_split(leaf);
}

}  // namespace topk
