#ifndef TOPK_DATA_HPP
#define TOPK_DATA_HPP

#include "topk/core.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace topk {

enum class Split { Train, Test };

struct LabelCardinality {
    std::size_t min = 0;
    double mean = 0.0;
    std::size_t max = 0;
};

// Immutable after load. Features are stored row-major.
class MultilabelDataset {
public:
    MultilabelDataset(std::string name, std::size_t dim, std::size_t m, std::vector<double> features,
                      std::vector<RelevanceSet> labels, Split split = Split::Train);

    const std::string& name() const { return name_; }
    std::size_t size() const { return labels_.size(); }
    std::size_t dim() const { return dim_; }
    std::size_t m() const { return m_; }
    Split split() const { return split_; }

    std::span<const double> features(std::size_t row) const {
        return {features_.data() + row * dim_, dim_};
    }
    const RelevanceSet& labels(std::size_t row) const { return labels_.at(row); }
    const std::vector<double>& feature_matrix() const { return features_; }

    LabelCardinality cardinality() const;

    // Rows in the given order, with a new split tag.
    MultilabelDataset subset(std::span<const std::size_t> rows, Split split) const;

private:
    std::string name_;
    std::size_t dim_;
    std::size_t m_;
    std::vector<double> features_;
    std::vector<RelevanceSet> labels_;
    Split split_;
};

// How the label attributes of an ARFF file are identified: the trailing
// `count` attributes, or by attribute name.
struct LabelCount {
    std::size_t count;
};
using LabelSpec = std::variant<LabelCount, std::vector<std::string>>;

// MULAN-style ARFF: '%' comments, @relation / @attribute / @data, dense
// rows (optionally wrapped in braces) and sparse "{index value, ...}" rows.
// Throws ParseError with the offending line number.
MultilabelDataset parse_arff(std::istream& in, const LabelSpec& labels, std::string name = "arff",
                             Split split = Split::Train);
MultilabelDataset parse_arff(const std::filesystem::path& path, const LabelSpec& labels,
                             Split split = Split::Train);

// Label names listed in a MULAN XML label file (<label name="..."/>).
std::vector<std::string> read_mulan_label_names(const std::filesystem::path& xml_path);

// Canonical CSV: header f1..fdim,l1..lm; features as shortest round-trip
// decimals, labels 0/1. Sidecar `<path>.meta` holds name, m and dim as
// key=value lines.
void write_canonical_csv(const MultilabelDataset& ds, const std::filesystem::path& path);
MultilabelDataset read_canonical_csv(const std::filesystem::path& path, Split split = Split::Train);

// Picks the loader by extension: .csv (with sidecar) or .arff. For ARFF the
// label count comes from `label_count` when non-zero, else a MULAN XML file
// next to the data (stem without -train/-test), else the known dataset name.
MultilabelDataset load_dataset(const std::filesystem::path& path, std::size_t label_count, Split split);

// Label count of a well-known benchmark by file stem, 0 if unknown.
std::size_t known_label_count(const std::string& stem);

struct StreamPlan {
    std::size_t loops = 1;
    bool shuffle_each_loop = false;
    std::uint64_t seed = 0;

    // Throws ConfigError; loops must lie in [1, 20].
    void validate() const;
};

// Row indices for n * loops rounds; each loop is a seeded shuffle when enabled.
std::vector<std::size_t> stream(const MultilabelDataset& ds, const StreamPlan& plan);

// Uniform subsample without replacement of n_train train rows and n_test
// test rows, each drawn from its own split.
struct ReducedDataset {
    MultilabelDataset train;
    MultilabelDataset test;
};
ReducedDataset reduce_dataset(const MultilabelDataset& train, const MultilabelDataset& test, std::size_t n_train,
                              std::size_t n_test, std::uint64_t seed);
// 1500 train + 500 test rows.
ReducedDataset reduce_mediamill(const MultilabelDataset& train, const MultilabelDataset& test, std::uint64_t seed);

}  // namespace topk

#endif  // TOPK_DATA_HPP
