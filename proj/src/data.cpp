#include "topk/data.hpp"

#include "topk/errors.hpp"
#include "topk/rng.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>

namespace topk {

MultilabelDataset::MultilabelDataset(std::string name, std::size_t dim, std::size_t m, std::vector<double> features,
                                     std::vector<RelevanceSet> labels, Split split)
    : name_(std::move(name)), dim_(dim), m_(m), features_(std::move(features)), labels_(std::move(labels)),
      split_(split) {
    if (labels_.empty()) throw ContractViolation("dataset '" + name_ + "' has no rows");
    if (m_ < 2) throw ContractViolation("dataset '" + name_ + "' needs at least 2 labels");
    if (dim_ == 0) throw ContractViolation("dataset '" + name_ + "' has no features");
    if (features_.size() != labels_.size() * dim_) throw ContractViolation("feature matrix shape mismatch");
    for (const auto& r : labels_) {
        if (r.m() != m_) throw ContractViolation("relevance set with wrong label count");
    }
}

LabelCardinality MultilabelDataset::cardinality() const {
    LabelCardinality c;
    c.min = labels_.front().size();
    std::size_t total = 0;
    for (const auto& r : labels_) {
        c.min = std::min(c.min, r.size());
        c.max = std::max(c.max, r.size());
        total += r.size();
    }
    c.mean = static_cast<double>(total) / static_cast<double>(labels_.size());
    return c;
}

MultilabelDataset MultilabelDataset::subset(std::span<const std::size_t> rows, Split split) const {
    std::vector<double> feats;
    feats.reserve(rows.size() * dim_);
    std::vector<RelevanceSet> labs;
    labs.reserve(rows.size());
    for (std::size_t r : rows) {
        const auto x = features(r);
        feats.insert(feats.end(), x.begin(), x.end());
        labs.push_back(labels_.at(r));
    }
    return MultilabelDataset(name_, dim_, m_, std::move(feats), std::move(labs), split);
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

// Splits on commas outside quotes.
std::vector<std::string> split_commas(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    char quote = 0;
    for (char c : s) {
        if (quote) {
            if (c == quote) quote = 0;
            cur += c;
        } else if (c == '\'' || c == '"') {
            quote = c;
            cur += c;
        } else if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

struct Attribute {
    std::string name;
    bool numeric = false;
};

// Parses "@attribute <name> <type>"; the name may be quoted.
Attribute parse_attribute(const std::string& line, std::size_t lineno) {
    std::string rest = trim(std::string_view(line).substr(std::string("@attribute").size()));
    Attribute attr;
    std::size_t pos = 0;
    if (!rest.empty() && (rest[0] == '\'' || rest[0] == '"')) {
        const char q = rest[0];
        const auto end = rest.find(q, 1);
        if (end == std::string::npos) throw ParseError("unterminated attribute name", lineno);
        attr.name = rest.substr(1, end - 1);
        pos = end + 1;
    } else {
        while (pos < rest.size() && !std::isspace(static_cast<unsigned char>(rest[pos]))) ++pos;
        attr.name = rest.substr(0, pos);
    }
    const std::string type = lower(trim(std::string_view(rest).substr(pos)));
    if (attr.name.empty() || type.empty()) throw ParseError("malformed @attribute", lineno);
    attr.numeric = type == "numeric" || type == "real" || type == "integer";
    if (!attr.numeric && type.front() != '{') {
        // string / date / relational
        attr.numeric = false;
    }
    return attr;
}

}  // namespace

MultilabelDataset parse_arff(std::istream& in, const LabelSpec& label_spec, std::string name, Split split) {
    std::vector<Attribute> attrs;
    std::string line;
    std::size_t lineno = 0;
    bool in_data = false;
    std::vector<char> is_label;
    std::vector<std::size_t> feature_col;  // attribute index -> feature index (or npos)
    std::vector<std::size_t> label_col;    // attribute index -> label index (or npos)
    std::size_t dim = 0, m = 0;
    std::vector<double> features;
    std::vector<RelevanceSet> labels;
    constexpr auto npos = static_cast<std::size_t>(-1);

    auto begin_data = [&]() {
        if (attrs.empty()) throw ParseError("@data before any @attribute", lineno);
        is_label.assign(attrs.size(), 0);
        if (const auto* count = std::get_if<LabelCount>(&label_spec)) {
            if (count->count < 2 || count->count >= attrs.size()) {
                throw ParseError("label count " + std::to_string(count->count) + " incompatible with " +
                                     std::to_string(attrs.size()) + " attributes",
                                 lineno);
            }
            for (std::size_t i = attrs.size() - count->count; i < attrs.size(); ++i) is_label[i] = 1;
        } else {
            const auto& names = std::get<std::vector<std::string>>(label_spec);
            for (const auto& n : names) {
                auto it = std::find_if(attrs.begin(), attrs.end(), [&](const Attribute& a) { return a.name == n; });
                if (it == attrs.end()) throw ParseError("label attribute '" + n + "' not declared", lineno);
                is_label[static_cast<std::size_t>(it - attrs.begin())] = 1;
            }
        }
        feature_col.assign(attrs.size(), npos);
        label_col.assign(attrs.size(), npos);
        for (std::size_t i = 0; i < attrs.size(); ++i) {
            if (is_label[i]) {
                label_col[i] = m++;
            } else {
                if (!attrs[i].numeric) {
                    throw ParseError("feature attribute '" + attrs[i].name + "' is not numeric", lineno);
                }
                feature_col[i] = dim++;
            }
        }
        if (m < 2) throw ParseError("need at least 2 label attributes", lineno);
        if (dim == 0) throw ParseError("no feature attributes", lineno);
    };

    auto set_value = [&](std::size_t attr, std::string_view raw, double* row, RelevanceSet& rel) {
        const std::string v = unquote(trim(raw));
        if (v == "?") throw ParseError("missing value '?' in attribute '" + attrs[attr].name + "'", lineno);
        if (label_col[attr] != npos) {
            if (v == "1") {
                rel.insert(label_col[attr]);
            } else if (v != "0") {
                throw ParseError("label '" + attrs[attr].name + "' has non-binary value '" + v + "'", lineno);
            }
            return;
        }
        double d = 0.0;
        if (!parse_double(v, d)) throw ParseError("bad numeric value '" + v + "'", lineno);
        row[feature_col[attr]] = d;
    };

    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '%') continue;
        if (!in_data) {
            const std::string low = lower(t);
            if (low.rfind("@relation", 0) == 0) {
                if (name == "arff") name = unquote(trim(std::string_view(t).substr(9)));
            } else if (low.rfind("@attribute", 0) == 0) {
                attrs.push_back(parse_attribute(t, lineno));
            } else if (low.rfind("@data", 0) == 0) {
                begin_data();
                in_data = true;
            } else {
                throw ParseError("unexpected header line '" + t + "'", lineno);
            }
            continue;
        }

        const std::size_t row_start = features.size();
        features.resize(row_start + dim, 0.0);
        RelevanceSet rel(m);
        std::string_view body = t;
        bool braced = false;
        if (body.front() == '{') {
            if (body.back() != '}') throw ParseError("unterminated '{' row", lineno);
            body = body.substr(1, body.size() - 2);
            braced = true;
        }
        const std::string inner = trim(body);
        std::vector<std::string> items = inner.empty() ? std::vector<std::string>{} : split_commas(inner);
        const bool sparse = braced && !items.empty() &&
                            items.front().find_first_of(" \t") != std::string::npos;
        if (sparse) {
            for (const auto& item : items) {
                const auto sp = item.find_first_of(" \t");
                if (sp == std::string::npos) throw ParseError("sparse entry '" + item + "' lacks a value", lineno);
                std::size_t idx = 0;
                const std::string idx_s = item.substr(0, sp);
                const auto res = std::from_chars(idx_s.data(), idx_s.data() + idx_s.size(), idx);
                if (res.ec != std::errc() || res.ptr != idx_s.data() + idx_s.size() || idx >= attrs.size()) {
                    throw ParseError("bad sparse index '" + idx_s + "'", lineno);
                }
                set_value(idx, std::string_view(item).substr(sp + 1), features.data() + row_start, rel);
            }
        } else if (braced && items.empty()) {
            // all zero
        } else {
            if (items.size() != attrs.size()) {
                throw ParseError("row has " + std::to_string(items.size()) + " values, expected " +
                                     std::to_string(attrs.size()),
                                 lineno);
            }
            for (std::size_t i = 0; i < items.size(); ++i) {
                set_value(i, items[i], features.data() + row_start, rel);
            }
        }
        labels.push_back(std::move(rel));
    }
    if (!in_data) throw ParseError("missing @data section", lineno);
    if (labels.empty()) throw ParseError("no data rows", lineno);
    return MultilabelDataset(std::move(name), dim, m, std::move(features), std::move(labels), split);
}

MultilabelDataset parse_arff(const std::filesystem::path& path, const LabelSpec& labels, Split split) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_arff(in, labels, path.stem().string(), split);
}

std::vector<std::string> read_mulan_label_names(const std::filesystem::path& xml_path) {
    std::ifstream in(xml_path);
    if (!in) throw std::runtime_error("cannot open " + xml_path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    static const std::regex label_re(R"re(<label\s+name\s*=\s*"([^"]*)")re");
    std::vector<std::string> names;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), label_re); it != std::sregex_iterator(); ++it) {
        names.push_back((*it)[1].str());
    }
    if (names.empty()) throw std::runtime_error("no <label> entries in " + xml_path.string());
    return names;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_canonical_csv(const MultilabelDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t f = 0; f < ds.dim(); ++f) out << (f ? "," : "") << 'f' << (f + 1);
    for (std::size_t l = 0; l < ds.m(); ++l) out << ",l" << (l + 1);
    out << '\n';
    for (std::size_t r = 0; r < ds.size(); ++r) {
        const auto x = ds.features(r);
        for (std::size_t f = 0; f < ds.dim(); ++f) out << (f ? "," : "") << format_double(x[f]);
        for (std::size_t l = 0; l < ds.m(); ++l) out << ',' << (ds.labels(r).contains(l) ? '1' : '0');
        out << '\n';
    }
    std::ofstream meta(path.string() + ".meta");
    if (!meta) throw std::runtime_error("cannot write " + path.string() + ".meta");
    meta << "name=" << ds.name() << "\nm=" << ds.m() << "\ndim=" << ds.dim() << '\n';
}

MultilabelDataset read_canonical_csv(const std::filesystem::path& path, Split split) {
    const std::string meta_path = path.string() + ".meta";
    std::ifstream meta(meta_path);
    if (!meta) throw std::runtime_error("missing metadata sidecar " + meta_path);
    std::string name = path.stem().string();
    std::size_t m = 0, dim = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(meta, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("metadata line without '='", lineno);
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string val = trim(std::string_view(t).substr(eq + 1));
        if (key == "name") {
            name = val;
        } else if (key == "m" || key == "dim") {
            std::size_t v = 0;
            const auto res = std::from_chars(val.data(), val.data() + val.size(), v);
            if (res.ec != std::errc() || res.ptr != val.data() + val.size()) {
                throw ParseError("bad integer for '" + key + "'", lineno);
            }
            (key == "m" ? m : dim) = v;
        }
    }
    if (m == 0 || dim == 0) throw ParseError("metadata must give m and dim", lineno);

    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty CSV", 1);
    ++lineno;
    if (split_commas(trim(line)).size() != dim + m) throw ParseError("header width differs from dim + m", lineno);

    std::vector<double> features;
    std::vector<RelevanceSet> labels;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto items = split_commas(t);
        if (items.size() != dim + m) throw ParseError("row width differs from dim + m", lineno);
        for (std::size_t f = 0; f < dim; ++f) {
            double d = 0.0;
            if (!parse_double(items[f], d)) throw ParseError("bad numeric value '" + items[f] + "'", lineno);
            features.push_back(d);
        }
        RelevanceSet rel(m);
        for (std::size_t l = 0; l < m; ++l) {
            const auto& v = items[dim + l];
            if (v == "1") {
                rel.insert(l);
            } else if (v != "0") {
                throw ParseError("non-binary label value '" + v + "'", lineno);
            }
        }
        labels.push_back(std::move(rel));
    }
    if (labels.empty()) throw ParseError("no data rows", lineno);
    return MultilabelDataset(name, dim, m, std::move(features), std::move(labels), split);
}

std::size_t known_label_count(const std::string& stem) {
    const std::string s = lower(stem);
    if (s.find("emotions") != std::string::npos) return 6;
    if (s.find("scene") != std::string::npos) return 6;
    if (s.find("yeast") != std::string::npos) return 14;
    if (s.find("mediamill") != std::string::npos) return 101;
    return 0;
}

MultilabelDataset load_dataset(const std::filesystem::path& path, std::size_t label_count, Split split) {
    const std::string ext = lower(path.extension().string());
    if (ext == ".csv") return read_canonical_csv(path, split);
    if (ext != ".arff") throw ConfigError("unsupported dataset extension '" + ext + "' (want .arff or .csv)");

    std::string stem = path.stem().string();
    for (const char* suffix : {"-train", "-test", "_train", "_test"}) {
        const std::string sfx = suffix;
        if (stem.size() > sfx.size() && lower(stem).compare(stem.size() - sfx.size(), sfx.size(), sfx) == 0) {
            stem.resize(stem.size() - sfx.size());
            break;
        }
    }
    LabelSpec spec = LabelCount{label_count};
    if (label_count == 0) {
        const auto xml = path.parent_path() / (stem + ".xml");
        if (std::filesystem::exists(xml)) {
            spec = read_mulan_label_names(xml);
        } else if (const std::size_t known = known_label_count(stem); known > 0) {
            spec = LabelCount{known};
        } else {
            throw ConfigError("cannot tell how many labels " + path.string() + " has; pass --labels");
        }
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_arff(in, spec, stem, split);
}

void StreamPlan::validate() const {
    if (loops < 1 || loops > 20) throw ConfigError("loops must lie in [1, 20]");
}

std::vector<std::size_t> stream(const MultilabelDataset& ds, const StreamPlan& plan) {
    plan.validate();
    Rng rng = Rng::derive(plan.seed, 3);
    std::vector<std::size_t> order;
    order.reserve(ds.size() * plan.loops);
    std::vector<std::size_t> idx(ds.size());
    for (std::size_t loop = 0; loop < plan.loops; ++loop) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        if (plan.shuffle_each_loop) rng.shuffle(idx);
        order.insert(order.end(), idx.begin(), idx.end());
    }
    return order;
}

namespace {

std::vector<std::size_t> sample_rows(std::size_t n, std::size_t take, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < take; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
    idx.resize(take);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace

ReducedDataset reduce_dataset(const MultilabelDataset& train, const MultilabelDataset& test, std::size_t n_train,
                              std::size_t n_test, std::uint64_t seed) {
    if (train.size() < n_train || test.size() < n_test) {
        throw ConfigError("not enough rows to subsample " + std::to_string(n_train) + "/" + std::to_string(n_test) +
                          " from " + std::to_string(train.size()) + "/" + std::to_string(test.size()));
    }
    if (train.m() != test.m() || train.dim() != test.dim()) throw ConfigError("train and test shapes differ");
    Rng rng = Rng::derive(seed, 4);
    const auto tr = sample_rows(train.size(), n_train, rng);
    const auto te = sample_rows(test.size(), n_test, rng);
    return {train.subset(tr, Split::Train), test.subset(te, Split::Test)};
}

ReducedDataset reduce_mediamill(const MultilabelDataset& train, const MultilabelDataset& test, std::uint64_t seed) {
    return reduce_dataset(train, test, 1500, 500, seed);
}

}  // namespace topk
