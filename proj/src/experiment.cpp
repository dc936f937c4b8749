#include "topk/experiment.hpp"

#include "topk/errors.hpp"
#include "topk/losses.hpp"
#include "topk/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

namespace topk {

std::string_view to_string(RunAlgorithm a) {
    switch (a) {
        case RunAlgorithm::TopBBM: return "topbbm";
        case RunAlgorithm::TopAdaptive: return "topada";
        case RunAlgorithm::FullBBM: return "fullbbm";
        case RunAlgorithm::FullAdaptive: return "fullada";
    }
    return "?";
}

RunAlgorithm parse_algorithm(std::string_view name) {
    for (auto a : {RunAlgorithm::TopBBM, RunAlgorithm::TopAdaptive, RunAlgorithm::FullBBM, RunAlgorithm::FullAdaptive}) {
        if (name == to_string(a)) return a;
    }
    throw ConfigError("unknown algorithm '" + std::string(name) + "' (topbbm, topada, fullbbm, fullada)");
}

SchemeKind parse_scheme(std::string_view name) {
    if (name == "uniform") return SchemeKind::Uniform;
    if (name == "singleswap") return SchemeKind::SingleSwap;
    throw ConfigError("unknown randomization '" + std::string(name) + "' (uniform, singleswap)");
}

bool is_full_information(RunAlgorithm a) {
    return a == RunAlgorithm::FullBBM || a == RunAlgorithm::FullAdaptive;
}

Algorithm base_algorithm(RunAlgorithm a) {
    return a == RunAlgorithm::TopBBM || a == RunAlgorithm::FullBBM ? Algorithm::TopBBM : Algorithm::TopAdaptive;
}

BoosterConfig ExperimentConfig::booster_config(std::size_t m) const {
    BoosterConfig b;
    b.algorithm = base_algorithm(algorithm);
    b.learners = learners;
    b.gamma = gamma;
    b.clip_gradients = grad_clip;
    b.record_detail = diagnostics;
    if (is_full_information(algorithm)) {
        b.k = m;
        b.rho = 0.0;
        b.scheme = SchemeKind::Uniform;
        b.clip_probabilities = false;
    } else {
        b.k = k;
        b.rho = rho;
        b.scheme = scheme;
        b.clip_probabilities = prob_clip;
    }
    return b;
}

void ExperimentConfig::validate(std::size_t m) const {
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    StreamPlan{loops, shuffle_loops, 0}.validate();
    booster_config(m).validate(m);
}

std::optional<Preset> preset_for(std::string_view dataset, RunAlgorithm algorithm) {
    struct Row {
        std::string_view name;
        Preset bbm;
        Preset ada;
    };
    static constexpr Row rows[] = {
        {"emotions", {50, 0.02, 20}, {50, 0.02, 10}},
        {"scene", {50, 0.02, 10}, {50, 0.04, 10}},
        {"yeast", {30, 0.03, 10}, {60, 0.04, 10}},
        {"mediamill", {10, 0.02, 20}, {10, 0.06, 20}},
        {"m-reduced", {20, 0.04, 20}, {60, 0.06, 20}},
    };
    for (const auto& row : rows) {
        if (row.name != dataset) continue;
        Preset p = base_algorithm(algorithm) == Algorithm::TopBBM ? row.bbm : row.ada;
        if (is_full_information(algorithm)) {
            p.rho = 0.0;
            p.loops = 1;
        }
        return p;
    }
    return std::nullopt;
}

Stat mean_std(const std::vector<double>& values) {
    Stat s;
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

SeedResult run_seed(const ExperimentConfig& config, const MultilabelDataset& train, const MultilabelDataset& test,
                    std::uint64_t seed) {
    if (train.m() != test.m() || train.dim() != test.dim()) throw ConfigError("train and test shapes differ");
    const auto start = std::chrono::steady_clock::now();
    const std::size_t m = train.m();
    config.validate(m);

    Booster booster(config.booster_config(m), m, train.dim(), seed);
    std::optional<EdgeTracker> edges;
    if (config.diagnostics) edges.emplace(booster.learner_count());

    SeedResult out;
    out.seed = seed;
    const auto order = stream(train, StreamPlan{config.loops, config.shuffle_loops, seed});
    out.curve.reserve(order.size() + test.size());

    AuditingOracle oracle{RelevanceSet(m)};
    double total = 0.0;
    auto play = [&](const MultilabelDataset& ds, std::size_t row, bool learn) {
        oracle.reset(ds.labels(row));
        RoundRecord rec = booster.round(ds.features(row), oracle, learn);
        const double loss = score_round(rec, ds.labels(row));
        if (edges) edges->observe(rec, ds.labels(row));
        total += loss;
        const std::size_t round = out.curve.size() + 1;
        out.curve.push_back({round, total / static_cast<double>(round), rec.explored, rec.expert});
        return loss;
    };

    double train_sum = 0.0;
    for (std::size_t row : order) train_sum += play(train, row, true);
    out.train_loss = train_sum / static_cast<double>(order.size());

    double test_sum = 0.0;
    for (std::size_t row = 0; row < test.size(); ++row) test_sum += play(test, row, !config.freeze);
    out.test_loss = test_sum / static_cast<double>(test.size());

    if (edges) out.edges = edges->edges();
    out.alphas = booster.alphas();
    out.expert_weights = booster.expert_probabilities();
    out.wall_seconds = seconds_since(start);
    return out;
}

RunSummary run_experiment(const ExperimentConfig& config, const MultilabelDataset& train,
                          const MultilabelDataset& test) {
    const auto start = std::chrono::steady_clock::now();
    config.validate(train.m());

    RunSummary summary;
    summary.config = config;
    summary.dataset = train.name();
    summary.m = train.m();
    summary.dim = train.dim();
    summary.train_rows = train.size();
    summary.test_rows = test.size();
    summary.seeds.resize(config.seeds.size());

    // Seeds are independent; each worker owns whole seeds and writes only its
    // own result slot.
    std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, config.seeds.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&]() {
        for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
            try {
                summary.seeds[i] = run_seed(config, train, test, config.seeds[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<double> train_losses, test_losses;
    for (const auto& s : summary.seeds) {
        train_losses.push_back(s.train_loss);
        test_losses.push_back(s.test_loss);
    }
    summary.train_loss = mean_std(train_losses);
    summary.test_loss = mean_std(test_losses);
    summary.wall_seconds = seconds_since(start);

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        write_curves(summary, config.out_dir / "curves.csv");
        write_summary(summary, config.out_dir / "summary.txt");
    }
    return summary;
}

RunSummary run(const ExperimentConfig& config) {
    if (config.train_path.empty()) throw ConfigError("--dataset is required");
    if (config.test_path.empty()) throw ConfigError("--test is required");
    const auto train = load_dataset(config.train_path, config.label_count, Split::Train);
    const auto test = load_dataset(config.test_path, config.label_count ? config.label_count : train.m(), Split::Test);
    return run_experiment(config, train, test);
}

std::string format_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_real(v[i]);
    }
    return s;
}

}  // namespace

void write_curves(const RunSummary& summary, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "seed,round,avg_weighted_rank_loss,explored,expert_index\n";
    std::string line;
    for (const auto& s : summary.seeds) {
        for (const auto& p : s.curve) {
            line.clear();
            line += std::to_string(s.seed);
            line += ',';
            line += std::to_string(p.round);
            line += ',';
            line += format_real(p.avg_loss);
            line += p.explored ? ",1," : ",0,";
            line += std::to_string(p.expert);
            line += '\n';
            out << line;
        }
    }
}

void write_summary(const RunSummary& summary, const std::filesystem::path& path) {
    const auto& c = summary.config;
    auto out = open_out(path);
    const bool full = is_full_information(c.algorithm);
    out << "algorithm=" << to_string(c.algorithm) << '\n'
        << "dataset=" << summary.dataset << '\n'
        << "train_path=" << c.train_path.string() << '\n'
        << "test_path=" << c.test_path.string() << '\n'
        << "m=" << summary.m << '\n'
        << "dim=" << summary.dim << '\n'
        << "train_rows=" << summary.train_rows << '\n'
        << "test_rows=" << summary.test_rows << '\n'
        << "k=" << (full ? summary.m : c.k) << '\n'
        << "rho=" << format_real(full ? 0.0 : c.rho) << '\n'
        << "gamma=" << format_real(c.gamma) << '\n'
        << "learners=" << c.learners << '\n'
        << "loops=" << c.loops << '\n'
        << "randomization=" << to_string(full ? SchemeKind::Uniform : c.scheme) << '\n'
        << "freeze=" << c.freeze << '\n'
        << "prob_clip=" << (c.prob_clip && !full) << '\n'
        << "grad_clip=" << c.grad_clip << '\n'
        << "seeds=";
    for (std::size_t i = 0; i < c.seeds.size(); ++i) out << (i ? "," : "") << c.seeds[i];
    out << '\n';
    for (const auto& s : summary.seeds) {
        const std::string key = "seed." + std::to_string(s.seed) + ".";
        out << key << "train_loss=" << format_real(s.train_loss) << '\n'
            << key << "test_loss=" << format_real(s.test_loss) << '\n'
            << key << "wall_seconds=" << format_real(s.wall_seconds) << '\n'
            << key << "alpha=" << join(s.alphas) << '\n'
            << key << "nu=" << join(s.expert_weights) << '\n';
        if (!s.edges.empty()) {
            out << key << "edge=";
            for (std::size_t i = 0; i < s.edges.size(); ++i) {
                out << (i ? "," : "") << (s.edges[i] ? format_real(*s.edges[i]) : "nan");
            }
            out << '\n';
        }
    }
    out << "train_loss.mean=" << format_real(summary.train_loss.mean) << '\n'
        << "train_loss.std=" << format_real(summary.train_loss.std) << '\n'
        << "test_loss.mean=" << format_real(summary.test_loss.mean) << '\n'
        << "test_loss.std=" << format_real(summary.test_loss.std) << '\n'
        << "wall_seconds=" << format_real(summary.wall_seconds) << '\n';
}

std::vector<BandPoint> curve_band(const RunSummary& summary) {
    std::vector<BandPoint> band;
    if (summary.seeds.empty()) return band;
    const std::size_t rounds = summary.seeds.front().curve.size();
    std::vector<double> at(summary.seeds.size());
    for (std::size_t r = 0; r < rounds; ++r) {
        for (std::size_t s = 0; s < summary.seeds.size(); ++s) at[s] = summary.seeds[s].curve.at(r).avg_loss;
        const Stat st = mean_std(at);
        band.push_back({r + 1, st.mean, st.std});
    }
    return band;
}

std::vector<std::filesystem::path> sweep_k(const ExperimentConfig& config, const MultilabelDataset& train,
                                           const MultilabelDataset& test, const std::vector<std::size_t>& k_values) {
    if (config.out_dir.empty()) throw ConfigError("sweep needs an output directory");
    std::filesystem::create_directories(config.out_dir);
    std::vector<std::filesystem::path> files;
    for (std::size_t k : k_values) {
        ExperimentConfig c = config;
        c.k = k;
        c.out_dir.clear();
        const RunSummary summary = run_experiment(c, train, test);
        const auto path = config.out_dir / ("curve_k" + std::to_string(k) + ".csv");
        auto out = open_out(path);
        out << "round,mean,std\n";
        for (const auto& p : curve_band(summary)) {
            out << p.round << ',' << format_real(p.mean) << ',' << format_real(p.std) << '\n';
        }
        write_summary(summary, config.out_dir / ("summary_k" + std::to_string(k) + ".txt"));
        files.push_back(path);
    }
    return files;
}

namespace {

// Box-Muller on our own uniform draws, so the data is identical everywhere.
double gaussian(Rng& rng) {
    const double u1 = 1.0 - rng.uniform();  // (0, 1]
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace

ReducedDataset make_synthetic(const SyntheticSpec& spec, std::size_t test_rows, std::uint64_t seed) {
    if (spec.m < 2 || spec.dim == 0 || spec.rows == 0 || test_rows == 0) {
        throw ContractViolation("synthetic data needs m >= 2, dim >= 1 and rows in both splits");
    }
    if (!(spec.mean_labels > 0.0 && spec.mean_labels < static_cast<double>(spec.m))) {
        throw ContractViolation("mean label count must lie in (0, m)");
    }
    Rng rng = Rng::derive(seed, 5);
    const std::size_t total = spec.rows + test_rows;
    std::vector<double> weights(spec.m * spec.dim);
    for (auto& w : weights) w = gaussian(rng);
    std::vector<double> features(total * spec.dim);
    for (auto& x : features) x = gaussian(rng);

    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.dim));
    std::vector<double> z(total * spec.m);
    for (std::size_t r = 0; r < total; ++r) {
        for (std::size_t l = 0; l < spec.m; ++l) {
            double v = 0.0;
            for (std::size_t f = 0; f < spec.dim; ++f) v += weights[l * spec.dim + f] * features[r * spec.dim + f];
            z[r * spec.m + l] = v * scale + spec.noise * gaussian(rng);
        }
    }
    // Per-label threshold: the (1 - mean_labels / m) quantile of its scores.
    const double keep = spec.mean_labels / static_cast<double>(spec.m);
    std::vector<double> threshold(spec.m);
    std::vector<double> col(total);
    for (std::size_t l = 0; l < spec.m; ++l) {
        for (std::size_t r = 0; r < total; ++r) col[r] = z[r * spec.m + l];
        const auto cut = static_cast<std::size_t>(std::floor((1.0 - keep) * static_cast<double>(total)));
        std::nth_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(std::min(cut, total - 1)), col.end());
        threshold[l] = col[std::min(cut, total - 1)];
    }
    std::vector<RelevanceSet> labels;
    labels.reserve(total);
    for (std::size_t r = 0; r < total; ++r) {
        RelevanceSet rel(spec.m);
        for (std::size_t l = 0; l < spec.m; ++l) {
            if (z[r * spec.m + l] >= threshold[l]) rel.insert(l);
        }
        labels.push_back(std::move(rel));
    }

    std::vector<double> train_x(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(spec.rows * spec.dim));
    std::vector<double> test_x(features.begin() + static_cast<std::ptrdiff_t>(spec.rows * spec.dim), features.end());
    std::vector<RelevanceSet> train_y(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(spec.rows));
    std::vector<RelevanceSet> test_y(labels.begin() + static_cast<std::ptrdiff_t>(spec.rows), labels.end());
    return {MultilabelDataset(spec.name, spec.dim, spec.m, std::move(train_x), std::move(train_y), Split::Train),
            MultilabelDataset(spec.name, spec.dim, spec.m, std::move(test_x), std::move(test_y), Split::Test)};
}

}  // namespace topk
