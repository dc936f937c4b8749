#include "topk/cli.hpp"

#include "topk/errors.hpp"
#include "topk/experiment.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <string>

namespace topk {

namespace {

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("bad " + std::string(what) + " '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::size_t> parse_k_list(std::string_view text) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        if (!item.empty()) out.push_back(static_cast<std::size_t>(parse_u64(item, "k value")));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw ConfigError("empty k list");
    return out;
}

}  // namespace

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
    if (text.find(',') == std::string_view::npos) {
        const auto n = parse_u64(text, "seed count");
        if (n == 0) throw ConfigError("seed count must be positive");
        std::vector<std::uint64_t> seeds(n);
        for (std::uint64_t i = 0; i < n; ++i) seeds[i] = i + 1;
        return seeds;
    }
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        if (comma == std::string_view::npos) {
            if (!item.empty()) seeds.push_back(parse_u64(item, "seed"));
            break;
        }
        if (item.empty()) throw ConfigError("empty entry in seed list");
        seeds.push_back(parse_u64(item, "seed"));
        pos = comma + 1;
    }
    if (seeds.empty()) throw ConfigError("empty seed list");
    return seeds;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Online multilabel ranking boosters under top-k feedback"};
    ExperimentConfig cfg;
    std::string algo = "topbbm";
    std::string rand = "uniform";
    std::string seeds = "10";
    std::string sweep;
    std::string out = "out";
    bool no_prob_clip = false, no_grad_clip = false, no_shuffle = false, m_reduced = false;

    app.add_option("--algo", algo, "topbbm | topada | fullbbm | fullada")->capture_default_str();
    app.add_option("--dataset", cfg.train_path, "training split (.arff or canonical .csv)")->required();
    app.add_option("--test", cfg.test_path, "test split (.arff or canonical .csv)")->required();
    app.add_option("--labels", cfg.label_count, "number of trailing label attributes in the ARFF files");
    app.add_option("--k", cfg.k, "labels revealed per round")->capture_default_str();
    auto* rho_opt = app.add_option("--rho", cfg.rho, "exploration rate");
    app.add_option("--gamma", cfg.gamma, "edge for topbbm")->capture_default_str();
    auto* learners_opt = app.add_option("--learners", cfg.learners, "number of weak learners N");
    auto* loops_opt = app.add_option("--loops", cfg.loops, "passes over the training set");
    app.add_option("--seeds", seeds, "seed count n (seeds 1..n) or comma list")->capture_default_str();
    app.add_option("--rand", rand, "uniform | singleswap")->capture_default_str();
    app.add_option("--out", out, "output directory")->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads (0: all cores)");
    app.add_option("--sweep-k", sweep, "comma list of k values; writes one band curve per k");
    app.add_flag("--freeze", cfg.freeze, "no updates while evaluating on the test split");
    app.add_flag("--no-prob-clip", no_prob_clip, "do not clip inclusion probabilities");
    app.add_flag("--no-grad-clip", no_grad_clip, "do not clip topada gradients");
    app.add_flag("--no-shuffle", no_shuffle, "keep the training order in every loop");
    app.add_flag("--diagnostics", cfg.diagnostics, "report per-learner empirical edges");
    app.add_flag("--m-reduced", m_reduced, "subsample 1500 train / 500 test rows (Mediamill) with its presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        cfg.algorithm = parse_algorithm(algo);
        cfg.scheme = parse_scheme(rand);
        cfg.seeds = parse_seeds(seeds);
        cfg.out_dir = out;
        cfg.prob_clip = !no_prob_clip;
        cfg.grad_clip = !no_grad_clip;
        cfg.shuffle_loops = !no_shuffle;

        auto train = load_dataset(cfg.train_path, cfg.label_count, Split::Train);
        auto test = load_dataset(cfg.test_path, cfg.label_count ? cfg.label_count : train.m(), Split::Test);
        std::string preset_name = train.name();
        if (m_reduced) {
            auto reduced = reduce_mediamill(train, test, 1);
            train = std::move(reduced.train);
            test = std::move(reduced.test);
            preset_name = "m-reduced";
        }

        // Explicit flags win over the per-dataset preset.
        if (const auto preset = preset_for(preset_name, cfg.algorithm)) {
            if (learners_opt->count() == 0) cfg.learners = preset->learners;
            if (rho_opt->count() == 0) cfg.rho = preset->rho;
            if (loops_opt->count() == 0) cfg.loops = preset->loops;
        }
        cfg.validate(train.m());

        if (!sweep.empty()) {
            for (const auto& path : sweep_k(cfg, train, test, parse_k_list(sweep))) {
                std::cout << "wrote " << path.string() << '\n';
            }
            return 0;
        }
        const RunSummary summary = run_experiment(cfg, train, test);
        std::cout << to_string(cfg.algorithm) << " on " << summary.dataset << ": test loss "
                  << format_real(summary.test_loss.mean) << " +- " << format_real(summary.test_loss.std)
                  << ", train loss " << format_real(summary.train_loss.mean) << " over "
                  << summary.seeds.size() << " seeds (" << format_real(summary.wall_seconds) << " s)\n"
                  << "wrote " << (cfg.out_dir / "curves.csv").string() << " and "
                  << (cfg.out_dir / "summary.txt").string() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace topk
