// Acceptance checks. One line per criterion: PASS, FAIL or SKIP.
// Exit status: 0 all run criteria passed, 1 any failure, 77 everything skipped.

#include "topk/boosters.hpp"
#include "topk/data.hpp"
#include "topk/errors.hpp"
#include "topk/experiment.hpp"
#include "topk/potential.hpp"
#include "topk/randomize.hpp"
#include "topk/testkit.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace topk;
namespace fs = std::filesystem;
namespace tk = topk::testkit;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Result {
    Verdict verdict;
    std::string detail;
};

Result fail(std::string d) { return {Verdict::Fail, std::move(d)}; }
Result skip(std::string d) { return {Verdict::Skip, std::move(d)}; }
Result judge(bool ok, std::string d) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(d)}; }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

fs::path g_data_dir;

// ---------------------------------------------------------------- 1 and 2

struct EstimatorStats {
    double max_bias = 0.0;
    bool bounded = true;
    double worst_ratio = 0.0;  // max |L_hat - L| / bound
    std::size_t triples = 0;
};

// Enumerates every outcome of the scheme for 50 random (s, R, base) triples.
void check_estimators(const RandomizationScheme& scheme, std::size_t m, Rng& rng, EstimatorStats& st) {
    const double rho = scheme.rho;
    const double k = static_cast<double>(scheme.k);
    const double md = static_cast<double>(m);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = trial % 5 == 4 ? tk::random_tied_scores(m, rng) : tk::random_scores(m, rng);
        const auto truth = tk::random_relevance(m, rng);
        const auto base = tk::random_ranking(m, rng);
        const auto e = tk::enumerate_outcomes(scheme, base);
        for (auto kind : {LossKind::Rank, LossKind::Hinge, LossKind::Logistic}) {
            const double exact = tk::reference_loss(kind, s, truth);
            const double z = tk::max_atom(kind, s);
            const double bound = scheme.kind == SchemeKind::Uniform ? z * 2 * md * md / rho
                                                                   : z * (2 * md * md - k * k) / rho;
            double expected = 0.0;
            for (const auto& o : e.outcomes) {
                const PairWeightTable table(scheme, base, o.ranking);
                const double est = estimate_loss(kind, s, table, tk::feedback_for(o.ranking, scheme.k, truth));
                expected += o.probability * est;
                const double dev = std::abs(est - exact);
                if (!(dev <= bound)) st.bounded = false;
                if (bound > 0) st.worst_ratio = std::max(st.worst_ratio, dev / bound);
            }
            st.max_bias = std::max(st.max_bias, std::abs(expected - exact));
        }
        ++st.triples;
    }
}

std::vector<RandomizationScheme> criterion1_schemes() {
    std::vector<RandomizationScheme> out;
    for (std::size_t k : {2u, 3u, 5u}) {
        for (double rho : {0.1, 0.25}) out.push_back({SchemeKind::Uniform, rho, k, false});
    }
    out.push_back({SchemeKind::SingleSwap, 0.2, 3, false});
    return out;
}

Result criterion1() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(101);
    EstimatorStats st;
    for (const auto& scheme : criterion1_schemes()) check_estimators(scheme, 5, rng, st);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = st.max_bias <= 1e-10 && secs < 30.0;
    return judge(ok, std::to_string(st.triples) + " triples x 3 losses, max |E[L_hat] - L| = " +
                         fmt("%.3g", st.max_bias) + " (tol 1e-10), " + fmt("%.2f", secs) + " s (limit 30 s)");
}

Result criterion2() {
    Rng rng(202);
    EstimatorStats st;
    for (const auto& scheme : criterion1_schemes()) check_estimators(scheme, 5, rng, st);
    return judge(st.bounded, "max |L_hat - L| / bound = " + fmt("%.4f", st.worst_ratio) + " over " +
                                 std::to_string(st.triples) + " enumerated triples (must be <= 1)");
}

// ---------------------------------------------------------------- 3

Result criterion3() {
    Rng rng(303);
    int mc_bad = 0;
    double worst_z = 0.0;
    for (int c = 0; c < 20; ++c) {
        const std::size_t m = 2 + rng.below(8);
        const int n = 1 + static_cast<int>(rng.below(8));
        const double gamma = 0.05 + 0.45 * rng.uniform();
        const double sa = 4.0 * rng.uniform() - 2.0, sb = 4.0 * rng.uniform() - 2.0;
        const auto kind = c % 2 ? LossKind::Logistic : LossKind::Hinge;
        const double exact = lambda_exact({kind, gamma, n, m}, sa, sb);
        const auto mc = tk::lambda_monte_carlo(kind, gamma, m, n, sa, sb, 1000000, rng);
        const double diff = std::abs(mc.mean - exact);
        if (mc.std_error > 0) {
            worst_z = std::max(worst_z, diff / mc.std_error);
            if (diff > 3 * mc.std_error) ++mc_bad;
        } else if (diff > 1e-12) {
            ++mc_bad;
        }
    }

    double worst_rec = 0.0;
    for (int c = 0; c < 200; ++c) {
        const std::size_t m = 2 + rng.below(13);
        const double gamma = 0.05 + 0.9 * rng.uniform();
        const int n = 1 + static_cast<int>(rng.below(40));
        const double sa = 6.0 * rng.uniform() - 3.0, sb = 6.0 * rng.uniform() - 3.0;
        const auto kind = c % 2 ? LossKind::Logistic : LossKind::Hinge;
        const double p = (1 - gamma) / static_cast<double>(m) + gamma, q = (1 - gamma) / static_cast<double>(m);
        const PotentialSpec here{kind, gamma, n, m}, prev{kind, gamma, n - 1, m};
        const double rhs = p * lambda_exact(prev, sa + 1, sb) + q * lambda_exact(prev, sa, sb + 1) +
                           (1 - p - q) * lambda_exact(prev, sa, sb);
        worst_rec = std::max(worst_rec, std::abs(lambda_exact(here, sa, sb) - rhs) / std::max(1.0, std::abs(rhs)));
    }

    double worst_slack = 1e300;
    for (int c = 0; c < 100; ++c) {
        const std::size_t m = 2 + rng.below(4);
        const int n = static_cast<int>(rng.below(6));
        const auto truth = tk::random_relevance(m, rng);
        const double gamma = (0.02 + 0.98 * rng.uniform()) * std::min(0.5, 1.0 / static_cast<double>(truth.size()));
        const auto s = tk::random_scores(m, rng);
        PotentialEvaluator ev(LossKind::Hinge, gamma, m);
        const double slack = ev.phi(n, s, truth) - upsilon_bruteforce(LossKind::Hinge, truth, gamma, n, s);
        worst_slack = std::min(worst_slack, slack);
    }

    const bool ok = mc_bad == 0 && worst_rec <= 1e-12 && worst_slack >= -1e-12;
    return judge(ok, "Monte Carlo: " + std::to_string(mc_bad) + "/20 outside 3 SE (worst " + fmt("%.2f", worst_z) +
                         " SE); recurrence max rel err " + fmt("%.2g", worst_rec) + " (tol 1e-12); min Phi - Upsilon " +
                         fmt("%.3g", worst_slack) + " (>= -1e-12)");
}

// ---------------------------------------------------------------- 4

Result criterion4() {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    double worst = 0.0;
    for (std::size_t m : {4u, 6u, 14u}) {
        RelevanceSet half(m);
        for (Label l = 0; l < m / 2; ++l) half.insert(l);
        const std::vector<double> zero(m, 0.0);
        for (double gamma : {0.1, 0.2, 0.3, 0.4, 0.5}) {
            PotentialEvaluator ev(LossKind::Hinge, gamma, m);
            for (int n = 0; n <= 30; ++n) {
                const double phi = ev.phi(n, zero, half);
                const double bound = tk::potential_zero_bound(n, m, gamma);
                if (!(phi <= bound)) ok = false;
                worst = std::max(worst, phi / bound);
            }
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return judge(ok && secs < 10.0, "max Phi^N(0) / bound = " + fmt("%.4f", worst) + " over 465 cases, " +
                                        fmt("%.3f", secs) + " s (limit 10 s)");
}

// ---------------------------------------------------------------- 5

Result criterion5() {
    const std::size_t m = 6, n = 5;
    BoosterConfig c;
    c.algorithm = Algorithm::TopAdaptive;
    c.learners = n;
    c.k = 3;
    c.rho = 0.3;
    c.clip_gradients = false;
    c.record_detail = true;
    Booster b(c, m, 8, 505);
    Rng data(506);
    AuditingOracle oracle{RelevanceSet(m)};

    std::size_t snapshots = 0;
    double worst_cost = 0.0, worst_sgd = 0.0;
    const double h = 1e-5;
    // relative error with the magnitude floored at 1, so exact zeros do not divide
    auto rel = [](double fd, double an) { return std::abs(fd - an) / std::max(1.0, std::abs(an)); };
    while (snapshots < 200) {
        oracle.reset(tk::random_relevance(m, data));
        const auto rec = b.round(tk::random_scores(8, data), oracle);
        const PairWeightTable table(c.scheme_for(), rec.base_ranking, rec.played_ranking);
        if (revealed_pairs(table, rec.feedback).empty()) continue;
        for (std::size_t i = 0; i < n && snapshots < 200; ++i, ++snapshots) {
            const std::vector<double> s_prev = i ? rec.experts[i - 1] : std::vector<double>(m, 0.0);
            for (Label l = 0; l < m; ++l) {
                const double fd = tk::finite_diff(
                    [&](double v) {
                        auto s = s_prev;
                        s[l] = v;
                        return estimate_loss(LossKind::Logistic, s, table, rec.feedback);
                    },
                    s_prev[l], h);
                worst_cost = std::max(worst_cost, rel(fd, rec.costs[i][l]));
            }
            const auto& pred = rec.predictions[i];
            const double fd = tk::finite_diff(
                [&](double alpha) {
                    std::vector<double> s(m);
                    for (Label l = 0; l < m; ++l) s[l] = s_prev[l] + alpha * pred[l];
                    return estimate_loss(LossKind::Logistic, s, table, rec.feedback);
                },
                rec.alphas_before[i], h);
            worst_sgd = std::max(worst_sgd, rel(fd, rec.sgd_derivatives[i]));
        }
    }
    const bool ok = worst_cost <= 1e-6 && worst_sgd <= 1e-6;
    return judge(ok, std::to_string(snapshots) + " snapshots, max rel err cost " + fmt("%.2g", worst_cost) +
                         ", SGD derivative " + fmt("%.2g", worst_sgd) + " (tol 1e-6)");
}

// ---------------------------------------------------------------- 6

double phi_pairs(double gamma, int n, std::span<const double> s, const RelevanceSet& truth) {
    double total = 0.0;
    for (Label a : truth.members()) {
        for (Label b : truth.complement()) total += lambda_exact({LossKind::Hinge, gamma, n, s.size()}, s[a], s[b]);
    }
    return total;
}

Result criterion6() {
    const std::size_t m = 6, n = 8, dim = 10;
    double worst = 0.0;
    std::size_t rounds = 0;
    for (auto algo : {Algorithm::TopBBM, Algorithm::TopAdaptive}) {
        BoosterConfig c;
        c.algorithm = algo;
        c.learners = n;
        c.k = m;
        c.rho = 0.0;
        c.gamma = 0.2;
        c.clip_probabilities = false;
        c.record_detail = true;
        Booster b(c, m, dim, 606);
        Rng data(607);
        AuditingOracle oracle{RelevanceSet(m)};
        for (int t = 0; t < 300; ++t, ++rounds) {
            const auto truth = tk::random_relevance(m, data, true);
            oracle.reset(truth);
            const auto nu_before = b.expert_probabilities();
            const auto rec = b.round(tk::random_scores(dim, data), oracle);
            auto track = [&](double got, double want) {
                worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
            };
            for (std::size_t i = 0; i < n; ++i) {
                const std::vector<double> s_prev = i ? rec.experts[i - 1] : std::vector<double>(m, 0.0);
                if (algo == Algorithm::TopBBM) {
                    for (Label l = 0; l < m; ++l) {
                        auto moved = s_prev;
                        moved[l] += 1.0;
                        track(rec.costs[i][l], phi_pairs(c.gamma, static_cast<int>(n - 1 - i), moved, truth));
                    }
                    track(rec.alphas_after[i], 1.0);
                } else {
                    const auto g = tk::reference_logistic_gradient(s_prev, truth);
                    for (Label l = 0; l < m; ++l) track(rec.costs[i][l], std::clamp(g[l], -1.0, 1.0));
                    double d = 0.0;
                    for (Label a : truth.members()) {
                        for (Label bl : truth.complement()) {
                            const double x = rec.experts[i][bl] - rec.experts[i][a];
                            d += (rec.predictions[i][bl] - rec.predictions[i][a]) / (1.0 + std::exp(-x));
                        }
                    }
                    d = std::clamp(d, -1.0, 1.0);
                    track(rec.sgd_derivatives[i], d);
                    track(rec.alphas_after[i], std::clamp(rec.alphas_before[i] - rec.learning_rate * d, -2.0, 2.0));
                    track(rec.hedge_losses[i], tk::reference_loss(LossKind::Rank, rec.experts[i], truth));
                }
            }
            if (algo == Algorithm::TopAdaptive) {
                std::vector<double> want(n);
                double total = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    want[i] = nu_before[i] * std::exp(-tk::reference_loss(LossKind::Rank, rec.experts[i], truth));
                    total += want[i];
                }
                const auto nu_after = b.expert_probabilities();
                for (std::size_t i = 0; i < n; ++i) track(nu_after[i], want[i] / total);
            }
        }
    }
    return judge(worst <= 1e-12, std::to_string(rounds) + " rounds (both boosters), max deviation " +
                                     fmt("%.2g", worst) + " (tol 1e-12)");
}

// ---------------------------------------------------------------- datasets

std::optional<fs::path> find_split(const std::string& name, const std::string& split) {
    for (const char* ext : {".arff", ".csv"}) {
        const auto p = g_data_dir / (name + "-" + split + ext);
        if (fs::exists(p)) return p;
    }
    return std::nullopt;
}

struct Loaded {
    MultilabelDataset train;
    MultilabelDataset test;
};

std::optional<Loaded> load_benchmark(const std::string& name) {
    const std::string file = name == "m-reduced" ? "mediamill" : name;
    const auto tr = find_split(file, "train"), te = find_split(file, "test");
    if (!tr || !te) return std::nullopt;
    auto train = load_dataset(*tr, 0, Split::Train);
    auto test = load_dataset(*te, train.m(), Split::Test);
    if (name == "m-reduced") {
        auto r = reduce_mediamill(train, test, 1);
        return Loaded{std::move(r.train), std::move(r.test)};
    }
    return Loaded{std::move(train), std::move(test)};
}

std::string missing(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        if (!find_split(n == "m-reduced" ? "mediamill" : n, "train") ||
            !find_split(n == "m-reduced" ? "mediamill" : n, "test")) {
            out += (out.empty() ? "" : ", ") + n;
        }
    }
    return out;
}

RunSummary run_benchmark(const std::string& name, const Loaded& d, RunAlgorithm algo, std::size_t k,
                         SchemeKind scheme) {
    ExperimentConfig c;
    c.algorithm = algo;
    const auto p = preset_for(name, algo);
    c.learners = p->learners;
    c.rho = p->rho;
    c.loops = p->loops;
    c.k = k;
    c.scheme = scheme;
    c.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    return run_experiment(c, d.train, d.test);
}

std::string no_data(const std::string& names) {
    return "benchmark files not found in " + g_data_dir.string() + " (" + names +
           "); run scripts/fetch_datasets.sh";
}

// ---------------------------------------------------------------- 7

Result criterion7() {
    const auto yeast = load_benchmark("yeast");
    MultilabelDataset data = yeast ? yeast->train
                                   : make_synthetic({"yeast-shaped", 1500, 103, 14, 4.24, 0.5}, 1, 707).train;
    std::size_t violations = 0, rounds = 0;
    for (auto algo : {Algorithm::TopBBM, Algorithm::TopAdaptive}) {
        for (auto scheme : {SchemeKind::Uniform, SchemeKind::SingleSwap}) {
            BoosterConfig c;
            c.algorithm = algo;
            c.learners = algo == Algorithm::TopBBM ? 30 : 60;
            c.rho = algo == Algorithm::TopBBM ? 0.03 : 0.04;
            c.k = 3;
            c.scheme = scheme;
            Booster b(c, data.m(), data.dim(), 708);
            AuditingOracle oracle{RelevanceSet(data.m())};
            for (std::size_t t = 0; t < 2500; ++t, ++rounds) {
                const std::size_t row = t % data.size();
                oracle.reset(data.labels(row));
                try {
                    const auto rec = b.round(data.features(row), oracle);
                    if (oracle.queried() != top_k(rec.played_ranking, 3)) ++violations;
                } catch (const InformationBarrierViolation&) {
                    ++violations;
                }
            }
        }
    }
    const std::string source = yeast ? "Yeast train split" : "synthetic Yeast-shaped stream (m=14, dim=103; Yeast files absent)";
    return judge(violations == 0 && rounds >= 10000, std::to_string(rounds) + " audited rounds on " + source + ", " +
                                                         std::to_string(violations) + " violations");
}

// ---------------------------------------------------------------- 8

Result criterion8() {
    const std::vector<std::string> names{"emotions", "scene", "yeast", "m-reduced"};
    if (const auto miss = missing(names); !miss.empty()) return skip(no_data(miss));
    struct Target {
        std::string dataset;
        RunAlgorithm algo;
        double value;
        double tol;
    };
    const std::vector<Target> targets{
        {"emotions", RunAlgorithm::TopBBM, 0.20, 0.06},   {"emotions", RunAlgorithm::TopAdaptive, 0.22, 0.06},
        {"scene", RunAlgorithm::TopBBM, 0.11, 0.05},      {"scene", RunAlgorithm::TopAdaptive, 0.13, 0.05},
        {"yeast", RunAlgorithm::TopBBM, 0.23, 0.05},      {"yeast", RunAlgorithm::TopAdaptive, 0.23, 0.05},
        {"m-reduced", RunAlgorithm::TopAdaptive, 0.11, 0.05},
    };
    bool ok = true;
    std::ostringstream detail;
    std::map<std::string, Loaded> cache;
    for (const auto& t : targets) {
        if (!cache.count(t.dataset)) cache.emplace(t.dataset, *load_benchmark(t.dataset));
        const auto& d = cache.at(t.dataset);
        const auto top = run_benchmark(t.dataset, d, t.algo, 3, SchemeKind::Uniform);
        const auto full_algo = t.algo == RunAlgorithm::TopBBM ? RunAlgorithm::FullBBM : RunAlgorithm::FullAdaptive;
        const auto full = run_benchmark(t.dataset, d, full_algo, 3, SchemeKind::Uniform);
        const bool in_band = std::abs(top.test_loss.mean - t.value) <= t.tol;
        const bool ordered = full.test_loss.mean <= top.test_loss.mean + 0.02;
        ok = ok && in_band && ordered;
        detail << "\n    " << t.dataset << ' ' << to_string(t.algo) << ": test " << fmt("%.3f", top.test_loss.mean)
               << " (target " << fmt("%.2f", t.value) << " +- " << fmt("%.2f", t.tol) << (in_band ? ", ok" : ", OUT")
               << "), full " << fmt("%.3f", full.test_loss.mean) << (ordered ? " ok" : " ABOVE top-k + 0.02")
               << ", " << fmt("%.0f", top.wall_seconds) << " s";
    }
    return judge(ok, "benchmark test losses, 10 seeds" + detail.str());
}

// ---------------------------------------------------------------- 9

Result criterion9() {
    if (const auto miss = missing({"yeast"}); !miss.empty()) return skip(no_data(miss));
    const auto d = *load_benchmark("yeast");
    std::vector<double> means, stds;
    for (std::size_t k : {3u, 7u, 14u}) {
        const auto band = curve_band(run_benchmark("yeast", d, RunAlgorithm::TopBBM, k, SchemeKind::Uniform));
        means.push_back(band.back().mean);
        stds.push_back(band.back().std);
    }
    bool ok = true;
    for (std::size_t i = 1; i < means.size(); ++i) {
        ok = ok && means[i] <= means[i - 1] + 0.01 && stds[i] <= stds[i - 1] + 0.005;
    }
    std::string detail = "final cumulative loss (mean/std) k=3,7,14:";
    for (std::size_t i = 0; i < means.size(); ++i) detail += " " + fmt("%.4f", means[i]) + "/" + fmt("%.4f", stds[i]);
    return judge(ok, detail);
}

// ---------------------------------------------------------------- 10

Result criterion10() {
    if (const auto miss = missing({"emotions", "yeast"}); !miss.empty()) return skip(no_data(miss));
    bool ok = true;
    std::string detail = "|SingleSwap - Uniform| test loss:";
    for (const std::string name : {"emotions", "yeast"}) {
        const auto d = *load_benchmark(name);
        for (auto algo : {RunAlgorithm::TopBBM, RunAlgorithm::TopAdaptive}) {
            const double u = run_benchmark(name, d, algo, 3, SchemeKind::Uniform).test_loss.mean;
            const double s = run_benchmark(name, d, algo, 3, SchemeKind::SingleSwap).test_loss.mean;
            ok = ok && std::abs(s - u) <= 0.02;
            detail += " " + name + "/" + std::string(to_string(algo)) + " " + fmt("%.4f", std::abs(s - u));
        }
    }
    return judge(ok, detail + " (tol 0.02)");
}

// ---------------------------------------------------------------- 11

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Result criterion11() {
    const auto data = make_synthetic({"determinism", 300, 20, 8, 2.5, 0.4}, 100, 1111);
    const auto root = fs::temp_directory_path() / "topk_acceptance_determinism";
    bool ok = true;
    std::size_t bytes = 0;
    for (auto algo : {RunAlgorithm::TopBBM, RunAlgorithm::TopAdaptive}) {
        for (auto scheme : {SchemeKind::Uniform, SchemeKind::SingleSwap}) {
            std::string first;
            for (int rep = 0; rep < 2; ++rep) {
                ExperimentConfig c;
                c.algorithm = algo;
                c.scheme = scheme;
                c.learners = 10;
                c.rho = 0.05;
                c.loops = 2;
                c.seeds = {7, 8, 9};
                c.threads = rep == 0 ? 1 : 3;
                c.out_dir = root / ("rep" + std::to_string(rep));
                fs::remove_all(c.out_dir);
                run_experiment(c, data.train, data.test);
                const auto text = slurp(c.out_dir / "curves.csv");
                if (rep == 0) {
                    first = text;
                    bytes += text.size();
                } else if (text != first || text.empty()) {
                    ok = false;
                }
            }
        }
    }
    fs::remove_all(root);
    return judge(ok, "4 configurations run twice (1 and 3 threads), " + std::to_string(bytes) +
                         " bytes of curves compared");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::string criteria = "1,2,3,4,5,6,7,8,9,10,11";
    std::string data_dir = "data";
    app.add_option("--criteria", criteria, "comma-separated criterion numbers");
    app.add_option("--data-dir", data_dir, "directory holding <name>-train/-test benchmark files");
    CLI11_PARSE(app, argc, argv);
    g_data_dir = data_dir;

    const std::map<int, std::pair<const char*, std::function<Result()>>> all{
        {1, {"estimator unbiasedness", criterion1}},
        {2, {"b-boundedness", criterion2}},
        {3, {"potential correctness", criterion3}},
        {4, {"potential-at-zero bound", criterion4}},
        {5, {"gradient checks", criterion5}},
        {6, {"full-information reduction", criterion6}},
        {7, {"information barrier", criterion7}},
        {8, {"end-to-end loss reproduction", criterion8}},
        {9, {"k-monotonicity", criterion9}},
        {10, {"scheme parity", criterion10}},
        {11, {"determinism", criterion11}},
    };

    std::vector<int> selected;
    std::stringstream ss(criteria);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        const int id = std::stoi(item);
        if (!all.count(id)) {
            std::fprintf(stderr, "unknown criterion %d\n", id);
            return 2;
        }
        selected.push_back(id);
    }

    int failed = 0, skipped = 0;
    for (int id : selected) {
        const auto& [title, fn] = all.at(id);
        const auto start = std::chrono::steady_clock::now();
        Result r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r = fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const char* tag = r.verdict == Verdict::Pass ? "PASS" : r.verdict == Verdict::Fail ? "FAIL" : "SKIP";
        std::printf("criterion %2d  %-30s %s  [%.1f s] %s\n", id, title, tag, secs, r.detail.c_str());
        std::fflush(stdout);
        failed += r.verdict == Verdict::Fail;
        skipped += r.verdict == Verdict::Skip;
    }
    if (failed) return 1;
    if (skipped == static_cast<int>(selected.size()) && skipped > 0) return 77;
    return 0;
}
