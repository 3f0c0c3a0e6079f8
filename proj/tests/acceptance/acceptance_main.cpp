// End-to-end acceptance checks. Each criterion prints one [PASS]/[FAIL] line;
// the process exits nonzero if any criterion fails. Pass --out DIR to choose
// where the determinism check writes its run artifacts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ttab/feedback.hpp"
#include "ttab/harness.hpp"
#include "ttab/metrics.hpp"
#include "ttab/rng.hpp"

using ttab::ExperimentConfig;
using ttab::NoiseChannel;
using ttab::PolicyKind;
using ttab::PreferenceLabel;
using ttab::RunRecord;

namespace {

struct Criterion {
    bool pass = false;
    std::string detail;
};

// Running audit fed by every simulation the suite executes. Criterion 8
// consumes the replay tally, criterion 10 the paired-reward tally.
struct Audit {
    long long runs = 0;
    long long replay_failures = 0;
    std::string first_error;
    long long paired_instances = 0;
    long long paired_violations = 0;
};

void absorb(Audit& audit, const RunRecord& run) {
    ++audit.runs;
    try {
        ttab::replay_validate(run, 1e-12);
    } catch (const std::exception& e) {
        ++audit.replay_failures;
        if (audit.first_error.empty()) {
            audit.first_error = e.what();
        }
    }
    for (const auto& step : run.steps) {
        if (step.rewards_j.empty()) {
            continue;
        }
        for (size_t t = 0; t < step.rewards_i.size(); ++t) {
            ++audit.paired_instances;
            const int ri = step.rewards_i[t];
            const int rj = t < step.rewards_j.size() ? step.rewards_j[t] : -1;
            if ((ri != 0 && ri != 1) || (rj != 0 && rj != 1) || ri + rj > 1) {
                ++audit.paired_violations;
            }
        }
    }
}

ExperimentConfig make_config(PolicyKind policy, std::vector<double> skills,
                             long long stream, int batch,
                             unsigned long long seed, double noise_rate) {
    ExperimentConfig cfg;
    cfg.policy = policy;
    cfg.profile.initial_skills = std::move(skills);
    cfg.profile.stream_length = stream;
    cfg.profile.batch_size = batch;
    cfg.profile.seed = seed;
    cfg.noise = NoiseChannel::equal_split(noise_rate);
    cfg.probe_every = 0;
    return cfg;
}

std::string format(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return std::string(buf);
}

// Criterion 1: the overlap score must agree with a literal token-set oracle
// on every ordered span pair inside passages up to 20 tokens, and the exact
// match reward must coincide with a perfect score.
Criterion check_span_scoring() {
    long long pairs = 0;
    for (int len = 1; len <= 20; ++len) {
        std::vector<std::pair<int, int>> spans;
        for (int s = 0; s < len; ++s) {
            for (int e = s; e < len; ++e) {
                spans.emplace_back(s, e);
            }
        }
        for (const auto& [ps, pe] : spans) {
            std::set<int> pred_tokens;
            for (int t = ps; t <= pe; ++t) {
                pred_tokens.insert(t);
            }
            for (const auto& [gs, ge] : spans) {
                std::set<int> gold_tokens;
                for (int t = gs; t <= ge; ++t) {
                    gold_tokens.insert(t);
                }
                std::vector<int> shared;
                std::set_intersection(pred_tokens.begin(), pred_tokens.end(),
                                      gold_tokens.begin(), gold_tokens.end(),
                                      std::back_inserter(shared));
                const double oracle =
                    2.0 * static_cast<double>(shared.size()) /
                    static_cast<double>(pred_tokens.size() + gold_tokens.size());
                const ttab::SpanPrediction pred{ps, pe};
                const ttab::GoldSpan gold{gs, ge};
                const double got = ttab::span_f1(pred, gold);
                const int em = ttab::exact_match_reward(pred, gold);
                if (std::abs(got - oracle) > 1e-12 || (em == 1) != (got == 1.0) ||
                    (em == 1) != (ps == gs && pe == ge)) {
                    return {false, format("mismatch at pred [%d,%d] gold [%d,%d]",
                                          ps, pe, gs, ge)};
                }
                ++pairs;
            }
        }
    }
    return {true, format("score matches the token-set oracle on %lld ordered "
                         "pairs; exact match coincides with score 1",
                         pairs)};
}

// Criterion 2: empirical corruption frequencies must match the declared
// transition matrix within 0.02 for every row at several noise rates.
Criterion check_noise_channel() {
    const int draws = 100000;
    double max_gap = 0.0;
    for (double rate : {0.1, 0.3, 0.5, 0.7}) {
        const NoiseChannel channel = NoiseChannel::equal_split(rate);
        const auto expected = channel.transition();
        ttab::Rng rng(2024 + static_cast<unsigned long long>(rate * 100));
        for (int row = 0; row < 3; ++row) {
            std::array<long long, 3> counts{};
            const auto label = static_cast<PreferenceLabel>(row);
            for (int d = 0; d < draws; ++d) {
                ++counts[static_cast<int>(ttab::apply_noise(label, channel, rng))];
            }
            for (int col = 0; col < 3; ++col) {
                const double freq =
                    static_cast<double>(counts[col]) / static_cast<double>(draws);
                const double gap = std::abs(freq - expected[row][col]);
                max_gap = std::max(max_gap, gap);
                if (gap > 0.02) {
                    return {false,
                            format("rate %.1f row %d col %d: freq %.4f vs %.4f",
                                   rate, row, col, freq, expected[row][col])};
                }
            }
        }
    }
    return {true, format("label corruption frequencies match the transition "
                         "matrix within 0.02 at 4 rates (max gap %.4f)",
                         max_gap)};
}

// Criterion 3: with frozen skills and a clear quality order, the solo policy
// must lock onto the strongest source and its late regret must shrink.
Criterion check_solo_lock_in(Audit& audit) {
    const std::vector<double> skills = {0.9, 0.8, 0.7, 0.6, 0.5};
    double frac_sum = 0.0;
    int improved = 0;
    const int seeds = 20;
    for (int seed = 1; seed <= seeds; ++seed) {
        ExperimentConfig cfg = make_config(
            PolicyKind::kUcb, skills, 10000, 1,
            static_cast<unsigned long long>(seed), 0.0);
        cfg.policy_only = true;
        const RunRecord run = ttab::run_experiment(cfg);
        absorb(audit, run);
        const size_t steps = run.steps.size();
        long long on_best = 0;
        for (size_t t = steps - 1000; t < steps; ++t) {
            on_best += run.steps[t].chosen_i == 0;
        }
        frac_sum += static_cast<double>(on_best) / 1000.0;
        const std::vector<double> curve = ttab::cumulative_regret_curve(run, false);
        const double first_half = curve[steps / 2 - 1];
        const double second_half = curve.back() - first_half;
        improved += second_half < first_half;
    }
    const double mean_frac = frac_sum / seeds;
    const bool pass = mean_frac > 0.9 && improved >= 16;
    return {pass, format("final-1000 lock-in on the strongest source %.3f "
                         "(need >0.9); late-half regret shrank in %d/%d seeds "
                         "(need >=16)",
                         mean_frac, improved, seeds)};
}

struct ComparisonStats {
    int co_reward_wins = 0;
    int seeds = 0;
    double co_reward_mean = 0.0;
    double solo_reward_mean = 0.0;
    double co_best_skill_mean = 0.0;
    double ablation_best_skill_mean = 0.0;
};

// Shared driver for criteria 4 and 5: identical streams under the paired
// policy, the solo policy, and the paired policy without label sharing.
ComparisonStats run_policy_comparison(Audit& audit) {
    const std::vector<double> skills = {0.6, 0.5, 0.55, 0.4, 0.3};
    ComparisonStats stats;
    stats.seeds = 20;
    for (int seed = 1; seed <= stats.seeds; ++seed) {
        const auto s = static_cast<unsigned long long>(seed);
        const RunRecord co = ttab::run_experiment(
            make_config(PolicyKind::kCoUcb, skills, 100000, 16, s, 0.0));
        const RunRecord solo = ttab::run_experiment(
            make_config(PolicyKind::kUcb, skills, 100000, 16, s, 0.0));
        const RunRecord ablation = ttab::run_experiment(
            make_config(PolicyKind::kCoUcbNoCollab, skills, 100000, 16, s, 0.0));
        absorb(audit, co);
        absorb(audit, solo);
        absorb(audit, ablation);
        const auto co_reward = static_cast<double>(ttab::overall_reward(co));
        const auto solo_reward = static_cast<double>(ttab::overall_reward(solo));
        stats.co_reward_wins += co_reward > solo_reward;
        stats.co_reward_mean += co_reward / stats.seeds;
        stats.solo_reward_mean += solo_reward / stats.seeds;
        stats.co_best_skill_mean += co.final_best_arm_skill / stats.seeds;
        stats.ablation_best_skill_mean += ablation.final_best_arm_skill / stats.seeds;
    }
    return stats;
}

// Criterion 6: adding preference-label noise must not help. Mean quality of
// the finally chosen source should fall (or stay flat within 0.005) as the
// corruption rate rises.
Criterion check_noise_degradation(Audit& audit) {
    const std::vector<double> skills = {0.6, 0.5, 0.55, 0.4, 0.3};
    const std::vector<double> rates = {0.0, 0.1, 0.3, 0.5, 0.7};
    std::vector<double> means;
    for (double rate : rates) {
        double sum = 0.0;
        for (int seed = 1; seed <= 10; ++seed) {
            const RunRecord run = ttab::run_experiment(
                make_config(PolicyKind::kCoUcb, skills, 100000, 16,
                            static_cast<unsigned long long>(seed), rate));
            absorb(audit, run);
            sum += run.final_best_arm_skill;
        }
        means.push_back(sum / 10.0);
    }
    int violations = 0;
    double worst = 0.0;
    for (size_t k = 0; k + 1 < means.size(); ++k) {
        const double rise = means[k + 1] - means[k];
        if (rise > 0.0) {
            ++violations;
            worst = std::max(worst, rise);
        }
    }
    std::string curve;
    for (double m : means) {
        curve += format("%s%.4f", curve.empty() ? "" : " ", m);
    }
    const bool pass = violations <= 1 && worst <= 0.005;
    return {pass, format("mean chosen-source skill by noise rate: %s "
                         "(%d upward steps, worst +%.4f)",
                         curve.c_str(), violations, worst)};
}

// Criterion 7: the paired policy must hold steady as the source count grows,
// and it must keep beating the solo policy at every size.
Criterion check_source_scaling(Audit& audit) {
    const std::vector<double> skills = {0.6, 0.5, 0.55, 0.4, 0.3};
    double co_min = 1.0;
    double co_max = 0.0;
    std::string rows;
    bool beats_everywhere = true;
    for (int num_sources : {2, 3, 4, 5}) {
        const std::vector<double> prefix(skills.begin(),
                                         skills.begin() + num_sources);
        double co_sum = 0.0;
        double solo_sum = 0.0;
        for (int seed = 1; seed <= 10; ++seed) {
            const auto s = static_cast<unsigned long long>(seed);
            const RunRecord co = ttab::run_experiment(
                make_config(PolicyKind::kCoUcb, prefix, 100000, 16, s, 0.0));
            const RunRecord solo = ttab::run_experiment(
                make_config(PolicyKind::kUcb, prefix, 100000, 16, s, 0.0));
            absorb(audit, co);
            absorb(audit, solo);
            co_sum += co.final_best_arm_skill;
            solo_sum += solo.final_best_arm_skill;
        }
        const double co_mean = co_sum / 10.0;
        const double solo_mean = solo_sum / 10.0;
        co_min = std::min(co_min, co_mean);
        co_max = std::max(co_max, co_mean);
        beats_everywhere = beats_everywhere && co_mean > solo_mean;
        rows += format("%sK=%d %.4f vs %.4f", rows.empty() ? "" : ", ",
                       num_sources, co_mean, solo_mean);
    }
    const double spread = co_max - co_min;
    const bool pass = spread < 0.05 && beats_everywhere;
    return {pass, format("paired vs solo chosen-source skill: %s "
                         "(paired spread %.4f, need <0.05)",
                         rows.c_str(), spread)};
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Criterion 9: identical seeds must reproduce the written artifacts byte for
// byte, including probe evaluations.
Criterion check_determinism(Audit& audit, const std::string& out_dir) {
    ExperimentConfig cfg = make_config(
        PolicyKind::kCoUcb, {0.6, 0.5, 0.55, 0.4, 0.3}, 20000, 16, 123, 0.1);
    cfg.probe_every = 2000;
    cfg.probe_size = 500;
    const RunRecord a = ttab::run_experiment(cfg);
    const RunRecord b = ttab::run_experiment(cfg);
    absorb(audit, a);
    absorb(audit, b);
    if (a.probes.empty()) {
        return {false, "probe schedule produced no evaluations"};
    }
    try {
        const std::filesystem::path base(out_dir);
        ttab::write_outputs(cfg, a, (base / "determinism_a").string());
        ttab::write_outputs(cfg, b, (base / "determinism_b").string());
        for (const char* name : {"steps.csv", "probe.csv"}) {
            const std::string lhs = slurp(base / "determinism_a" / name);
            const std::string rhs = slurp(base / "determinism_b" / name);
            if (lhs.empty() || lhs != rhs) {
                return {false, format("%s differs between identical runs", name)};
            }
        }
        // Summaries embed wall-clock duration; everything else must agree.
        nlohmann::json lhs =
            nlohmann::json::parse(slurp(base / "determinism_a" / "summary.json"));
        nlohmann::json rhs =
            nlohmann::json::parse(slurp(base / "determinism_b" / "summary.json"));
        lhs.erase("duration_seconds");
        rhs.erase("duration_seconds");
        if (lhs.dump() != rhs.dump()) {
            return {false, "summary.json differs beyond the timing field"};
        }
    } catch (const std::exception& e) {
        return {false, format("writing artifacts failed: %s", e.what())};
    }
    return {true, format("seed 123 reproduced steps.csv and probe.csv byte "
                         "for byte, and summary.json apart from timing "
                         "(%zu steps, %zu probes)",
                         a.steps.size(), a.probes.size())};
}

}  // namespace

int main(int argc, char** argv) {
    std::string out_dir = "acceptance_out";
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--out") {
            out_dir = argv[i + 1];
        }
    }

    Audit audit;
    std::array<Criterion, 10> results;
    results[0] = check_span_scoring();
    results[1] = check_noise_channel();
    results[2] = check_solo_lock_in(audit);

    const ComparisonStats stats = run_policy_comparison(audit);
    results[3] = {stats.co_reward_wins >= 18,
                  format("shared labels beat solo labels in %d/%d seeds "
                         "(mean reward %.0f vs %.0f)",
                         stats.co_reward_wins, stats.seeds,
                         stats.co_reward_mean, stats.solo_reward_mean)};
    results[4] = {stats.co_best_skill_mean > stats.ablation_best_skill_mean,
                  format("label sharing lifts the chosen source to %.4f mean "
                         "skill vs %.4f without sharing",
                         stats.co_best_skill_mean,
                         stats.ablation_best_skill_mean)};

    results[5] = check_noise_degradation(audit);
    results[6] = check_source_scaling(audit);
    results[8] = check_determinism(audit, out_dir);

    results[7] = {audit.replay_failures == 0,
                  audit.replay_failures == 0
                      ? format("replay audit reproduced every ledger trail "
                               "(%lld runs, tolerance 1e-12)",
                               audit.runs)
                      : format("%lld of %lld runs failed replay: %s",
                               audit.replay_failures, audit.runs,
                               audit.first_error.c_str())};
    results[9] = {audit.paired_violations == 0,
                  format("%lld malformed preference pairs across %lld "
                         "paired instances",
                         audit.paired_violations, audit.paired_instances)};

    int passed = 0;
    for (size_t k = 0; k < results.size(); ++k) {
        std::printf("[%s] criterion %zu: %s\n", results[k].pass ? "PASS" : "FAIL",
                    k + 1, results[k].detail.c_str());
        passed += results[k].pass;
    }
    std::printf("acceptance: %d/10 criteria passed\n", passed);
    return passed == 10 ? 0 : 1;
}
