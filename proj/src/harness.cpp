#include "ttab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <utility>

#include "ttab/bandit.hpp"
#include "ttab/dueling.hpp"
#include "ttab/rng.hpp"

namespace ttab {

namespace {

// Sample count behind each run's perturbation-geometry estimate; fixed so the
// regret columns of a given seed never move.
constexpr long long kGeometryProbeSamples = 20000;

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) {
        throw std::logic_error("double formatting failed");
    }
    return std::string(buf, ptr);
}

bool is_single_arm(PolicyKind policy) {
    return policy == PolicyKind::kUcb || policy == PolicyKind::kUcbPreference;
}

long long reward_sum(const std::vector<int>& rewards) {
    long long total = 0;
    for (int r : rewards) {
        total += r;
    }
    return total;
}

SyntheticModel make_model(const ExperimentConfig& config, double skill) {
    SyntheticModel model;
    model.skill = skill;
    model.learning_gain = config.learning_gain;
    model.perturb_width = config.perturb_width;
    model.top2_degradation = config.top2_degradation;
    model.capacity = config.capacity;
    model.self_efficiency = config.self_efficiency;
    return model;
}

void write_text_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << body;
    out.flush();
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    }
}

}  // namespace

std::string adaptation_name(AdaptationMode mode) {
    return mode == AdaptationMode::kGrounded ? "grounded" : "literal";
}

AdaptationMode parse_adaptation(const std::string& name) {
    if (name == "grounded") return AdaptationMode::kGrounded;
    if (name == "literal") return AdaptationMode::kLiteral;
    throw ConfigError("unknown adaptation mode '" + name +
                      "' (expected grounded or literal)");
}

void ExperimentConfig::validate() const {
    try {
        profile.validate();
        noise.validate();
        // Route the scalar hyperparameters through the model checks.
        make_model(*this, 0.0).validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!is_single_arm(policy) && profile.initial_skills.size() < 2) {
        throw ConfigError("pair policies need at least two source models");
    }
    if (profile.stream_length < profile.batch_size) {
        throw ConfigError("stream must cover at least one full batch");
    }
    if (probe_every < 0) {
        throw ConfigError("probe_every must be non-negative");
    }
    if (probe_every > 0 && probe_size < 1) {
        throw ConfigError("probe_size must be positive when probing is enabled");
    }
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["policy"] = policy_name(policy);
    j["initial_skills"] = profile.initial_skills;
    j["stream_length"] = profile.stream_length;
    j["batch_size"] = profile.batch_size;
    j["seed"] = profile.seed;
    j["passages"] = {
        {"min_passage_length", profile.passages.min_passage_length},
        {"max_passage_length", profile.passages.max_passage_length},
        {"min_gold_length", profile.passages.min_gold_length},
        {"max_gold_length", profile.passages.max_gold_length},
    };
    j["noise"] = {
        {"noise_rate", noise.noise_rate},
        {"corruption", noise.corruption},
    };
    j["learning_gain"] = learning_gain;
    j["perturb_width"] = perturb_width;
    j["top2_degradation"] = top2_degradation;
    j["capacity"] = capacity;
    j["self_efficiency"] = self_efficiency;
    j["policy_only"] = policy_only;
    j["literal_total_count"] = literal_total_count;
    j["adaptation"] = adaptation_name(adaptation);
    j["probe_every"] = probe_every;
    j["probe_size"] = probe_size;
    j["regret_static"] = regret_static;
    j["regret_dynamic"] = regret_dynamic;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("config root must be a JSON object");
    }
    static const std::set<std::string> known = {
        "policy",        "initial_skills", "stream_length",  "batch_size",
        "seed",          "passages",       "noise",          "learning_gain",
        "perturb_width", "top2_degradation", "capacity",     "self_efficiency",
        "policy_only",   "literal_total_count", "adaptation", "probe_every",
        "probe_size",    "regret_static",  "regret_dynamic",
    };
    for (const auto& item : j.items()) {
        if (!known.contains(item.key())) {
            throw ConfigError("unknown config key '" + item.key() + "'");
        }
    }
    ExperimentConfig cfg;
    try {
        if (j.contains("policy")) {
            cfg.policy = parse_policy(j.at("policy").get<std::string>());
        }
        if (j.contains("initial_skills")) {
            cfg.profile.initial_skills = j.at("initial_skills").get<std::vector<double>>();
        }
        if (j.contains("stream_length")) {
            cfg.profile.stream_length = j.at("stream_length").get<long long>();
        }
        if (j.contains("batch_size")) {
            cfg.profile.batch_size = j.at("batch_size").get<int>();
        }
        if (j.contains("seed")) {
            cfg.profile.seed = j.at("seed").get<unsigned long long>();
        }
        if (j.contains("passages")) {
            const nlohmann::json& p = j.at("passages");
            static const std::set<std::string> passage_keys = {
                "min_passage_length", "max_passage_length", "min_gold_length",
                "max_gold_length"};
            for (const auto& item : p.items()) {
                if (!passage_keys.contains(item.key())) {
                    throw ConfigError("unknown passages key '" + item.key() + "'");
                }
            }
            PassageModel& g = cfg.profile.passages;
            if (p.contains("min_passage_length")) {
                g.min_passage_length = p.at("min_passage_length").get<int>();
            }
            if (p.contains("max_passage_length")) {
                g.max_passage_length = p.at("max_passage_length").get<int>();
            }
            if (p.contains("min_gold_length")) {
                g.min_gold_length = p.at("min_gold_length").get<int>();
            }
            if (p.contains("max_gold_length")) {
                g.max_gold_length = p.at("max_gold_length").get<int>();
            }
        }
        if (j.contains("noise")) {
            const nlohmann::json& n = j.at("noise");
            static const std::set<std::string> noise_keys = {"noise_rate", "corruption"};
            for (const auto& item : n.items()) {
                if (!noise_keys.contains(item.key())) {
                    throw ConfigError("unknown noise key '" + item.key() + "'");
                }
            }
            if (n.contains("noise_rate")) {
                cfg.noise.noise_rate = n.at("noise_rate").get<double>();
            }
            if (n.contains("corruption")) {
                cfg.noise.corruption =
                    n.at("corruption").get<std::array<std::array<double, 3>, 3>>();
            }
        }
        if (j.contains("learning_gain")) {
            cfg.learning_gain = j.at("learning_gain").get<double>();
        }
        if (j.contains("perturb_width")) {
            cfg.perturb_width = j.at("perturb_width").get<int>();
        }
        if (j.contains("top2_degradation")) {
            cfg.top2_degradation = j.at("top2_degradation").get<double>();
        }
        if (j.contains("capacity")) {
            cfg.capacity = j.at("capacity").get<double>();
        }
        if (j.contains("self_efficiency")) {
            cfg.self_efficiency = j.at("self_efficiency").get<double>();
        }
        if (j.contains("policy_only")) {
            cfg.policy_only = j.at("policy_only").get<bool>();
        }
        if (j.contains("literal_total_count")) {
            cfg.literal_total_count = j.at("literal_total_count").get<bool>();
        }
        if (j.contains("adaptation")) {
            cfg.adaptation = parse_adaptation(j.at("adaptation").get<std::string>());
        }
        if (j.contains("probe_every")) {
            cfg.probe_every = j.at("probe_every").get<long long>();
        }
        if (j.contains("probe_size")) {
            cfg.probe_size = j.at("probe_size").get<int>();
        }
        if (j.contains("regret_static")) {
            cfg.regret_static = j.at("regret_static").get<bool>();
        }
        if (j.contains("regret_dynamic")) {
            cfg.regret_dynamic = j.at("regret_dynamic").get<bool>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

std::string ExperimentConfig::digest_hex() const {
    const unsigned long long digest = fnv1a64(to_json().dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", digest);
    return std::string(buf);
}

std::string sweep_param_name(SweepSpec::Param param) {
    switch (param) {
        case SweepSpec::Param::kNoiseRate:
            return "noise_rate";
        case SweepSpec::Param::kNumSources:
            return "num_sources";
        case SweepSpec::Param::kSeed:
            return "seed";
    }
    throw std::logic_error("unknown sweep parameter");
}

SweepSpec::Param parse_sweep_param(const std::string& name) {
    if (name == "noise_rate") return SweepSpec::Param::kNoiseRate;
    if (name == "num_sources") return SweepSpec::Param::kNumSources;
    if (name == "seed") return SweepSpec::Param::kSeed;
    throw ConfigError("unknown sweep parameter '" + name +
                      "' (expected noise_rate, num_sources, or seed)");
}

RunRecord run_experiment(const ExperimentConfig& config) {
    config.validate();
    const DomainProfile& profile = config.profile;
    const int num_arms = static_cast<int>(profile.initial_skills.size());
    const int batch = profile.batch_size;
    const long long total_steps = profile.stream_length / batch;
    const bool single = is_single_arm(config.policy);
    const bool literal = config.adaptation == AdaptationMode::kLiteral;

    std::vector<SyntheticModel> models;
    models.reserve(profile.initial_skills.size());
    for (double skill : profile.initial_skills) {
        models.push_back(make_model(config, skill));
    }

    RunRecord run;
    run.config_digest = config.digest_hex();
    run.seed = profile.seed;
    run.policy = config.policy;
    run.num_arms = num_arms;
    run.batch_size = batch;
    run.stream_length = profile.stream_length;
    run.top2_degradation = config.top2_degradation;
    run.initial_skills = profile.initial_skills;
    run.literal_total_count = config.literal_total_count;
    run.policy_only = config.policy_only;
    run.perturbed_sub_one_rate =
        estimate_geometry(profile.passages, config.perturb_width,
                          kGeometryProbeSamples, profile.seed)
            .sub_one_rate;
    run.steps.reserve(static_cast<size_t>(total_steps));

    std::optional<MabLedger> mab;
    std::optional<DuelLedger> duel;
    if (single) {
        mab.emplace(num_arms);
    } else {
        duel.emplace(num_arms, !config.literal_total_count);
    }

    Rng rng(profile.seed);
    long long instances_seen = 0;
    long long next_probe_at = config.probe_every;

    const auto started = std::chrono::steady_clock::now();
    for (long long s = 1; s <= total_steps; ++s) {
        StepRecord step;
        step.step = s;
        step.rewards_i.reserve(static_cast<size_t>(batch));

        switch (config.policy) {
            case PolicyKind::kUcb: {
                const int arm = mab->select_arm();
                step.chosen_i = arm;
                std::vector<TrainingSignal> signals;
                for (int t = 0; t < batch; ++t) {
                    const TaskInstance instance =
                        sample_instance(profile.passages, instances_seen, rng);
                    ++instances_seen;
                    const SpanPrediction pred = predict(models[arm], instance, rng);
                    const int reward = exact_match_reward(pred, instance.gold);
                    step.rewards_i.push_back(reward);
                    if (reward == 1) {
                        // An exact match forwards the annotation itself.
                        signals.push_back({1.0, true});
                    }
                }
                mab->update_binary(arm, step.rewards_i);
                step.granted_i = reward_sum(step.rewards_i);
                if (!config.policy_only) {
                    if (literal) {
                        adapt(models[arm], static_cast<int>(step.granted_i), batch);
                    } else {
                        train(models[arm], signals, batch);
                    }
                }
                break;
            }
            case PolicyKind::kUcbPreference: {
                const int arm = mab->select_arm();
                step.chosen_i = arm;
                step.rewards_j.reserve(static_cast<size_t>(batch));
                std::vector<TrainingSignal> signals;
                int non_ties = 0;
                for (int t = 0; t < batch; ++t) {
                    const TaskInstance instance =
                        sample_instance(profile.passages, instances_seen, rng);
                    ++instances_seen;
                    const auto [first, second] =
                        predict_top2(models[arm], instance, rng);
                    const PreferenceLabel clean = make_preference(
                        span_f1(first, instance.gold), span_f1(second, instance.gold));
                    const PreferenceLabel label = apply_noise(clean, config.noise, rng);
                    if (label != clean) {
                        ++step.corrupted_count;
                    }
                    const auto [r1, r2] = preference_to_rewards(label);
                    step.rewards_i.push_back(r1);
                    step.rewards_j.push_back(r2);
                    if (label != PreferenceLabel::kTie) {
                        ++non_ties;
                        const SpanPrediction& preferred = r1 == 1 ? first : second;
                        signals.push_back({span_f1(preferred, instance.gold), true});
                    }
                }
                mab->update_binary(arm, step.rewards_i);
                step.granted_i = non_ties;
                if (!config.policy_only) {
                    if (literal) {
                        adapt(models[arm], non_ties, batch);
                    } else {
                        train(models[arm], signals, batch);
                    }
                }
                break;
            }
            case PolicyKind::kCoUcb:
            case PolicyKind::kCoUcbNoCollab: {
                const PairId pair = duel->select_pair();
                step.chosen_i = pair.i;
                step.chosen_j = pair.j;
                step.rewards_j.reserve(static_cast<size_t>(batch));
                std::vector<TrainingSignal> signals_i;
                std::vector<TrainingSignal> signals_j;
                for (int t = 0; t < batch; ++t) {
                    const TaskInstance instance =
                        sample_instance(profile.passages, instances_seen, rng);
                    ++instances_seen;
                    const SpanPrediction pred_i = predict(models[pair.i], instance, rng);
                    const SpanPrediction pred_j = predict(models[pair.j], instance, rng);
                    const PreferenceLabel clean = make_preference(
                        span_f1(pred_i, instance.gold), span_f1(pred_j, instance.gold));
                    const PreferenceLabel label = apply_noise(clean, config.noise, rng);
                    if (label != clean) {
                        ++step.corrupted_count;
                    }
                    const auto [ri, rj] = preference_to_rewards(label);
                    step.rewards_i.push_back(ri);
                    step.rewards_j.push_back(rj);
                    if (label != PreferenceLabel::kTie) {
                        const SpanPrediction& winner = ri == 1 ? pred_i : pred_j;
                        const double quality = span_f1(winner, instance.gold);
                        if (config.policy == PolicyKind::kCoUcb) {
                            // The winning label trains both models; it is
                            // self-generated only for the side that won.
                            signals_i.push_back({quality, ri == 1});
                            signals_j.push_back({quality, rj == 1});
                        } else if (ri == 1) {
                            signals_i.push_back({quality, true});
                        } else {
                            signals_j.push_back({quality, true});
                        }
                    }
                }
                duel->update_pair(pair, step.rewards_i, step.rewards_j);
                const long long wins_i = reward_sum(step.rewards_i);
                const long long wins_j = reward_sum(step.rewards_j);
                if (config.policy == PolicyKind::kCoUcb) {
                    step.granted_i = wins_i + wins_j;
                    step.granted_j = wins_i + wins_j;
                } else {
                    step.granted_i = wins_i;
                    step.granted_j = wins_j;
                }
                if (!config.policy_only) {
                    if (literal) {
                        collaborative_adapt(models[pair.i], models[pair.j],
                                            step.rewards_i, step.rewards_j, batch,
                                            config.policy == PolicyKind::kCoUcb
                                                ? CollabMode::kShareNonTies
                                                : CollabMode::kOwnWinsOnly);
                    } else {
                        train(models[pair.i], signals_i, batch);
                        train(models[pair.j], signals_j, batch);
                    }
                }
                break;
            }
        }

        step.skills_after.reserve(models.size());
        for (const SyntheticModel& model : models) {
            step.skills_after.push_back(model.skill);
        }
        run.steps.push_back(std::move(step));

        if (config.probe_every > 0 && instances_seen >= next_probe_at) {
            ProbePoint probe;
            probe.instances_seen = instances_seen;
            probe.best_arm = single ? mab->best_arm() : duel->best_model();
            Rng probe_rng =
                rng.derive(kProbeStreamBase + static_cast<unsigned long long>(
                                                  run.probes.size()));
            double f1_sum = 0.0;
            for (int t = 0; t < config.probe_size; ++t) {
                const TaskInstance instance =
                    sample_instance(profile.passages, t, probe_rng);
                f1_sum += span_f1(predict(models[probe.best_arm], instance, probe_rng),
                                  instance.gold);
            }
            probe.mean_f1 = f1_sum / static_cast<double>(config.probe_size);
            run.probes.push_back(probe);
            next_probe_at =
                (instances_seen / config.probe_every + 1) * config.probe_every;
        }
    }
    const auto finished = std::chrono::steady_clock::now();
    run.duration_seconds = std::chrono::duration<double>(finished - started).count();

    run.final_best_arm = single ? mab->best_arm() : duel->best_model();
    run.final_skills.reserve(models.size());
    for (const SyntheticModel& model : models) {
        run.final_skills.push_back(model.skill);
    }
    run.final_best_arm_skill = run.final_skills[static_cast<size_t>(run.final_best_arm)];
    return run;
}

namespace {

ExperimentConfig child_config(const ExperimentConfig& base, SweepSpec::Param param,
                              double value) {
    ExperimentConfig cfg = base;
    switch (param) {
        case SweepSpec::Param::kNoiseRate: {
            cfg.noise.noise_rate = value;
            cfg.profile.seed =
                base.profile.seed + fnv1a64("noise_rate=" + format_double(value));
            break;
        }
        case SweepSpec::Param::kNumSources: {
            const double rounded = std::round(value);
            if (std::abs(value - rounded) > 1e-9 || rounded < 1.0) {
                throw ConfigError("num_sources values must be positive integers");
            }
            const auto k = static_cast<size_t>(rounded);
            if (k > base.profile.initial_skills.size()) {
                throw ConfigError(
                    "num_sources value exceeds the configured skill list");
            }
            cfg.profile.initial_skills.resize(k);
            cfg.profile.seed =
                base.profile.seed +
                fnv1a64("num_sources=" + std::to_string(static_cast<long long>(rounded)));
            break;
        }
        case SweepSpec::Param::kSeed: {
            const double rounded = std::round(value);
            if (std::abs(value - rounded) > 1e-9 || rounded < 0.0) {
                throw ConfigError("seed values must be non-negative integers");
            }
            cfg.profile.seed = static_cast<unsigned long long>(rounded);
            break;
        }
    }
    return cfg;
}

}  // namespace

std::vector<RunRecord> run_sweep(const ExperimentConfig& base, const SweepSpec& spec) {
    if (spec.values.empty()) {
        throw ConfigError("sweep needs at least one value");
    }
    std::vector<RunRecord> runs;
    runs.reserve(spec.values.size());
    for (double value : spec.values) {
        runs.push_back(run_experiment(child_config(base, spec.param, value)));
    }
    return runs;
}

void replay_validate(const RunRecord& run, double rel_tol) {
    const auto fail = [](const std::string& what) {
        throw std::runtime_error("replay audit failed: " + what);
    };
    if (run.num_arms < 1 || run.batch_size < 1) {
        fail("run header has no arms or an empty batch");
    }
    if (static_cast<int>(run.initial_skills.size()) != run.num_arms ||
        static_cast<int>(run.final_skills.size()) != run.num_arms) {
        fail("skill vectors do not match num_arms");
    }
    const bool single = is_single_arm(run.policy);
    std::optional<MabLedger> mab;
    std::optional<DuelLedger> duel;
    if (single) {
        mab.emplace(run.num_arms);
    } else {
        duel.emplace(run.num_arms, !run.literal_total_count);
    }

    long long expected_step = 1;
    for (const StepRecord& step : run.steps) {
        if (step.step != expected_step) {
            fail("steps are not numbered consecutively from 1");
        }
        ++expected_step;
        if (static_cast<int>(step.skills_after.size()) != run.num_arms) {
            fail("skill snapshot size differs from num_arms");
        }
        for (double skill : step.skills_after) {
            if (!(skill >= 0.0 && skill <= 1.0)) {
                fail("skill snapshot left [0, 1]");
            }
        }
        if (step.corrupted_count < 0 ||
            step.corrupted_count > static_cast<int>(step.rewards_i.size())) {
            fail("corrupted_count outside the batch");
        }
        for (int r : step.rewards_i) {
            if (r != 0 && r != 1) fail("reward outside {0, 1}");
        }
        for (int r : step.rewards_j) {
            if (r != 0 && r != 1) fail("reward outside {0, 1}");
        }

        switch (run.policy) {
            case PolicyKind::kUcb: {
                if (step.chosen_j != -1 || !step.rewards_j.empty()) {
                    fail("single-arm step carries a second arm");
                }
                if (step.corrupted_count != 0) {
                    fail("exact-match feedback cannot be corrupted");
                }
                if (mab->select_arm() != step.chosen_i) {
                    fail("recorded arm differs from the replayed selection");
                }
                if (step.granted_i != reward_sum(step.rewards_i) ||
                    step.granted_j != 0) {
                    fail("granted rewards differ from ledger wins");
                }
                mab->update_binary(step.chosen_i, step.rewards_i);
                break;
            }
            case PolicyKind::kUcbPreference: {
                if (step.chosen_j != -1 ||
                    step.rewards_j.size() != step.rewards_i.size()) {
                    fail("top-2 step must carry paired candidate rewards");
                }
                long long non_ties = 0;
                for (size_t t = 0; t < step.rewards_i.size(); ++t) {
                    if (step.rewards_i[t] == 1 && step.rewards_j[t] == 1) {
                        fail("candidate rewards are not one-hot");
                    }
                    non_ties += step.rewards_i[t] | step.rewards_j[t];
                }
                if (mab->select_arm() != step.chosen_i) {
                    fail("recorded arm differs from the replayed selection");
                }
                if (step.granted_i != non_ties || step.granted_j != 0) {
                    fail("granted rewards differ from the non-tie count");
                }
                mab->update_binary(step.chosen_i, step.rewards_i);
                break;
            }
            case PolicyKind::kCoUcb:
            case PolicyKind::kCoUcbNoCollab: {
                if (step.chosen_j < 0 || step.chosen_i >= step.chosen_j) {
                    fail("pair step must record arms with i < j");
                }
                if (step.rewards_j.size() != step.rewards_i.size()) {
                    fail("duel reward batches must be equal-sized");
                }
                long long non_ties = 0;
                for (size_t t = 0; t < step.rewards_i.size(); ++t) {
                    if (step.rewards_i[t] == 1 && step.rewards_j[t] == 1) {
                        fail("duel rewards are not one-hot");
                    }
                    non_ties += step.rewards_i[t] | step.rewards_j[t];
                }
                const PairId selected = duel->select_pair();
                if (selected.i != step.chosen_i || selected.j != step.chosen_j) {
                    fail("recorded pair differs from the replayed selection");
                }
                if (run.policy == PolicyKind::kCoUcb) {
                    if (step.granted_i != non_ties || step.granted_j != non_ties) {
                        fail("shared grants must equal the non-tie count for both");
                    }
                } else {
                    if (step.granted_i != reward_sum(step.rewards_i) ||
                        step.granted_j != reward_sum(step.rewards_j)) {
                        fail("own-wins grants differ from ledger wins");
                    }
                }
                duel->update_pair({step.chosen_i, step.chosen_j}, step.rewards_i,
                                  step.rewards_j);
                break;
            }
        }
    }

    if (single) {
        if (mab->best_arm() != run.final_best_arm) {
            fail("final recommendation differs from the replayed ledger");
        }
        long long instances = 0;
        for (const StepRecord& step : run.steps) {
            instances += static_cast<long long>(step.rewards_i.size());
        }
        if (mab->total_count() != instances) {
            fail("ledger total differs from the instances consumed");
        }
    } else {
        if (!duel->check_consistency(rel_tol)) {
            fail("pair ledger means diverged from their win sums");
        }
        if (duel->best_model() != run.final_best_arm) {
            fail("final recommendation differs from the replayed ledger");
        }
    }

    if (!run.steps.empty() && run.steps.back().skills_after != run.final_skills) {
        fail("final skills differ from the last snapshot");
    }
    if (run.policy_only && run.final_skills != run.initial_skills) {
        fail("a policy-only run must leave skills untouched");
    }
    if (run.final_best_arm < 0 || run.final_best_arm >= run.num_arms) {
        fail("final recommendation outside the arm range");
    }
    if (run.final_best_arm_skill !=
        run.final_skills[static_cast<size_t>(run.final_best_arm)]) {
        fail("final best-arm skill differs from the skill vector");
    }
    long long last_seen = 0;
    for (const ProbePoint& probe : run.probes) {
        if (probe.instances_seen <= last_seen) {
            fail("probe positions must be strictly increasing");
        }
        last_seen = probe.instances_seen;
        if (probe.best_arm < 0 || probe.best_arm >= run.num_arms) {
            fail("probe recommendation outside the arm range");
        }
        if (!(probe.mean_f1 >= 0.0 && probe.mean_f1 <= 1.0)) {
            fail("probe score outside [0, 1]");
        }
    }
}

std::string render_step_csv(const RunRecord& run, bool with_static_regret,
                            bool with_dynamic_regret) {
    std::string out;
    out.reserve(run.steps.size() * 96 + 128);
    out += "step,chosen_i,chosen_j,batch_reward_i,batch_reward_j,cum_reward,"
           "static_regret,dynamic_regret";
    for (int k = 0; k < run.num_arms; ++k) {
        out += ",skill_";
        out += std::to_string(k);
    }
    out += ",corrupted_count\n";

    std::vector<double> static_curve;
    std::vector<double> dynamic_curve;
    if (with_static_regret) {
        static_curve = cumulative_regret_curve(run, false);
    }
    if (with_dynamic_regret) {
        dynamic_curve = cumulative_regret_curve(run, true);
    }

    long long cumulative = 0;
    for (size_t t = 0; t < run.steps.size(); ++t) {
        const StepRecord& step = run.steps[t];
        cumulative += step.granted_i + step.granted_j;
        out += std::to_string(step.step);
        out += ',';
        out += std::to_string(step.chosen_i);
        out += ',';
        if (step.chosen_j >= 0) {
            out += std::to_string(step.chosen_j);
        }
        out += ',';
        out += std::to_string(reward_sum(step.rewards_i));
        out += ',';
        if (!step.rewards_j.empty()) {
            out += std::to_string(reward_sum(step.rewards_j));
        }
        out += ',';
        out += std::to_string(cumulative);
        out += ',';
        if (with_static_regret) {
            out += format_double(static_curve[t]);
        }
        out += ',';
        if (with_dynamic_regret) {
            out += format_double(dynamic_curve[t]);
        }
        for (double skill : step.skills_after) {
            out += ',';
            out += format_double(skill);
        }
        out += ',';
        out += std::to_string(step.corrupted_count);
        out += '\n';
    }
    return out;
}

std::string render_probe_csv(const RunRecord& run) {
    std::string out = "instances_seen,best_arm,mean_f1\n";
    for (const ProbePoint& probe : run.probes) {
        out += std::to_string(probe.instances_seen);
        out += ',';
        out += std::to_string(probe.best_arm);
        out += ',';
        out += format_double(probe.mean_f1);
        out += '\n';
    }
    return out;
}

nlohmann::json summary_json(const RunRecord& run, bool with_static_regret,
                            bool with_dynamic_regret) {
    long long instances = 0;
    for (const StepRecord& step : run.steps) {
        instances += step.rewards_i.empty()
                         ? run.batch_size
                         : static_cast<long long>(step.rewards_i.size());
    }
    nlohmann::json j;
    j["config_digest"] = run.config_digest;
    j["seed"] = run.seed;
    j["policy"] = policy_name(run.policy);
    j["num_arms"] = run.num_arms;
    j["batch_size"] = run.batch_size;
    j["steps"] = run.steps.size();
    j["instances_used"] = instances;
    j["final_best_arm"] = run.final_best_arm;
    j["final_best_arm_skill"] = run.final_best_arm_skill;
    j["final_skills"] = run.final_skills;
    j["overall_reward"] = overall_reward(run);
    if (with_static_regret) {
        j["static_regret"] = run_regret(run, false);
    }
    if (with_dynamic_regret) {
        j["dynamic_regret"] = run_regret(run, true);
    }
    j["perturbed_sub_one_rate"] = run.perturbed_sub_one_rate;
    j["duration_seconds"] = run.duration_seconds;
    return j;
}

void write_run_outputs(const RunRecord& run, const std::string& out_dir,
                       bool with_static_regret, bool with_dynamic_regret) {
    const std::filesystem::path dir(out_dir);
    ensure_directory(dir);
    write_text_file(dir / "steps.csv",
                    render_step_csv(run, with_static_regret, with_dynamic_regret));
    write_text_file(dir / "probe.csv", render_probe_csv(run));
    write_text_file(
        dir / "summary.json",
        summary_json(run, with_static_regret, with_dynamic_regret).dump(2) + "\n");
}

void write_outputs(const ExperimentConfig& config, const RunRecord& run,
                   const std::string& out_dir) {
    const std::filesystem::path dir(out_dir);
    ensure_directory(dir);
    write_text_file(dir / "config.json", config.to_json().dump(2) + "\n");
    write_run_outputs(run, out_dir, config.regret_static, config.regret_dynamic);
}

void write_sweep_outputs(const ExperimentConfig& base, const SweepSpec& spec,
                         const std::vector<RunRecord>& runs,
                         const std::string& out_dir) {
    if (runs.size() != spec.values.size()) {
        throw std::invalid_argument("sweep produced a run count != value count");
    }
    const std::filesystem::path dir(out_dir);
    ensure_directory(dir);

    nlohmann::json manifest;
    manifest["param"] = sweep_param_name(spec.param);
    manifest["values"] = spec.values;
    manifest["base_config"] = base.to_json();
    write_text_file(dir / "sweep.json", manifest.dump(2) + "\n");

    std::string aggregate =
        "param,value,seed,policy,overall_reward,final_best_arm,"
        "final_best_arm_skill,static_regret,dynamic_regret,mean_final_skill\n";
    for (size_t i = 0; i < runs.size(); ++i) {
        const RunRecord& run = runs[i];
        char sub[16];
        std::snprintf(sub, sizeof(sub), "run_%03zu", i);
        write_run_outputs(run, (dir / sub).string(), base.regret_static,
                          base.regret_dynamic);

        double skill_sum = 0.0;
        for (double skill : run.final_skills) {
            skill_sum += skill;
        }
        aggregate += sweep_param_name(spec.param);
        aggregate += ',';
        aggregate += format_double(spec.values[i]);
        aggregate += ',';
        aggregate += std::to_string(run.seed);
        aggregate += ',';
        aggregate += policy_name(run.policy);
        aggregate += ',';
        aggregate += std::to_string(overall_reward(run));
        aggregate += ',';
        aggregate += std::to_string(run.final_best_arm);
        aggregate += ',';
        aggregate += format_double(run.final_best_arm_skill);
        aggregate += ',';
        if (base.regret_static) {
            aggregate += format_double(run_regret(run, false));
        }
        aggregate += ',';
        if (base.regret_dynamic) {
            aggregate += format_double(run_regret(run, true));
        }
        aggregate += ',';
        aggregate += format_double(skill_sum /
                                   static_cast<double>(run.final_skills.size()));
        aggregate += '\n';
    }
    write_text_file(dir / "aggregate.csv", aggregate);
}

}  // namespace ttab
