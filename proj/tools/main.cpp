#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ttab/harness.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::string policy;
    std::vector<double> skills;
    long long stream_length = 0;
    int batch_size = 0;
    unsigned long long seed = 0;
    double noise_rate = 0.0;
    double learning_gain = 0.0;
    int perturb_width = 0;
    double top2_degradation = 0.0;
    double capacity = 0.0;
    double self_efficiency = 0.0;
    bool policy_only = false;
    bool literal_total_count = false;
    std::string adaptation;
    long long probe_every = 0;
    int probe_size = 0;
    int min_passage_length = 0;
    int max_passage_length = 0;
    int min_gold_length = 0;
    int max_gold_length = 0;
    bool no_static_regret = false;
    bool no_dynamic_regret = false;

    std::string sweep_param;
    std::vector<double> sweep_values;
};

// Options set on the command line override the config file; untouched ones
// keep the file's (or the built-in) value.
using Applier =
    std::pair<CLI::Option*, std::function<void(ttab::ExperimentConfig&)>>;

void add_config_flags(CLI::App* cmd, CliOptions& opt, std::vector<Applier>& appliers) {
    cmd->add_option("--config", opt.config_path,
                    "JSON config file; command-line flags override its fields")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opt.out_dir, "Output directory")->required();

    const auto on = [&appliers](CLI::Option* option,
                                std::function<void(ttab::ExperimentConfig&)> apply) {
        appliers.emplace_back(option, std::move(apply));
    };

    on(cmd->add_option("--policy", opt.policy,
                       "ucb, ucb_preference, co_ucb, or co_ucb_no_collab"),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.policy = ttab::parse_policy(opt.policy);
       });
    on(cmd->add_option("--skills", opt.skills,
                       "Initial skill of every source model")
           ->expected(-1),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.profile.initial_skills = opt.skills;
       });
    on(cmd->add_option("--stream-length", opt.stream_length,
                       "Instances in the unlabeled stream"),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.profile.stream_length = opt.stream_length;
       });
    on(cmd->add_option("--batch-size", opt.batch_size, "Instances per bandit step"),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.profile.batch_size = opt.batch_size;
       });
    on(cmd->add_option("--seed", opt.seed, "Root seed for the run"),
       [&opt](ttab::ExperimentConfig& cfg) { cfg.profile.seed = opt.seed; });
    on(cmd->add_option("--noise-rate", opt.noise_rate,
                       "Probability of corrupting a preference label; the full "
                       "corruption matrix is config-file only"),
       [&opt](ttab::ExperimentConfig& cfg) { cfg.noise.noise_rate = opt.noise_rate; });
    on(cmd->add_option("--learning-gain", opt.learning_gain,
                       "Step size of the per-batch skill update"),
       [&opt](ttab::ExperimentConfig& cfg) { cfg.learning_gain = opt.learning_gain; });
    on(cmd->add_option("--perturb-width", opt.perturb_width,
                       "Maximum endpoint shift of a missed prediction"),
       [&opt](ttab::ExperimentConfig& cfg) { cfg.perturb_width = opt.perturb_width; });
    on(cmd->add_option("--top2-degradation", opt.top2_degradation,
                       "Skill multiplier for the second candidate"),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.top2_degradation = opt.top2_degradation;
       });
    on(cmd->add_option("--capacity", opt.capacity,
                       "Skill ceiling reachable through pseudo-label training"),
       [&opt](ttab::ExperimentConfig& cfg) { cfg.capacity = opt.capacity; });
    on(cmd->add_option("--self-efficiency", opt.self_efficiency,
                       "Weight of self-generated labels relative to shared ones"),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.self_efficiency = opt.self_efficiency;
       });
    on(cmd->add_flag("--policy-only", opt.policy_only,
                     "Freeze all skills; run selection and bookkeeping only"),
       [&opt](ttab::ExperimentConfig& cfg) { cfg.policy_only = opt.policy_only; });
    on(cmd->add_flag("--literal-total-count", opt.literal_total_count,
                     "Scale pair exploration by the latest batch size instead of "
                     "the accumulated count"),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.literal_total_count = opt.literal_total_count;
       });
    on(cmd->add_option("--adaptation", opt.adaptation, "grounded or literal"),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.adaptation = ttab::parse_adaptation(opt.adaptation);
       });
    on(cmd->add_option("--probe-every", opt.probe_every,
                       "Instances between held-out probes (0 disables)"),
       [&opt](ttab::ExperimentConfig& cfg) { cfg.probe_every = opt.probe_every; });
    on(cmd->add_option("--probe-size", opt.probe_size, "Instances per probe"),
       [&opt](ttab::ExperimentConfig& cfg) { cfg.probe_size = opt.probe_size; });
    on(cmd->add_option("--min-passage-length", opt.min_passage_length, ""),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.profile.passages.min_passage_length = opt.min_passage_length;
       });
    on(cmd->add_option("--max-passage-length", opt.max_passage_length, ""),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.profile.passages.max_passage_length = opt.max_passage_length;
       });
    on(cmd->add_option("--min-gold-length", opt.min_gold_length, ""),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.profile.passages.min_gold_length = opt.min_gold_length;
       });
    on(cmd->add_option("--max-gold-length", opt.max_gold_length, ""),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.profile.passages.max_gold_length = opt.max_gold_length;
       });
    on(cmd->add_flag("--no-static-regret", opt.no_static_regret,
                     "Skip the static regret column"),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.regret_static = !opt.no_static_regret;
       });
    on(cmd->add_flag("--no-dynamic-regret", opt.no_dynamic_regret,
                     "Skip the dynamic regret column"),
       [&opt](ttab::ExperimentConfig& cfg) {
           cfg.regret_dynamic = !opt.no_dynamic_regret;
       });
}

ttab::ExperimentConfig build_config(const CliOptions& opt,
                                    const std::vector<Applier>& appliers) {
    ttab::ExperimentConfig cfg;
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) {
            throw ttab::IoError("cannot read config file " + opt.config_path);
        }
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ttab::ConfigError("config file " + opt.config_path +
                                    " is not valid JSON: " + e.what());
        }
        cfg = ttab::ExperimentConfig::from_json(j);
    }
    for (const auto& [option, apply] : appliers) {
        if (option->count() > 0) {
            apply(cfg);
        }
    }
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming source-selection simulator for span extraction"};
    app.require_subcommand(1);

    CliOptions run_opt;
    std::vector<Applier> run_appliers;
    CLI::App* run_cmd = app.add_subcommand("run", "Execute a single run");
    add_config_flags(run_cmd, run_opt, run_appliers);
    run_cmd->callback([&]() {
        const ttab::ExperimentConfig cfg = build_config(run_opt, run_appliers);
        const ttab::RunRecord run = ttab::run_experiment(cfg);
        ttab::write_outputs(cfg, run, run_opt.out_dir);
        std::printf("run complete: policy=%s steps=%zu best_arm=%d reward=%lld -> %s\n",
                    ttab::policy_name(run.policy).c_str(), run.steps.size(),
                    run.final_best_arm, ttab::overall_reward(run),
                    run_opt.out_dir.c_str());
    });

    CliOptions sweep_opt;
    std::vector<Applier> sweep_appliers;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Run once per value of a swept parameter");
    add_config_flags(sweep_cmd, sweep_opt, sweep_appliers);
    sweep_cmd
        ->add_option("--param", sweep_opt.sweep_param,
                     "noise_rate, num_sources, or seed")
        ->required();
    sweep_cmd->add_option("--values", sweep_opt.sweep_values, "Swept values")
        ->required()
        ->expected(-1);
    sweep_cmd->callback([&]() {
        const ttab::ExperimentConfig cfg = build_config(sweep_opt, sweep_appliers);
        ttab::SweepSpec spec;
        spec.param = ttab::parse_sweep_param(sweep_opt.sweep_param);
        spec.values = sweep_opt.sweep_values;
        const std::vector<ttab::RunRecord> runs = ttab::run_sweep(cfg, spec);
        ttab::write_sweep_outputs(cfg, spec, runs, sweep_opt.out_dir);
        std::printf("sweep complete: param=%s runs=%zu -> %s\n",
                    sweep_opt.sweep_param.c_str(), runs.size(),
                    sweep_opt.out_dir.c_str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ttab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const ttab::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
