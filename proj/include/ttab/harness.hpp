#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ttab/metrics.hpp"

namespace ttab {

// Raised for semantically invalid configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Raised when run outputs cannot be written (CLI exit code 2).
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class AdaptationMode {
    kGrounded,  // pseudo-label quality moves skill toward a capacity ceiling
    kLiteral,   // reward counts alone push skill toward 1
};

std::string adaptation_name(AdaptationMode mode);
AdaptationMode parse_adaptation(const std::string& name);

struct ExperimentConfig {
    PolicyKind policy = PolicyKind::kCoUcb;
    DomainProfile profile;
    NoiseChannel noise;
    double learning_gain = 0.01;
    int perturb_width = 3;
    double top2_degradation = 0.5;
    double capacity = 0.75;
    double self_efficiency = 0.025;
    bool policy_only = false;
    // Reproduces the pair ledger variant whose exploration term is scaled by
    // the latest batch size instead of the accumulated instance count.
    bool literal_total_count = false;
    AdaptationMode adaptation = AdaptationMode::kGrounded;
    long long probe_every = 2000;  // instances between held-out probes; 0 disables
    int probe_size = 1000;
    bool regret_static = true;
    bool regret_dynamic = true;

    void validate() const;
    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    // FNV-1a of the canonical JSON encoding, as 16 lowercase hex digits.
    std::string digest_hex() const;
};

struct SweepSpec {
    enum class Param { kNoiseRate, kNumSources, kSeed };

    Param param = Param::kNoiseRate;
    std::vector<double> values;
};

std::string sweep_param_name(SweepSpec::Param param);
SweepSpec::Param parse_sweep_param(const std::string& name);

RunRecord run_experiment(const ExperimentConfig& config);

// One run per value. num_sources truncates the configured skill list to its
// first K entries; seed uses the value as the child seed directly; any other
// parameter derives the child seed by hashing "param=value" into the base
// seed so siblings never share streams.
std::vector<RunRecord> run_sweep(const ExperimentConfig& base, const SweepSpec& spec);

// Audits a finished run against its own ledger trail: replays the recorded
// rewards through fresh ledgers, re-checking every selection, every granted
// count, the one-hot reward discipline, and the final recommendation.
// Throws std::runtime_error naming the first violated check.
void replay_validate(const RunRecord& run, double rel_tol = 1e-12);

// steps.csv body. One row per step:
//   step,chosen_i,chosen_j,batch_reward_i,batch_reward_j,cum_reward,
//   static_regret,dynamic_regret,skill_0..skill_{K-1},corrupted_count
// Single-arm policies leave chosen_j (and, without a second candidate,
// batch_reward_j) empty. Doubles print in shortest round-trip form, so the
// bytes are a determinism contract.
std::string render_step_csv(const RunRecord& run, bool with_static_regret = true,
                            bool with_dynamic_regret = true);

std::string render_probe_csv(const RunRecord& run);

nlohmann::json summary_json(const RunRecord& run, bool with_static_regret = true,
                            bool with_dynamic_regret = true);

// Writes steps.csv, probe.csv and summary.json into out_dir, creating it.
void write_run_outputs(const RunRecord& run, const std::string& out_dir,
                       bool with_static_regret = true,
                       bool with_dynamic_regret = true);

void write_outputs(const ExperimentConfig& config, const RunRecord& run,
                   const std::string& out_dir);

// Per-run subdirectories run_<index> plus a top-level aggregate.csv keyed by
// the swept value.
void write_sweep_outputs(const ExperimentConfig& base, const SweepSpec& spec,
                         const std::vector<RunRecord>& runs,
                         const std::string& out_dir);

}  // namespace ttab
