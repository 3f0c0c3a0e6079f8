#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ttab/environment.hpp"

namespace ttab {

enum class PolicyKind {
    kUcb,            // single arm, exact-match rewards
    kUcbPreference,  // single arm, rewards from its own top-2 duel
    kCoUcb,          // pair selection, cross-model duels, shared pseudo-labels
    kCoUcbNoCollab,  // pair selection, but each model trains only on its wins
};

std::string policy_name(PolicyKind policy);
PolicyKind parse_policy(const std::string& name);

// Everything recorded about one bandit step. rewards_i / rewards_j are the
// per-instance ledger rewards (rewards_j stays empty for single-arm
// policies); granted_i / granted_j count the training rewards actually
// handed to each model, which under label sharing exceeds its ledger wins.
struct StepRecord {
    long long step = 0;  // 1-based
    int chosen_i = 0;
    int chosen_j = -1;  // -1 when the policy selects a single arm
    std::vector<int> rewards_i;
    std::vector<int> rewards_j;
    long long granted_i = 0;
    long long granted_j = 0;
    std::vector<double> skills_after;
    int corrupted_count = 0;
};

// Periodic held-out measurement: the recommended arm's mean span overlap on
// fresh instances, taken after `instances_seen` stream instances.
struct ProbePoint {
    long long instances_seen = 0;
    int best_arm = 0;
    double mean_f1 = 0.0;
};

struct RunRecord {
    std::string config_digest;
    unsigned long long seed = 0;
    PolicyKind policy = PolicyKind::kUcb;
    int num_arms = 0;
    int batch_size = 0;
    long long stream_length = 0;
    double top2_degradation = 0.5;
    std::vector<double> initial_skills;
    std::vector<double> final_skills;
    int final_best_arm = 0;
    double final_best_arm_skill = 0.0;
    double duration_seconds = 0.0;
    std::vector<StepRecord> steps;
    std::vector<ProbePoint> probes;
    // Probability that a perturbed prediction scores strictly below 1,
    // estimated once per run; regret scales depend on it.
    double perturbed_sub_one_rate = 1.0;
    bool literal_total_count = false;
    bool policy_only = false;
};

// Training rewards granted across the run (both sides of every step).
long long overall_reward(const RunRecord& run);

// Per-instance expected exact-match reward for an arm at the given skill:
// a hit always matches, a miss matches only when the perturbation happens
// to reconstruct the annotation.
double exact_match_expectation(double skill, double sub_one_rate);

// Tie-adjusted win probability of arm a over arm b when both miss into the
// same perturbation distribution: 1/2 + sub_one_rate * (skill_a - skill_b)/2.
// Ties split evenly, so equal skills give exactly 1/2.
double tie_adjusted_win_probability(double skill_a, double skill_b,
                                    double sub_one_rate);

// Expected tie-adjusted win rate of a model's first candidate over its own
// degraded second candidate.
double top2_win_expectation(double skill, double degradation, double sub_one_rate);

// Cumulative single-arm regret against an explicit expectation table:
// expectations[t][k] is arm k's per-instance expected reward at step t+1.
// Adds batch * (max_k expectations[t][k] - expectations[t][chosen]) per step.
double mab_regret(const RunRecord& run,
                  const std::vector<std::vector<double>>& expectations);

// P(a > b) given the two skills, with ties split; must return values in
// [0, 1] and 1/2 on equal skills so the best pair has zero regret.
using PreferenceModel = std::function<double(double skill_a, double skill_b)>;

// Cumulative dueling regret: per step, with a* the true-skill argmax, adds
// batch * (eps(a*, i) + eps(a*, j)) / 2 where eps(a, b) = pref(s_a, s_b) - 1/2.
// `dynamic` evaluates skills as they stood entering each step; otherwise the
// initial skills are used throughout.
double madb_regret(const RunRecord& run, const PreferenceModel& pref, bool dynamic);

// Running cumulative regret after each step, using the run's own policy to
// pick the single-arm or dueling formula and its stored sub-one rate.
std::vector<double> cumulative_regret_curve(const RunRecord& run, bool dynamic);

// Total regret for the run; curve endpoint, 0 for an empty run.
double run_regret(const RunRecord& run, bool dynamic);

double mab_regret_static(const RunRecord& run);
double mab_regret_dynamic(const RunRecord& run);
double madb_regret_static(const RunRecord& run);
double madb_regret_dynamic(const RunRecord& run);

// Monte Carlo duel between two skills on fresh instances.
struct PreferenceEstimate {
    long long first_wins = 0;
    long long second_wins = 0;
    long long ties = 0;
    long long samples = 0;

    double first_win_rate() const;
    double tie_adjusted_rate() const;
};

PreferenceEstimate estimate_preference(double skill_i, double skill_j,
                                       int perturb_width, const PassageModel& passages,
                                       long long samples, unsigned long long seed);

// P(model i's span strictly beats model j's) under the simulator; the
// first_win_rate of estimate_preference.
double preference_probability(double skill_i, double skill_j, int perturb_width,
                              const PassageModel& passages, long long samples,
                              unsigned long long seed);

// Texture of the miss distribution itself, measured with skill-0 predictions.
struct GeometryProfile {
    double sub_one_rate = 0.0;  // P(perturbed span scores below 1)
    double tie_rate = 0.0;      // P(two independent perturbed spans tie)
    double mean_f1 = 0.0;
};

GeometryProfile estimate_geometry(const PassageModel& passages, int perturb_width,
                                  long long samples, unsigned long long seed);

// Stream tags for generators derived off a run seed. Fixed constants: the
// byte-identical replay guarantee depends on them.
inline constexpr unsigned long long kGeometryStream = 0x67656f6dULL;
inline constexpr unsigned long long kPreferenceStream = 0x70726566ULL;
inline constexpr unsigned long long kProbeStreamBase = 0x70726f62ULL;

}  // namespace ttab
