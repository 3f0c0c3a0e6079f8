#pragma once

#include <utility>
#include <vector>

#include "ttab/feedback.hpp"
#include "ttab/rng.hpp"

namespace ttab {

// One extractive QA instance: a passage of `passage_length` tokens with a
// single annotated answer span.
struct TaskInstance {
    int passage_length = 0;
    GoldSpan gold;
    long long instance_id = 0;
};

// Geometry of the instance stream. Passage lengths and gold spans are drawn
// uniformly; min_gold_length exists so callers can rule out short spans that
// a shifted prediction could reconstruct by accident.
struct PassageModel {
    int min_passage_length = 10;
    int max_passage_length = 50;
    int min_gold_length = 1;
    int max_gold_length = 8;

    void validate() const;

    bool operator==(const PassageModel&) const = default;
};

/**
 * A source model reduced to the statistics that drive the simulation.
 *
 * skill is the probability of emitting the gold span verbatim; a miss
 * perturbs both endpoints by up to perturb_width tokens. top2_degradation
 * scales the skill used for the second candidate of a top-2 read-out.
 * capacity caps what pseudo-label training can reach, and self_efficiency
 * discounts updates from the model's own labels relative to labels shared
 * by a partner.
 */
struct SyntheticModel {
    double skill = 0.5;
    double learning_gain = 0.01;
    int perturb_width = 3;
    double top2_degradation = 0.5;
    double capacity = 0.75;
    double self_efficiency = 0.025;

    void validate() const;

    bool operator==(const SyntheticModel&) const = default;
};

// One source domain: the initial skill of each candidate model plus the
// stream the bandit consumes.
struct DomainProfile {
    std::vector<double> initial_skills;
    long long stream_length = 100000;
    int batch_size = 16;
    unsigned long long seed = 1;
    PassageModel passages;

    void validate() const;
};

// Draw order is part of the deterministic contract: passage length, gold
// length, gold start (three draws, always).
TaskInstance sample_instance(const PassageModel& passages, long long instance_id,
                             Rng& rng);

// Emit a span for the instance. One skill draw always happens; a miss costs
// four more draws (offset and sign per endpoint), after which the endpoints
// are clipped to the passage and reordered.
SpanPrediction predict(const SyntheticModel& model, const TaskInstance& instance,
                       Rng& rng);

// Top-2 read-out: the first candidate at full skill, the second at
// skill * top2_degradation. Exactly two predict() draws in that order.
std::pair<SpanPrediction, SpanPrediction> predict_top2(const SyntheticModel& model,
                                                       const TaskInstance& instance,
                                                       Rng& rng);

// Count-driven batch update: skill += gain * (reward_count / batch_size) *
// (1 - skill). Throws unless 0 <= reward_count <= batch_size.
void adapt(SyntheticModel& model, int reward_count, int batch_size);

enum class CollabMode {
    kShareNonTies,  // every non-tie instance trains both models
    kOwnWinsOnly,   // each model trains only on instances it won
};

// Count-driven update for one duel batch, routing per CollabMode. Reward
// vectors must be one-hot per instance.
void collaborative_adapt(SyntheticModel& model_i, SyntheticModel& model_j,
                         const std::vector<int>& rewards_i,
                         const std::vector<int>& rewards_j, int batch_size,
                         CollabMode mode);

// One pseudo-label consumed by train(): its span overlap with the annotation
// (quality in [0,1]) and whether the model produced the label itself.
struct TrainingSignal {
    double quality = 0.0;
    bool self_generated = true;
};

// Quality-driven batch update. Each signal moves the skill toward the
// quality-scaled capacity ceiling:
//   skill += (gain / batch_size) * weight * (quality * capacity - skill)
// with weight = self_efficiency for the model's own labels and 1 for labels
// shared by a partner. Skill stays clamped to [0, 1]. Training on poor
// labels therefore degrades the model, and no amount of self-training lifts
// it past its capacity.
void train(SyntheticModel& model, const std::vector<TrainingSignal>& signals,
           int batch_size);

}  // namespace ttab
