#include "ttab/environment.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ttab {

namespace {

void check_unit(double value, const char* what) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1], got " +
                                    std::to_string(value));
    }
}

}  // namespace

void PassageModel::validate() const {
    if (min_passage_length < 1 || max_passage_length < min_passage_length) {
        throw std::invalid_argument("passage length bounds must satisfy 1 <= min <= max");
    }
    if (min_gold_length < 1 || max_gold_length < min_gold_length) {
        throw std::invalid_argument("gold length bounds must satisfy 1 <= min <= max");
    }
    if (min_gold_length > min_passage_length) {
        throw std::invalid_argument(
            "min gold length must fit into the shortest passage");
    }
}

void SyntheticModel::validate() const {
    check_unit(skill, "skill");
    check_unit(learning_gain, "learning_gain");
    check_unit(top2_degradation, "top2_degradation");
    check_unit(capacity, "capacity");
    check_unit(self_efficiency, "self_efficiency");
    if (perturb_width < 1) {
        throw std::invalid_argument("perturb_width must be at least 1");
    }
}

void DomainProfile::validate() const {
    if (initial_skills.empty()) {
        throw std::invalid_argument("a domain needs at least one source model");
    }
    for (double s : initial_skills) {
        check_unit(s, "initial skill");
    }
    if (stream_length < 1) {
        throw std::invalid_argument("stream_length must be positive");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("batch_size must be positive");
    }
    passages.validate();
}

TaskInstance sample_instance(const PassageModel& passages, long long instance_id,
                             Rng& rng) {
    const int length =
        rng.uniform_int(passages.min_passage_length, passages.max_passage_length);
    const int max_len = std::min(passages.max_gold_length, length);
    const int min_len = std::min(passages.min_gold_length, max_len);
    const int gold_length = rng.uniform_int(min_len, max_len);
    const int gold_start = rng.uniform_int(0, length - gold_length);
    TaskInstance instance;
    instance.passage_length = length;
    instance.gold = GoldSpan{gold_start, gold_start + gold_length - 1};
    instance.instance_id = instance_id;
    return instance;
}

SpanPrediction predict(const SyntheticModel& model, const TaskInstance& instance,
                       Rng& rng) {
    if (rng.uniform() < model.skill) {
        return SpanPrediction{instance.gold.start, instance.gold.end};
    }
    // Miss: shift each endpoint independently by 1..perturb_width tokens in a
    // random direction, then clip to the passage and restore start <= end.
    const int last = instance.passage_length - 1;
    int start = instance.gold.start;
    int end = instance.gold.end;
    const int off_start = rng.uniform_int(1, model.perturb_width);
    start += rng.bernoulli(0.5) ? off_start : -off_start;
    const int off_end = rng.uniform_int(1, model.perturb_width);
    end += rng.bernoulli(0.5) ? off_end : -off_end;
    start = std::clamp(start, 0, last);
    end = std::clamp(end, 0, last);
    if (start > end) {
        std::swap(start, end);
    }
    return SpanPrediction{start, end};
}

std::pair<SpanPrediction, SpanPrediction> predict_top2(const SyntheticModel& model,
                                                       const TaskInstance& instance,
                                                       Rng& rng) {
    const SpanPrediction first = predict(model, instance, rng);
    SyntheticModel degraded = model;
    degraded.skill = model.skill * model.top2_degradation;
    const SpanPrediction second = predict(degraded, instance, rng);
    return {first, second};
}

void adapt(SyntheticModel& model, int reward_count, int batch_size) {
    if (batch_size < 1) {
        throw std::invalid_argument("batch_size must be positive");
    }
    if (reward_count < 0 || reward_count > batch_size) {
        throw std::invalid_argument("reward_count must lie in [0, batch_size]");
    }
    const double fraction =
        static_cast<double>(reward_count) / static_cast<double>(batch_size);
    model.skill += model.learning_gain * fraction * (1.0 - model.skill);
    model.skill = std::clamp(model.skill, 0.0, 1.0);
}

void collaborative_adapt(SyntheticModel& model_i, SyntheticModel& model_j,
                         const std::vector<int>& rewards_i,
                         const std::vector<int>& rewards_j, int batch_size,
                         CollabMode mode) {
    if (batch_size < 1) {
        throw std::invalid_argument("batch_size must be positive");
    }
    if (rewards_i.size() != rewards_j.size()) {
        throw std::invalid_argument("duel reward batches must be equal-sized");
    }
    int wins_i = 0;
    int wins_j = 0;
    int non_ties = 0;
    for (size_t t = 0; t < rewards_i.size(); ++t) {
        const int ri = rewards_i[t];
        const int rj = rewards_j[t];
        if ((ri != 0 && ri != 1) || (rj != 0 && rj != 1) || (ri == 1 && rj == 1)) {
            throw std::invalid_argument("duel rewards must be one-hot per instance");
        }
        wins_i += ri;
        wins_j += rj;
        non_ties += ri | rj;
    }
    if (mode == CollabMode::kShareNonTies) {
        // The winning side's pseudo-label trains both models, so each model
        // consumes every decided instance.
        adapt(model_i, non_ties, batch_size);
        adapt(model_j, non_ties, batch_size);
    } else {
        adapt(model_i, wins_i, batch_size);
        adapt(model_j, wins_j, batch_size);
    }
}

void train(SyntheticModel& model, const std::vector<TrainingSignal>& signals,
           int batch_size) {
    if (batch_size < 1) {
        throw std::invalid_argument("batch_size must be positive");
    }
    if (signals.size() > static_cast<size_t>(batch_size)) {
        throw std::invalid_argument("a training batch cannot exceed batch_size signals");
    }
    const double step = model.learning_gain / static_cast<double>(batch_size);
    for (const TrainingSignal& signal : signals) {
        if (!(signal.quality >= 0.0 && signal.quality <= 1.0)) {
            throw std::invalid_argument("training signal quality must lie in [0, 1]");
        }
        const double weight = signal.self_generated ? model.self_efficiency : 1.0;
        model.skill += step * weight * (signal.quality * model.capacity - model.skill);
        model.skill = std::clamp(model.skill, 0.0, 1.0);
    }
}

}  // namespace ttab
