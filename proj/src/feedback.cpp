#include "ttab/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ttab {

namespace {

void check_span(int start, int end, const char* what) {
    if (start < 0 || start > end) {
        throw std::invalid_argument(std::string(what) + ": span must satisfy 0 <= start <= end");
    }
}

int label_index(PreferenceLabel label) { return static_cast<int>(label); }

}  // namespace

void NoiseChannel::validate() const {
    if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) {
        throw std::invalid_argument("NoiseChannel: noise_rate must lie in [0, 1]");
    }
    for (int r = 0; r < kNumPreferenceLabels; ++r) {
        if (corruption[r][r] != 0.0) {
            throw std::invalid_argument("NoiseChannel: corruption diagonal must be zero");
        }
        double sum = 0.0;
        for (int c = 0; c < kNumPreferenceLabels; ++c) {
            if (corruption[r][c] < 0.0) {
                throw std::invalid_argument("NoiseChannel: corruption entries must be non-negative");
            }
            sum += corruption[r][c];
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw std::invalid_argument("NoiseChannel: corruption rows must sum to 1");
        }
    }
}

std::array<std::array<double, 3>, 3> NoiseChannel::transition() const {
    validate();
    std::array<std::array<double, 3>, 3> t{};
    for (int r = 0; r < kNumPreferenceLabels; ++r) {
        for (int c = 0; c < kNumPreferenceLabels; ++c) {
            t[r][c] = noise_rate * corruption[r][c];
        }
        t[r][r] += 1.0 - noise_rate;
    }
    return t;
}

int exact_match_reward(const SpanPrediction& pred, const GoldSpan& gold) {
    check_span(pred.start, pred.end, "exact_match_reward(pred)");
    check_span(gold.start, gold.end, "exact_match_reward(gold)");
    return (pred.start == gold.start && pred.end == gold.end) ? 1 : 0;
}

double span_f1(const SpanPrediction& pred, const GoldSpan& gold) {
    check_span(pred.start, pred.end, "span_f1(pred)");
    check_span(gold.start, gold.end, "span_f1(gold)");
    const int overlap = std::min(pred.end, gold.end) - std::max(pred.start, gold.start) + 1;
    if (overlap <= 0) return 0.0;
    const int pred_len = pred.end - pred.start + 1;
    const int gold_len = gold.end - gold.start + 1;
    // 2PR/(P+R) with P = overlap/pred_len, R = overlap/gold_len reduces to this.
    return 2.0 * overlap / static_cast<double>(pred_len + gold_len);
}

PreferenceLabel make_preference(double score_first, double score_second) {
    if (score_first > score_second) return PreferenceLabel::kFirstBetter;
    if (score_second > score_first) return PreferenceLabel::kSecondBetter;
    return PreferenceLabel::kTie;
}

PreferenceLabel apply_noise(PreferenceLabel label, const NoiseChannel& channel, Rng& rng) {
    channel.validate();
    if (!rng.bernoulli(channel.noise_rate)) return label;
    const auto& row = channel.corruption[label_index(label)];
    double u = rng.uniform();
    for (int c = 0; c < kNumPreferenceLabels; ++c) {
        if (c == label_index(label)) continue;
        if (u < row[c]) return static_cast<PreferenceLabel>(c);
        u -= row[c];
    }
    // Fall through only on accumulated rounding; the last wrong label wins.
    for (int c = kNumPreferenceLabels - 1; c >= 0; --c) {
        if (c != label_index(label) && row[c] > 0.0) return static_cast<PreferenceLabel>(c);
    }
    return label;
}

std::pair<int, int> preference_to_rewards(PreferenceLabel label) {
    switch (label) {
        case PreferenceLabel::kFirstBetter: return {1, 0};
        case PreferenceLabel::kSecondBetter: return {0, 1};
        case PreferenceLabel::kTie: return {0, 0};
    }
    throw std::invalid_argument("preference_to_rewards: unknown label");
}

}  // namespace ttab
