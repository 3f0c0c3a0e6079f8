#pragma once

#include <array>
#include <utility>

#include "ttab/rng.hpp"

namespace ttab {

// Token index span, closed on both ends: (2, 4) covers tokens {2, 3, 4} and
// (i, i) is a single-token span. Invariant for all operations below:
// 0 <= start <= end < passage length.
struct SpanPrediction {
    int start = 0;
    int end = 0;
    bool operator==(const SpanPrediction&) const = default;
};

struct GoldSpan {
    int start = 0;
    int end = 0;
    bool operator==(const GoldSpan&) const = default;
};

// Simulated user's verdict on a pair of candidate answers.
enum class PreferenceLabel {
    kFirstBetter,   // ">"
    kSecondBetter,  // "<"
    kTie,           // "=", no usable signal
};

constexpr int kNumPreferenceLabels = 3;

/**
 * Label corruption channel.
 *
 * With probability noise_rate the true label is replaced by one of the other
 * two labels, drawn from the corruption row of the true label. Rows of the
 * corruption matrix must sum to 1 and its diagonal must be zero; the default
 * splits the corruption mass evenly between the two wrong labels.
 */
struct NoiseChannel {
    double noise_rate = 0.0;
    std::array<std::array<double, 3>, 3> corruption{{
        {0.0, 0.5, 0.5},
        {0.5, 0.0, 0.5},
        {0.5, 0.5, 0.0},
    }};

    static NoiseChannel equal_split(double rate) {
        NoiseChannel ch;
        ch.noise_rate = rate;
        return ch;
    }

    // Throws std::invalid_argument on rate outside [0,1], a nonzero diagonal,
    // negative entries, or a row that does not sum to 1 within 1e-12.
    void validate() const;

    // Full 3x3 label transition matrix: (1 - rate) * I + rate * corruption.
    std::array<std::array<double, 3>, 3> transition() const;
};

// 1 if the predicted span matches the annotated span index for index, else 0.
int exact_match_reward(const SpanPrediction& pred, const GoldSpan& gold);

// Token-level F1 between the two index sets. Equals
// 2 * overlap / (pred_len + gold_len); 0 when the spans are disjoint, 1 only
// when they are identical. Throws std::invalid_argument on malformed spans.
double span_f1(const SpanPrediction& pred, const GoldSpan& gold);

// Strict comparison of two quality scores. Exactly equal scores give kTie;
// no epsilon is applied, so two answers of identical F1 yield no preference.
PreferenceLabel make_preference(double score_first, double score_second);

// Pass a label through the channel. Consumes one uniform draw for the
// corruption decision and a second only when corrupting.
PreferenceLabel apply_noise(PreferenceLabel label, const NoiseChannel& channel, Rng& rng);

// One-hot reward pair: ">" gives (1,0), "<" gives (0,1), "=" gives (0,0).
std::pair<int, int> preference_to_rewards(PreferenceLabel label);

}  // namespace ttab
