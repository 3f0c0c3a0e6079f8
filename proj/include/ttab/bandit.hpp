#pragma once

#include <utility>
#include <vector>

#include "ttab/feedback.hpp"

namespace ttab {

/**
 * Sufficient statistics of a K-armed bandit with batched binary rewards.
 *
 * Invariants, preserved by every mutation:
 *   - total_count() == sum of pull_count(k) over all arms
 *   - mean_reward(k) lies in [0, 1], and equals 0 while pull_count(k) == 0
 *   - counts never decrease
 */
class MabLedger {
  public:
    explicit MabLedger(int num_arms);

    // Test fixture: rebuild a ledger from explicit statistics. Means must lie
    // in [0,1] (zero where the count is zero); total becomes the count sum.
    static MabLedger from_state(const std::vector<double>& means,
                                const std::vector<long long>& pulls);

    int num_arms() const { return static_cast<int>(mean_.size()); }
    long long total_count() const { return total_; }
    long long pull_count(int arm) const;
    double mean_reward(int arm) const;

    // Optimism index: mean + sqrt(2 ln(N) / n). An unpulled arm scores
    // +infinity so every arm is tried once; ln(N) is clamped at 0 for N <= 1.
    double ucb_index(int arm) const;

    // Argmax of ucb_index; ties resolve to the lowest arm index.
    int select_arm() const;

    // Fold one batch of {0,1} rewards into the chosen arm's running mean:
    // mean <- (mean * n + sum(rewards)) / (n + |batch|), n and N grow by
    // |batch|. Throws on an empty batch or a reward outside {0,1}.
    void update_binary(int arm, const std::vector<int>& rewards);

    // Final recommendation, same index and tie-break as select_arm.
    int best_arm() const { return select_arm(); }

  private:
    void check_arm(int arm) const;

    std::vector<double> mean_;
    std::vector<long long> pulls_;
    long long total_ = 0;
};

// Simulated preference over one model's own top two candidates: score both
// against the annotation with span_f1 and hand out strict one-hot rewards.
// The preferred candidate (when any) is the one to forward as the training
// pseudo-label.
std::pair<int, int> select_top2_prediction_feedback(const SpanPrediction& first,
                                                    const SpanPrediction& second,
                                                    const GoldSpan& gold);

}  // namespace ttab
