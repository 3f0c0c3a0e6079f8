#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ttab/feedback.hpp"

namespace ttab {

// Unordered pair of distinct arms, stored with i < j.
struct PairId {
    int i = 0;
    int j = 1;

    bool operator==(const PairId&) const = default;
};

/**
 * Sufficient statistics of a dueling bandit over arm pairs.
 *
 * Per ordered pair (a, b) the ledger tracks n_{a,b}, the number of duel
 * instances arm a has consumed against arm b, and per arm a the running duel
 * mean mu(a) = (total wins of a across all opponents) / (sum_k n_{a,k}).
 * Selecting and updating a pair {i, j} touches n_{i,j} and n_{j,i} equally,
 * so n_{a,b} == n_{b,a} always holds here; both directions are kept because
 * the recommendation rule divides by an arm's own row sum.
 *
 * The pair index is ((mu(i) + mu(j)) / 2) + sqrt(2 ln(N) / n_{i,j}) where N
 * is the total instance count. With accumulate_total, N grows by the batch
 * size on every update; without it, N is overwritten by the latest batch
 * size, which freezes the exploration bonus at a constant scale.
 */
class DuelLedger {
  public:
    explicit DuelLedger(int num_arms, bool accumulate_total = true);

    // Test fixture: rebuild from explicit per-arm duel means, a symmetric
    // pair-count matrix (row-major K*K, zero diagonal), and a total count.
    static DuelLedger from_state(const std::vector<double>& means,
                                 const std::vector<long long>& pair_counts,
                                 long long total_count);

    int num_arms() const { return static_cast<int>(mean_.size()); }
    long long total_count() const { return total_; }

    double mean_duel_reward(int arm) const;
    // Wins accumulated by the arm across all opponents (mu(arm) * row sum).
    double pair_reward_sum(int arm) const;
    long long pair_count(int i, int j) const;
    // Row sum: how many duel instances the arm has consumed in total.
    long long arm_duel_count(int arm) const;

    double co_ucb_index(PairId pair) const;

    // Argmax of co_ucb_index over all unordered pairs; ties resolve to the
    // lexicographically smallest (i, j).
    PairId select_pair() const;

    // Fold one batch of duels between pair.i and pair.j into the ledger.
    // rewards_i and rewards_j are the strict one-hot outcomes per instance
    // (at most one of rewards_i[t], rewards_j[t] is 1). Both arm means are
    // recomputed against their pre-update row sums, then n_{i,j}, n_{j,i}
    // and the total count advance by the batch size.
    void update_pair(PairId pair, const std::vector<int>& rewards_i,
                     const std::vector<int>& rewards_j);

    // Final recommendation: argmax of mu(j) + sqrt(2 ln(2N) / row_count(j)),
    // ties to the lowest index. An arm that never dueled scores +infinity.
    int best_model() const;

    // Audit hook: recompute every arm mean as win_sum / row_count and compare
    // with the running value to the given relative tolerance.
    bool check_consistency(double rel_tol = 1e-9) const;

  private:
    void check_arm(int arm) const;
    void check_pair(PairId pair) const;
    long long row_count(int arm) const;

    std::vector<double> mean_;      // running duel mean per arm
    std::vector<double> win_sum_;   // accumulated wins per arm
    std::vector<long long> count_;  // K*K row-major pair counts, zero diagonal
    long long total_ = 0;
    bool accumulate_total_ = true;
};

// Strict one-hot duel outcome from two span-F1 scores; ties score (0, 0).
std::pair<int, int> preference_rewards(double f1_i, double f1_j);

// Pseudo-label routing for one duel instance: the winning side's prediction
// is shared with both models, a tie yields nothing. Rejects (1, 1) because
// rewards must be one-hot.
std::optional<SpanPrediction> combine_predictions(const SpanPrediction& pred_i,
                                                  const SpanPrediction& pred_j,
                                                  int reward_i, int reward_j);

}  // namespace ttab
