#include "ttab/dueling.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace ttab {

DuelLedger::DuelLedger(int num_arms, bool accumulate_total)
    : accumulate_total_(accumulate_total) {
    if (num_arms < 2) {
        throw std::invalid_argument("DuelLedger requires at least two arms, got " +
                                    std::to_string(num_arms));
    }
    mean_.assign(static_cast<size_t>(num_arms), 0.0);
    win_sum_.assign(static_cast<size_t>(num_arms), 0.0);
    count_.assign(static_cast<size_t>(num_arms) * static_cast<size_t>(num_arms), 0);
}

DuelLedger DuelLedger::from_state(const std::vector<double>& means,
                                  const std::vector<long long>& pair_counts,
                                  long long total_count) {
    const auto k = means.size();
    if (k < 2 || pair_counts.size() != k * k) {
        throw std::invalid_argument("from_state needs K >= 2 means and a K*K count matrix");
    }
    if (total_count < 0) {
        throw std::invalid_argument("total count must be non-negative");
    }
    DuelLedger ledger(static_cast<int>(k));
    for (size_t a = 0; a < k; ++a) {
        if (pair_counts[a * k + a] != 0) {
            throw std::invalid_argument("pair count matrix must have a zero diagonal");
        }
        long long row = 0;
        for (size_t b = 0; b < k; ++b) {
            const long long c = pair_counts[a * k + b];
            if (c < 0) {
                throw std::invalid_argument("pair counts must be non-negative");
            }
            if (pair_counts[b * k + a] != c) {
                throw std::invalid_argument("pair count matrix must be symmetric");
            }
            row += c;
        }
        if (means[a] < 0.0 || means[a] > 1.0) {
            throw std::invalid_argument("duel mean must lie in [0, 1]");
        }
        if (row == 0 && means[a] != 0.0) {
            throw std::invalid_argument("an arm with no duels must have mean 0");
        }
        ledger.mean_[a] = means[a];
        ledger.win_sum_[a] = means[a] * static_cast<double>(row);
    }
    ledger.count_ = pair_counts;
    ledger.total_ = total_count;
    return ledger;
}

void DuelLedger::check_arm(int arm) const {
    if (arm < 0 || arm >= num_arms()) {
        throw std::out_of_range("arm index " + std::to_string(arm) + " outside [0, " +
                                std::to_string(num_arms()) + ")");
    }
}

void DuelLedger::check_pair(PairId pair) const {
    check_arm(pair.i);
    check_arm(pair.j);
    if (pair.i >= pair.j) {
        throw std::invalid_argument("pair must satisfy i < j, got (" +
                                    std::to_string(pair.i) + ", " +
                                    std::to_string(pair.j) + ")");
    }
}

long long DuelLedger::row_count(int arm) const {
    const auto k = static_cast<size_t>(num_arms());
    const auto a = static_cast<size_t>(arm);
    long long row = 0;
    for (size_t b = 0; b < k; ++b) {
        row += count_[a * k + b];
    }
    return row;
}

double DuelLedger::mean_duel_reward(int arm) const {
    check_arm(arm);
    return mean_[static_cast<size_t>(arm)];
}

double DuelLedger::pair_reward_sum(int arm) const {
    check_arm(arm);
    return win_sum_[static_cast<size_t>(arm)];
}

long long DuelLedger::pair_count(int i, int j) const {
    check_arm(i);
    check_arm(j);
    if (i == j) {
        throw std::invalid_argument("pair count is undefined for an arm against itself");
    }
    return count_[static_cast<size_t>(i) * static_cast<size_t>(num_arms()) +
                  static_cast<size_t>(j)];
}

long long DuelLedger::arm_duel_count(int arm) const {
    check_arm(arm);
    return row_count(arm);
}

double DuelLedger::co_ucb_index(PairId pair) const {
    check_pair(pair);
    const long long n = pair_count(pair.i, pair.j);
    if (n == 0) {
        return std::numeric_limits<double>::infinity();
    }
    const double log_total = total_ > 1 ? std::log(static_cast<double>(total_)) : 0.0;
    const double mean_pair = 0.5 * (mean_[static_cast<size_t>(pair.i)] +
                                    mean_[static_cast<size_t>(pair.j)]);
    return mean_pair + std::sqrt(2.0 * log_total / static_cast<double>(n));
}

PairId DuelLedger::select_pair() const {
    PairId best{0, 1};
    double best_index = co_ucb_index(best);
    for (int i = 0; i < num_arms(); ++i) {
        for (int j = i + 1; j < num_arms(); ++j) {
            if (i == 0 && j == 1) {
                continue;
            }
            const PairId pair{i, j};
            const double index = co_ucb_index(pair);
            if (index > best_index) {
                best = pair;
                best_index = index;
            }
        }
    }
    return best;
}

void DuelLedger::update_pair(PairId pair, const std::vector<int>& rewards_i,
                             const std::vector<int>& rewards_j) {
    check_pair(pair);
    if (rewards_i.empty() || rewards_i.size() != rewards_j.size()) {
        throw std::invalid_argument("duel reward batches must be non-empty and equal-sized");
    }
    long long wins_i = 0;
    long long wins_j = 0;
    for (size_t t = 0; t < rewards_i.size(); ++t) {
        const int ri = rewards_i[t];
        const int rj = rewards_j[t];
        if ((ri != 0 && ri != 1) || (rj != 0 && rj != 1)) {
            throw std::invalid_argument("duel rewards must be 0 or 1");
        }
        if (ri == 1 && rj == 1) {
            throw std::invalid_argument("duel rewards must be one-hot per instance");
        }
        wins_i += ri;
        wins_j += rj;
    }

    const auto batch = static_cast<long long>(rewards_i.size());
    const auto a = static_cast<size_t>(pair.i);
    const auto b = static_cast<size_t>(pair.j);

    // Both means are rebuilt against the row sums as they stood before this
    // batch; the counts advance afterwards so the two sides stay symmetric.
    const double row_a = static_cast<double>(row_count(pair.i));
    const double row_b = static_cast<double>(row_count(pair.j));
    win_sum_[a] += static_cast<double>(wins_i);
    win_sum_[b] += static_cast<double>(wins_j);
    mean_[a] = win_sum_[a] / (row_a + static_cast<double>(batch));
    mean_[b] = win_sum_[b] / (row_b + static_cast<double>(batch));

    const auto k = static_cast<size_t>(num_arms());
    count_[a * k + b] += batch;
    count_[b * k + a] += batch;
    if (accumulate_total_) {
        total_ += batch;
    } else {
        total_ = batch;
    }
}

int DuelLedger::best_model() const {
    int best = 0;
    double best_index = -std::numeric_limits<double>::infinity();
    const double log_total =
        total_ >= 1 ? std::log(2.0 * static_cast<double>(total_)) : 0.0;
    for (int arm = 0; arm < num_arms(); ++arm) {
        const long long row = row_count(arm);
        double index;
        if (row == 0) {
            index = std::numeric_limits<double>::infinity();
        } else {
            index = mean_[static_cast<size_t>(arm)] +
                    std::sqrt(2.0 * std::max(log_total, 0.0) / static_cast<double>(row));
        }
        if (index > best_index) {
            best = arm;
            best_index = index;
        }
    }
    return best;
}

bool DuelLedger::check_consistency(double rel_tol) const {
    for (int arm = 0; arm < num_arms(); ++arm) {
        const long long row = row_count(arm);
        const auto a = static_cast<size_t>(arm);
        const double expected = row == 0 ? 0.0 : win_sum_[a] / static_cast<double>(row);
        const double got = mean_[a];
        const double scale = std::max({std::abs(expected), std::abs(got), 1.0});
        if (std::abs(expected - got) > rel_tol * scale) {
            return false;
        }
    }
    return true;
}

std::pair<int, int> preference_rewards(double f1_i, double f1_j) {
    return preference_to_rewards(make_preference(f1_i, f1_j));
}

std::optional<SpanPrediction> combine_predictions(const SpanPrediction& pred_i,
                                                  const SpanPrediction& pred_j,
                                                  int reward_i, int reward_j) {
    if ((reward_i != 0 && reward_i != 1) || (reward_j != 0 && reward_j != 1)) {
        throw std::invalid_argument("duel rewards must be 0 or 1");
    }
    if (reward_i == 1 && reward_j == 1) {
        throw std::invalid_argument("duel rewards must be one-hot per instance");
    }
    if (reward_i == 1) {
        return pred_i;
    }
    if (reward_j == 1) {
        return pred_j;
    }
    return std::nullopt;
}

}  // namespace ttab
