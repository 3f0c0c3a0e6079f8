#include "ttab/bandit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ttab {

MabLedger::MabLedger(int num_arms) {
    if (num_arms <= 0) {
        throw std::invalid_argument("MabLedger requires at least one arm, got " +
                                    std::to_string(num_arms));
    }
    mean_.assign(static_cast<size_t>(num_arms), 0.0);
    pulls_.assign(static_cast<size_t>(num_arms), 0);
}

MabLedger MabLedger::from_state(const std::vector<double>& means,
                                const std::vector<long long>& pulls) {
    if (means.empty() || means.size() != pulls.size()) {
        throw std::invalid_argument("from_state needs matching non-empty mean/pull vectors");
    }
    MabLedger ledger(static_cast<int>(means.size()));
    for (size_t k = 0; k < means.size(); ++k) {
        if (pulls[k] < 0) {
            throw std::invalid_argument("pull count must be non-negative");
        }
        if (means[k] < 0.0 || means[k] > 1.0) {
            throw std::invalid_argument("mean reward must lie in [0, 1]");
        }
        if (pulls[k] == 0 && means[k] != 0.0) {
            throw std::invalid_argument("an unpulled arm must have mean 0");
        }
        ledger.mean_[k] = means[k];
        ledger.pulls_[k] = pulls[k];
        ledger.total_ += pulls[k];
    }
    return ledger;
}

void MabLedger::check_arm(int arm) const {
    if (arm < 0 || arm >= num_arms()) {
        throw std::out_of_range("arm index " + std::to_string(arm) + " outside [0, " +
                                std::to_string(num_arms()) + ")");
    }
}

long long MabLedger::pull_count(int arm) const {
    check_arm(arm);
    return pulls_[static_cast<size_t>(arm)];
}

double MabLedger::mean_reward(int arm) const {
    check_arm(arm);
    return mean_[static_cast<size_t>(arm)];
}

double MabLedger::ucb_index(int arm) const {
    check_arm(arm);
    const long long n = pulls_[static_cast<size_t>(arm)];
    if (n == 0) {
        return std::numeric_limits<double>::infinity();
    }
    const double log_total = total_ > 1 ? std::log(static_cast<double>(total_)) : 0.0;
    return mean_[static_cast<size_t>(arm)] +
           std::sqrt(2.0 * log_total / static_cast<double>(n));
}

int MabLedger::select_arm() const {
    int best = 0;
    double best_index = ucb_index(0);
    for (int k = 1; k < num_arms(); ++k) {
        const double index = ucb_index(k);
        if (index > best_index) {
            best = k;
            best_index = index;
        }
    }
    return best;
}

void MabLedger::update_binary(int arm, const std::vector<int>& rewards) {
    check_arm(arm);
    if (rewards.empty()) {
        throw std::invalid_argument("reward batch must not be empty");
    }
    long long wins = 0;
    for (int r : rewards) {
        if (r != 0 && r != 1) {
            throw std::invalid_argument("binary reward must be 0 or 1, got " +
                                        std::to_string(r));
        }
        wins += r;
    }
    const auto k = static_cast<size_t>(arm);
    const auto batch = static_cast<long long>(rewards.size());
    const double n = static_cast<double>(pulls_[k]);
    mean_[k] = (mean_[k] * n + static_cast<double>(wins)) /
               (n + static_cast<double>(batch));
    pulls_[k] += batch;
    total_ += batch;
}

std::pair<int, int> select_top2_prediction_feedback(const SpanPrediction& first,
                                                    const SpanPrediction& second,
                                                    const GoldSpan& gold) {
    const double f1_first = span_f1(first, gold);
    const double f1_second = span_f1(second, gold);
    return preference_to_rewards(make_preference(f1_first, f1_second));
}

}  // namespace ttab
