#include "ttab/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace ttab {

namespace {

bool is_single_arm(PolicyKind policy) {
    return policy == PolicyKind::kUcb || policy == PolicyKind::kUcbPreference;
}

const std::vector<double>& skills_entering_step(const RunRecord& run, size_t t,
                                                bool dynamic) {
    if (!dynamic || t == 0) {
        return run.initial_skills;
    }
    return run.steps[t - 1].skills_after;
}

long long step_batch(const RunRecord& run, const StepRecord& step) {
    return step.rewards_i.empty() ? run.batch_size
                                  : static_cast<long long>(step.rewards_i.size());
}

int argmax_skill(const std::vector<double>& skills) {
    return static_cast<int>(std::max_element(skills.begin(), skills.end()) -
                            skills.begin());
}

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1], got " +
                                    std::to_string(p));
    }
}

double single_arm_expectation(const RunRecord& run, double skill) {
    if (run.policy == PolicyKind::kUcbPreference) {
        return top2_win_expectation(skill, run.top2_degradation,
                                    run.perturbed_sub_one_rate);
    }
    return exact_match_expectation(skill, run.perturbed_sub_one_rate);
}

}  // namespace

std::string policy_name(PolicyKind policy) {
    switch (policy) {
        case PolicyKind::kUcb:
            return "ucb";
        case PolicyKind::kUcbPreference:
            return "ucb_preference";
        case PolicyKind::kCoUcb:
            return "co_ucb";
        case PolicyKind::kCoUcbNoCollab:
            return "co_ucb_no_collab";
    }
    throw std::logic_error("unknown policy kind");
}

PolicyKind parse_policy(const std::string& name) {
    std::string canon;
    canon.reserve(name.size());
    for (char c : name) {
        canon.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(
                                             static_cast<unsigned char>(c))));
    }
    if (canon == "ucb") return PolicyKind::kUcb;
    if (canon == "ucb_preference") return PolicyKind::kUcbPreference;
    if (canon == "co_ucb") return PolicyKind::kCoUcb;
    if (canon == "co_ucb_no_collab") return PolicyKind::kCoUcbNoCollab;
    throw std::invalid_argument("unknown policy '" + name +
                                "' (expected ucb, ucb_preference, co_ucb, or "
                                "co_ucb_no_collab)");
}

long long overall_reward(const RunRecord& run) {
    long long total = 0;
    for (const StepRecord& step : run.steps) {
        total += step.granted_i + step.granted_j;
    }
    return total;
}

double exact_match_expectation(double skill, double sub_one_rate) {
    check_probability(skill, "skill");
    check_probability(sub_one_rate, "sub_one_rate");
    return skill + (1.0 - skill) * (1.0 - sub_one_rate);
}

double tie_adjusted_win_probability(double skill_a, double skill_b,
                                    double sub_one_rate) {
    check_probability(skill_a, "skill");
    check_probability(skill_b, "skill");
    check_probability(sub_one_rate, "sub_one_rate");
    return 0.5 + 0.5 * sub_one_rate * (skill_a - skill_b);
}

double top2_win_expectation(double skill, double degradation, double sub_one_rate) {
    check_probability(degradation, "degradation");
    return tie_adjusted_win_probability(skill, skill * degradation, sub_one_rate);
}

double mab_regret(const RunRecord& run,
                  const std::vector<std::vector<double>>& expectations) {
    if (expectations.size() != run.steps.size()) {
        throw std::invalid_argument("expectation table must cover every step");
    }
    double regret = 0.0;
    for (size_t t = 0; t < run.steps.size(); ++t) {
        const StepRecord& step = run.steps[t];
        const std::vector<double>& row = expectations[t];
        if (static_cast<int>(row.size()) != run.num_arms) {
            throw std::invalid_argument("expectation row must have one entry per arm");
        }
        if (step.chosen_i < 0 || step.chosen_i >= run.num_arms) {
            throw std::invalid_argument("step chose an arm outside the run's range");
        }
        double best = row[0];
        for (double e : row) {
            check_probability(e, "expected reward");
            best = std::max(best, e);
        }
        regret += static_cast<double>(step_batch(run, step)) *
                  (best - row[static_cast<size_t>(step.chosen_i)]);
    }
    return regret;
}

double madb_regret(const RunRecord& run, const PreferenceModel& pref, bool dynamic) {
    double regret = 0.0;
    for (size_t t = 0; t < run.steps.size(); ++t) {
        const StepRecord& step = run.steps[t];
        if (step.chosen_j < 0) {
            throw std::invalid_argument("dueling regret needs pair selections");
        }
        const std::vector<double>& skills = skills_entering_step(run, t, dynamic);
        if (static_cast<int>(skills.size()) != run.num_arms) {
            throw std::invalid_argument("skill snapshot size differs from num_arms");
        }
        const int star = argmax_skill(skills);
        const double p_i =
            pref(skills[static_cast<size_t>(star)], skills[static_cast<size_t>(step.chosen_i)]);
        const double p_j =
            pref(skills[static_cast<size_t>(star)], skills[static_cast<size_t>(step.chosen_j)]);
        check_probability(p_i, "preference probability");
        check_probability(p_j, "preference probability");
        regret += static_cast<double>(step_batch(run, step)) *
                  0.5 * ((p_i - 0.5) + (p_j - 0.5));
    }
    return regret;
}

std::vector<double> cumulative_regret_curve(const RunRecord& run, bool dynamic) {
    std::vector<double> curve;
    curve.reserve(run.steps.size());
    double total = 0.0;
    const bool single = is_single_arm(run.policy);
    for (size_t t = 0; t < run.steps.size(); ++t) {
        const StepRecord& step = run.steps[t];
        const std::vector<double>& skills = skills_entering_step(run, t, dynamic);
        if (static_cast<int>(skills.size()) != run.num_arms) {
            throw std::invalid_argument("skill snapshot size differs from num_arms");
        }
        const double batch = static_cast<double>(step_batch(run, step));
        if (single) {
            double best = 0.0;
            for (double s : skills) {
                best = std::max(best, single_arm_expectation(run, s));
            }
            total += batch *
                     (best - single_arm_expectation(
                                 run, skills[static_cast<size_t>(step.chosen_i)]));
        } else {
            if (step.chosen_j < 0) {
                throw std::invalid_argument("pair policy step is missing its second arm");
            }
            const int star = argmax_skill(skills);
            const double s_star = skills[static_cast<size_t>(star)];
            const double eps_i =
                tie_adjusted_win_probability(
                    s_star, skills[static_cast<size_t>(step.chosen_i)],
                    run.perturbed_sub_one_rate) -
                0.5;
            const double eps_j =
                tie_adjusted_win_probability(
                    s_star, skills[static_cast<size_t>(step.chosen_j)],
                    run.perturbed_sub_one_rate) -
                0.5;
            total += batch * 0.5 * (eps_i + eps_j);
        }
        curve.push_back(total);
    }
    return curve;
}

double run_regret(const RunRecord& run, bool dynamic) {
    const std::vector<double> curve = cumulative_regret_curve(run, dynamic);
    return curve.empty() ? 0.0 : curve.back();
}

double mab_regret_static(const RunRecord& run) { return run_regret(run, false); }
double mab_regret_dynamic(const RunRecord& run) { return run_regret(run, true); }
double madb_regret_static(const RunRecord& run) { return run_regret(run, false); }
double madb_regret_dynamic(const RunRecord& run) { return run_regret(run, true); }

double PreferenceEstimate::first_win_rate() const {
    return samples > 0 ? static_cast<double>(first_wins) / static_cast<double>(samples)
                       : 0.0;
}

double PreferenceEstimate::tie_adjusted_rate() const {
    return samples > 0 ? (static_cast<double>(first_wins) +
                          0.5 * static_cast<double>(ties)) /
                             static_cast<double>(samples)
                       : 0.5;
}

PreferenceEstimate estimate_preference(double skill_i, double skill_j,
                                       int perturb_width, const PassageModel& passages,
                                       long long samples, unsigned long long seed) {
    passages.validate();
    check_probability(skill_i, "skill");
    check_probability(skill_j, "skill");
    if (perturb_width < 1) {
        throw std::invalid_argument("perturb_width must be at least 1");
    }
    if (samples < 1) {
        throw std::invalid_argument("samples must be positive");
    }
    SyntheticModel first;
    first.skill = skill_i;
    first.perturb_width = perturb_width;
    SyntheticModel second = first;
    second.skill = skill_j;

    Rng rng = Rng(seed).derive(kPreferenceStream);
    PreferenceEstimate estimate;
    estimate.samples = samples;
    for (long long t = 0; t < samples; ++t) {
        const TaskInstance instance = sample_instance(passages, t, rng);
        const double f1_i = span_f1(predict(first, instance, rng), instance.gold);
        const double f1_j = span_f1(predict(second, instance, rng), instance.gold);
        switch (make_preference(f1_i, f1_j)) {
            case PreferenceLabel::kFirstBetter:
                ++estimate.first_wins;
                break;
            case PreferenceLabel::kSecondBetter:
                ++estimate.second_wins;
                break;
            case PreferenceLabel::kTie:
                ++estimate.ties;
                break;
        }
    }
    return estimate;
}

double preference_probability(double skill_i, double skill_j, int perturb_width,
                              const PassageModel& passages, long long samples,
                              unsigned long long seed) {
    return estimate_preference(skill_i, skill_j, perturb_width, passages, samples, seed)
        .first_win_rate();
}

GeometryProfile estimate_geometry(const PassageModel& passages, int perturb_width,
                                  long long samples, unsigned long long seed) {
    passages.validate();
    if (perturb_width < 1) {
        throw std::invalid_argument("perturb_width must be at least 1");
    }
    if (samples < 1) {
        throw std::invalid_argument("samples must be positive");
    }
    SyntheticModel misser;
    misser.skill = 0.0;  // every prediction lands in the perturbed regime
    misser.perturb_width = perturb_width;

    Rng rng = Rng(seed).derive(kGeometryStream);
    long long sub_one = 0;
    long long tied = 0;
    double f1_sum = 0.0;
    for (long long t = 0; t < samples; ++t) {
        const TaskInstance instance = sample_instance(passages, t, rng);
        const double f1_a = span_f1(predict(misser, instance, rng), instance.gold);
        const double f1_b = span_f1(predict(misser, instance, rng), instance.gold);
        if (f1_a < 1.0) {
            ++sub_one;
        }
        if (f1_a == f1_b) {
            ++tied;
        }
        f1_sum += f1_a;
    }
    GeometryProfile profile;
    profile.sub_one_rate = static_cast<double>(sub_one) / static_cast<double>(samples);
    profile.tie_rate = static_cast<double>(tied) / static_cast<double>(samples);
    profile.mean_f1 = f1_sum / static_cast<double>(samples);
    return profile;
}

}  // namespace ttab
