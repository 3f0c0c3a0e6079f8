#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "ttab/bandit.hpp"
#include "ttab/dueling.hpp"
#include "ttab/harness.hpp"

namespace py = pybind11;

namespace {

// The python surface trades in JSON text so the config schema stays single
// sourced in the C++ layer.
py::dict run_from_json(const std::string& config_text) {
    const ttab::ExperimentConfig config =
        ttab::ExperimentConfig::from_json(nlohmann::json::parse(config_text));
    const ttab::RunRecord run = ttab::run_experiment(config);
    ttab::replay_validate(run);
    py::dict out;
    out["summary"] =
        ttab::summary_json(run, config.regret_static, config.regret_dynamic).dump();
    out["steps_csv"] =
        ttab::render_step_csv(run, config.regret_static, config.regret_dynamic);
    out["probe_csv"] = ttab::render_probe_csv(run);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bandit-driven source selection over synthetic span extraction";

    py::class_<ttab::SpanPrediction>(m, "SpanPrediction")
        .def(py::init<>())
        .def(py::init([](int start, int end) {
                 return ttab::SpanPrediction{start, end};
             }),
             py::arg("start"), py::arg("end"))
        .def_readwrite("start", &ttab::SpanPrediction::start)
        .def_readwrite("end", &ttab::SpanPrediction::end);

    py::class_<ttab::GoldSpan>(m, "GoldSpan")
        .def(py::init<>())
        .def(py::init([](int start, int end) {
                 return ttab::GoldSpan{start, end};
             }),
             py::arg("start"), py::arg("end"))
        .def_readwrite("start", &ttab::GoldSpan::start)
        .def_readwrite("end", &ttab::GoldSpan::end);

    py::enum_<ttab::PreferenceLabel>(m, "PreferenceLabel")
        .value("FIRST_BETTER", ttab::PreferenceLabel::kFirstBetter)
        .value("SECOND_BETTER", ttab::PreferenceLabel::kSecondBetter)
        .value("TIE", ttab::PreferenceLabel::kTie);

    py::class_<ttab::NoiseChannel>(m, "NoiseChannel")
        .def(py::init<>())
        .def_static("equal_split", &ttab::NoiseChannel::equal_split, py::arg("rate"))
        .def_readwrite("noise_rate", &ttab::NoiseChannel::noise_rate)
        .def("validate", &ttab::NoiseChannel::validate)
        .def("transition", &ttab::NoiseChannel::transition);

    py::class_<ttab::Rng>(m, "Rng")
        .def(py::init<unsigned long long>(), py::arg("seed"))
        .def("seed", &ttab::Rng::seed)
        .def("uniform", &ttab::Rng::uniform)
        .def("uniform_int", &ttab::Rng::uniform_int, py::arg("lo"), py::arg("hi"))
        .def("bernoulli", &ttab::Rng::bernoulli, py::arg("p"))
        .def("derive", &ttab::Rng::derive, py::arg("stream"));

    py::class_<ttab::PassageModel>(m, "PassageModel")
        .def(py::init<>())
        .def_readwrite("min_passage_length", &ttab::PassageModel::min_passage_length)
        .def_readwrite("max_passage_length", &ttab::PassageModel::max_passage_length)
        .def_readwrite("min_gold_length", &ttab::PassageModel::min_gold_length)
        .def_readwrite("max_gold_length", &ttab::PassageModel::max_gold_length)
        .def("validate", &ttab::PassageModel::validate);

    py::class_<ttab::MabLedger>(m, "MabLedger")
        .def(py::init<int>(), py::arg("num_arms"))
        .def_static("from_state", &ttab::MabLedger::from_state, py::arg("means"),
                    py::arg("pulls"))
        .def_property_readonly("num_arms", &ttab::MabLedger::num_arms)
        .def_property_readonly("total_count", &ttab::MabLedger::total_count)
        .def("pull_count", &ttab::MabLedger::pull_count, py::arg("arm"))
        .def("mean_reward", &ttab::MabLedger::mean_reward, py::arg("arm"))
        .def("ucb_index", &ttab::MabLedger::ucb_index, py::arg("arm"))
        .def("select_arm", &ttab::MabLedger::select_arm)
        .def("update_binary", &ttab::MabLedger::update_binary, py::arg("arm"),
             py::arg("rewards"))
        .def("best_arm", &ttab::MabLedger::best_arm);

    py::class_<ttab::PairId>(m, "PairId")
        .def(py::init([](int i, int j) {
                 return ttab::PairId{i, j};
             }),
             py::arg("i"), py::arg("j"))
        .def_readwrite("i", &ttab::PairId::i)
        .def_readwrite("j", &ttab::PairId::j);

    py::class_<ttab::DuelLedger>(m, "DuelLedger")
        .def(py::init<int, bool>(), py::arg("num_arms"),
             py::arg("accumulate_total") = true)
        .def_property_readonly("num_arms", &ttab::DuelLedger::num_arms)
        .def_property_readonly("total_count", &ttab::DuelLedger::total_count)
        .def("mean_duel_reward", &ttab::DuelLedger::mean_duel_reward, py::arg("arm"))
        .def("pair_count", &ttab::DuelLedger::pair_count, py::arg("i"), py::arg("j"))
        .def("arm_duel_count", &ttab::DuelLedger::arm_duel_count, py::arg("arm"))
        .def("co_ucb_index", &ttab::DuelLedger::co_ucb_index, py::arg("pair"))
        .def("select_pair", &ttab::DuelLedger::select_pair)
        .def("update_pair", &ttab::DuelLedger::update_pair, py::arg("pair"),
             py::arg("rewards_i"), py::arg("rewards_j"))
        .def("best_model", &ttab::DuelLedger::best_model)
        .def("check_consistency", &ttab::DuelLedger::check_consistency,
             py::arg("rel_tol") = 1e-9);

    m.def("span_f1", &ttab::span_f1, py::arg("pred"), py::arg("gold"));
    m.def("exact_match_reward", &ttab::exact_match_reward, py::arg("pred"),
          py::arg("gold"));
    m.def("make_preference", &ttab::make_preference, py::arg("f1_first"),
          py::arg("f1_second"));
    m.def("preference_to_rewards", &ttab::preference_to_rewards, py::arg("label"));
    m.def("apply_noise", &ttab::apply_noise, py::arg("label"), py::arg("channel"),
          py::arg("rng"));
    m.def("combine_predictions", &ttab::combine_predictions, py::arg("pred_i"),
          py::arg("pred_j"), py::arg("reward_i"), py::arg("reward_j"));
    m.def("preference_probability", &ttab::preference_probability, py::arg("skill_i"),
          py::arg("skill_j"), py::arg("perturb_width"), py::arg("passages"),
          py::arg("samples"), py::arg("seed"));
    m.def(
        "estimate_geometry",
        [](const ttab::PassageModel& passages, int perturb_width, long long samples,
           unsigned long long seed) {
            const ttab::GeometryProfile g =
                ttab::estimate_geometry(passages, perturb_width, samples, seed);
            py::dict out;
            out["sub_one_rate"] = g.sub_one_rate;
            out["tie_rate"] = g.tie_rate;
            out["mean_f1"] = g.mean_f1;
            return out;
        },
        py::arg("passages"), py::arg("perturb_width"), py::arg("samples"),
        py::arg("seed"));
    m.def("run_from_json", &run_from_json, py::arg("config_json"),
          "Run one experiment from a JSON config string; returns summary JSON "
          "plus the rendered CSV bodies.");
}
