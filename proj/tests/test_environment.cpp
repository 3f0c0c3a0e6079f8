#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ttab/environment.hpp"

using ttab::DomainProfile;
using ttab::PassageModel;
using ttab::Rng;
using ttab::SyntheticModel;
using ttab::TaskInstance;
using ttab::TrainingSignal;

TEST_CASE("profile validation") {
    CHECK_NOTHROW(PassageModel{}.validate());
    CHECK_THROWS_AS((PassageModel{0, 50, 1, 8}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PassageModel{10, 5, 1, 8}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PassageModel{10, 50, 0, 8}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PassageModel{10, 50, 6, 5}.validate()), std::invalid_argument);
    // Gold spans must fit into the shortest passage.
    CHECK_THROWS_AS((PassageModel{4, 50, 5, 8}.validate()), std::invalid_argument);

    CHECK_NOTHROW(SyntheticModel{}.validate());
    SyntheticModel bad;
    bad.skill = 1.2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SyntheticModel{};
    bad.perturb_width = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SyntheticModel{};
    bad.capacity = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    DomainProfile profile;
    CHECK_THROWS_AS(profile.validate(), std::invalid_argument);  // no skills
    profile.initial_skills = {0.5, 1.1};
    CHECK_THROWS_AS(profile.validate(), std::invalid_argument);
    profile.initial_skills = {0.5, 0.4};
    profile.batch_size = 0;
    CHECK_THROWS_AS(profile.validate(), std::invalid_argument);
    profile.batch_size = 16;
    CHECK_NOTHROW(profile.validate());
}

TEST_CASE("instances stay inside their passages") {
    const PassageModel passages;
    Rng rng(31);
    bool saw_min_len = false;
    bool saw_max_len = false;
    for (long long id = 0; id < 5000; ++id) {
        const TaskInstance inst = ttab::sample_instance(passages, id, rng);
        REQUIRE(inst.passage_length >= 10);
        REQUIRE(inst.passage_length <= 50);
        REQUIRE(inst.gold.start >= 0);
        REQUIRE(inst.gold.start <= inst.gold.end);
        REQUIRE(inst.gold.end < inst.passage_length);
        const int gold_len = inst.gold.end - inst.gold.start + 1;
        REQUIRE(gold_len >= 1);
        REQUIRE(gold_len <= 8);
        CHECK(inst.instance_id == id);
        saw_min_len = saw_min_len || inst.passage_length == 10;
        saw_max_len = saw_max_len || inst.passage_length == 50;
    }
    CHECK(saw_min_len);
    CHECK(saw_max_len);
}

TEST_CASE("gold length bounds are honored, including cramped passages") {
    Rng rng(32);
    const PassageModel wide{10, 50, 5, 8};
    for (long long id = 0; id < 2000; ++id) {
        const TaskInstance inst = ttab::sample_instance(wide, id, rng);
        REQUIRE(inst.gold.end - inst.gold.start + 1 >= 5);
        REQUIRE(inst.gold.end - inst.gold.start + 1 <= 8);
    }
    // Passages of 3 tokens cannot host the nominal 8-token maximum.
    const PassageModel cramped{3, 3, 1, 8};
    for (long long id = 0; id < 500; ++id) {
        const TaskInstance inst = ttab::sample_instance(cramped, id, rng);
        REQUIRE(inst.gold.end - inst.gold.start + 1 <= 3);
    }
}

TEST_CASE("instance sampling draw order is locked") {
    // Passage length, then gold length, then gold start. Changing this order
    // silently re-shuffles every downstream stream, so it is pinned here.
    Rng a(9);
    const TaskInstance inst = ttab::sample_instance(PassageModel{}, 4, a);
    Rng b(9);
    const int length = b.uniform_int(10, 50);
    const int gold_len = b.uniform_int(1, std::min(8, length));
    const int gold_start = b.uniform_int(0, length - gold_len);
    CHECK(inst.passage_length == length);
    CHECK(inst.gold.start == gold_start);
    CHECK(inst.gold.end == gold_start + gold_len - 1);
}

TEST_CASE("a perfect model always emits the annotation") {
    SyntheticModel model;
    model.skill = 1.0;
    Rng rng(17);
    const PassageModel passages;
    for (long long id = 0; id < 2000; ++id) {
        const TaskInstance inst = ttab::sample_instance(passages, id, rng);
        const ttab::SpanPrediction pred = ttab::predict(model, inst, rng);
        REQUIRE(pred.start == inst.gold.start);
        REQUIRE(pred.end == inst.gold.end);
    }
}

TEST_CASE("a missing model emits valid spans near the annotation") {
    SyntheticModel model;
    model.skill = 0.0;
    model.perturb_width = 3;
    Rng rng(18);
    const PassageModel passages;
    for (long long id = 0; id < 2000; ++id) {
        const TaskInstance inst = ttab::sample_instance(passages, id, rng);
        const ttab::SpanPrediction pred = ttab::predict(model, inst, rng);
        REQUIRE(pred.start >= 0);
        REQUIRE(pred.start <= pred.end);
        REQUIRE(pred.end < inst.passage_length);
        // Each endpoint moved at most perturb_width before clipping, so the
        // prediction cannot drift further than that from the annotation.
        CHECK(std::abs(pred.start - inst.gold.start) <= 3 + 3);
        CHECK(std::abs(pred.end - inst.gold.end) <= 3 + 3);
    }
}

TEST_CASE("prediction consumes one draw on a hit and five on a miss") {
    const PassageModel passages;
    SyntheticModel hit;
    hit.skill = 1.0;
    Rng a(21);
    Rng a_twin(21);
    const TaskInstance inst_a = ttab::sample_instance(passages, 0, a);
    (void)ttab::sample_instance(passages, 0, a_twin);
    (void)ttab::predict(hit, inst_a, a);
    a_twin.uniform();  // the skill draw
    CHECK(a.next_u64() == a_twin.next_u64());

    SyntheticModel miss;
    miss.skill = 0.0;
    Rng b(22);
    Rng b_twin(22);
    const TaskInstance inst_b = ttab::sample_instance(passages, 0, b);
    (void)ttab::sample_instance(passages, 0, b_twin);
    (void)ttab::predict(miss, inst_b, b);
    b_twin.uniform();           // skill draw
    b_twin.uniform_int(1, 3);   // start offset
    b_twin.bernoulli(0.5);      // start direction
    b_twin.uniform_int(1, 3);   // end offset
    b_twin.bernoulli(0.5);      // end direction
    CHECK(b.next_u64() == b_twin.next_u64());
}

TEST_CASE("top-2 read-out degrades the second candidate") {
    SyntheticModel model;
    model.skill = 1.0;
    model.top2_degradation = 0.5;
    Rng rng(23);
    const PassageModel passages;
    int second_hits = 0;
    const int trials = 4000;
    for (long long id = 0; id < trials; ++id) {
        const TaskInstance inst = ttab::sample_instance(passages, id, rng);
        const auto [first, second] = ttab::predict_top2(model, inst, rng);
        REQUIRE(first.start == inst.gold.start);
        REQUIRE(first.end == inst.gold.end);
        second_hits += second.start == inst.gold.start && second.end == inst.gold.end;
    }
    // The second candidate runs at half skill; misses can still reassemble
    // the annotation, so the hit rate sits slightly above one half.
    CHECK(static_cast<double>(second_hits) / trials > 0.45);
    CHECK(static_cast<double>(second_hits) / trials < 0.60);
}

TEST_CASE("count-driven update moves skill by the rewarded fraction") {
    SyntheticModel model;
    model.skill = 0.5;
    model.learning_gain = 0.01;
    ttab::adapt(model, 8, 16);
    CHECK(model.skill == doctest::Approx(0.5025).epsilon(1e-14));
    ttab::adapt(model, 0, 16);
    CHECK(model.skill == doctest::Approx(0.5025).epsilon(1e-14));
    model.skill = 1.0;
    ttab::adapt(model, 16, 16);
    CHECK(model.skill == 1.0);
    CHECK_THROWS_AS(ttab::adapt(model, 17, 16), std::invalid_argument);
    CHECK_THROWS_AS(ttab::adapt(model, -1, 16), std::invalid_argument);
    CHECK_THROWS_AS(ttab::adapt(model, 0, 0), std::invalid_argument);
}

TEST_CASE("collaborative count updates route by mode") {
    SyntheticModel mi;
    mi.skill = 0.5;
    SyntheticModel mj;
    mj.skill = 0.4;
    const std::vector<int> ri = {1, 0, 0, 1};
    const std::vector<int> rj = {0, 1, 0, 0};

    SyntheticModel share_i = mi;
    SyntheticModel share_j = mj;
    ttab::collaborative_adapt(share_i, share_j, ri, rj, 4,
                              ttab::CollabMode::kShareNonTies);
    // Three decided instances train both sides.
    CHECK(share_i.skill == doctest::Approx(0.5 + 0.01 * 0.75 * 0.5).epsilon(1e-14));
    CHECK(share_j.skill == doctest::Approx(0.4 + 0.01 * 0.75 * 0.6).epsilon(1e-14));

    SyntheticModel own_i = mi;
    SyntheticModel own_j = mj;
    ttab::collaborative_adapt(own_i, own_j, ri, rj, 4,
                              ttab::CollabMode::kOwnWinsOnly);
    CHECK(own_i.skill == doctest::Approx(0.5 + 0.01 * 0.5 * 0.5).epsilon(1e-14));
    CHECK(own_j.skill == doctest::Approx(0.4 + 0.01 * 0.25 * 0.6).epsilon(1e-14));

    CHECK_THROWS_AS(ttab::collaborative_adapt(own_i, own_j, {1}, {1}, 1,
                                              ttab::CollabMode::kShareNonTies),
                    std::invalid_argument);
    CHECK_THROWS_AS(ttab::collaborative_adapt(own_i, own_j, {1, 0}, {0}, 2,
                                              ttab::CollabMode::kShareNonTies),
                    std::invalid_argument);
}

TEST_CASE("quality-driven training moves skill toward quality * capacity") {
    SyntheticModel model;
    model.skill = 0.5;
    model.learning_gain = 0.01;
    model.capacity = 0.75;
    model.self_efficiency = 0.025;

    SUBCASE("one perfect self label") {
        ttab::train(model, {{1.0, true}}, 16);
        CHECK(model.skill == doctest::Approx(0.50000390625).epsilon(1e-14));
    }
    SUBCASE("shared labels outweigh self labels") {
        SyntheticModel self_trained = model;
        SyntheticModel shared_trained = model;
        ttab::train(self_trained, {{0.9, true}}, 16);
        ttab::train(shared_trained, {{0.9, false}}, 16);
        CHECK(shared_trained.skill > self_trained.skill);
        CHECK(self_trained.skill > model.skill);
    }
    SUBCASE("poor labels degrade the model") {
        ttab::train(model, {{0.0, false}}, 16);
        CHECK(model.skill < 0.5);
    }
    SUBCASE("a model at its target no longer moves") {
        model.skill = 0.75;
        ttab::train(model, {{1.0, false}}, 16);
        CHECK(model.skill == 0.75);
    }
    SUBCASE("skill saturates strictly below capacity") {
        std::vector<TrainingSignal> batch(16, TrainingSignal{1.0, false});
        for (int i = 0; i < 20000; ++i) {
            ttab::train(model, batch, 16);
        }
        CHECK(model.skill > 0.74);
        CHECK(model.skill < 0.75);
    }
    SUBCASE("better labels move skill further") {
        SyntheticModel low = model;
        SyntheticModel high = model;
        ttab::train(low, {{0.6, false}}, 16);
        ttab::train(high, {{0.8, false}}, 16);
        CHECK(high.skill > low.skill);
    }
    SUBCASE("skill never leaves the unit interval") {
        model.skill = 0.0001;
        model.learning_gain = 1.0;
        model.self_efficiency = 1.0;
        for (int i = 0; i < 200; ++i) {
            ttab::train(model, {{0.0, true}}, 1);
        }
        CHECK(model.skill >= 0.0);
        CHECK(model.skill < 0.0001);
    }
    SUBCASE("signal validation") {
        CHECK_THROWS_AS(ttab::train(model, {{1.5, true}}, 16), std::invalid_argument);
        CHECK_THROWS_AS(ttab::train(model, {{-0.1, true}}, 16), std::invalid_argument);
        std::vector<TrainingSignal> too_many(17, TrainingSignal{1.0, true});
        CHECK_THROWS_AS(ttab::train(model, too_many, 16), std::invalid_argument);
        CHECK_THROWS_AS(ttab::train(model, {{1.0, true}}, 0), std::invalid_argument);
    }
}

TEST_CASE("an empty training batch is a no-op") {
    SyntheticModel model;
    model.skill = 0.42;
    ttab::train(model, {}, 16);
    CHECK(model.skill == 0.42);
}
