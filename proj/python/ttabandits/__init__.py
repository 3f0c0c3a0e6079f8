"""Bandit-driven source selection over synthetic span extraction."""

from ._core import (
    DuelLedger,
    GoldSpan,
    MabLedger,
    NoiseChannel,
    PairId,
    PassageModel,
    PreferenceLabel,
    Rng,
    SpanPrediction,
    apply_noise,
    combine_predictions,
    estimate_geometry,
    exact_match_reward,
    make_preference,
    preference_probability,
    preference_to_rewards,
    run_from_json,
    span_f1,
)

__all__ = [
    "DuelLedger",
    "GoldSpan",
    "MabLedger",
    "NoiseChannel",
    "PairId",
    "PassageModel",
    "PreferenceLabel",
    "Rng",
    "SpanPrediction",
    "apply_noise",
    "combine_predictions",
    "estimate_geometry",
    "exact_match_reward",
    "make_preference",
    "preference_probability",
    "preference_to_rewards",
    "run_from_json",
    "span_f1",
]
