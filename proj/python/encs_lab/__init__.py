"""Expected net cost savings (ENCS) of LLM-assisted customer service agents."""

from ._core import (
    ActionSavings,
    ActionTimings,
    AgentEconomics,
    EncsError,
    EncsResult,
    LinearModel,
    RuPrediction,
    SimulationResult,
    UsageDistribution,
    annualize,
    average_assisted_time,
    encs,
    encs_simple,
    evaluate_preset,
    evaluate_scenario,
    fleiss_kappa,
    gpu_hourly_rate,
    handle_request,
    iqr_filter,
    list_presets,
    messages_to_break_even,
    ols_fit,
    pearson_r,
    per_action_savings,
    perplexity,
    perplexity_from_logprobs,
    predict_ru,
    predict_ru_preset,
    preset_version,
    scenario_json,
    self_hosted_cost_per_inference,
    simulate_encs,
    time_to_break_even,
)

__all__ = [name for name in dir() if not name.startswith("_")]
