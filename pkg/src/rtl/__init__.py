"""Numerics for irreversibility and resource-cost trade-offs of quantum
channels: state/channel primitives, binary discrimination, resource
measures with continuity constants, closed-form cost bounds, and worked
scenarios."""

from .qcore import (
    CompositeSpace,
    Observable,
    State,
    fidelity,
    partial_trace,
    purified_distance,
    rel_entropy,
    tensor,
    trace_norm,
    vn_entropy,
)
from .channels import (
    Channel,
    Implementation,
    Povm,
    Register,
    apply,
    channel_from_implementation,
    compose,
    from_choi,
    stinespring,
    to_choi,
)
from .discrimination import (
    TestEnsemble,
    avg_recovery_error,
    helstrom,
    irreversibility,
    lemma_dilation_gap,
    recovery_from_povm,
)
from .resources import (
    ResourceMeasure,
    channel_gain,
    channel_power,
    d_max_magic,
    gibbs_state,
    m_cos,
    m_em,
)
from .bounds import BoundReport
from .scenarios import SCENARIOS, run_scenario

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "Channel", "CompositeSpace", "Implementation",
    "Observable", "Povm", "Register", "ResourceMeasure", "SCENARIOS",
    "State", "TestEnsemble", "apply", "avg_recovery_error", "channel_gain",
    "channel_from_implementation", "channel_power", "compose", "d_max_magic",
    "fidelity", "from_choi", "gibbs_state", "helstrom", "irreversibility",
    "lemma_dilation_gap", "m_cos", "m_em", "partial_trace",
    "purified_distance", "recovery_from_povm", "rel_entropy", "run_scenario",
    "stinespring", "tensor", "to_choi", "trace_norm", "vn_entropy",
]
