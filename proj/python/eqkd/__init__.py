"""Entanglement-based QKD simulator."""

import json

from ._core import (
    Basis,
    BasisPolicy,
    EqkdError,
    EveKind,
    EveStrategy,
    Protocol,
    ResendPolicy,
    SessionConfig,
    efficiency_qubits,
    efficiency_total,
    exact_qber_oracle,
    han_attack_demo,
    verify_identities,
)


def run(config=None, accounting="as-run", **fields):
    """Run one session and return the report as a dict.

    Keyword fields override attributes of a copy of ``config`` (defaults when
    omitted), e.g. ``run(protocol=Protocol.P1, seed=7)``.
    """
    from . import _core

    cfg = SessionConfig(config) if config is not None else SessionConfig()
    for name, value in fields.items():
        if not hasattr(cfg, name):
            raise TypeError(f"unknown session field: {name}")
        setattr(cfg, name, value)
    return json.loads(_core.run_report_json(cfg, accounting))


__all__ = [
    "Basis",
    "BasisPolicy",
    "EqkdError",
    "EveKind",
    "EveStrategy",
    "Protocol",
    "ResendPolicy",
    "SessionConfig",
    "efficiency_qubits",
    "efficiency_total",
    "exact_qber_oracle",
    "han_attack_demo",
    "run",
    "verify_identities",
]
