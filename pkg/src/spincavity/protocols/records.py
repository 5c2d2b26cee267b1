"""JSON-lines serialization of protocol records."""
from __future__ import annotations

import json
from typing import Iterable

from .bsa import BsaOutcome
from .bell import BellState
from .echo import EchoResult
from .link import LinkResult
from .teleport import SwapRecord, TeleportRecord

FIELDS = ("protocol", "mode", "outcome", "probability", "fidelity", "survived")


def _line(protocol, mode, outcome, probability, fidelity, survived) -> str:
    obj = dict(zip(FIELDS, (protocol, mode, outcome, probability, fidelity, survived)))
    # json floats are written with repr(), i.e. shortest round-trip decimal
    return json.dumps(obj, allow_nan=True)


def teleport_lines(records: Iterable[TeleportRecord]) -> list[str]:
    return [_line(r.protocol, r.mode, ",".join(r.outcome), r.probability, r.fidelity, r.survived)
            for r in records]


def swap_lines(records: Iterable[SwapRecord]) -> list[str]:
    lines = []
    for r in records:
        outcome = ",".join(r.outcome)
        if r.bell is not None:
            outcome += "=>" + r.bell.value
        lines.append(_line(r.protocol, r.mode, outcome, r.probability, r.overlap, r.survived))
    return lines


def bsa_lines(protocol: str, mode: str, prepared: BellState, outcomes: Iterable[BsaOutcome]) -> list[str]:
    """Fidelity is 1.0 when the inferred Bell state equals the prepared one."""
    lines = []
    for o in outcomes:
        if not o.survived:
            lines.append(_line(protocol, mode, f"{prepared.value}:lost", o.probability, None, False))
            continue
        outcome = f"{prepared.value}:" + ",".join(o.symbols)
        outcome += "=>" + (o.inferred.value if o.inferred else "?")
        lines.append(_line(protocol, mode, outcome, o.probability, float(o.inferred is prepared), True))
    return lines


def echo_lines(result: EchoResult, echo: bool) -> list[str]:
    return [_line("echo", "echo" if echo else "free", "coherence", 1.0, result.coherence, True)]


def link_lines(result: LinkResult) -> list[str]:
    return [
        _line("link", "memory", "success", result.memory_rate, result.mean_f_prime, True),
        _line("link", "coincidence", "success", result.coincidence_rate, 1.0, True),
    ]
