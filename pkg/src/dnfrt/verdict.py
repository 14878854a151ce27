"""Accept/Reject outcomes shared by every stage of the tester."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Reject:
    """A normal rejecting outcome; ``reason`` names the phase that fired."""

    reason: str
    detail: dict = field(default_factory=dict, compare=False)

    def __bool__(self) -> bool:
        return False


class GlobalReject(Exception):
    """Raised by a simulator that must halt the enclosing tester with Reject."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass
class Verdict:
    accept: bool
    reason: str
    r_vector: list = field(default_factory=list)
    query_report: dict = field(default_factory=dict)
    seed: int | None = None
    params_provenance: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.accept

    def to_json(self) -> dict:
        return {
            "accept": self.accept,
            "reason": self.reason,
            "r_vector": list(self.r_vector),
            "query_report": self.query_report,
            "seed": self.seed,
            "params_provenance": self.params_provenance,
        }
