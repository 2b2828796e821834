"""Small report records shared by the checking operations."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """Outcome of comparing two sides of an inequality ``lhs <= rhs``.

    ``exact`` is False when ``rhs`` rests on a sampled estimate of a
    supremum; such checks are reported but should not be asserted.
    """

    lhs: float
    rhs: float
    holds: bool
    exact: bool = True
    detail: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def ratio(self) -> float:
        """Relative excess ``(lhs - rhs) / max(rhs, 1e-12)``; positive means violated."""
        return (self.lhs - self.rhs) / max(self.rhs, 1e-12)

    def to_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "exact": self.exact,
                "slack": self.slack, **self.detail}
