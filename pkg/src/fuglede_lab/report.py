"""Per-instance verdict record shared by every implication check."""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .matrix import matrix_from_dict, matrix_to_dict

__all__ = ["Verdict", "Tolerances", "ImplicationReport", "judge"]

DEFAULT_HYPOTHESIS_TOL = 1e-8
DEFAULT_CONCLUSION_TOL = 1e-7


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    VACUOUS = "VACUOUS"


@dataclass(frozen=True)
class Tolerances:
    hypothesis: float = DEFAULT_HYPOTHESIS_TOL
    conclusion: float = DEFAULT_CONCLUSION_TOL

    def __post_init__(self):
        if not (self.hypothesis > 0 and self.conclusion > 0):
            raise ValueError(f"tolerances must be positive, got {self}")


@dataclass(frozen=True)
class ImplicationReport:
    """Outcome of testing one ``hypothesis => conclusion`` instance.

    An instance whose hypothesis residual exceeds its tolerance is VACUOUS:
    the implication says nothing about it. FAIL means the hypothesis held
    and the conclusion did not; FAIL reports keep a witness matrix.
    """

    instance_id: str
    check: str
    hypothesis_residual: float
    conclusion_residual: float
    hypothesis_tol: float
    conclusion_tol: float
    verdict: Verdict
    witness: Optional[np.ndarray] = None

    def to_dict(self):
        return {
            "instance_id": self.instance_id,
            "check": self.check,
            "hypothesis_residual": self.hypothesis_residual,
            "conclusion_residual": self.conclusion_residual,
            "hypothesis_tol": self.hypothesis_tol,
            "conclusion_tol": self.conclusion_tol,
            "verdict": self.verdict.value,
            "witness": None if self.witness is None else matrix_to_dict(self.witness),
        }

    @classmethod
    def from_dict(cls, obj):
        w = obj.get("witness")
        return cls(
            instance_id=obj["instance_id"],
            check=obj["check"],
            hypothesis_residual=float(obj["hypothesis_residual"]),
            conclusion_residual=float(obj["conclusion_residual"]),
            hypothesis_tol=float(obj["hypothesis_tol"]),
            conclusion_tol=float(obj["conclusion_tol"]),
            verdict=Verdict(obj["verdict"]),
            witness=None if w is None else matrix_from_dict(w),
        )

    def __eq__(self, other):
        if not isinstance(other, ImplicationReport):
            return NotImplemented
        same_witness = (
            (self.witness is None and other.witness is None)
            or (self.witness is not None and other.witness is not None
                and self.witness.shape == other.witness.shape
                and np.array_equal(self.witness, other.witness)))
        return same_witness and all(
            getattr(self, f) == getattr(other, f)
            for f in ("instance_id", "check", "hypothesis_residual",
                      "conclusion_residual", "hypothesis_tol",
                      "conclusion_tol", "verdict"))

    __hash__ = None


def judge(check, hypothesis_residual, conclusion_residual, tols,
          witness=None, instance_id=""):
    """Build an :class:`ImplicationReport` from two residuals."""
    if hypothesis_residual > tols.hypothesis:
        verdict = Verdict.VACUOUS
    elif conclusion_residual > tols.conclusion:
        verdict = Verdict.FAIL
    else:
        verdict = Verdict.PASS
    return ImplicationReport(
        instance_id=instance_id,
        check=check,
        hypothesis_residual=float(hypothesis_residual),
        conclusion_residual=float(conclusion_residual),
        hypothesis_tol=float(tols.hypothesis),
        conclusion_tol=float(tols.conclusion),
        verdict=verdict,
        witness=np.array(witness, dtype=np.complex128) if verdict is Verdict.FAIL and witness is not None else None,
    )
