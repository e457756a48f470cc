"""Named verification outcomes and their JSON form."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, is_dataclass
import json
import math
from typing import Any

import numpy as np

PASSED = "passed"
FAILED = "failed"
VACUOUS = "vacuous"


@dataclass
class Check:
    """One named property check.

    ``margin`` is the worst slack seen (non-negative means the property held
    with room to spare). ``status`` is ``"vacuous"`` when the check held only
    because its bound was too large to carry information.
    """

    name: str
    anchor: str
    passed: bool
    margin: float
    params: dict = field(default_factory=dict)
    witness: Any = None
    details: dict = field(default_factory=dict)
    status: str = ""
    group: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)
        if not self.status:
            self.status = PASSED if self.passed else FAILED


@dataclass
class VerifyReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, checks) -> None:
        self.checks.extend(checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def groups(self) -> dict:
        """Checks keyed by their ``group`` tag, in first-seen order."""
        out: dict = {}
        for c in self.checks:
            out.setdefault(c.group, []).append(c)
        return out

    def to_dict(self) -> dict:
        return {"pass": self.passed, "checks": [to_jsonable(c) for c in self.checks]}


def to_jsonable(obj):
    """Recursively convert reports, numpy values and complex numbers for JSON.

    Complex numbers become ``[re, im]`` pairs; non-finite floats become strings.
    """
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: to_jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [_num(obj.real), _num(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def _num(x):
    x = float(x)
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False) + "\n"
