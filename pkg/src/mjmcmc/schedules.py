"""Step-size sequences for the multiple jump sampler."""

import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, ScheduleExhaustedError

KINDS = ("constant", "slow", "fast", "table")
_ALIASES = {"slow-decay": "slow", "fast-decay": "fast", "const": "constant"}


@dataclass(frozen=True)
class EpsilonSchedule:
    """A lazily evaluated sequence eps_1, eps_2, ...

    ``slow`` is ``base / log10(s + 9)`` and ``fast`` is
    ``base * (1 / (s * log2(s + 1))) ** 0.4``. Both start at ``base``.
    """

    kind: str = "constant"
    base: float = 0.3
    table: tuple = field(default=())
    source: str = ""

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise ConfigError(f"unknown schedule kind {self.kind!r}; expected one of {KINDS}")
        if kind == "table":
            table = tuple(float(v) for v in self.table)
            if not table:
                raise ConfigError("table schedule needs at least one value")
            for s, v in enumerate(table, start=1):
                if not 0.0 < v < 1.0:
                    raise ConfigError(f"table entry {s} = {v} outside eps in (0,1)")
            object.__setattr__(self, "table", table)
        elif not 0.0 < self.base < 1.0:
            raise ConfigError(f"schedule base {self.base} outside eps in (0,1)")

    def __call__(self, s):
        return evaluate_schedule(self, s)

    @property
    def homogeneous(self):
        return self.kind == "constant"

    def spec_string(self):
        if self.kind == "table":
            return f"table:{self.source}" if self.source else "table:" + ",".join(map(repr, self.table))
        return f"{self.kind}:{self.base!r}"


def evaluate_schedule(schedule, s):
    if s < 1:
        raise ValueError("schedule index s must be >= 1")
    kind = schedule.kind
    if kind == "constant":
        return schedule.base
    if kind == "slow":
        return schedule.base / math.log10(s + 9)
    if kind == "fast":
        return schedule.base * (1.0 / (s * math.log2(s + 1))) ** 0.4
    if s > len(schedule.table):
        raise ScheduleExhaustedError(
            f"table schedule has {len(schedule.table)} entries, asked for s={s}"
        )
    return schedule.table[s - 1]


def parse_schedule(text):
    """Parse ``constant:0.3``, ``slow:0.3``, ``fast:0.3`` or ``table:<path|v1,v2,...>``."""
    kind, sep, arg = str(text).partition(":")
    kind = _ALIASES.get(kind.strip(), kind.strip())
    if not sep or kind not in KINDS:
        raise ConfigError(f"cannot parse schedule {text!r}; use kind:value with kind in {KINDS}")
    if kind == "table":
        path = Path(arg)
        if path.is_file():
            values = [float(tok) for tok in path.read_text().replace(",", " ").split()]
            return EpsilonSchedule("table", table=tuple(values), source=arg)
        try:
            values = [float(tok) for tok in arg.split(",") if tok.strip()]
        except ValueError:
            raise ConfigError(f"schedule table file not found: {arg}") from None
        return EpsilonSchedule("table", table=tuple(values))
    try:
        base = float(arg)
    except ValueError:
        raise ConfigError(f"schedule value {arg!r} is not a number") from None
    if not 0.0 < base < 1.0:
        raise ConfigError(f"eps must lie in (0,1), got {base}")
    return EpsilonSchedule(kind, base)
