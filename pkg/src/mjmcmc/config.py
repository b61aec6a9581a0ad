"""Run configuration: validation, JSON files and the lock format."""

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .schedules import parse_schedule

MODEL_KINDS = ("toy", "ggm", "ising", "bvs")
SAMPLERS = ("mj", "bd", "mh")
LOCK_FORMAT = 1


@dataclass
class RunConfig:
    model: str = "ggm"
    data: str = None
    response_column: int = 0     # bvs: column of the data file holding y
    truth: str = None
    sampler: str = "mj"
    eps: str = "constant:0.3"
    iterations: int = 1000
    seed: int = 0
    burn_in: float = 0.25
    max_jump: float = None
    max_jump_iterations: int = 5
    rho: float = 0.5
    g: float = None
    ebic_gamma: float = 0.0
    out: str = "mjmcmc-out"
    checkpoint_interval: int = 1000

    def __post_init__(self):
        self.validate()

    # -- validation ----------------------------------------------------------
    def validate(self):
        def fail(name, msg):
            raise ConfigError(f"{name}: {msg}")

        if self.model not in MODEL_KINDS:
            fail("model", f"{self.model!r} is not one of {MODEL_KINDS}")
        if self.sampler not in SAMPLERS:
            fail("sampler", f"{self.sampler!r} is not one of {SAMPLERS}")
        try:
            schedule = parse_schedule(self.eps)
        except ConfigError as exc:
            fail("eps", str(exc))
        if self.sampler == "mh" and not schedule.homogeneous:
            fail("eps", "the corrected sampler needs a constant schedule")
        self.eps = schedule.spec_string()
        for name in ("iterations", "seed", "max_jump_iterations", "checkpoint_interval",
                     "response_column"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                if isinstance(value, float) and value.is_integer():
                    setattr(self, name, int(value))
                else:
                    fail(name, f"expected an integer, got {value!r}")
        if self.iterations < 1:
            fail("iterations", f"must be >= 1, got {self.iterations}")
        if self.seed < 0:
            fail("seed", f"must be >= 0, got {self.seed}")
        if self.max_jump_iterations < 0:
            fail("max_jump_iterations", "must be >= 0")
        if self.checkpoint_interval < 1:
            fail("checkpoint_interval", "must be >= 1")
        if self.response_column < 0:
            fail("response_column", "must be >= 0")
        for name, lo, hi, lo_open, hi_open in (
            ("burn_in", 0.0, 1.0, False, True),
            ("rho", 0.0, 1.0, True, True),
        ):
            v = self._float(name)
            if not ((v > lo if lo_open else v >= lo) and (v < hi if hi_open else v <= hi)):
                fail(name, f"must lie in {'(' if lo_open else '['}{lo}, {hi}"
                           f"{')' if hi_open else ']'}, got {v}")
        if self.max_jump is not None:
            r = self._float("max_jump")
            if not 0.0 < r <= 1.0:
                fail("max_jump", f"must lie in (0, 1], got {r}")
        if self.g is not None and self._float("g") <= 0:
            fail("g", f"must be positive, got {self.g}")
        if self._float("ebic_gamma") < 0:
            fail("ebic_gamma", f"must be >= 0, got {self.ebic_gamma}")
        if self.model != "bvs" and self.g is not None:
            fail("g", "only applies to the bvs model")
        if self.model != "ising" and self.ebic_gamma:
            fail("ebic_gamma", "only applies to the ising model")
        return self

    def _float(self, name):
        value = getattr(self, name)
        if isinstance(value, bool):
            raise ConfigError(f"{name}: expected a number, got {value!r}")
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{name}: expected a number, got {value!r}") from None
        if not math.isfinite(value):
            raise ConfigError(f"{name}: must be finite, got {value}")
        setattr(self, name, value)
        return value

    # -- serialization -------------------------------------------------------
    def to_dict(self):
        return asdict(self)

    def canonical(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def lock_text(self, version=None):
        from . import __version__

        lock = {"config": self.to_dict(), "seed": self.seed,
                "version": version or __version__, "format": LOCK_FORMAT}
        return json.dumps(lock, sort_keys=True, indent=2) + "\n"

    @property
    def schedule(self):
        return parse_schedule(self.eps)


FIELD_NAMES = tuple(f.name for f in fields(RunConfig))


def config_from_dict(values):
    unknown = sorted(set(values) - set(FIELD_NAMES))
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    return RunConfig(**values)


def read_config_file(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        values = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(values, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    if "config" in values and "version" in values:  # a lock file
        values = values["config"]
    unknown = sorted(set(values) - set(FIELD_NAMES))
    if unknown:
        raise ConfigError(f"{path}: unknown configuration keys: {', '.join(unknown)}")
    return values


def parse_config(path=None, **flags):
    """Merge a JSON config (or lock) file with flag values; flags win, ``None`` means unset."""
    values = read_config_file(path) if path is not None else {}
    unknown = sorted(set(flags) - set(FIELD_NAMES))
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    values.update({k: v for k, v in flags.items() if v is not None})
    return config_from_dict(values)
