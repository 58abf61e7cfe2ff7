"""Run configuration: plain key=value files plus flag overrides.

Schema (one `key = value` per line, `#` comments allowed):

    mode          deterministic | randomized | play_the_winner
    matrix        a,b,c,d           (deterministic only)
    pmf_w         p0,p1,...,pk      (randomized only)
    pmf_z         p0,p1,...,pk      (randomized only)
    p1, p2        success rates     (play_the_winner only)
    w0, b0        initial counts
    t_star        stopping time
    replications  ensemble size
    seed          master seed (nonnegative 64-bit integer)
    order_cap     moment order cap N (default 2, max 6)
    output_dir    where CSV/JSON/figures go

Unknown keys are rejected.  pmfs live in the file because they are awkward
on a command line; flags override file values.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .moments import MAX_ORDER
from .rules import EntryDistribution, RandomizedRule, ReplacementRule
from .simulate import SimConfig

_KNOWN_KEYS = {
    "mode", "matrix", "pmf_w", "pmf_z", "p1", "p2",
    "w0", "b0", "t_star", "replications", "seed", "order_cap", "output_dir",
}
_MODES = {"deterministic", "randomized", "play_the_winner"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str
    rule: ReplacementRule | RandomizedRule
    w0: int
    b0: int
    t_star: float
    replications: int
    seed: int
    order_cap: int
    output_dir: Path

    def sim_config(self) -> SimConfig:
        return SimConfig(
            rule=self.rule,
            w0=self.w0,
            b0=self.b0,
            t_star=self.t_star,
            replications=self.replications,
            master_seed=self.seed,
        )

    def echo(self) -> dict:
        """JSON-serializable copy of the effective configuration."""
        out = {
            "mode": self.mode,
            "w0": self.w0,
            "b0": self.b0,
            "t_star": self.t_star,
            "replications": self.replications,
            "seed": self.seed,
            "order_cap": self.order_cap,
            "output_dir": str(self.output_dir),
        }
        if isinstance(self.rule, ReplacementRule):
            out["matrix"] = [self.rule.a, self.rule.b, self.rule.c, self.rule.d]
        else:
            out["pmf_w"] = list(self.rule.dist_w.pmf)
            out["pmf_z"] = list(self.rule.dist_z.pmf)
        return out


def parse_config_text(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


def load_config(path: str | Path, overrides: dict | None = None) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    values = parse_config_text(path.read_text())
    if overrides:
        values.update({k: str(v) for k, v in overrides.items() if v is not None})
    return build_config(values)


def build_config(values: dict[str, str]) -> RunConfig:
    mode = values.get("mode")
    if mode not in _MODES:
        raise ConfigError(f"mode must be one of {sorted(_MODES)}, got {mode!r}")
    try:
        rule = _build_rule(mode, values)
        w0 = int(values.get("w0", "1"))
        b0 = int(values.get("b0", "1"))
        t_star = float(values.get("t_star", "1.0"))
        replications = int(values.get("replications", "1"))
        seed = int(values.get("seed", "0"))
        order_cap = int(values.get("order_cap", "2"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not 1 <= order_cap <= MAX_ORDER:
        raise ConfigError(f"order_cap must be between 1 and {MAX_ORDER}, got {order_cap}")
    return RunConfig(
        mode=mode,
        rule=rule,
        w0=w0,
        b0=b0,
        t_star=t_star,
        replications=replications,
        seed=seed,
        order_cap=order_cap,
        output_dir=Path(values.get("output_dir", ".")),
    )


def _build_rule(mode: str, values: dict[str, str]):
    if mode == "deterministic":
        if "matrix" not in values:
            raise ConfigError("deterministic mode requires matrix = a,b,c,d")
        entries = [int(x) for x in values["matrix"].split(",")]
        if len(entries) != 4:
            raise ConfigError(f"matrix needs 4 entries, got {len(entries)}")
        return ReplacementRule(*entries)
    if mode == "randomized":
        for key in ("pmf_w", "pmf_z"):
            if key not in values:
                raise ConfigError(f"randomized mode requires {key}")
        pmf_w = [float(x) for x in values["pmf_w"].split(",")]
        pmf_z = [float(x) for x in values["pmf_z"].split(",")]
        return RandomizedRule(
            dist_w=EntryDistribution(k=len(pmf_w) - 1, pmf=tuple(pmf_w)),
            dist_z=EntryDistribution(k=len(pmf_z) - 1, pmf=tuple(pmf_z)),
        )
    # play_the_winner
    for key in ("p1", "p2"):
        if key not in values:
            raise ConfigError(f"play_the_winner mode requires {key}")
    return RandomizedRule.play_the_winner(float(values["p1"]), float(values["p2"]))
