"""Experiment configuration: flat ``key = value`` files with validated defaults."""
from dataclasses import dataclass, fields, asdict
import hashlib
import math
from pathlib import Path

from .kernels import KernelParams


def _floats(s):
    return tuple(float(v) for v in s.replace(",", " ").split())


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """All experiment knobs.  See README for the meaning of each key."""

    epsilon_sweep: tuple = (0.2, 0.1, 0.05)
    gamma: float = 0.05
    kappa: float = 0.1
    nu: float = 1.0
    delta: float = 0.5
    T_slow: float = 1.0
    t_eps_factor: float = 1.0
    n_replicas: int = 64
    n_modes: int = 0            # 0: derived from k_max and the slow period
    k_max: float = 0.0          # 0: min(2/eps, 64)
    n_steps: int = 0            # 0: one exact step per snapshot interval
    snapshots: int = 32
    L_max: float = 8.0
    fast_dx: float = 0.1
    seed: int = 20240611
    noise: float = 1.0          # multiplies the white-noise intensity
    # full approximation
    a_det: str = "gaussian"
    use_a_st: bool = True
    e_profile: str = "sin_weighted"
    # kernel norms
    kernel_gamma: float = 0.01
    kernel_sweep: tuple = (0.2, 0.1, 0.05, 0.025)
    # L-probe
    probe_epsilon: float = 1e-3
    probe_replicas: int = 192
    probe_period: float = 128.0
    l_list: tuple = (4.0, 8.0, 16.0, 32.0)
    # semigroup probe
    t_list: tuple = (0.0, 0.1, 1.0, 10.0, 100.0)
    n_fields: int = 32
    # variance check
    variance_epsilon: float = 0.1
    variance_delta_k: float = 0.05
    variance_replicas: int = 4096
    # covariance checks
    cov_replicas: int = 10000

    def __post_init__(self):
        for name in ("epsilon_sweep", "kernel_sweep", "l_list", "t_list"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        _validate(self)

    def kernel_params(self, epsilon):
        return KernelParams(epsilon, nu=self.nu, delta=self.delta, T_slow=self.T_slow,
                            t_eps_factor=self.t_eps_factor)

    def with_(self, **changes):
        d = asdict(self)
        d.update(changes)
        return ExperimentConfig(**d)

    def canonical(self):
        """Stable text form used for hashing."""
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(repr(float(x)) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name}={v}")
        return "\n".join(lines)

    def hash(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def _require(ok, key, msg):
    if not ok:
        raise ValueError(f"{key} {msg}")


def _validate(c):
    sw = c.epsilon_sweep
    _require(len(sw) >= 1 and all(0 < e < 1 for e in sw), "epsilon_sweep", "values out of range (0, 1)")
    _require(all(a > b for a, b in zip(sw, sw[1:])), "epsilon_sweep", "must be strictly decreasing")
    ks = c.kernel_sweep
    _require(len(ks) >= 1 and all(0 < e < 1 for e in ks), "kernel_sweep", "values out of range (0, 1)")
    _require(all(a > b for a, b in zip(ks, ks[1:])), "kernel_sweep", "must be strictly decreasing")
    _require(0 < c.gamma < 0.5, "gamma", "out of range (0, 0.5)")
    _require(0 <= c.kernel_gamma < 0.25, "kernel_gamma", "out of range [0, 0.25)")
    _require(0 < c.kappa < 1, "kappa", "out of range (0, 1)")
    _require(abs(c.nu) <= 1, "nu", "out of range [-1, 1]")
    _require(0 < c.delta < 1, "delta", "out of range (0, 1)")
    _require(c.T_slow > 0, "T_slow", "must be positive")
    _require(c.t_eps_factor > 0, "t_eps_factor", "must be positive")
    for key in ("n_replicas", "snapshots", "probe_replicas", "n_fields", "variance_replicas",
                "cov_replicas"):
        v = getattr(c, key)
        _require(int(v) == v and v >= 1, key, "must be a positive integer")
    _require(int(c.n_modes) == c.n_modes and c.n_modes >= 0 and c.n_modes % 2 == 0,
             "n_modes", "must be 0 (auto) or a positive even integer")
    _require(c.k_max >= 0, "k_max", "must be >= 0")
    _require(int(c.n_steps) == c.n_steps and c.n_steps >= 0, "n_steps", "must be >= 0")
    _require(c.n_steps == 0 or c.n_steps % c.snapshots == 0, "n_steps",
             "must be a multiple of snapshots")
    _require(c.L_max >= 1, "L_max", "must be >= 1")
    _require(0 < c.fast_dx <= 0.1, "fast_dx", "out of range (0, 0.1]")
    _require(int(c.seed) == c.seed and 0 <= c.seed < 2**64, "seed", "must be an unsigned 64-bit integer")
    _require(c.noise >= 0, "noise", "must be >= 0")
    _require(c.a_det in ("gaussian", "zero"), "a_det", "must be 'gaussian' or 'zero'")
    _require(c.e_profile in ("sin_weighted", "zero"), "e_profile", "must be 'sin_weighted' or 'zero'")
    _require(0 < c.probe_epsilon < 1, "probe_epsilon", "out of range (0, 1)")
    _require(c.probe_period > 0, "probe_period", "must be positive")
    ll = c.l_list
    _require(len(ll) >= 4 and all(a < b for a, b in zip(ll, ll[1:])) and ll[0] >= 1,
             "l_list", "must hold >= 4 strictly increasing values >= 1")
    _require(2 * ll[-1] <= c.probe_period, "l_list", "largest L must fit in half the probe period")
    tl = c.t_list
    _require(len(tl) >= 2 and tl[0] >= 0 and all(a < b for a, b in zip(tl, tl[1:])),
             "t_list", "must be >= 2 strictly increasing values >= 0")
    _require(0 < c.variance_epsilon < 1, "variance_epsilon", "out of range (0, 1)")
    _require(c.variance_delta_k > 0, "variance_delta_k", "must be positive")


_PARSERS = {
    tuple: _floats,
    bool: _bool,
    int: lambda s: int(s, 0),
    float: float,
    str: lambda s: s.strip(),
}


def parse_config(path):
    """Read a flat ``key = value`` file (``#`` starts a comment).

    Missing keys take their defaults; unknown and duplicate keys are errors.
    """
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    text = p.read_text(encoding="utf-8")
    return parse_config_text(text, source=str(p))


def parse_config_text(text, source="<string>"):
    types = {f.name: type(getattr(ExperimentConfig(), f.name)) for f in fields(ExperimentConfig)}
    seen = {}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ValueError(f"{source}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ValueError(f"{source}:{lineno}: duplicate key {key!r} (first on line {seen[key]})")
        seen[key] = lineno
        try:
            v = _PARSERS[types[key]](val)
        except ValueError as exc:
            raise ValueError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
        if isinstance(v, float) and not math.isfinite(v):
            raise ValueError(f"{key} must be finite")
        values[key] = v
    return ExperimentConfig(**values)
