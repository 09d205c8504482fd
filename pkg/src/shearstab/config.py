"""Run configuration: flat key=value files with field-level validation."""

from dataclasses import dataclass, field, fields

import numpy as np


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    nu: float = 1e-3
    mach: float = 0.3
    lam: float = 0.0            # bulk viscosity ratio
    torus_len: float = 0.01    # L
    s: float = 4.0              # profile decay rate
    gamma: float = 1.4          # pressure law exponent
    profile: str = "tanh"

    grid_n: int = 200
    y_max: float = 30.0
    mapping: str = "stretched"
    stretch: float = 4.0

    n_max: int = 16

    # regime thresholds in alpha*eps^(1/3)
    kappa0: float = 0.8
    c1: float = 0.5
    c2: float = 3.0
    kappa_hat0: float = 0.4    # high regime begins at 1/kappa_hat0

    tol_res: float = 1e-6
    tol_bc: float = 1e-8
    tol_iter: float = 1e-10
    tol_mass: float = 1e-10
    tol_nl: float = 1e-7

    force_family: str = "gaussian-bump"
    force_amplitude: float = 1e-4
    force_modes: tuple = (1,)
    force_center: float = 2.0
    force_width: float = 1.0
    force_threshold: float = 2e-3   # practical contraction threshold

    sweep_axis: str = "nu"
    sweep_values: tuple = ()

    seed: int = 0
    jobs: int = 1
    out_dir: str = "out"

    @property
    def thresholds(self):
        return {"kappa0": self.kappa0, "c1": self.c1, "c2": self.c2,
                "high": 1.0 / self.kappa_hat0}

    def validate(self):
        errs = []
        if not 0.0 < self.mach < 1.0:
            errs.append("mach: must lie in (0, 1)")
        if self.nu <= 0:
            errs.append("nu: must be positive")
        if self.lam < 0:
            errs.append("lam: must be nonnegative")
        if self.torus_len <= 0:
            errs.append("torus_len: must be positive")
        if self.s <= 3:
            errs.append("s: decay rate must exceed 3")
        if self.grid_n < 16:
            errs.append("grid_n: need at least 16 nodes")
        if self.y_max < 10:
            errs.append("y_max: need at least 10")
        if self.mapping not in ("uniform", "stretched"):
            errs.append("mapping: must be uniform or stretched")
        if self.n_max < 1:
            errs.append("n_max: must be at least 1")
        if not 0 < self.kappa_hat0 <= 1:
            errs.append("kappa_hat0: must lie in (0, 1]")
        if self.kappa0 >= 1.0 / self.kappa_hat0:
            errs.append("kappa0: must be below 1/kappa_hat0 "
                        "(threshold ordering)")
        if not self.c1 <= self.kappa0 and self.c1 > 1 / self.kappa_hat0:
            errs.append("c1: middle window must reach the low/middle split")
        for name in ("tol_res", "tol_bc", "tol_iter", "tol_mass", "tol_nl"):
            if getattr(self, name) <= 0:
                errs.append(f"{name}: must be positive")
        if errs:
            raise ConfigError("; ".join(errs))
        return self

    def build_grid(self):
        from .grid import build_grid
        return build_grid(self.grid_n, self.y_max, self.mapping,
                          self.stretch)

    def build_profile(self):
        from .profiles import make_profile
        return make_profile(self.profile, self.mach, self.s)

    def build_force(self, grid):
        from .data import ExternalForce
        return ExternalForce.from_family(
            self.force_family, grid, self.torus_len,
            amplitude=self.force_amplitude,
            mode_numbers=self.force_modes,
            center=self.force_center, width=self.force_width)


_TUPLE_FIELDS = {"force_modes": int, "sweep_values": float}
_INT_FIELDS = {"grid_n", "n_max", "seed", "jobs"}
_STR_FIELDS = {"mapping", "profile", "force_family", "sweep_axis",
               "out_dir"}


def parse_config(text):
    """Parse flat key=value lines (# comments allowed) into a RunConfig."""
    known = {f.name for f in fields(RunConfig)}
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (t.strip() for t in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            if key in _TUPLE_FIELDS:
                cast = _TUPLE_FIELDS[key]
                kwargs[key] = tuple(cast(v) for v in value.split(",") if v)
            elif key in _INT_FIELDS:
                kwargs[key] = int(value)
            elif key in _STR_FIELDS:
                kwargs[key] = value
            else:
                kwargs[key] = float(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}")
    return RunConfig(**kwargs).validate()


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())
