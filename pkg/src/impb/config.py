"""Experiment configuration: a flat dotted-key text file over defaults.

The config file is plain ``key = value`` lines (``#`` comments allowed);
every tunable has a default here and can be overridden without touching
code.  Vector-valued keys are comma-separated.  ``resolve`` turns the flat
mapping into the typed config objects the modules consume, and the fully
resolved mapping is what ``cmd_run`` writes into the manifest.
"""

from dataclasses import dataclass

from .dmp import DmpConfig
from .interest import InterestConfig
from .learner import LearnerConfig
from .memory import PerfConfig
from .world import WorldConfig

DEFAULTS = {
    "dmp.spring": 200.0,
    "dmp.damping": 28.284271247461902,  # critical damping 2*sqrt(spring)
    "dmp.alpha": 8.0,
    "dmp.tau": 1.0,
    "dmp.dt": 0.01,
    "dmp.weight_scale": 20.0,
    "dmp.basis_times": (0.25, 0.5, 0.75),
    "world.grab_radius": 0.1,
    "world.floor_z": -0.2,
    "world.pen_break_z": -0.3,
    "world.arm_init_z": 0.5,
    "world.pen_home": (0.6, 0.0, 0.5),
    "world.joystick1_home": (-0.5, 0.4, 0.3),
    "world.joystick2_home": (0.5, 0.4, 0.3),
    "world.joystick_box_side": 0.4,
    "perf.gamma": 1.2,
    "interest.n_split": 50,
    "interest.n_min": 10,
    "interest.window": 20,
    "interest.n_quantiles": 10,
    "interest.p_exploit": 0.7,
    "interest.p_region": 0.2,
    "interest.p_random": 0.1,
    "interest.cost_policy": 1.0,
    "interest.cost_procedure": 1.0,
    "learner.episodes": 3000,
    "learner.checkpoints": 50,
    "learner.eps_near": 0.1,
    "learner.sigma_policy": 0.05,
    "learner.sigma_procedure": 0.05,
    "learner.k_local": 10,
    "learner.n_max": 6,
    "learner.p_geom": 0.5,
    "benchmark.scale": "desk",
    "benchmark.seed": 0,
    "run.variants": ("IM-PB", "Random-PB", "SAGG-RIAC", "RandomPolicy"),
    "run.seeds": (1, 2, 3),
}

_INT_KEYS = {
    "interest.n_split",
    "interest.n_min",
    "interest.window",
    "interest.n_quantiles",
    "learner.episodes",
    "learner.checkpoints",
    "learner.k_local",
    "learner.n_max",
    "benchmark.seed",
}
_STR_KEYS = {"benchmark.scale"}
_STR_TUPLE_KEYS = {"run.variants"}
_INT_TUPLE_KEYS = {"run.seeds"}


class ConfigError(ValueError):
    pass


def _parse_value(key, raw):
    raw = raw.strip()
    try:
        if key in _STR_KEYS:
            return raw
        if key in _STR_TUPLE_KEYS:
            return tuple(v.strip() for v in raw.split(",") if v.strip())
        if key in _INT_TUPLE_KEYS:
            return tuple(int(v) for v in raw.split(",") if v.strip())
        if key in _INT_KEYS:
            return int(raw)
        if "," in raw:
            return tuple(float(v) for v in raw.split(",") if v.strip())
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc


def load_config(path=None) -> dict:
    """Defaults overlaid with the flat dotted-key file, if given."""
    cfg = dict(DEFAULTS)
    if path is None:
        return cfg
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = line.split("=", 1)
            key = key.strip()
            if key not in DEFAULTS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            cfg[key] = _parse_value(key, raw)
    return cfg


@dataclass(frozen=True)
class ExperimentSpec:
    runs: tuple  # (variant, seed) pairs
    flat: dict  # fully resolved flat config (manifest content)
    benchmark_scale: str
    benchmark_seed: int

    def learner_config(self, variant: str, seed: int) -> LearnerConfig:
        return build_learner_config(self.flat, variant, seed)


def build_learner_config(flat: dict, variant: str, seed: int) -> LearnerConfig:
    dmp = DmpConfig(
        spring=flat["dmp.spring"],
        damping=flat["dmp.damping"],
        alpha=flat["dmp.alpha"],
        tau=flat["dmp.tau"],
        dt=flat["dmp.dt"],
        weight_scale=flat["dmp.weight_scale"],
        basis_times=tuple(flat["dmp.basis_times"]),
    )
    world = WorldConfig(
        dmp=dmp,
        grab_radius=flat["world.grab_radius"],
        floor_z=flat["world.floor_z"],
        pen_break_z=flat["world.pen_break_z"],
        arm_init_z=flat["world.arm_init_z"],
        pen_home=tuple(flat["world.pen_home"]),
        joy1_home=tuple(flat["world.joystick1_home"]),
        joy2_home=tuple(flat["world.joystick2_home"]),
        joy_box_side=flat["world.joystick_box_side"],
    )
    interest = InterestConfig(
        n_split=flat["interest.n_split"],
        n_min=flat["interest.n_min"],
        window=flat["interest.window"],
        n_quantiles=flat["interest.n_quantiles"],
        p_exploit=flat["interest.p_exploit"],
        p_region=flat["interest.p_region"],
        p_random=flat["interest.p_random"],
        cost_policy=flat["interest.cost_policy"],
        cost_procedure=flat["interest.cost_procedure"],
    )
    episodes = flat["learner.episodes"]
    checkpoints = max(1, flat["learner.checkpoints"])
    return LearnerConfig(
        variant=variant,
        episodes=episodes,
        seed=seed,
        checkpoint_every=max(1, episodes // checkpoints),
        eps_near=flat["learner.eps_near"],
        sigma_policy=flat["learner.sigma_policy"],
        sigma_procedure=flat["learner.sigma_procedure"],
        k_local=flat["learner.k_local"],
        n_max=flat["learner.n_max"],
        p_geom=flat["learner.p_geom"],
        world=world,
        perf=PerfConfig(gamma=flat["perf.gamma"]),
        interest=interest,
    )


def resolve(flat: dict, variant=None, seed=None, episodes=None) -> ExperimentSpec:
    """Apply CLI overrides and expand the (variant, seed) run list."""
    flat = dict(flat)
    if episodes is not None:
        flat["learner.episodes"] = int(episodes)
    variants = (variant,) if variant else flat["run.variants"]
    seeds = (seed,) if seed is not None else flat["run.seeds"]
    flat["run.variants"] = tuple(variants)
    flat["run.seeds"] = tuple(int(s) for s in seeds)
    runs = tuple((v, int(s)) for v in variants for s in seeds)
    for v, _ in runs:
        # Validate eagerly so a bad variant fails before any run starts.
        build_learner_config(flat, v, 0)
    return ExperimentSpec(
        runs=runs,
        flat=flat,
        benchmark_scale=flat["benchmark.scale"],
        benchmark_seed=flat["benchmark.seed"],
    )
