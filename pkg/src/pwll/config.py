"""Flat key-value config files for experiments and continuum sweeps.

The format is one `key = value` pair per line, `#` comments, blank lines
ignored. Lists are comma-separated. Chosen over nested formats so experiment
configs diff cleanly.
"""

from dataclasses import dataclass

from .acquisition import MARGIN_UNCERTAINTY, NORM_UNCERTAINTY, RANDOM_KIND
from .errors import ConfigError
from .loop import ExperimentConfig

__all__ = ["parse_kv_file", "RunSpec", "load_run_spec", "SweepSpec", "load_sweep_spec",
           "ACQUISITION_PRESETS"]

# experiment rows: preset name -> (score kind, tau handling)
ACQUISITION_PRESETS = {
    "unc-sm": (MARGIN_UNCERTAINTY, "zero"),
    "unc-norm": (NORM_UNCERTAINTY, "fixed"),
    "unc-norm-decay": (NORM_UNCERTAINTY, "schedule"),
    "random": (RANDOM_KIND, "zero"),
}


def parse_kv_file(path, overrides=()):
    """Parse `key = value` lines; returns {key: (value, line_number)}.

    `overrides` are extra "key=value" strings (command-line flags) applied on
    top of the file's entries; they carry no line number.
    """
    entries = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"expected 'key = value', got {raw.strip()!r}",
                                  line=lineno)
            key, value = line.split("=", 1)
            key = key.strip()
            if not key:
                raise ConfigError("empty key", line=lineno)
            if key in entries:
                raise ConfigError(f"duplicate key {key!r}", line=lineno)
            entries[key] = (value.strip(), lineno)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, value = item.split("=", 1)
        entries[key.strip()] = (value.strip(), None)
    return entries


class _Fields:
    """Typed accessors over parsed entries, raising with line diagnostics."""

    def __init__(self, entries, path):
        self.entries = entries
        self.path = path
        self.seen = set()

    def _get(self, key, default):
        self.seen.add(key)
        if key not in self.entries:
            if default is _REQUIRED:
                raise ConfigError(f"missing required key {key!r} in {self.path}")
            return None, None
        return self.entries[key]

    def string(self, key, default=None, choices=None):
        value, line = self._get(key, default)
        if value is None:
            value = default
        if choices is not None and value not in choices:
            raise ConfigError(f"{key} must be one of {sorted(choices)}, got {value!r}",
                              line=line)
        return value

    def number(self, key, default=None, convert=float, minimum=None):
        value, line = self._get(key, default)
        if value is None:
            return default
        try:
            out = convert(value)
        except ValueError:
            raise ConfigError(f"{key} must be a {convert.__name__}, got {value!r}",
                              line=line) from None
        if minimum is not None and out < minimum:
            raise ConfigError(f"{key} must be >= {minimum}, got {out}", line=line)
        return out

    def number_list(self, key, default=(), convert=float):
        value, line = self._get(key, default)
        if value is None:
            return list(default)
        items = [v.strip() for v in value.split(",") if v.strip()]
        try:
            return [convert(v) for v in items]
        except ValueError:
            raise ConfigError(f"{key} must be a comma list of {convert.__name__}s, "
                              f"got {value!r}", line=line) from None

    def string_list(self, key, default=()):
        value, _ = self._get(key, default)
        if value is None:
            return list(default)
        return [v.strip() for v in value.split(",") if v.strip()]

    def reject_unknown(self):
        for key, (_, line) in self.entries.items():
            if key not in self.seen:
                raise ConfigError(f"unknown key {key!r}", line=line)


_REQUIRED = object()


@dataclass(frozen=True)
class RunSpec:
    """One experiment config expanded to per-acquisition run configs."""

    dataset: str
    dataset_seed: int
    mod_k: int
    presets: tuple
    configs: tuple            # ExperimentConfig per preset, seeds shared
    snapshots: bool


def load_run_spec(path, overrides=()):
    """Load and validate an experiment config file.

    Raises ConfigError with a line diagnostic before any compute runs;
    `overrides` are "key=value" strings taking precedence over the file.
    """
    fields = _Fields(parse_kv_file(path, overrides), path)
    dataset = fields.string("dataset", default=_REQUIRED)
    dataset_seed = fields.number("dataset_seed", default=0, convert=int)
    mod_k = fields.number("mod_k", default=0, convert=int)
    presets = fields.string_list("acquisition", default=("unc-norm-decay",))
    for name in presets:
        if name not in ACQUISITION_PRESETS:
            raise ConfigError(f"unknown acquisition preset {name!r}; "
                              f"choose from {sorted(ACQUISITION_PRESETS)}")
    policy = fields.string("policy", default="argmax",
                           choices={"argmax", "kde", "proportional", "random"})
    tau = fields.number("tau", default=16.0)
    tau0 = fields.number("tau0", default=16.0)
    K = fields.number("K", default=24, convert=int, minimum=1)
    n_queries = fields.number("n_queries", default=100, convert=int, minimum=1)
    seeds = fields.number_list("seeds", default=(0,), convert=int)
    initial = fields.string("initial_labeling", default="one-per-class",
                            choices={"one-per-class", "one-total", "explicit"})
    initial_indices = fields.number_list("initial_indices", default=(), convert=int)
    k = fields.number("k", default=10, convert=int, minimum=1)
    kde_k = fields.number("kde_k", default=10, convert=int, minimum=1)
    khat = fields.number("khat", default=8.0, minimum=1.0)
    snapshots = fields.string("snapshots", default="off", choices={"on", "off"})
    fields.reject_unknown()

    tau0_line = fields.entries.get("tau0", (None, None))[1]
    configs = []
    for name in presets:
        kind, tau_mode = ACQUISITION_PRESETS[name]
        if tau_mode == "schedule" and tau0 <= 0:
            raise ConfigError(f"tau0 must be positive for {name}", line=tau0_line)
        configs.append(ExperimentConfig(
            acquisition=kind, policy=policy, tau_mode=tau_mode, tau=tau,
            tau0=tau0, K=K, n_queries=n_queries, seeds=tuple(seeds),
            initial_labeling=initial, initial_indices=tuple(initial_indices),
            k=k, kde_k=kde_k, khat=khat))
    return RunSpec(dataset=dataset, dataset_seed=dataset_seed, mod_k=mod_k,
                   presets=tuple(presets), configs=tuple(configs),
                   snapshots=snapshots == "on")


@dataclass(frozen=True)
class SweepSpec:
    """Parameter grid for the continuum bound sweep."""

    mode: str                 # explore | exploit
    rho: tuple
    R_s: tuple
    beta: tuple
    tau: tuple
    m: int
    rho_max: float
    plateau_fraction: float
    delta_ratio: float


def load_sweep_spec(path, overrides=()):
    fields = _Fields(parse_kv_file(path, overrides), path)
    mode = fields.string("mode", default=_REQUIRED, choices={"explore", "exploit"})
    rho = fields.number_list("rho", default=(1.0,))
    R_s = fields.number_list("R_s", default=(2.0,))
    beta = fields.number_list("beta", default=(0.25,))
    tau = fields.number_list("tau", default=())
    m = fields.number("m", default=1024, convert=int, minimum=64)
    rho_max = fields.number("rho_max", default=8.0, minimum=0.0)
    plateau_fraction = fields.number("plateau_fraction", default=0.75)
    delta_ratio = fields.number("delta_ratio", default=1.0 / 32.0)
    fields.reject_unknown()
    if not 0.0 < plateau_fraction < 1.0:
        raise ConfigError("plateau_fraction must be in (0, 1)",
                          line=fields.entries.get("plateau_fraction", (None, None))[1])
    if delta_ratio <= 0.0:
        raise ConfigError("delta_ratio must be positive",
                          line=fields.entries.get("delta_ratio", (None, None))[1])
    for name, values in (("rho", rho), ("beta", beta), ("R_s", R_s)):
        if any(v <= 0 for v in values):
            raise ConfigError(f"{name} values must be positive",
                              line=fields.entries.get(name, (None, None))[1])
    return SweepSpec(mode=mode, rho=tuple(rho), R_s=tuple(R_s), beta=tuple(beta),
                     tau=tuple(tau), m=m, rho_max=rho_max,
                     plateau_fraction=plateau_fraction, delta_ratio=delta_ratio)
