"""Experiment configuration: a TOML document of flat sections of scalars.

Parsing is strict: unknown sections or keys are rejected, every problem is
reported with its key path, and all problems are collected before raising.
Example blockade configuration:

    experiment = "blockade"

    [ladder]
    n_atoms = 1225
    omega1 = 1e-3
    omega2 = 100.0
    delta = 1000.0
    truncation = 2

    [run]
    duration = 2400.0
    sample_step = 2.0
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .cavity import CavityAnchor, CavityGeometry
from .errors import ConfigError
from .ladder import LadderParams
from .protocol import ProtocolRates

EXPERIMENTS = ("blockade", "ladder-spectrum", "cnot", "interlink", "cavity", "sweep")
MODES = ("ideal", "chain", "strict")
UNIT_REPORTS = ("gamma-units", "si")

_LADDER_SWEEPABLE = ("omega1", "omega2", "delta")
_CAVITY_SWEEPABLE = ("length", "mode_diameter", "mirror_transmittivity")


@dataclass(frozen=True)
class RunSettings:
    duration: float
    sample_step: float


@dataclass(frozen=True)
class AmplitudePair:
    first: complex
    second: complex


@dataclass(frozen=True)
class SweepSettings:
    target: str            # "ladder" or "cavity"
    parameter: str
    start: float
    stop: float
    count: int
    scale: str             # "linear" or "log"


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description plus derived-field echoes."""

    experiment: str
    mode: str = "ideal"
    unit_report: str = "gamma-units"
    ladder: LadderParams | None = None
    two_photon: object = "dressed"      # "dressed" | "first" | float
    include_trailing_g: bool = False
    run: RunSettings | None = None
    control: AmplitudePair | None = None     # cnot: (alpha, beta)
    target: AmplitudePair | None = None      # cnot: (xi, eta)
    link: AmplitudePair | None = None        # interlink: (alpha, beta)
    with_ancilla: bool = False
    rates: ProtocolRates | None = None
    geometry: CavityGeometry | None = None
    sweep: SweepSettings | None = None

    def describe(self) -> dict:
        """Config echo for reports, including derived detuning fields."""
        out = {"experiment": self.experiment, "mode": self.mode, "unit_report": self.unit_report}
        if self.ladder is not None:
            out["ladder"] = {
                "n_atoms": self.ladder.n_atoms,
                "omega1": self.ladder.omega1,
                "omega2": self.ladder.omega2,
                "delta1": self.ladder.delta1,
                "delta2": self.ladder.delta2,
                "delta": self.ladder.delta,
                "two_photon": self.ladder.two_photon,
                "truncation": self.ladder.truncation,
                "two_photon_rule": self.two_photon
                if isinstance(self.two_photon, str)
                else float(self.two_photon),
                "include_trailing_g": self.include_trailing_g,
            }
        if self.geometry is not None:
            out["cavity"] = {
                "length": self.geometry.length,
                "mode_diameter": self.geometry.mode_diameter,
                "mirror_transmittivity": self.geometry.mirror_transmittivity,
                "n_atoms": self.geometry.n_atoms,
            }
        return out


class _Collector:
    """Accumulates key-path problems; raises once with all of them."""

    def __init__(self):
        self.problems = []

    def add(self, path: str, message: str):
        self.problems.append(f"{path}: {message}")

    def raise_if_any(self):
        if self.problems:
            raise ConfigError(self.problems)


def _take(section: dict, used: set, path: str, key: str, kind, errors: _Collector,
          required: bool = False, default=None, check=None):
    """Pull one typed scalar out of a section with full validation."""
    used.add(key)
    if key not in section:
        if required:
            errors.add(f"{path}.{key}", "required key is missing")
        return default
    value = section[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            errors.add(f"{path}.{key}", f"expected a number, got {value!r}")
            return default
        value = float(value)
    elif kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            errors.add(f"{path}.{key}", f"expected an integer, got {value!r}")
            return default
    elif kind is bool:
        if not isinstance(value, bool):
            errors.add(f"{path}.{key}", f"expected true/false, got {value!r}")
            return default
    elif kind is str:
        if not isinstance(value, str):
            errors.add(f"{path}.{key}", f"expected a string, got {value!r}")
            return default
    if check is not None:
        problem = check(value)
        if problem:
            errors.add(f"{path}.{key}", problem)
            return default
    return value


def _reject_unknown(section: dict, used: set, path: str, errors: _Collector):
    for key in section:
        if key not in used:
            errors.add(f"{path}.{key}", "unknown key")


def _positive(value):
    return None if value > 0 else f"must be > 0, got {value}"


def _nonnegative(value):
    return None if value >= 0 else f"must be >= 0, got {value}"


def _parse_ladder(section: dict, errors: _Collector):
    used: set = set()
    n_atoms = _take(section, used, "ladder", "n_atoms", int, errors, required=True,
                    check=lambda v: None if v >= 1 else f"must be >= 1, got {v}")
    omega1 = _take(section, used, "ladder", "omega1", float, errors, required=True, check=_nonnegative)
    omega2 = _take(section, used, "ladder", "omega2", float, errors, required=True, check=_nonnegative)
    delta = _take(section, used, "ladder", "delta", float, errors, required=True,
                  check=lambda v: None if v != 0 else "must be nonzero")
    truncation = _take(section, used, "ladder", "truncation", int, errors, default=2,
                       check=lambda v: None if v >= 1 else f"must be >= 1, got {v}")
    include_trailing_g = _take(section, used, "ladder", "include_trailing_g", bool, errors,
                               default=False)
    used.add("two_photon")
    two_photon = section.get("two_photon", "dressed")
    if isinstance(two_photon, str):
        if two_photon not in ("dressed", "first"):
            errors.add("ladder.two_photon", f"must be 'dressed', 'first' or a number, got {two_photon!r}")
            two_photon = "dressed"
    elif isinstance(two_photon, bool) or not isinstance(two_photon, (int, float)):
        errors.add("ladder.two_photon", f"must be 'dressed', 'first' or a number, got {two_photon!r}")
        two_photon = "dressed"
    else:
        two_photon = float(two_photon)
    _reject_unknown(section, used, "ladder", errors)
    if None in (n_atoms, omega1, omega2, delta, truncation):
        return None, two_photon, include_trailing_g
    if truncation > n_atoms:
        errors.add("ladder.truncation", f"value {truncation} exceeds ladder.n_atoms = {n_atoms}")
        return None, two_photon, include_trailing_g
    params = LadderParams.from_common(
        n_atoms=n_atoms, omega1=omega1, omega2=omega2, delta=delta,
        two_photon=0.0, truncation=truncation,
    )
    return params, two_photon, include_trailing_g


def _parse_run(section: dict, errors: _Collector):
    used: set = set()
    duration = _take(section, used, "run", "duration", float, errors, required=True, check=_positive)
    sample_step = _take(section, used, "run", "sample_step", float, errors, required=True, check=_positive)
    _reject_unknown(section, used, "run", errors)
    if duration is not None and sample_step is not None and sample_step > duration:
        errors.add("run.sample_step", f"value {sample_step} exceeds run.duration = {duration}")
        return None
    if duration is None or sample_step is None:
        return None
    return RunSettings(duration=duration, sample_step=sample_step)


def _parse_amplitudes(section: dict, errors: _Collector, path: str, names: tuple):
    used: set = set()
    values = []
    for name in names:
        re_part = _take(section, used, path, f"{name}_re", float, errors, required=True)
        im_part = _take(section, used, path, f"{name}_im", float, errors, default=0.0)
        values.append((re_part, im_part))
    extra_used = set(used)
    if path == "interlink":
        with_ancilla = _take(section, extra_used, path, "with_ancilla", bool, errors, default=False)
    else:
        with_ancilla = False
    _reject_unknown(section, extra_used, path, errors)
    if any(re_part is None for re_part, _ in values):
        return None, with_ancilla
    pairs = [complex(re_part, im_part) for re_part, im_part in values]
    return pairs, with_ancilla


def _parse_rates(section: dict, errors: _Collector):
    used: set = set()
    defaults = ProtocolRates()
    kwargs = {}
    fields = {
        "n_atoms": int, "delta": float, "omega1": float, "omega2": float,
        "omega_cavity_i": float, "omega_cavity_ii": float,
        "omega_prime1": float, "omega_prime2": float, "g_cavity": float,
        "omega_link_read": float, "omega_link_write": float, "g_free": float,
        "detuning_sign": int,
    }
    for name, kind in fields.items():
        value = _take(section, used, "rates", name, kind, errors,
                      default=getattr(defaults, name))
        kwargs[name] = value
    _reject_unknown(section, used, "rates", errors)
    if kwargs["detuning_sign"] not in (-1, 1):
        errors.add("rates.detuning_sign", f"must be 1 or -1, got {kwargs['detuning_sign']}")
        return None
    return ProtocolRates(**kwargs)


def _parse_cavity(section: dict, errors: _Collector):
    used: set = set()
    length = _take(section, used, "cavity", "length", float, errors, required=True, check=_positive)
    diameter = _take(section, used, "cavity", "mode_diameter", float, errors, required=True, check=_positive)
    transmittivity = _take(
        section, used, "cavity", "mirror_transmittivity", float, errors, required=True,
        check=lambda v: None if 0 < v < 1 else f"must lie in (0, 1), got {v}",
    )
    n_atoms = _take(section, used, "cavity", "n_atoms", int, errors, default=1,
                    check=lambda v: None if v >= 1 else f"must be >= 1, got {v}")
    anchor_g0 = _take(section, used, "cavity", "anchor_g0", float, errors,
                      default=CavityAnchor().g0, check=_positive)
    anchor_length = _take(section, used, "cavity", "anchor_length", float, errors,
                          default=CavityAnchor().length, check=_positive)
    anchor_diameter = _take(section, used, "cavity", "anchor_diameter", float, errors,
                            default=CavityAnchor().diameter, check=_positive)
    _reject_unknown(section, used, "cavity", errors)
    if None in (length, diameter, transmittivity, n_atoms):
        return None
    return CavityGeometry(
        length=length,
        mode_diameter=diameter,
        mirror_transmittivity=transmittivity,
        n_atoms=n_atoms,
        anchor=CavityAnchor(g0=anchor_g0, length=anchor_length, diameter=anchor_diameter),
    )


def _parse_sweep(section: dict, errors: _Collector):
    used: set = set()
    target = _take(section, used, "sweep", "target", str, errors, required=True,
                   check=lambda v: None if v in ("ladder", "cavity") else
                   f"must be 'ladder' or 'cavity', got {v!r}")
    parameter = _take(section, used, "sweep", "parameter", str, errors, required=True)
    start = _take(section, used, "sweep", "start", float, errors, required=True)
    stop = _take(section, used, "sweep", "stop", float, errors, required=True)
    count = _take(section, used, "sweep", "count", int, errors, required=True,
                  check=lambda v: None if v >= 2 else f"must be >= 2, got {v}")
    scale = _take(section, used, "sweep", "scale", str, errors, default="linear",
                  check=lambda v: None if v in ("linear", "log") else
                  f"must be 'linear' or 'log', got {v!r}")
    _reject_unknown(section, used, "sweep", errors)
    if None in (target, parameter, start, stop, count):
        return None
    allowed = _LADDER_SWEEPABLE if target == "ladder" else _CAVITY_SWEEPABLE
    if parameter not in allowed:
        errors.add("sweep.parameter", f"must be one of {allowed} for target {target!r}")
        return None
    if scale == "log" and (start <= 0 or stop <= 0):
        errors.add("sweep.start", "log scale requires positive start and stop")
        return None
    return SweepSettings(target=target, parameter=parameter, start=start, stop=stop,
                         count=count, scale=scale)


_REQUIRED_SECTIONS = {
    "blockade": ("ladder", "run"),
    "ladder-spectrum": ("ladder",),
    "cnot": ("cnot",),
    "interlink": ("interlink",),
    "cavity": ("cavity",),
    "sweep": ("sweep",),
}

_OPTIONAL_SECTIONS = {
    "blockade": (),
    "ladder-spectrum": (),
    "cnot": ("rates",),
    "interlink": ("rates",),
    "cavity": ("ladder",),
    "sweep": ("ladder", "cavity"),
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a TOML experiment document; collects every problem."""
    errors = _Collector()
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError((f"document: not valid TOML ({exc})",)) from exc

    top_used = {"experiment", "mode", "unit_report"}
    experiment = document.get("experiment")
    if experiment is None:
        errors.add("experiment", "required key is missing")
    elif experiment not in EXPERIMENTS:
        errors.add("experiment", f"must be one of {EXPERIMENTS}, got {experiment!r}")
        experiment = None
    mode = document.get("mode", "ideal")
    if mode not in MODES:
        errors.add("mode", f"must be one of {MODES}, got {mode!r}")
        mode = "ideal"
    unit_report = document.get("unit_report", "gamma-units")
    if unit_report not in UNIT_REPORTS:
        errors.add("unit_report", f"must be one of {UNIT_REPORTS}, got {unit_report!r}")
        unit_report = "gamma-units"

    sections = {k: v for k, v in document.items() if isinstance(v, dict)}
    for key in document:
        if key in top_used or key in sections:
            continue
        errors.add(key, "unknown key")

    if experiment is None:
        errors.raise_if_any()

    required = _REQUIRED_SECTIONS[experiment]
    optional = _OPTIONAL_SECTIONS[experiment]
    for name in required:
        if name not in sections:
            errors.add(name, f"required section is missing for experiment {experiment!r}")
    for name in sections:
        if name not in required and name not in optional:
            errors.add(name, f"section not allowed for experiment {experiment!r}")

    ladder = None
    two_photon: object = "dressed"
    include_trailing_g = False
    run = None
    control = None
    target = None
    link = None
    with_ancilla = False
    rates = None
    geometry = None
    sweep = None

    if "ladder" in sections and "ladder" in required + optional:
        ladder, two_photon, include_trailing_g = _parse_ladder(sections["ladder"], errors)
    if "run" in sections and "run" in required + optional:
        run = _parse_run(sections["run"], errors)
    if experiment == "cnot" and "cnot" in sections:
        pairs, _ = _parse_amplitudes(sections["cnot"], errors, "cnot",
                                     ("alpha", "beta", "xi", "eta"))
        if pairs is not None:
            control = AmplitudePair(pairs[0], pairs[1])
            target = AmplitudePair(pairs[2], pairs[3])
    if experiment == "interlink" and "interlink" in sections:
        pairs, with_ancilla = _parse_amplitudes(sections["interlink"], errors, "interlink",
                                                ("alpha", "beta"))
        if pairs is not None:
            link = AmplitudePair(pairs[0], pairs[1])
    if "rates" in sections and "rates" in optional:
        rates = _parse_rates(sections["rates"], errors)
    if "cavity" in sections and "cavity" in required + optional:
        geometry = _parse_cavity(sections["cavity"], errors)
    if "sweep" in sections and experiment == "sweep":
        sweep = _parse_sweep(sections["sweep"], errors)
        if sweep is not None:
            base = "ladder" if sweep.target == "ladder" else "cavity"
            if base not in sections:
                errors.add(base, f"sweep over {sweep.target!r} needs a [{base}] base section")

    errors.raise_if_any()
    return ExperimentConfig(
        experiment=experiment,
        mode=mode,
        unit_report=unit_report,
        ladder=ladder,
        two_photon=two_photon,
        include_trailing_g=include_trailing_g,
        run=run,
        control=control,
        target=target,
        link=link,
        with_ancilla=with_ancilla,
        rates=rates,
        geometry=geometry,
        sweep=sweep,
    )
