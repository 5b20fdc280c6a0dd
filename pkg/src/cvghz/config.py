"""Line-oriented experiment configuration files.

Grammar: UTF-8 text, ``[section]`` headers, ``key = value`` pairs, ``#``
starts a comment anywhere on a line, blank lines are ignored. All errors
are collected and reported together with their line numbers.

Sections and keys::

    [mode1] [mode2] [mode3]      the three sections must appear together
        squeezing_r    squeezing parameter r (exactly one of the two)
        squeezing_db   squeezing in dB; r = db * ln(10) / 20, i.e. a level
                       of S dB means exp(-2 r) = 10^(-S/10)
        efficiency     power efficiency in [0, 1], default 1
        phase_sigma    phase-jitter width in radians, default 0
    [gains]
        mode           unit | optimal | explicit (default unit)
        g1 g2 g3       required iff mode = explicit
    [sampling]
        n              samples per run, >= 2
        runs           number of runs, >= 2
        seed           master seed, default 0
    [targets]                    measured dB levels for fitting
        mode{1,2,3}_{min,max}_db and optional ..._unc uncertainties
        xdiff_12_db xdiff_23_db xdiff_31_db psum_db and optional ..._unc
    [fit]
        budget seed include_sigma
        r_min r_max eta_min eta_max sigma_min sigma_max
    [output]
        csv            CSV output path
        fitted_config  where a fit writes its parameters back out
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Sequence

from .channels import ChannelSpec
from .fitting import FitTargets, SearchSpace
from .network import NetworkParams

__all__ = [
    "ConfigError",
    "StateConfig",
    "SamplingConfig",
    "FitConfig",
    "ExperimentConfig",
    "parse_config",
    "emit_config",
]

_MODE_SECTIONS = ("mode1", "mode2", "mode3")
_MODE_KEYS = {"squeezing_r": float, "squeezing_db": float, "efficiency": float, "phase_sigma": float}
_GAINS_KEYS = {"mode": str, "g1": float, "g2": float, "g3": float}
_SAMPLING_KEYS = {"n": int, "runs": int, "seed": int}
_FIT_KEYS = {
    "budget": int,
    "seed": int,
    "include_sigma": bool,
    "r_min": float,
    "r_max": float,
    "eta_min": float,
    "eta_max": float,
    "sigma_min": float,
    "sigma_max": float,
}
_OUTPUT_KEYS = {"csv": str, "fitted_config": str}

# config key stem <-> canonical combination-target name
_COMBO_KEYS = {
    "xdiff_12": "x1-x2",
    "xdiff_23": "x2-x3",
    "xdiff_31": "x3-x1",
    "psum": "p1+p2+p3",
}
_TARGET_STEMS = tuple(
    f"mode{m}_{kind}" for m in (1, 2, 3) for kind in ("min", "max")
) + tuple(_COMBO_KEYS)
_TARGETS_KEYS = {f"{stem}_{suffix}": float for stem in _TARGET_STEMS for suffix in ("db", "unc")}

_SECTIONS: dict[str, dict[str, type]] = {
    "mode1": _MODE_KEYS,
    "mode2": _MODE_KEYS,
    "mode3": _MODE_KEYS,
    "gains": _GAINS_KEYS,
    "sampling": _SAMPLING_KEYS,
    "targets": _TARGETS_KEYS,
    "fit": _FIT_KEYS,
    "output": _OUTPUT_KEYS,
}


class ConfigError(ValueError):
    """Aggregated parse and validation failures with line numbers."""

    def __init__(self, errors: Sequence[tuple[int, str]]):
        self.errors = tuple(errors)
        super().__init__(
            "; ".join(f"line {ln}: {msg}" if ln else msg for ln, msg in self.errors)
        )


@dataclass(frozen=True)
class StateConfig:
    """Per-mode squeezing and channel settings of the prepared state."""

    r: tuple[float, float, float]
    efficiency: tuple[float, float, float] = (1.0, 1.0, 1.0)
    phase_sigma: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def to_params(self) -> NetworkParams:
        channel = ChannelSpec(efficiency=self.efficiency, phase_sigma=self.phase_sigma)
        return NetworkParams(self.r[0], self.r[1], self.r[2], channel)


@dataclass(frozen=True)
class SamplingConfig:
    n: int
    runs: int
    seed: int = 0


@dataclass(frozen=True)
class FitConfig:
    budget: int = 20000
    seed: int = 0
    include_sigma: bool = True
    r_min: float = 0.0
    r_max: float = 2.0
    eta_min: float = 0.5
    eta_max: float = 1.0
    sigma_min: float = 0.0
    sigma_max: float = 0.3

    def search_space(self) -> SearchSpace:
        sigma = (self.sigma_min, self.sigma_max) if self.include_sigma else None
        return SearchSpace(
            r_bounds=(self.r_min, self.r_max),
            eta_bounds=(self.eta_min, self.eta_max),
            sigma_bounds=sigma,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    state: StateConfig | None = None
    gains_mode: str = "unit"
    explicit_gains: tuple[float, float, float] | None = None
    sampling: SamplingConfig | None = None
    targets: FitTargets | None = None
    fit: FitConfig = field(default_factory=FitConfig)
    csv_path: str | None = None
    fitted_config_path: str | None = None


def db_to_r(db: float) -> float:
    """Squeezing parameter for a noise reduction of ``db`` dB."""
    return db * math.log(10.0) / 20.0


class _Parser:
    def __init__(self, text: str):
        self.errors: list[tuple[int, str]] = []
        self.raw: dict[str, dict[str, tuple[str, int]]] = {}
        self.section_lines: dict[str, int] = {}
        self._scan(text)

    def _scan(self, text: str) -> None:
        section: str | None = None
        known = False
        for lineno, raw_line in enumerate(text.splitlines(), start=1):
            line = raw_line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                if not line.endswith("]"):
                    self.errors.append((lineno, "malformed section header"))
                    section, known = None, False
                    continue
                name = line[1:-1].strip()
                if name not in _SECTIONS:
                    self.errors.append((lineno, f"unknown section [{name}]"))
                    section, known = name, False
                    continue
                if name in self.raw:
                    self.errors.append((lineno, f"duplicate section [{name}]"))
                section, known = name, True
                self.raw.setdefault(name, {})
                self.section_lines.setdefault(name, lineno)
                continue
            if "=" not in line:
                self.errors.append((lineno, "expected 'key = value' or '[section]'"))
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if section is None:
                self.errors.append((lineno, f"key '{key}' appears outside any section"))
                continue
            if not known:
                continue  # the unknown section was already reported
            if key not in _SECTIONS[section]:
                self.errors.append((lineno, f"unknown key '{key}' in [{section}]"))
                continue
            if key in self.raw[section]:
                first = self.raw[section][key][1]
                self.errors.append(
                    (lineno, f"duplicate key '{key}' (first set on line {first})")
                )
                continue
            self.raw[section][key] = (value, lineno)

    def error(self, lineno: int, message: str) -> None:
        self.errors.append((lineno, message))

    def has(self, section: str, key: str) -> bool:
        return key in self.raw.get(section, {})

    def line(self, section: str, key: str | None = None) -> int:
        if key is not None and self.has(section, key):
            return self.raw[section][key][1]
        return self.section_lines.get(section, 0)

    def get(self, section: str, key: str, default=None):
        """Typed value of a key, or the default; records conversion errors."""
        if not self.has(section, key):
            return default
        value, lineno = self.raw[section][key]
        kind = _SECTIONS[section][key]
        try:
            if kind is bool:
                lowered = value.lower()
                if lowered not in ("true", "false"):
                    raise ValueError
                return lowered == "true"
            if kind is int:
                return int(value)
            if kind is float:
                out = float(value)
                if not math.isfinite(out):
                    raise ValueError
                return out
            return value
        except ValueError:
            self.errors.append(
                (lineno, f"value for '{key}' must be of type {kind.__name__}, got '{value}'")
            )
            return default


def _assemble_state(p: _Parser) -> StateConfig | None:
    present = [name for name in _MODE_SECTIONS if name in p.raw]
    if not present:
        return None
    if len(present) < 3:
        missing = ", ".join(f"[{n}]" for n in _MODE_SECTIONS if n not in p.raw)
        p.error(p.line(present[0]), f"mode sections must be given together; missing {missing}")
        return None
    r: list[float] = []
    eff: list[float] = []
    sig: list[float] = []
    for name in _MODE_SECTIONS:
        has_r, has_db = p.has(name, "squeezing_r"), p.has(name, "squeezing_db")
        if has_r and has_db:
            p.error(p.line(name, "squeezing_db"), "give exactly one of squeezing_r and squeezing_db")
        elif not has_r and not has_db:
            p.error(p.line(name), f"[{name}] needs squeezing_r or squeezing_db")
        value = p.get(name, "squeezing_r") if has_r else p.get(name, "squeezing_db")
        if value is None:
            value = 0.0
        r.append(float(value) if has_r else db_to_r(float(value)))
        e = p.get(name, "efficiency", 1.0)
        if not 0.0 <= e <= 1.0:
            p.error(p.line(name, "efficiency"), "efficiency must lie in [0, 1]")
            e = min(max(e, 0.0), 1.0)
        eff.append(e)
        s = p.get(name, "phase_sigma", 0.0)
        if s < 0.0:
            p.error(p.line(name, "phase_sigma"), "phase_sigma must be >= 0")
            s = 0.0
        sig.append(s)
    return StateConfig(r=tuple(r), efficiency=tuple(eff), phase_sigma=tuple(sig))


def _assemble_gains(p: _Parser) -> tuple[str, tuple[float, float, float] | None]:
    if "gains" not in p.raw:
        return "unit", None
    mode = p.get("gains", "mode", "unit")
    if mode not in ("unit", "optimal", "explicit"):
        p.error(p.line("gains", "mode"), "gains mode must be unit, optimal or explicit")
        mode = "unit"
    g_present = [k for k in ("g1", "g2", "g3") if p.has("gains", k)]
    if mode == "explicit":
        if len(g_present) < 3:
            p.error(p.line("gains"), "explicit gains need g1, g2 and g3")
            return mode, None
        return mode, (p.get("gains", "g1"), p.get("gains", "g2"), p.get("gains", "g3"))
    if g_present:
        p.error(p.line("gains", g_present[0]), "g1/g2/g3 are only valid with mode = explicit")
    return mode, None


def _assemble_sampling(p: _Parser) -> SamplingConfig | None:
    if "sampling" not in p.raw:
        return None
    n = p.get("sampling", "n")
    runs = p.get("sampling", "runs")
    if n is None:
        p.error(p.line("sampling"), "[sampling] needs n")
    elif n < 2:
        p.error(p.line("sampling", "n"), "n must be at least 2 (variance undefined below)")
    if runs is None:
        p.error(p.line("sampling"), "[sampling] needs runs")
    elif runs < 2:
        p.error(p.line("sampling", "runs"), "runs must be at least 2")
    if n is None or runs is None or n < 2 or runs < 2:
        return None
    return SamplingConfig(n=n, runs=runs, seed=p.get("sampling", "seed", 0))


def _assemble_targets(p: _Parser) -> FitTargets | None:
    if "targets" not in p.raw:
        return None
    single: dict[int, tuple[float, float]] = {}
    combos: dict[str, float] = {}
    uncertainties: dict[str, float] = {}
    any_db = False
    for m in (1, 2, 3):
        low = p.get("targets", f"mode{m}_min_db")
        high = p.get("targets", f"mode{m}_max_db")
        if (low is None) != (high is None):
            p.error(p.line("targets"), f"mode{m} needs both min_db and max_db (or neither)")
            continue
        if low is None:
            continue
        any_db = True
        single[m - 1] = (low, high)
    for stem, name in _COMBO_KEYS.items():
        value = p.get("targets", f"{stem}_db")
        if value is not None:
            any_db = True
            combos[name] = value
    for stem in _TARGET_STEMS:
        unc = p.get("targets", f"{stem}_unc")
        if unc is None:
            continue
        if not p.has("targets", f"{stem}_db"):
            p.error(p.line("targets", f"{stem}_unc"), f"{stem}_unc given without {stem}_db")
            continue
        if unc <= 0:
            p.error(p.line("targets", f"{stem}_unc"), "uncertainties must be positive")
            continue
        name = _COMBO_KEYS.get(stem)
        uncertainties[name if name else stem] = unc
    if not any_db:
        p.error(p.line("targets"), "[targets] needs at least one *_db value")
        return None
    try:
        return FitTargets(
            single_mode_db=single, combination_db=combos, uncertainties=uncertainties
        )
    except ValueError as exc:
        p.error(p.line("targets"), str(exc))
        return None


def _assemble_fit(p: _Parser) -> FitConfig:
    if "fit" not in p.raw:
        return FitConfig()
    defaults = FitConfig()
    values = {key: p.get("fit", key, getattr(defaults, key)) for key in _FIT_KEYS}
    if values["budget"] < 0:
        p.error(p.line("fit", "budget"), "budget must be >= 0")
        values["budget"] = 0
    config = FitConfig(**values)
    try:
        config.search_space()
    except ValueError as exc:
        p.error(p.line("fit"), str(exc))
    return config


def _assemble_output(p: _Parser) -> tuple[str | None, str | None]:
    if "output" not in p.raw:
        return None, None
    paths = []
    for key in ("csv", "fitted_config"):
        path = p.get("output", key)
        if path is not None:
            parent = os.path.dirname(path) or "."
            if not (os.path.isdir(parent) and os.access(parent, os.W_OK)):
                p.error(p.line("output", key), f"directory of '{path}' is not writable")
        paths.append(path)
    return paths[0], paths[1]


def parse_config(text: str, required_sections: Sequence[str] = ()) -> ExperimentConfig:
    """Parse and validate a config, raising :class:`ConfigError` on failure."""
    p = _Parser(text)
    for name in required_sections:
        if name not in p.raw:
            p.error(0, f"missing required section [{name}]")
    state = _assemble_state(p)
    gains_mode, explicit = _assemble_gains(p)
    sampling = _assemble_sampling(p)
    targets = _assemble_targets(p)
    fit_config = _assemble_fit(p)
    csv_path, fitted_path = _assemble_output(p)
    if p.errors:
        raise ConfigError(sorted(p.errors))
    return ExperimentConfig(
        state=state,
        gains_mode=gains_mode,
        explicit_gains=explicit,
        sampling=sampling,
        targets=targets,
        fit=fit_config,
        csv_path=csv_path,
        fitted_config_path=fitted_path,
    )


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_config(config: ExperimentConfig) -> str:
    """Render a config as text; parsing the result restores an equal config."""
    lines: list[str] = []
    if config.state is not None:
        for m, name in enumerate(_MODE_SECTIONS):
            lines.append(f"[{name}]")
            lines.append(f"squeezing_r = {_fmt(config.state.r[m])}")
            lines.append(f"efficiency = {_fmt(config.state.efficiency[m])}")
            lines.append(f"phase_sigma = {_fmt(config.state.phase_sigma[m])}")
            lines.append("")
    if config.gains_mode != "unit" or config.explicit_gains is not None:
        lines.append("[gains]")
        lines.append(f"mode = {config.gains_mode}")
        if config.explicit_gains is not None:
            for i, g in enumerate(config.explicit_gains, start=1):
                lines.append(f"g{i} = {_fmt(g)}")
        lines.append("")
    if config.sampling is not None:
        lines.append("[sampling]")
        lines.append(f"n = {config.sampling.n}")
        lines.append(f"runs = {config.sampling.runs}")
        lines.append(f"seed = {config.sampling.seed}")
        lines.append("")
    if config.targets is not None:
        lines.append("[targets]")
        for mode in sorted(config.targets.single_mode_db):
            low, high = config.targets.single_mode_db[mode]
            for kind, value in (("min", low), ("max", high)):
                stem = f"mode{mode + 1}_{kind}"
                lines.append(f"{stem}_db = {_fmt(value)}")
                if stem in config.targets.uncertainties:
                    lines.append(f"{stem}_unc = {_fmt(config.targets.uncertainties[stem])}")
        for stem, name in _COMBO_KEYS.items():
            if name in config.targets.combination_db:
                lines.append(f"{stem}_db = {_fmt(config.targets.combination_db[name])}")
                if name in config.targets.uncertainties:
                    lines.append(f"{stem}_unc = {_fmt(config.targets.uncertainties[name])}")
        lines.append("")
    if config.fit != FitConfig():
        lines.append("[fit]")
        defaults = FitConfig()
        for key in _FIT_KEYS:
            value = getattr(config.fit, key)
            if value != getattr(defaults, key):
                lines.append(f"{key} = {_fmt(value)}")
        lines.append("")
    if config.csv_path is not None or config.fitted_config_path is not None:
        lines.append("[output]")
        if config.csv_path is not None:
            lines.append(f"csv = {config.csv_path}")
        if config.fitted_config_path is not None:
            lines.append(f"fitted_config = {config.fitted_config_path}")
        lines.append("")
    return "\n".join(lines)
