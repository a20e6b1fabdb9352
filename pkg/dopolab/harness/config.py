"""Run configuration: YAML sections parsed into frozen dataclasses.

A configuration file looks like ``configs/desk.yml``::

    model:      {sigma: 1.41421356, kappa: 1.0, g: 1.0e-3}
    physical:   null            # optional PhysicalSetup keys; replaces model sigma/kappa/g
    integrator: {dt: 3.0e-3, tau_end: 30.0, midpoint_iterations: 2, system: reduced}
    ensemble:   {trajectories: 20000, master_seed: 1234, stationary_cutoff: 10.0,
                 block_size: 500, workers: 4, divergence_threshold: 1.0e-3, record_every: 10}
    detection:  {phi_deg: [0, 90], T: null, mode: rotating, t0: 10.0,
                 omega: {start: 0.0, stop: 10.0, num: 41}}
    output:     {out_dir: runs/desk, plot: false}

Command-line overrides use dotted keys (``ensemble.trajectories=100``).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np
import yaml

from ..analytics.fixed_lo import optimal_detection_time
from ..errors import ConfigError, DopoError
from ..params import DimensionlessParams, PhysicalSetup, dimensionless
from ..sde.integrator import IntegratorConfig

SECTIONS = ("model", "physical", "integrator", "ensemble", "detection", "output")


@dataclass(frozen=True)
class ModelSection:
    sigma: float = math.sqrt(2.0)
    kappa: float = 1.0
    g: float = 1e-3


@dataclass(frozen=True)
class EnsembleSection:
    trajectories: int = 1000
    master_seed: Optional[int] = None
    stationary_cutoff: float = 10.0
    block_size: int = 500
    workers: int = 1
    divergence_threshold: float = 1e-3
    n_groups: int = 32

    def __post_init__(self) -> None:
        if self.trajectories < 1:
            raise ConfigError("ensemble.trajectories must be at least 1")
        if self.block_size < 1:
            raise ConfigError("ensemble.block_size must be at least 1")
        if self.workers < 1:
            raise ConfigError("ensemble.workers must be at least 1")
        if not 0.0 <= self.divergence_threshold <= 1.0:
            raise ConfigError("ensemble.divergence_threshold must lie in [0, 1]")
        if self.n_groups < 2:
            raise ConfigError("ensemble.n_groups must be at least 2")


@dataclass(frozen=True)
class OmegaGrid:
    start: float = 0.0
    stop: float = 10.0
    num: int = 41

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)

    @classmethod
    def parse(cls, text: str) -> "OmegaGrid":
        """``a:b:n`` as used on the command line."""
        try:
            a, b, n = text.split(":")
            return cls(float(a), float(b), int(n))
        except ValueError:
            raise ConfigError(f"omega grid must look like start:stop:num, got {text!r}") from None


@dataclass(frozen=True)
class DetectionSection:
    phi_deg: Tuple[float, ...] = (0.0, 90.0)
    T: Optional[float] = None  # None selects the optimum detection time
    mode: str = "rotating"
    t0: float = 10.0
    omega: OmegaGrid = field(default_factory=OmegaGrid)

    def __post_init__(self) -> None:
        if self.mode not in ("rotating", "fixed"):
            raise ConfigError(f"detection.mode must be rotating or fixed, got {self.mode!r}")
        if self.T is not None and not self.T > 0:
            raise ConfigError("detection.T must be positive")

    @property
    def phis(self) -> Tuple[float, ...]:
        return tuple(math.radians(p) for p in self.phi_deg)


@dataclass(frozen=True)
class OutputSection:
    out_dir: str = "runs/default"
    plot: bool = False


@dataclass(frozen=True)
class RunConfig:
    model: ModelSection = field(default_factory=ModelSection)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    ensemble: EnsembleSection = field(default_factory=EnsembleSection)
    detection: DetectionSection = field(default_factory=DetectionSection)
    output: OutputSection = field(default_factory=OutputSection)
    physical: Optional[PhysicalSetup] = None

    def __post_init__(self) -> None:
        if self.ensemble.stationary_cutoff >= self.integrator.tau_end:
            raise ConfigError("ensemble.stationary_cutoff must be smaller than integrator.tau_end")
        params = self.params
        if self.detection.mode == "fixed":
            if not params.above_threshold:
                raise ConfigError("fixed-LO detection needs sigma > 1")
            end = self.detection.t0 + self.detection_time
            if end > self.integrator.tau_end + 1e-9:
                raise ConfigError(f"detection window ends at {end:.6g}, after tau_end = {self.integrator.tau_end}")

    @property
    def params(self) -> DimensionlessParams:
        if self.physical is not None:
            return dimensionless(self.physical)
        m = self.model
        return DimensionlessParams(sigma=m.sigma, kappa=m.kappa, g=m.g)

    @property
    def detection_time(self) -> float:
        if self.detection.T is not None:
            return self.detection.T
        p = self.params
        return optimal_detection_time(p.sigma, p.d)

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "model": asdict(self.model),
            "integrator": asdict(self.integrator),
            "ensemble": asdict(self.ensemble),
            "detection": asdict(self.detection),
            "output": asdict(self.output),
            "physical": asdict(self.physical) if self.physical is not None else None,
        }
        out["detection"]["phi_deg"] = list(self.detection.phi_deg)
        return out

    @classmethod
    def from_dict(cls, raw: Optional[Mapping[str, Any]]) -> "RunConfig":
        raw = dict(raw or {})
        unknown = set(raw) - set(SECTIONS)
        if unknown:
            raise ConfigError(f"unknown config section(s): {sorted(unknown)}")
        try:
            ens = dict(raw.get("ensemble") or {})
            integ = dict(raw.get("integrator") or {})
            if "record_every" in ens:
                integ["record_every"] = ens.pop("record_every")
            det = dict(raw.get("detection") or {})
            if "omega" in det:
                det["omega"] = OmegaGrid(**det["omega"]) if isinstance(det["omega"], Mapping) else OmegaGrid.parse(str(det["omega"]))
            if "phi_deg" in det:
                det["phi_deg"] = tuple(float(p) for p in np.atleast_1d(det["phi_deg"]))
            physical = raw.get("physical")
            return cls(
                model=ModelSection(**(raw.get("model") or {})),
                integrator=IntegratorConfig(**integ),
                ensemble=EnsembleSection(**ens),
                detection=DetectionSection(**det),
                output=OutputSection(**(raw.get("output") or {})),
                physical=PhysicalSetup(**physical) if physical else None,
            )
        except TypeError as exc:
            raise ConfigError(f"bad config key: {exc}") from exc
        except DopoError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    def with_overrides(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """Apply ``{"section.key": value}`` overrides; ``None`` values are ignored."""
        raw = self.to_dict()
        for dotted, value in overrides.items():
            if value is None:
                continue
            section, _, key = dotted.partition(".")
            if section not in SECTIONS or not key:
                raise ConfigError(f"override key must be section.key, got {dotted!r}")
            if raw.get(section) is None:
                raw[section] = {}
            raw[section][key] = value
        return RunConfig.from_dict(raw)


def load_config(path) -> RunConfig:
    with open(Path(path), "r", encoding="utf-8") as handle:
        return RunConfig.from_dict(yaml.safe_load(handle))


__all__ = [
    "DetectionSection",
    "EnsembleSection",
    "ModelSection",
    "OmegaGrid",
    "OutputSection",
    "RunConfig",
    "load_config",
]
