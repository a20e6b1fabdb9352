"""Parameter sweeps of the fixed-LO closed form and the figure tables built from them.

Every table carries ``v_out`` and ``v_out_db``. ``write_figures`` stores one CSV per panel and,
when asked, renders PNGs next to them.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..analytics.fixed_lo import fixed_lo_optimum_curve, fixed_lo_spectrum, optimal_detection_time
from ..analytics.spectra import DetectionConfig, to_db
from ..errors import ConfigError
from .persistence import save_csv

log = logging.getLogger(__name__)

AXES = ("phi", "d", "T", "omega", "sigma")

FIG2_D = (1e-11, 1e-12, 1e-13)
FIG2_T = np.logspace(4.0, 8.0, 241)
FIG2_INSET_D = np.logspace(-14.0, -6.0, 81)
FIG3A_PHI_DEG = (88.0, 89.0, 89.5, 90.0)
FIG3A_D = 1e-10
FIG3A_OMEGA = np.linspace(0.0, 2.0, 201)
FIG3B_D = (1e-13, 1e-6)
FIG3B_PHI_DEG = np.linspace(80.0, 90.0, 41)


@dataclass(frozen=True)
class SweepPoint:
    """Fixed coordinates of a sweep; ``T=None`` means the optimal window at (sigma, d)."""

    phi: float = math.pi / 2
    d: float = 1e-12
    T: Optional[float] = None
    omega: float = 0.0
    sigma: float = math.sqrt(2.0)

    def window(self) -> float:
        return optimal_detection_time(self.sigma, self.d) if self.T is None else self.T

    def value(self) -> float:
        config = DetectionConfig(phi=self.phi, T=self.window(), mode="fixed")
        return float(fixed_lo_spectrum(self.omega, config, self.d, self.sigma))


def sweep(base: SweepPoint, axis: str, grid: Iterable[float]) -> pd.DataFrame:
    """Closed-form V over one axis with the remaining coordinates taken from ``base``."""
    if axis not in AXES:
        raise ConfigError(f"sweep axis must be one of {AXES}, got {axis!r}")
    grid = np.asarray(list(grid), dtype=float)
    if axis == "omega":
        # one vectorized call
        config = DetectionConfig(phi=base.phi, T=base.window(), mode="fixed")
        v = np.asarray(fixed_lo_spectrum(grid, config, base.d, base.sigma), dtype=float)
    else:
        v = np.array([replace(base, **{axis: float(x)}).value() for x in grid])
    log.debug("[sweep] %s: %d points, min V = %.6g", axis, grid.size, float(np.min(v)) if v.size else math.nan)
    return pd.DataFrame({axis: grid, "v_out": v, "v_out_db": to_db(v)})


def detection_time_curves(ds: Sequence[float] = FIG2_D, T: Sequence[float] = FIG2_T, sigma: float = math.sqrt(2.0)) -> pd.DataFrame:
    """V at phi = pi/2, omega = 0 against window length, one curve per d."""
    frames = []
    for d in ds:
        frame = sweep(SweepPoint(d=d, sigma=sigma), "T", T)
        frame.insert(0, "d", d)
        frame["T_opt"] = optimal_detection_time(sigma, d)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def optimum_level(ds: Sequence[float] = FIG2_INSET_D, sigma: float = math.sqrt(2.0)) -> pd.DataFrame:
    """V at the optimal window as a function of d, alongside 1/T_opt."""
    rows = []
    for d in ds:
        point = SweepPoint(d=float(d), sigma=sigma)
        t_opt = point.window()
        v = point.value()
        rows.append({"d": float(d), "T_opt": t_opt, "v_out": v, "v_out_db": float(to_db(v)), "inv_T_opt": 1.0 / t_opt})
    return pd.DataFrame(rows)


def phase_detuning_spectra(
    phi_deg: Sequence[float] = FIG3A_PHI_DEG,
    d: float = FIG3A_D,
    omega: Sequence[float] = FIG3A_OMEGA,
    sigma: float = math.sqrt(2.0),
) -> pd.DataFrame:
    """V(omega) at the optimal window for LO phases near pi/2."""
    frames = []
    for p in phi_deg:
        frame = sweep(SweepPoint(phi=math.radians(p), d=d, sigma=sigma), "omega", omega)
        frame.insert(0, "phi_deg", float(p))
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def optimum_versus_phase(
    phi_deg: Sequence[float] = FIG3B_PHI_DEG,
    ds: Sequence[float] = FIG3B_D,
    sigma: float = math.sqrt(2.0),
) -> pd.DataFrame:
    """Best squeezing over omega at T_opt against LO phase, with the optimal frequency."""
    frames = []
    for d in ds:
        curve = fixed_lo_optimum_curve([math.radians(p) for p in phi_deg], sigma, d)
        curve.insert(0, "phi_deg", np.asarray(phi_deg, dtype=float))
        curve.insert(0, "d", d)
        frames.append(curve)
    return pd.concat(frames, ignore_index=True)


def figure_tables(sigma: float = math.sqrt(2.0)) -> Dict[str, pd.DataFrame]:
    return {
        "fig2_v_vs_T": detection_time_curves(sigma=sigma),
        "fig2_inset_vopt_vs_d": optimum_level(sigma=sigma),
        "fig3a_v_vs_omega": phase_detuning_spectra(sigma=sigma),
        "fig3b_vopt_vs_phi": optimum_versus_phase(sigma=sigma),
    }


def _render(name: str, table: pd.DataFrame, path: Path) -> Path:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:  # pragma: no cover - optional dependency
        raise RuntimeError("Matplotlib is required for rendering sweep figures") from exc

    fig, ax = plt.subplots(figsize=(7, 4.5))
    if name == "fig2_v_vs_T":
        for d, part in table.groupby("d"):
            ax.semilogx(part["T"], part["v_out_db"], label=f"d = {d:g}")
        ax.set_xlabel("T")
    elif name == "fig2_inset_vopt_vs_d":
        ax.semilogx(table["d"], table["v_out_db"], color="black")
        ax.set_xlabel("d")
    elif name == "fig3a_v_vs_omega":
        for p, part in table.groupby("phi_deg"):
            ax.plot(part["omega"], part["v_out_db"], label=f"phi = {p:g} deg")
        ax.set_xlabel("omega")
    else:
        for d, part in table.groupby("d"):
            ax.plot(part["phi_deg"], part["v_out_db"], label=f"d = {d:g}")
        ax.set_xlabel("phi (deg)")
    ax.set_ylabel("V (dB)")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="best")
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def write_figures(out_dir, sigma: float = math.sqrt(2.0), plot: bool = False) -> List[Path]:
    """Write every figure table as CSV (and PNG when ``plot``) under ``out_dir``."""
    out = Path(out_dir)
    written: List[Path] = []
    for name, table in figure_tables(sigma).items():
        path = out / f"{name}.csv"
        save_csv(path, table)
        written.append(path)
        if plot:
            written.append(_render(name, table, out / f"{name}.png"))
    log.info("[sweep] wrote %d files to %s", len(written), out)
    return written


__all__ = [
    "AXES",
    "SweepPoint",
    "detection_time_curves",
    "figure_tables",
    "optimum_level",
    "optimum_versus_phase",
    "phase_detuning_spectra",
    "sweep",
    "write_figures",
]
