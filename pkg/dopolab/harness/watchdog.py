"""
Divergence watchdog for positive-P ensembles.
- Counts trajectories that left the finite numbers, block by block.
- Logs each block with divergences and raises once the divergent fraction passes the threshold.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

from ..errors import DivergenceThresholdExceeded

log = logging.getLogger(__name__)


@dataclass
class WatchdogConfig:
    threshold: float = 1e-3          # 0.1% of the planned ensemble
    planned: int = 0                 # total trajectories of the run
    enabled: bool = True


@dataclass
class WatchdogState:
    seen: int = 0
    diverged: int = 0
    by_block: Dict[int, int] = field(default_factory=dict)


class DivergenceWatchdog:
    def __init__(self, cfg: WatchdogConfig, state: Optional[WatchdogState] = None):
        self.cfg = cfg
        self.state = state or WatchdogState()

    @property
    def fraction(self) -> float:
        return self.state.diverged / self.state.seen if self.state.seen else 0.0

    def _limit(self) -> float:
        # budget is a fraction of the planned ensemble
        return self.cfg.threshold * max(self.cfg.planned, self.state.seen)

    def check(self, block: int, n_trajectories: int, n_diverged: int) -> None:
        """Record one finished block; raise DivergenceThresholdExceeded when over budget."""
        self.state.seen += int(n_trajectories)
        self.state.diverged += int(n_diverged)
        if n_diverged:
            self.state.by_block[int(block)] = int(n_diverged)
            log.warning("[watchdog] block %d: %d of %d trajectories diverged", block, n_diverged, n_trajectories)
        if not self.cfg.enabled:
            return
        if self.state.diverged > self._limit():
            total = max(self.cfg.planned, self.state.seen)
            fraction = self.state.diverged / total
            log.error("[watchdog] divergent fraction %.4g over threshold %.4g", fraction, self.cfg.threshold)
            raise DivergenceThresholdExceeded(fraction, self.cfg.threshold)

    def summary(self) -> Dict[str, float]:
        return {
            "trajectories": self.state.seen,
            "diverged": self.state.diverged,
            "fraction": self.fraction,
            "threshold": self.cfg.threshold,
        }


__all__ = ["DivergenceWatchdog", "WatchdogConfig", "WatchdogState"]
