"""Shared estimator parameters and window schedules."""

from __future__ import annotations

from dataclasses import dataclass, replace


DISCRETE = "discrete"
CONTINUOUS = "continuous"

DEFAULT_DISCRETE_SCHEDULE = (50, 100, 200, 400)
DEFAULT_CONTINUOUS_SCHEDULE = (5, 10, 20, 40)


@dataclass(frozen=True)
class Params:
    """Tolerances and window schedule shared by the spectral estimator and
    the relation checkers.

    schedule         window half-widths; per-domain defaults when None
    tol_stab         two estimates within this agree ("stabilized")
    cutoff_fraction  pair admission: log-quotient >= fraction of the window max
    gamma_max        |estimate| beyond this is flagged as divergent
    delta_merge      adjacent component intervals closer than this merge
                     (defaults to 10 * tol_stab)
    samples_per_unit sampling density for continuous-time scans and validation
    ode_step         fixed integration step for continuous propagation
    """

    schedule: tuple[int, ...] | None = None
    tol_stab: float = 0.02
    cutoff_fraction: float = 0.5
    gamma_max: float = 50.0
    delta_merge: float | None = None
    samples_per_unit: int = 10
    ode_step: float = 1e-2

    def __post_init__(self):
        if self.tol_stab <= 0 or self.cutoff_fraction <= 0 or self.cutoff_fraction >= 1:
            raise ValueError("tol_stab must be positive and cutoff_fraction in (0, 1)")
        if self.gamma_max <= 0 or self.samples_per_unit <= 0 or self.ode_step <= 0:
            raise ValueError("gamma_max, samples_per_unit and ode_step must be positive")
        if self.delta_merge is not None and self.delta_merge <= 0:
            raise ValueError("delta_merge must be positive")
        if self.schedule is not None:
            sched = tuple(self.schedule)
            if not sched or any(b <= a for a, b in zip(sched, sched[1:])):
                raise ValueError("schedule must be non-empty and strictly increasing")
            object.__setattr__(self, "schedule", sched)

    def windows(self, time_domain: str) -> tuple[int, ...]:
        if self.schedule is not None:
            return self.schedule
        if time_domain == DISCRETE:
            return DEFAULT_DISCRETE_SCHEDULE
        return DEFAULT_CONTINUOUS_SCHEDULE

    @property
    def merge_tolerance(self) -> float:
        return self.delta_merge if self.delta_merge is not None else 10.0 * self.tol_stab

    def with_schedule(self, schedule) -> "Params":
        return replace(self, schedule=tuple(schedule))


DEFAULT = Params()
