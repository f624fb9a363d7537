# SPDX-License-Identifier: Apache-2.0

from __future__ import annotations

from dataclasses import dataclass

from ensemble_cluster.dynamics.params import DEFAULT_LIFETIME_S, PhysicalParams


def ramsey_zones(ensembles: int) -> int:
    """R_1..R_{K-1} plus R_E."""
    return ensembles if ensembles >= 2 else 0


def total_protocol_time(ensembles: int, params: PhysicalParams, zone_transit: float = 0.0) -> float:
    if ensembles < 0:
        raise ValueError(f"Chain length must be non-negative, got {ensembles}")
    if zone_transit < 0:
        raise ValueError(f"Zone transit time must be non-negative, got {zone_transit}")
    return ensembles * params.chain_pass_time + ramsey_zones(ensembles) * zone_transit


@dataclass(frozen=True)
class TimeBudget:
    ensembles: int
    pass_time: float
    zone_transit: float
    total: float
    lifetime: float

    @property
    def lifetime_fraction(self) -> float:
        return self.total / self.lifetime

    @property
    def margin(self) -> float:
        """Lifetime over protocol time; infinite for an empty protocol."""
        return self.lifetime / self.total if self.total > 0 else float("inf")

    @property
    def slack(self) -> float:
        return self.lifetime - self.total

    @property
    def feasible(self) -> bool:
        return self.total < self.lifetime

    def to_dict(self) -> dict:
        return {
            "ensembles": self.ensembles,
            "pass_time_s": self.pass_time,
            "zone_transit_s": self.zone_transit,
            "total_s": self.total,
            "lifetime_s": self.lifetime,
            "lifetime_fraction": self.lifetime_fraction,
            "margin": self.margin if self.total > 0 else None,
            "slack_s": self.slack,
            "feasible": self.feasible,
        }


def feasibility(
    ensembles: int,
    params: PhysicalParams,
    zone_transit: float = 0.0,
    lifetime: float = DEFAULT_LIFETIME_S,
) -> TimeBudget:
    """Protocol duration against the Rydberg lifetime of the control atom."""
    if lifetime <= 0:
        raise ValueError(f"Lifetime must be positive, got {lifetime}")
    total = total_protocol_time(ensembles, params, zone_transit)
    return TimeBudget(ensembles, params.chain_pass_time, zone_transit, total, lifetime)
