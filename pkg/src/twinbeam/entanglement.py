"""Generalized-quadrature variances and the Duan-Simon inseparability figure.

The criterion I = Var(X₋) + Var(P₊) < 2 certifies entanglement for the
specific measured mode pair selected by the two LO profiles; joint variables
are normalized so that two-mode vacuum gives exactly 1 per quadrature.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .detection import HomodyneSpec, _joint_variance
from .errors import ValidationError

#: separability boundary of the inseparability criterion
DUAN_BOUND = 2.0


@dataclass(frozen=True)
class EntanglementReport:
    """Result of one inseparability measurement on a probe/conjugate pair."""

    var_x_minus: float
    var_p_plus: float
    inseparability: float
    squeezing_db_x: float
    squeezing_db_p: float
    entangled: bool

    def to_dict(self) -> dict:
        return {
            "var_x_minus": self.var_x_minus,
            "var_p_plus": self.var_p_plus,
            "inseparability": self.inseparability,
            "squeezing_db_x": self.squeezing_db_x,
            "squeezing_db_p": self.squeezing_db_p,
            "entangled": self.entangled,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def squeezing_db(variance: float, reference: float) -> float:
    """10·log₁₀(variance/reference); negative means below the reference."""
    if variance <= 0.0 or reference <= 0.0:
        raise ValidationError(
            f"variance and reference must be positive, got ({variance}, {reference})"
        )
    return 10.0 * math.log10(variance / reference)


def generalized_variances(
    state, probe_spec: HomodyneSpec, conj_spec: HomodyneSpec
) -> tuple[float, float]:
    """(Var(X₋), Var(P₊)) for the measured mode pair, vacuum-=1 units.

    X₋ is the homodyne difference at scan phase 0, P₊ the sum at π/2;
    detection efficiencies of the specs are included.
    """
    vx = _joint_variance(state, probe_spec, conj_spec, 0.0, -1.0)
    vp = _joint_variance(state, probe_spec, conj_spec, 0.5 * math.pi, +1.0)
    return vx, vp


def _report(vx: float, vp: float) -> EntanglementReport:
    i = vx + vp
    return EntanglementReport(
        var_x_minus=vx,
        var_p_plus=vp,
        inseparability=i,
        squeezing_db_x=squeezing_db(vx, 1.0),
        squeezing_db_p=squeezing_db(vp, 1.0),
        entangled=bool(i < DUAN_BOUND),
    )


def inseparability(
    state,
    probe_spec: HomodyneSpec,
    conj_spec: HomodyneSpec,
    optimize_phase: bool = True,
) -> EntanglementReport:
    """Duan-Simon report for the measured mode pair.

    With ``optimize_phase`` the global LO phase φ is chosen to minimize
    diff(φ) + sum(φ + π/2), mirroring how the minima are read off a scan.
    Any joint variance of a Gaussian state is A + B·cos2φ + C·sin2φ, so the
    minimum is computed in closed form from three samples.
    """
    if not optimize_phase:
        vx, vp = generalized_variances(state, probe_spec, conj_spec)
        return _report(vx, vp)

    def diff(phi):
        return _joint_variance(state, probe_spec, conj_spec, phi, -1.0)

    def summ(phi):
        return _joint_variance(state, probe_spec, conj_spec, phi + 0.5 * math.pi, +1.0)

    def f(phi):
        return diff(phi) + summ(phi)

    f0, f1, f2 = f(0.0), f(0.25 * math.pi), f(0.5 * math.pi)
    a = 0.5 * (f0 + f2)
    b = 0.5 * (f0 - f2)
    c = f1 - a
    if math.hypot(b, c) < 1e-15:
        phi_star = 0.0
    else:
        phi_star = 0.5 * math.atan2(-c, -b)
    return _report(diff(phi_star), summ(phi_star))
