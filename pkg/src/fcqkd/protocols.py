"""Protocol feasibility analysis for the nine tandem modulator pairings.

A pairing supports B92 when unit visibility is reachable by trimming the
index ratio m_A/m_B and the intrinsic phase offset is a multiple of pi; it
supports BB84 when the offset is an odd multiple of pi/2 instead.  Under
those conditions the counters follow

    B92:   P(upper) = P(lower) = cos^2(dphi/2)
    BB84:  P(upper) = cos^2(dphi/2),  P(lower) = sin^2(dphi/2)

with dphi = phi_b - phi_a + link_phase + offset.

:func:`classify_pair` derives feasibility, bias constraints and required
index ratios purely numerically from the interference coefficients.  The
module also embeds an independently hand-derived reference table
(``REFERENCE_TABLE``) of closed-form expressions per pairing, used by the
``table2`` CLI command and the acceptance suite to cross-check the
numeric classification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .errors import InfeasibleProtocolError
from .link import interference_coeffs, phase_offset, wrap_to_pi
from .modulator import ModulatorKind, ModulatorSpec, make_modulator

B92 = "B92"
BB84 = "BB84"

THETA_TOL = 1e-9
# An interference coefficient below this (for unit drive indices, couplings
# of order one) counts as an exact analytic zero.
ZERO_COEFF = 1e-12

CANONICAL_PHASES = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)


def wrap_to_two_pi(angle: float) -> float:
    """Wrap an angle to [0, 2*pi)."""
    wrapped = math.fmod(angle, math.tau)
    if wrapped < 0.0:
        wrapped += math.tau
    return 0.0 if wrapped == math.tau else wrapped


def effective_phase_diff(
    phi_a: float, phi_b: float, link_phase: float, offset: float
) -> float:
    """Total fringe argument phi_b - phi_a + link_phase + offset in [0, 2*pi)."""
    return wrap_to_two_pi(phi_b - phi_a + link_phase + offset)


@dataclass(frozen=True)
class ProtocolFeasibility:
    """Verdict for one protocol on one (biased) modulator pairing.

    ``index_ratio`` is the m_A/m_B that reaches unit visibility; None when
    infeasible.  ``failure_reason`` is "none", "theta-mismatch" or
    "zero-visibility".
    """

    protocol: str
    feasible: bool
    bias_constraint: str
    index_ratio: float | None
    failure_reason: str


@dataclass(frozen=True)
class ClassificationRow:
    """One row of the nine-pairing classification table."""

    alice_kind: ModulatorKind
    bob_kind: ModulatorKind
    theta_label: str
    ratio_label: str
    reference_bias: tuple[float, float]
    theta_at_reference: float
    ratio_at_reference: float
    b92: ProtocolFeasibility
    bb84: ProtocolFeasibility


def _unit_spec(spec: ModulatorSpec) -> ModulatorSpec:
    """Template with unit drive index, keeping kind and biases."""
    return make_modulator(spec.kind, 1.0, spec.psi, spec.phi)


def _theta_distance(offset: float, protocol: str) -> float:
    """Distance of the offset from the protocol's required phase class."""
    target_shift = 0.0 if protocol == B92 else 0.5 * math.pi
    return abs(math.remainder(offset - target_shift, math.pi))


def unit_coefficients(alice: ModulatorSpec, bob: ModulatorSpec) -> tuple[complex, complex]:
    """Interference coefficients for unit drive indices on both sides."""
    return interference_coeffs(_unit_spec(alice), _unit_spec(bob))


def _check(alice: ModulatorSpec, bob: ModulatorSpec, protocol: str) -> ProtocolFeasibility:
    a, b = unit_coefficients(alice, bob)
    if abs(a) <= ZERO_COEFF or abs(b) <= ZERO_COEFF:
        return ProtocolFeasibility(protocol, False, "as-configured", None, "zero-visibility")
    offset = phase_offset(a, b)
    if _theta_distance(offset, protocol) > THETA_TOL:
        return ProtocolFeasibility(protocol, False, "as-configured", None, "theta-mismatch")
    return ProtocolFeasibility(protocol, True, "as-configured", abs(b) / abs(a), "none")


def check_b92(alice: ModulatorSpec, bob: ModulatorSpec) -> ProtocolFeasibility:
    """B92 verdict at the given biases; the drive indices are free."""
    return _check(alice, bob, B92)


def check_bb84(alice: ModulatorSpec, bob: ModulatorSpec) -> ProtocolFeasibility:
    """BB84 verdict at the given biases; the drive indices are free."""
    return _check(alice, bob, BB84)


def check_protocol(
    alice: ModulatorSpec, bob: ModulatorSpec, protocol: str
) -> ProtocolFeasibility:
    if protocol == B92:
        return check_b92(alice, bob)
    if protocol == BB84:
        return check_bb84(alice, bob)
    raise InfeasibleProtocolError("theta-mismatch", f"unknown protocol {protocol!r}")


# --- bias-constraint families --------------------------------------------
#
# Candidate bias families probed by classify_pair, in order of preference.
# Each maps (free bias t, integer n) -> (psi_a, psi_b).

_N_RANGE = (-2, -1, 0, 1, 2)


class _Family(NamedTuple):
    label: str
    points: Callable[[float, int], tuple[float, float]]


_FEASIBLE_FAMILIES = (
    _Family("psi_a = n*pi", lambda t, n: (n * math.pi, t)),
    _Family("psi_b = n*pi", lambda t, n: (t, n * math.pi)),
    _Family("psi_b = psi_a + n*pi", lambda t, n: (t, t + n * math.pi)),
    _Family("psi_b = psi_a + (2n+1)*pi/2", lambda t, n: (t, t + (2 * n + 1) * 0.5 * math.pi)),
)

_ZERO_VIS_FAMILIES = (
    _Family("psi_a = (2n+1)*pi/2", lambda t, n: ((2 * n + 1) * 0.5 * math.pi, t)),
    _Family("psi_b = (2n+1)*pi/2", lambda t, n: (t, (2 * n + 1) * 0.5 * math.pi)),
)


def _specs_at(alice_kind, bob_kind, psi_a, psi_b):
    return make_modulator(alice_kind, 1.0, psi_a), make_modulator(bob_kind, 1.0, psi_b)


def _feasibility_on(alice_kind, bob_kind, protocol, points):
    verdicts = [
        _check(*_specs_at(alice_kind, bob_kind, pa, pb), protocol) for pa, pb in points
    ]
    return verdicts


def _classify_protocol(
    alice_kind: ModulatorKind,
    bob_kind: ModulatorKind,
    protocol: str,
    psi_grid: list[float],
) -> ProtocolFeasibility:
    grid_points = [(pa, pb) for pa in psi_grid for pb in psi_grid]
    verdicts = _feasibility_on(alice_kind, bob_kind, protocol, grid_points)
    if all(v.feasible for v in verdicts):
        ratio = verdicts[len(verdicts) // 3].index_ratio
        return ProtocolFeasibility(protocol, True, "any", ratio, "none")

    for family in _FEASIBLE_FAMILIES:
        points = [family.points(t, n) for t in psi_grid for n in _N_RANGE]
        family_verdicts = _feasibility_on(alice_kind, bob_kind, protocol, points)
        if all(v.feasible for v in family_verdicts):
            ratio = family_verdicts[len(family_verdicts) // 3].index_ratio
            return ProtocolFeasibility(protocol, True, family.label, ratio, "none")

    # Infeasible: decide whether the phase-offset condition is unreachable
    # outright, or reachable only on a bias locus where a coefficient dies.
    for family in _ZERO_VIS_FAMILIES:
        on_locus = [family.points(t, n) for t in psi_grid for n in _N_RANGE]
        locus_verdicts = _feasibility_on(alice_kind, bob_kind, protocol, on_locus)
        if not all(v.failure_reason == "zero-visibility" for v in locus_verdicts):
            continue
        # Just off the locus the offset must approach the required class.
        near = [(pa + 1e-6, pb + 1e-6) for pa, pb in on_locus]
        approaches = []
        for pa, pb in near:
            a, b = unit_coefficients(*_specs_at(alice_kind, bob_kind, pa, pb))
            if abs(a) <= ZERO_COEFF or abs(b) <= ZERO_COEFF:
                approaches.append(False)
                continue
            approaches.append(_theta_distance(phase_offset(a, b), protocol) < 1e-3)
        if all(approaches):
            return ProtocolFeasibility(
                protocol, False, family.label, None, "zero-visibility"
            )
    return ProtocolFeasibility(protocol, False, "none", None, "theta-mismatch")


def classify_pair(
    alice_kind: ModulatorKind,
    bob_kind: ModulatorKind,
    psi_grid: list[float],
) -> ClassificationRow:
    """Classify one kind pairing over a grid of generic biases.

    ``psi_grid`` supplies the generic bias samples; it must avoid exact
    singular biases (multiples of pi/2) unless those are being probed on
    purpose.  Everything is derived numerically from the interference
    coefficients; the canonical labels come from the reference table for
    readability only.
    """
    if not psi_grid:
        raise ValueError("psi_grid must be non-empty")
    b92 = _classify_protocol(alice_kind, bob_kind, B92, psi_grid)
    bb84 = _classify_protocol(alice_kind, bob_kind, BB84, psi_grid)

    ref_bias = (psi_grid[len(psi_grid) // 3], psi_grid[(2 * len(psi_grid)) // 3])
    a, b = unit_coefficients(*_specs_at(alice_kind, bob_kind, *ref_bias))
    theta_ref = phase_offset(a, b) if min(abs(a), abs(b)) > ZERO_COEFF else math.nan
    ratio_ref = abs(b) / abs(a) if abs(a) > ZERO_COEFF else math.inf

    ref = REFERENCE_TABLE[(alice_kind, bob_kind)]
    return ClassificationRow(
        alice_kind=alice_kind,
        bob_kind=bob_kind,
        theta_label=ref.theta_label,
        ratio_label=ref.ratio_label,
        reference_bias=ref_bias,
        theta_at_reference=theta_ref,
        ratio_at_reference=ratio_ref,
        b92=b92,
        bb84=bb84,
    )


class PhaseSetting(NamedTuple):
    phi_a: float
    phi_b: float
    delta_phi: float


def phase_alphabet(
    protocol: str, link_phase: float, offset: float
) -> list[PhaseSetting]:
    """Electrical-phase settings realizing the four canonical fringe points.

    Bob's returned phases absorb ``link_phase + offset`` so the achieved
    fringe argument is simply (canonical phi_b) - phi_a.  All sixteen
    combinations of the canonical phases are returned with their intended
    fringe argument; together they cover {0, pi/2, pi, 3*pi/2}.
    """
    if _theta_distance(offset, protocol) > THETA_TOL:
        raise InfeasibleProtocolError(
            "theta-mismatch",
            f"phase offset {offset!r} incompatible with {protocol}",
        )
    compensation = link_phase + offset
    settings = []
    for phi_a in CANONICAL_PHASES:
        for phi_b in CANONICAL_PHASES:
            settings.append(
                PhaseSetting(
                    phi_a=phi_a,
                    phi_b=wrap_to_two_pi(phi_b - compensation),
                    delta_phi=wrap_to_two_pi(phi_b - phi_a),
                )
            )
    return settings


# --- hand-derived reference table ------------------------------------------
#
# Closed-form expressions per pairing, derived by eliminating the coupling
# and index factors from the interference coefficients by hand.  Valid on
# the principal bias branch psi in (0, pi/2); the |.| ratio forms hold on
# (0, pi) away from the tan/cos singularities.  These are the comparison
# targets for the numeric classification, not inputs to it.


@dataclass(frozen=True)
class ReferenceVerdict:
    feasible: bool
    constraint: str
    failure_reason: str
    # Required m_A/m_B evaluated with the constraint applied (n = 0);
    # the free arguments are the unconstrained biases.
    constrained_ratio: Callable[[float, float], float] | None


@dataclass(frozen=True)
class ReferenceRow:
    theta_label: str
    ratio_label: str
    theta: Callable[[float, float], float]
    ratio: Callable[[float, float], float]
    b92: ReferenceVerdict
    bb84: ReferenceVerdict


_PM, _AM, _UM = ModulatorKind.PM, ModulatorKind.AM, ModulatorKind.UM

REFERENCE_TABLE: dict[tuple[ModulatorKind, ModulatorKind], ReferenceRow] = {
    (_UM, _UM): ReferenceRow(
        theta_label="psi_b - psi_a",
        ratio_label="|cos(psi_a)/cos(psi_b)|",
        theta=lambda pa, pb: pb - pa,
        ratio=lambda pa, pb: abs(math.cos(pa) / math.cos(pb)),
        b92=ReferenceVerdict(True, "psi_b = psi_a + n*pi", "none", lambda pa, pb: 1.0),
        bb84=ReferenceVerdict(
            True,
            "psi_b = psi_a + (2n+1)*pi/2",
            "none",
            lambda pa, pb: abs(math.cos(pa) / math.sin(pa)),
        ),
    ),
    (_AM, _AM): ReferenceRow(
        theta_label="0",
        ratio_label="|tan(psi_b)/tan(psi_a)|",
        theta=lambda pa, pb: 0.0,
        ratio=lambda pa, pb: abs(math.tan(pb) / math.tan(pa)),
        b92=ReferenceVerdict(True, "any", "none", lambda pa, pb: abs(math.tan(pb) / math.tan(pa))),
        bb84=ReferenceVerdict(False, "none", "theta-mismatch", None),
    ),
    (_PM, _PM): ReferenceRow(
        theta_label="0",
        ratio_label="1",
        theta=lambda pa, pb: 0.0,
        ratio=lambda pa, pb: 1.0,
        b92=ReferenceVerdict(True, "any", "none", lambda pa, pb: 1.0),
        bb84=ReferenceVerdict(False, "none", "theta-mismatch", None),
    ),
    (_PM, _AM): ReferenceRow(
        theta_label="pi/2",
        ratio_label="|tan(psi_b)|",
        theta=lambda pa, pb: 0.5 * math.pi,
        ratio=lambda pa, pb: abs(math.tan(pb)),
        b92=ReferenceVerdict(False, "none", "theta-mismatch", None),
        bb84=ReferenceVerdict(True, "any", "none", lambda pa, pb: abs(math.tan(pb))),
    ),
    (_AM, _PM): ReferenceRow(
        theta_label="-pi/2",
        ratio_label="1/|tan(psi_a)|",
        theta=lambda pa, pb: -0.5 * math.pi,
        ratio=lambda pa, pb: 1.0 / abs(math.tan(pa)),
        b92=ReferenceVerdict(False, "none", "theta-mismatch", None),
        bb84=ReferenceVerdict(True, "any", "none", lambda pa, pb: 1.0 / abs(math.tan(pa))),
    ),
    (_UM, _PM): ReferenceRow(
        theta_label="-psi_a",
        ratio_label="2*|cos(psi_a)|",
        theta=lambda pa, pb: -pa,
        ratio=lambda pa, pb: 2.0 * abs(math.cos(pa)),
        b92=ReferenceVerdict(True, "psi_a = n*pi", "none", lambda pa, pb: 2.0),
        bb84=ReferenceVerdict(False, "psi_a = (2n+1)*pi/2", "zero-visibility", None),
    ),
    (_PM, _UM): ReferenceRow(
        theta_label="psi_b",
        ratio_label="1/(2*|cos(psi_b)|)",
        theta=lambda pa, pb: pb,
        ratio=lambda pa, pb: 1.0 / (2.0 * abs(math.cos(pb))),
        b92=ReferenceVerdict(True, "psi_b = n*pi", "none", lambda pa, pb: 0.5),
        bb84=ReferenceVerdict(False, "psi_b = (2n+1)*pi/2", "zero-visibility", None),
    ),
    (_UM, _AM): ReferenceRow(
        theta_label="pi/2 - psi_a",
        ratio_label="2*|cos(psi_a)*tan(psi_b)|",
        theta=lambda pa, pb: 0.5 * math.pi - pa,
        ratio=lambda pa, pb: 2.0 * abs(math.cos(pa) * math.tan(pb)),
        b92=ReferenceVerdict(False, "psi_a = (2n+1)*pi/2", "zero-visibility", None),
        bb84=ReferenceVerdict(
            True, "psi_a = n*pi", "none", lambda pa, pb: 2.0 * abs(math.tan(pb))
        ),
    ),
    (_AM, _UM): ReferenceRow(
        theta_label="psi_b - pi/2",
        ratio_label="1/(2*|tan(psi_a)*cos(psi_b)|)",
        theta=lambda pa, pb: pb - 0.5 * math.pi,
        ratio=lambda pa, pb: 1.0 / (2.0 * abs(math.tan(pa) * math.cos(pb))),
        b92=ReferenceVerdict(False, "psi_b = (2n+1)*pi/2", "zero-visibility", None),
        bb84=ReferenceVerdict(
            True, "psi_b = n*pi", "none", lambda pa, pb: 1.0 / (2.0 * abs(math.tan(pa)))
        ),
    ),
}

ROW_ORDER: tuple[tuple[ModulatorKind, ModulatorKind], ...] = (
    (_UM, _UM),
    (_AM, _AM),
    (_PM, _PM),
    (_PM, _AM),
    (_AM, _PM),
    (_UM, _PM),
    (_PM, _UM),
    (_UM, _AM),
    (_AM, _UM),
)


def evaluate_pair(
    alice_kind: ModulatorKind, bob_kind: ModulatorKind, psi_a: float, psi_b: float
) -> tuple[float, float]:
    """Numeric (phase offset, unit-visibility index ratio) at given biases."""
    a, b = unit_coefficients(*_specs_at(alice_kind, bob_kind, psi_a, psi_b))
    return phase_offset(a, b), abs(b) / abs(a)


def compare_row_with_reference(
    alice_kind: ModulatorKind,
    bob_kind: ModulatorKind,
    row: ClassificationRow,
    psi_grid: list[float],
    tol: float = THETA_TOL,
) -> list[str]:
    """Mismatch descriptions between a classified row and the reference.

    Checks the phase offset and index ratio over ``psi_grid`` x ``psi_grid``
    (expected on the principal branch) plus feasibility verdicts,
    constraints and failure reasons.  An empty list means full agreement.
    """
    ref = REFERENCE_TABLE[(alice_kind, bob_kind)]
    name = f"{alice_kind.value}-{bob_kind.value}"
    failures: list[str] = []
    for pa in psi_grid:
        for pb in psi_grid:
            theta_num, ratio_num = evaluate_pair(alice_kind, bob_kind, pa, pb)
            dev = abs(wrap_to_pi(theta_num - ref.theta(pa, pb)))
            if dev > tol:
                failures.append(
                    f"{name}: theta deviates {dev:.3e} at psi=({pa:.6f},{pb:.6f})"
                )
            ratio_ref = ref.ratio(pa, pb)
            if abs(ratio_num / ratio_ref - 1.0) > tol:
                failures.append(
                    f"{name}: ratio deviates at psi=({pa:.6f},{pb:.6f})"
                )
    for proto, got, expect in (("B92", row.b92, ref.b92), ("BB84", row.bb84, ref.bb84)):
        if got.feasible != expect.feasible:
            failures.append(f"{name}/{proto}: feasible={got.feasible}, expected {expect.feasible}")
        if got.bias_constraint != expect.constraint:
            failures.append(
                f"{name}/{proto}: constraint={got.bias_constraint!r}, "
                f"expected {expect.constraint!r}"
            )
        if got.failure_reason != expect.failure_reason:
            failures.append(
                f"{name}/{proto}: reason={got.failure_reason!r}, "
                f"expected {expect.failure_reason!r}"
            )
        if expect.feasible and expect.constrained_ratio is not None:
            for t in (psi_grid[0], psi_grid[len(psi_grid) // 2], psi_grid[-1]):
                pa, pb = _constrained_point(expect.constraint, t)
                _, ratio_num = evaluate_pair(alice_kind, bob_kind, pa, pb)
                if abs(ratio_num / expect.constrained_ratio(pa, pb) - 1.0) > tol:
                    failures.append(
                        f"{name}/{proto}: constrained ratio mismatch at t={t:.6f}"
                    )
    return failures


def _constrained_point(constraint: str, t: float) -> tuple[float, float]:
    if constraint == "any":
        return t, t * 0.8 + 0.1
    if constraint == "psi_a = n*pi":
        return 0.0, t
    if constraint == "psi_b = n*pi":
        return t, 0.0
    if constraint == "psi_b = psi_a + n*pi":
        return t, t
    if constraint == "psi_b = psi_a + (2n+1)*pi/2":
        return t, t + 0.5 * math.pi
    raise ValueError(f"no sample point rule for constraint {constraint!r}")
