"""Faint-pulse key-exchange sessions over the modeled tandem link.

Physics per pulse: the normalized counter powers come straight from the
first-order fringe law; each counter clicks with Poissonian probability
1 - exp(-eta * mu * P), independently OR-ed with a dark-count probability.
``mu`` is the mean photon number a counter receives at its fringe maximum
(P = 1).  No dead time or afterpulsing.

Encoding and sifting (the fringe law itself dictates neither; these are
this simulator's fixed choices):

BB84
    Alice draws a bit and a basis: phi_a in {0, pi} encodes bits 0/1 in
    basis 0 and {pi/2, 3*pi/2} in basis 1.  Bob draws a basis and applies
    the canonical phase {0, pi/2}, minus a fixed offset absorbing
    link_phase + phase offset so the achieved fringe argument is purely
    the canonical difference.  An upper-only click decodes as 0, a
    lower-only click as 1; no-click and double-click pulses are dropped,
    and sifting keeps matched-basis pulses.

B92
    Alice encodes bit 0 as phi_a = 0 and bit 1 as phi_a = pi/2.  Bob
    randomly applies canonical pi or 3*pi/2 (again minus the fixed
    offset).  Any click while Bob used pi implies bit 1; while 3*pi/2,
    bit 0 (the opposite choice sits on the fringe null and cannot click
    without dark counts).  Clicked pulses are the sifted key.

Sessions are bit-reproducible for a given seed: draws use a single
numpy PCG64 generator seeded from the config, in the fixed order bits,
bases, upper-counter uniforms, lower-counter uniforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InfeasibleProtocolError, InvalidParameterError
from .link import LinkSpec, interference_coeffs, phase_offset, sideband_powers
from .modulator import ModulatorSpec
from .protocols import B92, BB84, check_protocol

_BB84_ALICE_PHASES = ((0.0, math.pi), (0.5 * math.pi, 1.5 * math.pi))  # [basis][bit]
_BB84_BOB_PHASES = (0.0, 0.5 * math.pi)  # [basis]
_B92_ALICE_PHASES = (0.0, 0.5 * math.pi)  # [bit]
_B92_BOB_PHASES = (math.pi, 1.5 * math.pi)  # [choice]; click => bit 1, bit 0


@dataclass(frozen=True)
class SessionConfig:
    protocol: str
    alice: ModulatorSpec
    bob: ModulatorSpec
    link: LinkSpec
    mu: float
    eta: float = 1.0
    p_dark: float = 0.0
    n_pulses: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.protocol not in (B92, BB84):
            raise InvalidParameterError(f"unknown protocol {self.protocol!r}")
        if self.mu < 0:
            raise InvalidParameterError("mu must be >= 0")
        if not (0.0 <= self.eta <= 1.0):
            raise InvalidParameterError("eta must lie in [0, 1]")
        if not (0.0 <= self.p_dark < 1.0):
            raise InvalidParameterError("p_dark must lie in [0, 1)")
        if self.n_pulses <= 0:
            raise InvalidParameterError("n_pulses must be > 0")


@dataclass(frozen=True)
class SessionStats:
    sent: int
    conclusive: int
    sifted_bits: int
    errors: int
    qber: float | None
    upper_clicks: int
    lower_clicks: int


def _counter_powers(cfg: SessionConfig, phase_error: float):
    """Per-combination (upper, lower) powers for the protocol alphabet.

    Bob's compensation uses the configured link phase and the pairing's
    intrinsic offset; ``phase_error`` shifts the physical span phase
    without Bob's knowledge.
    """
    offset = phase_offset(*interference_coeffs(cfg.alice, cfg.bob))
    compensation = cfg.link.link_phase + offset
    link_actual = replace(cfg.link, link_phase=cfg.link.link_phase + phase_error)

    if cfg.protocol == BB84:
        alice_phases = [p for pair in _BB84_ALICE_PHASES for p in pair]
        bob_phases = _BB84_BOB_PHASES
    else:
        alice_phases = list(_B92_ALICE_PHASES)
        bob_phases = _B92_BOB_PHASES

    upper = np.empty((len(alice_phases), len(bob_phases)))
    lower = np.empty_like(upper)
    for i, phi_a in enumerate(alice_phases):
        for j, phi_b in enumerate(bob_phases):
            alice = replace(cfg.alice, phi=phi_a)
            bob = replace(cfg.bob, phi=phi_b - compensation)
            upper[i, j], lower[i, j] = sideband_powers(alice, bob, link_actual)
    return upper, lower


def run_session(cfg: SessionConfig, phase_error: float = 0.0) -> SessionStats:
    """Simulate one key-exchange session; deterministic for a given seed."""
    feasibility = check_protocol(cfg.alice, cfg.bob, cfg.protocol)
    if not feasibility.feasible:
        raise InfeasibleProtocolError(
            feasibility.failure_reason,
            f"{cfg.protocol} not supported by this pairing: "
            f"{feasibility.failure_reason}",
        )

    upper_p, lower_p = _counter_powers(cfg, phase_error)
    n = cfg.n_pulses
    rng = np.random.default_rng(cfg.seed)
    bits = rng.integers(0, 2, n)

    if cfg.protocol == BB84:
        alice_basis = rng.integers(0, 2, n)
        bob_basis = rng.integers(0, 2, n)
        row = 2 * alice_basis + bits  # index into the flattened alice alphabet
        col = bob_basis
    else:
        bob_choice = rng.integers(0, 2, n)
        row = bits
        col = bob_choice

    p_up = upper_p[row, col]
    p_low = lower_p[row, col]
    survive = (1.0 - cfg.p_dark) * np.exp(-cfg.eta * cfg.mu * np.stack((p_up, p_low)))
    clicks = rng.random((2, n)) < 1.0 - survive
    up_click, low_click = clicks[0], clicks[1]

    if cfg.protocol == BB84:
        single = up_click ^ low_click
        decoded = low_click.astype(np.int64)  # upper-only -> 0, lower-only -> 1
        sifted = single & (alice_basis == bob_basis)
        conclusive = int(np.count_nonzero(single))
    else:
        clicked = up_click | low_click
        decoded = 1 - col  # Bob's pi choice implies bit 1, 3*pi/2 implies bit 0
        sifted = clicked
        conclusive = int(np.count_nonzero(clicked))

    sifted_count = int(np.count_nonzero(sifted))
    errors = int(np.count_nonzero(sifted & (decoded != bits)))
    return SessionStats(
        sent=n,
        conclusive=conclusive,
        sifted_bits=sifted_count,
        errors=errors,
        qber=errors / sifted_count if sifted_count else None,
        upper_clicks=int(np.count_nonzero(up_click)),
        lower_clicks=int(np.count_nonzero(low_click)),
    )


def offset_seed(base_seed: int, index: int) -> int:
    """Deterministic child seed for the ``index``-th offset session."""
    return int(np.random.SeedSequence((base_seed, index)).generate_state(1)[0])


def qber_vs_offset(
    cfg: SessionConfig, offsets: list[float]
) -> list[tuple[float, float | None]]:
    """QBER of one session per span-phase offset Bob does not compensate.

    With double-click discarding and matched bases, the expected BB84
    error rate is sin^2(offset / 2).
    """
    results = []
    for i, delta in enumerate(offsets):
        child = replace(cfg, seed=offset_seed(cfg.seed, i))
        stats = run_session(child, phase_error=delta)
        results.append((delta, stats.qber))
    return results
