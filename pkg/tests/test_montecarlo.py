import math
from dataclasses import replace

import pytest

from fcqkd import (
    B92,
    BB84,
    InfeasibleProtocolError,
    LinkSpec,
    ModulatorKind,
    SessionConfig,
    make_modulator,
    qber_vs_offset,
    run_session,
)

PM, AM, UM = ModulatorKind.PM, ModulatorKind.AM, ModulatorKind.UM


def bb84_config(**overrides):
    base = dict(
        protocol=BB84,
        alice=make_modulator(UM, 0.1, math.pi / 4),
        bob=make_modulator(UM, 0.1, -math.pi / 4),
        link=LinkSpec(rf_frequency=2 * math.pi * 15e9, link_phase=0.27),
        mu=0.1,
        eta=1.0,
        p_dark=0.0,
        n_pulses=50_000,
        seed=11,
    )
    base.update(overrides)
    return SessionConfig(**base)


def b92_config(**overrides):
    base = dict(
        protocol=B92,
        alice=make_modulator(UM, 0.1, 0.0),
        bob=make_modulator(PM, 0.05, 0.0),
        link=LinkSpec(rf_frequency=2 * math.pi * 15e9, link_phase=0.6),
        mu=0.1,
        eta=1.0,
        p_dark=0.0,
        n_pulses=50_000,
        seed=3,
    )
    base.update(overrides)
    return SessionConfig(**base)


def test_reproducible_for_fixed_seed():
    cfg = bb84_config()
    assert run_session(cfg) == run_session(cfg)
    different = run_session(replace(cfg, seed=12))
    assert different != run_session(cfg)


def test_bb84_ideal_session_error_free():
    stats = run_session(bb84_config())
    assert stats.sifted_bits > 1000
    assert stats.conclusive >= stats.sifted_bits
    assert stats.errors == 0
    assert stats.qber == 0.0


def test_b92_ideal_session_error_free():
    stats = run_session(b92_config())
    assert stats.sifted_bits == stats.conclusive > 1000
    assert stats.qber == 0.0


def test_no_light_is_inconclusive():
    stats = run_session(b92_config(mu=0.0))
    assert stats.conclusive == 0
    assert stats.qber is None


def test_infeasible_protocol_rejected():
    with pytest.raises(InfeasibleProtocolError) as err:
        run_session(
            bb84_config(
                alice=make_modulator(AM, 0.1, 0.4), bob=make_modulator(AM, 0.1, 0.7)
            )
        )
    assert err.value.reason == "theta-mismatch"

    with pytest.raises(InfeasibleProtocolError) as err:
        run_session(
            b92_config(
                alice=make_modulator(UM, 0.1, math.pi / 2),
                bob=make_modulator(AM, 0.05, 0.4),
            )
        )
    assert err.value.reason == "zero-visibility"


def test_basis_mismatch_near_half():
    stats = run_session(bb84_config(n_pulses=100_000))
    matched_fraction = stats.sifted_bits / stats.conclusive
    sigma = math.sqrt(0.25 / stats.conclusive)
    assert abs(matched_fraction - 0.5) < 3 * sigma


def test_conclusive_rate_linear_in_mu():
    # at small mu the conclusive fraction is eta * mu * (mean pair power)
    for cfg_maker, pair_power in ((bb84_config, 1.0), (b92_config, 0.5)):
        rates = []
        mus = (0.01, 0.02, 0.04)
        for mu in mus:
            stats = run_session(cfg_maker(mu=mu, n_pulses=200_000))
            rates.append(stats.conclusive / stats.sent)
        slope = (rates[-1] - rates[0]) / (mus[-1] - mus[0])
        assert slope == pytest.approx(pair_power, rel=0.1)


def test_uncompensated_quarter_wave_randomizes_bb84():
    stats = run_session(bb84_config(n_pulses=100_000), phase_error=math.pi / 2)
    sigma = math.sqrt(0.25 / stats.sifted_bits)
    assert abs(stats.qber - 0.5) < 3 * sigma


def test_dark_counts_cause_errors():
    stats = run_session(b92_config(mu=0.0, p_dark=0.05, n_pulses=100_000))
    sigma = math.sqrt(0.25 / stats.sifted_bits)
    assert stats.conclusive > 0
    assert abs(stats.qber - 0.5) < 3 * sigma


def test_qber_vs_offset_follows_fringe_law():
    cfg = bb84_config(n_pulses=100_000)
    offsets = [0.0, math.pi / 4, math.pi / 2, 2 * math.pi / 3, math.pi]
    for delta, qber in qber_vs_offset(cfg, offsets):
        expected = math.sin(delta / 2) ** 2
        stats = run_session(cfg, phase_error=delta)
        band = 3 * math.sqrt(max(expected * (1 - expected), 1e-9) / max(stats.sifted_bits, 1))
        assert qber == pytest.approx(expected, abs=band + 1e-9)


def test_invalid_config_rejected():
    from fcqkd import InvalidParameterError

    for bad in (
        dict(mu=-0.1),
        dict(eta=1.5),
        dict(p_dark=1.0),
        dict(n_pulses=0),
        dict(protocol="E91"),
    ):
        with pytest.raises(InvalidParameterError):
            bb84_config(**bad)
