import math

import pytest

from fcqkd import (
    B92,
    BB84,
    InfeasibleProtocolError,
    LinkSpec,
    ModulatorKind,
    check_b92,
    check_bb84,
    classify_pair,
    effective_phase_diff,
    make_modulator,
    phase_alphabet,
    sideband_powers,
)
from fcqkd.protocols import (
    REFERENCE_TABLE,
    ROW_ORDER,
    compare_row_with_reference,
    evaluate_pair,
)

PM, AM, UM = ModulatorKind.PM, ModulatorKind.AM, ModulatorKind.UM

GRID = [0.08 + (math.pi / 2 - 0.16) * i / 11 for i in range(12)]


def test_effective_phase_diff():
    assert effective_phase_diff(0.0, 0.0, 0.0, 0.0) == 0.0
    assert effective_phase_diff(0.0, math.pi, 0.0, 0.0) == pytest.approx(math.pi)
    assert effective_phase_diff(math.pi / 2, 0.0, math.pi / 4, math.pi / 4) == pytest.approx(0.0)
    assert 0.0 <= effective_phase_diff(5.0, 1.0, 2.0, 3.0) < math.tau


class TestPointChecks:
    def test_pm_pm_b92(self):
        res = check_b92(make_modulator(PM, 0.1), make_modulator(PM, 0.1))
        assert res.feasible
        assert res.index_ratio == pytest.approx(1.0, rel=1e-12)

    def test_um_pm_b92_ratio_two(self):
        res = check_b92(make_modulator(UM, 0.1, 0.0), make_modulator(PM, 0.1))
        assert res.feasible
        assert res.index_ratio == pytest.approx(2.0, rel=1e-12)

    def test_um_am_b92_zero_visibility(self):
        for psi_b in (0.3, 0.7, 1.2):
            res = check_b92(
                make_modulator(UM, 0.1, math.pi / 2), make_modulator(AM, 0.1, psi_b)
            )
            assert not res.feasible
            assert res.failure_reason == "zero-visibility"

    def test_pm_am_bb84_tan_ratio(self):
        for psi_b in (0.3, 0.9, 1.4):
            res = check_bb84(make_modulator(PM, 0.1), make_modulator(AM, 0.1, psi_b))
            assert res.feasible
            assert res.index_ratio == pytest.approx(abs(math.tan(psi_b)), rel=1e-12)

    def test_am_am_bb84_theta_mismatch(self):
        res = check_bb84(
            make_modulator(AM, 0.1, 0.4), make_modulator(AM, 0.1, 0.9)
        )
        assert not res.feasible
        assert res.failure_reason == "theta-mismatch"

    def test_um_am_bb84_ratio(self):
        res = check_bb84(
            make_modulator(UM, 0.1, 0.0), make_modulator(AM, 0.1, math.pi / 4)
        )
        assert res.feasible
        assert res.index_ratio == pytest.approx(2.0, rel=1e-12)


class TestClassification:
    def test_um_um_row(self):
        row = classify_pair(UM, UM, GRID)
        assert row.b92.feasible and row.b92.bias_constraint == "psi_b = psi_a + n*pi"
        assert row.bb84.feasible
        assert row.bb84.bias_constraint == "psi_b = psi_a + (2n+1)*pi/2"

    def test_am_pm_row(self):
        row = classify_pair(AM, PM, GRID)
        assert not row.b92.feasible and row.b92.failure_reason == "theta-mismatch"
        assert row.bb84.feasible and row.bb84.bias_constraint == "any"
        pa = 0.6
        _, ratio = evaluate_pair(AM, PM, pa, 0.0)
        assert ratio == pytest.approx(1.0 / math.tan(pa), rel=1e-12)

    def test_pm_um_row(self):
        row = classify_pair(PM, UM, GRID)
        assert row.b92.feasible and row.b92.bias_constraint == "psi_b = n*pi"
        assert row.b92.index_ratio == pytest.approx(0.5, rel=1e-12)
        assert not row.bb84.feasible
        assert row.bb84.failure_reason == "zero-visibility"
        assert row.bb84.bias_constraint == "psi_b = (2n+1)*pi/2"

    def test_only_um_um_supports_both(self):
        both = [
            (a.value, b.value)
            for a, b in ROW_ORDER
            for row in [classify_pair(a, b, GRID)]
            if row.b92.feasible and row.bb84.feasible
        ]
        assert both == [("UM", "UM")]

    def test_every_row_matches_reference(self):
        for a, b in ROW_ORDER:
            row = classify_pair(a, b, GRID)
            assert compare_row_with_reference(a, b, row, GRID) == []

    def test_ratio_formulas_hold_beyond_principal_branch(self):
        # |.| ratio forms stay valid on (0, pi) away from the pi/2 poles
        wide = [0.15, 0.6, 1.1, 1.9, 2.4, 2.9]
        for a, b in ROW_ORDER:
            ref = REFERENCE_TABLE[(a, b)]
            for pa in wide:
                for pb in wide:
                    _, ratio = evaluate_pair(a, b, pa, pb)
                    assert ratio == pytest.approx(ref.ratio(pa, pb), rel=1e-9)

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            classify_pair(UM, UM, [])


class TestFringeLaws:
    def test_bb84_fringes(self):
        # unit-visibility BB84 pairing obeys the complementary fringe pair
        alice = make_modulator(UM, 0.1, 0.0)
        link = LinkSpec(rf_frequency=1.0, link_phase=0.8)
        offset = math.pi / 2
        for k in range(16):
            target = math.tau * k / 16
            bob = make_modulator(
                AM, 0.05, math.pi / 4, target - link.link_phase - offset
            )
            p_up, p_low = sideband_powers(alice, bob, link)
            assert p_up == pytest.approx(math.cos(target / 2) ** 2, abs=1e-12)
            assert p_low == pytest.approx(math.sin(target / 2) ** 2, abs=1e-12)

    def test_b92_fringes(self):
        alice = make_modulator(AM, 0.1, math.pi / 4)
        link = LinkSpec(rf_frequency=1.0, link_phase=0.2)
        for k in range(16):
            target = math.tau * k / 16
            bob = make_modulator(AM, 0.1, math.pi / 4, target - link.link_phase)
            p_up, p_low = sideband_powers(alice, bob, link)
            assert p_up == pytest.approx(math.cos(target / 2) ** 2, abs=1e-12)
            assert p_low == pytest.approx(math.cos(target / 2) ** 2, abs=1e-12)


class TestPhaseAlphabet:
    def test_covers_canonical_values(self):
        settings = phase_alphabet(B92, 0.0, 0.0)
        assert len(settings) == 16
        achieved = {round(s.delta_phi, 12) for s in settings}
        expected = {round(v, 12) for v in (0.0, math.pi / 2, math.pi, 1.5 * math.pi)}
        assert expected <= achieved

    def test_bob_offset_absorbs_link_and_theta(self):
        link_phase, offset = 0.7, math.pi / 2
        for s in phase_alphabet(BB84, link_phase, offset):
            assert effective_phase_diff(s.phi_a, s.phi_b, link_phase, offset) == \
                pytest.approx(s.delta_phi, abs=1e-12)

    def test_mismatched_offset_rejected(self):
        with pytest.raises(InfeasibleProtocolError):
            phase_alphabet(B92, 0.0, math.pi / 2)
        with pytest.raises(InfeasibleProtocolError):
            phase_alphabet(BB84, 0.0, 0.3)
