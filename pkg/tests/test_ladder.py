"""Collective ladder construction, light shifts and adiabatic elimination."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lsiib import (
    CollectiveLabel,
    InvalidParameterError,
    LadderParams,
    PhysicsRegimeWarning,
    adiabatic_eliminate,
    blockade_shift_numeric,
    build_full_ladder,
    dressed_shift,
    ladder_basis,
    light_shifts,
    resonant_two_photon,
)


def reference_params(n_atoms=1225, omega1=1e-3, two_photon=2.5, truncation=2):
    return LadderParams.from_common(
        n_atoms=n_atoms, omega1=omega1, omega2=100.0, delta=1000.0,
        two_photon=two_photon, truncation=truncation,
    )


class TestLadderParams:
    def test_derived_detunings(self):
        params = LadderParams(100, 0.1, 10.0, delta1=1001.25, delta2=998.75)
        assert params.delta == 1000.0
        assert params.two_photon == 2.5

    def test_from_common_round_trip(self):
        params = LadderParams.from_common(100, 0.1, 10.0, delta=1000.0, two_photon=2.5)
        assert params.delta == 1000.0
        assert params.two_photon == 2.5

    def test_truncation_exceeding_atoms_rejected(self):
        with pytest.raises(InvalidParameterError):
            LadderParams.from_common(2, 0.1, 10.0, delta=1000.0, truncation=3)

    def test_negative_rabi_rejected(self):
        with pytest.raises(InvalidParameterError):
            LadderParams.from_common(2, -0.1, 10.0, delta=1000.0)


class TestBasis:
    def test_label_names(self):
        assert str(CollectiveLabel("A")) == "A"
        assert str(CollectiveLabel("G", 1)) == "G1"
        assert str(CollectiveLabel("G", 2)) == "G11"
        assert str(CollectiveLabel("G", 3)) == "G12"
        assert str(CollectiveLabel("C", 2)) == "C2"

    def test_default_basis_ends_at_c(self):
        names = [str(l) for l in ladder_basis(2)]
        assert names == ["A", "G1", "C1", "G11", "C2"]
        assert len(ladder_basis(4)) == 9

    def test_trailing_g_reproduces_six_levels(self):
        names = [str(l) for l in ladder_basis(2, include_trailing_g=True)]
        assert names == ["A", "G1", "C1", "G11", "C2", "G12"]


class TestBuildFullLadder:
    def test_six_level_entries(self):
        # N=1200, omega1=eta=1e-3, omega2=100, delta=1000, two-photon 2.5
        eta = 1e-3
        params = reference_params(n_atoms=1200, omega1=eta)
        ham = build_full_ladder(params, include_trailing_g=True)
        assert ham.entry("A", "G1") == pytest.approx(math.sqrt(1200) * eta / 2, rel=1e-14)
        assert ham.entry("G1", "C1") == pytest.approx(50.0, rel=1e-14)
        assert ham.entry("G12", "G12") == pytest.approx(-1005.0, rel=1e-14)
        assert ham.entry("A", "A") == pytest.approx(1.25, rel=1e-14)
        assert ham.entry("G1", "G1") == pytest.approx(-1000.0, rel=1e-14)
        assert ham.entry("C1", "C1") == pytest.approx(-1.25, rel=1e-14)
        assert ham.entry("G11", "G11") == pytest.approx(-1002.5, rel=1e-14)
        assert ham.entry("C2", "C2") == pytest.approx(-3.75, rel=1e-14)
        assert ham.entry("C1", "G11") == pytest.approx(math.sqrt(1199) * eta / 2, rel=1e-14)
        assert ham.entry("G11", "C2") == pytest.approx(math.sqrt(2) * 50.0, rel=1e-14)
        assert ham.entry("C2", "G12") == pytest.approx(math.sqrt(1198) * eta / 2, rel=1e-14)
        assert ham.entry("A", "C1") == 0

    def test_single_atom_ladder_decouples_after_c1(self):
        params = LadderParams.from_common(1, 0.5, 10.0, delta=1000.0, truncation=1)
        ham = build_full_ladder(params, include_trailing_g=True)
        assert ham.label_names() == ("A", "G1", "C1", "G11")
        assert ham.entry("C1", "G11") == 0

    @settings(max_examples=60, deadline=None)
    @given(
        n_atoms=st.integers(min_value=1, max_value=5000),
        omega1=st.floats(0.0, 50.0),
        omega2=st.floats(0.0, 500.0),
        delta=st.floats(-5000.0, 5000.0),
        two_photon=st.floats(-50.0, 50.0),
        truncation=st.integers(1, 6),
        trailing=st.booleans(),
    )
    def test_hermitian_for_all_valid_params(
        self, n_atoms, omega1, omega2, delta, two_photon, truncation, trailing
    ):
        truncation = min(truncation, n_atoms)
        params = LadderParams.from_common(
            n_atoms, omega1, omega2, delta, two_photon, truncation
        )
        ham = build_full_ladder(params, include_trailing_g=trailing)
        gap = np.abs(ham.matrix - ham.matrix.conj().T).max()
        assert gap <= 1e-12 * max(1.0, np.abs(ham.matrix).max())
        assert ham.dim == (2 * truncation + 1) + (1 if trailing else 0)


class TestLightShifts:
    def test_blockade_shift_closed_form_exact(self):
        shifts = light_shifts(LadderParams(1225, 0.0, 100.0, 1000.0, 1000.0))
        assert shifts.blockade_shift == -1 / 80
        assert shifts.eps_c1 - shifts.eps_a == pytest.approx(2.5, rel=1e-12)

    def test_two_photon_resonance_with_weak_drive(self):
        shifts = light_shifts(reference_params())
        # the N omega1^2 term moves the resonance by only ~3e-7
        assert shifts.two_photon_resonance == pytest.approx(2.5, rel=1e-2)
        assert abs(shifts.two_photon_resonance - 2.5) < 1e-6

    def test_all_zero_drives(self):
        shifts = light_shifts(LadderParams.from_common(100, 0.0, 0.0, delta=1000.0))
        assert shifts.eps_a == shifts.eps_c1 == shifts.eps_c2 == 0.0
        assert shifts.blockade_shift == 0.0
        assert shifts.rabi_collective == 0.0

    def test_collective_rabi_and_blockade_ratio(self):
        # eta sqrt(N) = 0.035: rabi = 0.035 * 100 / 2000, rabi/sqrt(2) ~ |blockade|/10
        shifts = light_shifts(reference_params())
        assert shifts.rabi_collective == pytest.approx(1.75e-3, rel=1e-12)
        ratio = (shifts.rabi_collective / math.sqrt(2)) / (abs(shifts.blockade_shift) / 10)
        assert ratio == pytest.approx(1.0, rel=0.02)

    def test_first_order_balance_is_zero(self):
        shifts = light_shifts(reference_params())
        assert abs(shifts.first_order_balance) <= 1e-14 * abs(shifts.eps_c1)

    def test_zero_common_detuning_raises(self):
        params = LadderParams(10, 0.1, 1.0, delta1=5.0, delta2=-5.0)
        with pytest.raises(ZeroDivisionError):
            light_shifts(params)

    @settings(max_examples=100, deadline=None)
    @given(
        n_atoms=st.integers(1, 10000),
        omega1=st.floats(1e-6, 10.0),
        omega2=st.floats(1e-3, 300.0),
        delta=st.floats(1.0, 1e5),
    )
    def test_blockade_shift_negative_for_positive_detuning(self, n_atoms, omega1, omega2, delta):
        params = LadderParams.from_common(
            n_atoms, omega1, omega2, delta, truncation=min(2, n_atoms)
        )
        assert light_shifts(params).blockade_shift < 0


class TestBlockadeShiftNumeric:
    def test_matches_naive_dressed_form(self):
        # same quantity, computed from the eigenvalue radicals without rearrangement
        params = LadderParams.from_common(1225, 0.0, 100.0, delta=1000.0)
        naive = (
            (math.sqrt(1000.0**2 + 2 * 100.0**2) - 1000.0) / 2
            - 2 * (math.sqrt(1000.0**2 + 100.0**2) - 1000.0) / 2
        )
        assert blockade_shift_numeric(params) == pytest.approx(naive, rel=1e-12)

    def test_perturbative_agreement_at_five_percent(self):
        params = LadderParams.from_common(1225, 0.0, 100.0, delta=1000.0)
        value = blockade_shift_numeric(params)
        assert value == pytest.approx(-1 / 80, rel=0.05)

    def test_deeper_regime_agrees_to_one_percent(self):
        params = LadderParams.from_common(1225, 0.0, 10.0, delta=1000.0)
        assert blockade_shift_numeric(params) == pytest.approx(-1.25e-6, rel=0.01)

    def test_zero_strong_leg(self):
        params = LadderParams.from_common(1225, 1e-3, 0.0, delta=1000.0)
        assert blockade_shift_numeric(params) == pytest.approx(0.0, abs=1e-15)

    def test_single_atom_rejected(self):
        with pytest.raises(InvalidParameterError):
            blockade_shift_numeric(LadderParams.from_common(1, 0.1, 1.0, 1000.0, truncation=1))

    @settings(max_examples=150, deadline=None)
    @given(
        n_atoms=st.integers(2, 5000),
        omega1=st.floats(1e-4, 1.0),
        omega2=st.floats(0.5, 100.0),
        scale=st.floats(10.0, 1000.0),
    )
    def test_oracle_agreement_in_regime(self, n_atoms, omega1, omega2, scale):
        # delta at least 10x the strongest collective coupling
        delta = scale * max(omega2, math.sqrt(n_atoms) * omega1)
        params = LadderParams.from_common(n_atoms, omega1, omega2, delta)
        closed = light_shifts(params).blockade_shift
        assert blockade_shift_numeric(params) == pytest.approx(closed, rel=0.05)


class TestDressedShift:
    def test_reduces_to_first_order(self):
        assert dressed_shift(1.0, 1000.0) == pytest.approx(1.0 / 4000.0, rel=1e-6)

    def test_sign_follows_detuning(self):
        assert dressed_shift(10.0, 100.0) > 0
        assert dressed_shift(10.0, -100.0) < 0

    def test_zero_detuning_raises(self):
        with pytest.raises(ZeroDivisionError):
            dressed_shift(1.0, 0.0)


class TestResonantTwoPhoton:
    def test_first_order_value(self):
        params = reference_params()
        assert resonant_two_photon(params, shifts="first") == pytest.approx(
            light_shifts(params).two_photon_resonance, rel=1e-14
        )

    def test_dressed_value_shifts_by_second_order(self):
        params = reference_params()
        dressed = resonant_two_photon(params)
        # pulled below 2.5 by the per-leg gap and quartic corrections
        assert 2.49 < dressed < 2.4999
        # self-consistency: the per-leg dressed shifts reproduce it
        delta1 = params.delta + dressed / 2
        delta2 = params.delta - dressed / 2
        eps_a = dressed_shift(math.sqrt(1225) * 1e-3, delta1)
        eps_c1 = dressed_shift(math.sqrt(1224) * 1e-3, delta1) + dressed_shift(100.0, delta2)
        assert eps_c1 - eps_a == pytest.approx(dressed, rel=1e-12)


class TestAdiabaticEliminate:
    def test_effective_couplings(self):
        params = reference_params()
        eff = adiabatic_eliminate(params)
        assert eff.label_names() == ("A", "C1", "C2")
        rabi = light_shifts(params).rabi_collective
        assert eff.entry("A", "C1") == pytest.approx(rabi / 2, rel=1e-12)
        assert eff.entry("C1", "C2") == pytest.approx(
            math.sqrt(2 * 1224 / 1225) * rabi / 2, rel=1e-12
        )
        # large-N limit of the C1-C2 coupling
        assert eff.entry("C1", "C2") == pytest.approx(rabi / math.sqrt(2), rel=1e-3)
        assert eff.entry("A", "C2") == 0

    def test_resonant_form(self):
        params = reference_params()
        eff = adiabatic_eliminate(params, resonant=True)
        rabi = light_shifts(params).rabi_collective
        np.testing.assert_allclose(
            np.diag(eff.matrix).real, [0.0, 0.0, light_shifts(params).blockade_shift], atol=1e-15
        )
        assert eff.entry("A", "C1") == pytest.approx(rabi / 2, rel=1e-12)

    def test_blockade_override(self):
        eff = adiabatic_eliminate(reference_params(), resonant=True, blockade_override=0.0)
        assert eff.entry("C2", "C2") == 0

    def test_no_drive_on_weak_leg_decouples_a(self):
        params = LadderParams.from_common(1225, 0.0, 100.0, delta=1000.0, two_photon=2.5)
        eff = adiabatic_eliminate(params)
        assert eff.entry("A", "C1") == 0
        assert eff.entry("C1", "C2") == 0

    def test_eigenvalues_match_full_ladder(self):
        # independent oracle: exact diagonalization of the full six-level matrix
        params = reference_params()
        full = build_full_ladder(params, include_trailing_g=True)
        full_eigs = np.linalg.eigvalsh(full.matrix)
        triplet = np.sort(full_eigs[np.argsort(np.abs(full_eigs))[:3]])
        eff_eigs = np.sort(np.linalg.eigvalsh(adiabatic_eliminate(params).matrix))
        rel = np.abs(eff_eigs - triplet) / np.abs(triplet)
        assert rel.max() <= (100.0 / 1000.0) ** 2

    def test_regime_warning_flag(self):
        params = LadderParams.from_common(100, 0.1, 100.0, delta=500.0, two_photon=2.5)
        with pytest.warns(PhysicsRegimeWarning):
            eff = adiabatic_eliminate(params)
        assert eff.regime_warning is not None

    def test_in_regime_no_warning(self):
        eff = adiabatic_eliminate(reference_params())
        assert eff.regime_warning is None
