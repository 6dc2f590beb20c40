import numpy as np
import pytest

from sturmian_green.errors import NoSignChange, PoleAtEnergy
from sturmian_green.green import cn_closed_form
from sturmian_green.jacobi import ComplexEnergy, PhysicalParams
from sturmian_green.spectrum import (
    analytic_spectrum,
    inverse_g00,
    locate_pole,
    pole_order_probe,
)


def test_hydrogen_levels():
    levels = analytic_spectrum(PhysicalParams(Z=-1, l=0), 3)
    assert [s.energy for s in levels] == pytest.approx([-0.5, -0.125, -1 / 18], abs=1e-15)
    assert [s.n_r for s in levels] == [0, 1, 2]


def test_levels_other_ladders():
    assert analytic_spectrum(PhysicalParams(Z=-2, l=1), 1)[0].energy == pytest.approx(-0.5)
    ground = analytic_spectrum(PhysicalParams(Z=-1, l=0, D=4), 1)[0]
    assert ground.energy == pytest.approx(-2 / 9, abs=1e-15)
    assert ground.principal_combination == 1.5


def test_levels_increase_towards_zero():
    energies = [s.energy for s in analytic_spectrum(PhysicalParams(Z=-1.7, l=2, D=5), 12)]
    assert all(a < b < 0 for a, b in zip(energies, energies[1:]))


def test_no_bound_states_for_repulsive():
    with pytest.raises(ValueError):
        analytic_spectrum(PhysicalParams(Z=1), 3)
    with pytest.raises(ValueError):
        analytic_spectrum(PhysicalParams(Z=0), 3)
    with pytest.raises(ValueError):
        locate_pole(PhysicalParams(Z=0.5), (-1, -0.1))


@pytest.mark.parametrize("bs", [1.0, 1.7])
def test_locate_ground_state(bs):
    assert locate_pole(PhysicalParams(Z=-1, bs=bs), (-0.7, -0.4)) == pytest.approx(-0.5, abs=1e-10)


def test_locate_l1_ground_state():
    assert locate_pole(PhysicalParams(Z=-1, l=1), (-0.2, -0.05)) == pytest.approx(-0.125, abs=1e-10)


def test_locate_bad_bracket():
    with pytest.raises(NoSignChange):
        locate_pole(PhysicalParams(Z=-1), (-0.45, -0.2))
    with pytest.raises(ValueError):
        locate_pole(PhysicalParams(Z=-1), (-0.45, 0.2))


def test_locate_exact_pole_on_grid():
    # a grid point landing on the pole is a certificate in its own right
    assert locate_pole(PhysicalParams(Z=-1), (-0.75, -0.25)) == pytest.approx(-0.5, abs=1e-12)


def _bracket(levels, n):
    e = [s.energy for s in levels]
    lo = 2 * e[0] if n == 0 else 0.5 * (e[n - 1] + e[n])
    return lo, 0.5 * (e[n] + e[n + 1])


@pytest.mark.parametrize("l", [0, 1, 2])
@pytest.mark.parametrize("bs", [0.8, 1.6])
def test_poles_basis_independent(l, bs):
    p = PhysicalParams(Z=-1, bs=bs, l=l)
    levels = analytic_spectrum(p, 6)
    for n in range(5):
        assert locate_pole(p, _bracket(levels, n)) == pytest.approx(levels[n].energy, abs=1e-8)


@pytest.mark.parametrize("l", [0, 1, 2])
def test_poles_coincide_with_closed_form_singularity(l):
    p = PhysicalParams(Z=-1.3, bs=1.1, l=l)
    for state in analytic_spectrum(p, 4):
        with pytest.raises(PoleAtEnergy) as info:
            cn_closed_form(0, ComplexEnergy.from_z(state.energy, p.Z), p)
        assert info.value.n_r == state.n_r


@pytest.mark.parametrize("Z", [0.0, 1.0])
def test_no_sign_change_without_bound_states(Z):
    p = PhysicalParams(Z=Z, bs=1)
    values = np.array([inverse_g00(x, p) for x in np.linspace(-10, -1e-4, 10_000)])
    assert np.all(values < 0)


def test_pole_order():
    p = PhysicalParams(Z=-1, bs=1)
    radii = [1e-3, 1e-4, 1e-5]
    assert pole_order_probe(p, -0.5, radii) == pytest.approx(-1, abs=0.05)
    assert pole_order_probe(p, -0.125, radii) == pytest.approx(-1, abs=0.05)
    assert pole_order_probe(p, -0.3, radii) == pytest.approx(0, abs=0.05)
