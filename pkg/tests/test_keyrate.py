import numpy as np
import pytest

from qcomplementarity import complementarity as C
from qcomplementarity import keyrate as K
from qcomplementarity import qla, states
from qcomplementarity.errors import InputError
from qcomplementarity.measures import MeasureKind, purity_normalized


def test_raw_key_mutual_information():
    assert K.raw_key_mutual_information(0) == 1
    assert K.raw_key_mutual_information(0.5) == pytest.approx(0)
    assert K.raw_key_mutual_information(0.036) == pytest.approx(0.7763, abs=1e-3)
    with pytest.raises(InputError):
        K.raw_key_mutual_information(0.6)


def test_rate_examples():
    assert K.ck_rate_lower_bound(0, 0) == 1
    for s in (0.0, 0.3, 1.5):
        assert K.ck_rate_lower_bound(0.5, s) <= 0
    e = K.werner_error_rate(0.928)
    assert K.ck_rate_lower_bound(e, K.werner_entropy_from_error(e), b=1.0) == pytest.approx(0, abs=0.01)


def test_rate_general_form():
    # d_ab > d_e uses the dimension-dependent bound
    e, s = 0.02, 0.4
    b = C.bound_for(4, 2)
    purity = (2 - s) / 2
    assert K.ck_rate_lower_bound(e, s, 4, 2) == pytest.approx(
        1 - qla.binary_entropy(e) - 2 * 1 * (b - purity)
    )
    with pytest.raises(InputError):
        K.ck_rate_lower_bound(0.1, 3.0)


def test_werner_error_rate():
    assert K.werner_error_rate(1) == 0
    assert K.werner_error_rate(0) == 0.5
    assert K.werner_error_rate(0.928) == pytest.approx(0.036)


def test_werner_entropy_from_error():
    assert K.werner_entropy_from_error(0) == 0
    assert K.werner_entropy_from_error(0.5) == pytest.approx(2)
    assert K.werner_entropy_from_error(0.036) == pytest.approx(0.389, abs=1e-3)


@pytest.mark.parametrize("p", np.linspace(0, 1, 21))
def test_werner_entropy_matches_state(p):
    e = K.werner_error_rate(p)
    assert K.werner_entropy_from_error(e) == pytest.approx(
        qla.von_neumann_entropy(states.werner_state(p).rho), abs=1e-9
    )


def test_threshold():
    t = K.werner_threshold()
    assert t == pytest.approx(0.0357, abs=1e-3)
    assert abs(K.werner_rate(t)) < 1e-10
    assert K.werner_rate(t / 2) > 0
    assert K.werner_rate(min(0.5, t * 1.01)) < 0
    assert K.werner_rate(0.11) < 0


def test_monotonicity():
    es = np.linspace(0, 0.5, 101)
    rates = [K.ck_rate_lower_bound(e, 0.3) for e in es]
    assert np.all(np.diff(rates) < 0)
    ss = np.linspace(0, 2, 101)
    rates = [K.ck_rate_lower_bound(0.05, s) for s in ss]
    assert np.all(np.diff(rates) < 0)


def test_consistency_with_complementarity():
    """Purify random two-qubit states into AB|E and feed the measured purity back."""
    rng = np.random.default_rng(4)
    for _ in range(1000):
        # rank <= 4 two-qubit state purified by a 4-dimensional E
        psi = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        psi /= np.linalg.norm(psi)
        full = states.MultipartiteState(np.outer(psi, psi.conj()), (2, 2, 4))
        rec = C.evaluate(full, "AB:C", [MeasureKind.QMI])
        s_ab = qla.von_neumann_entropy(full.reduce([0, 1]).rho)
        e = rng.uniform(0, 0.5)
        b = C.bound_for(4, 4)
        via_general = K.ck_rate_lower_bound(e, s_ab, 4, 4, b)
        assert rec.purity == pytest.approx(purity_normalized(full, [0, 1]))
        assert via_general == pytest.approx(1 - qla.binary_entropy(e) - 2 * s_ab, abs=1e-9)


def test_scenarios():
    sc = K.KeyRateScenario.werner(0.8)
    assert sc.error_rate == pytest.approx(0.1)
    expected = 1 - qla.binary_entropy(0.1) - 2 * qla.shannon_entropy([0.05, 0.05, 0.05, 0.85])
    assert sc.rate_lower_bound == pytest.approx(expected)
    sc = K.KeyRateScenario.from_error(0.0, 0.0)
    assert sc.rate_lower_bound == 1 and sc.bound_b == 1
