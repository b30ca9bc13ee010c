import math

import numpy as np
import pytest
from scipy import stats

from qcomplementarity import qla, states
from qcomplementarity.errors import InputError
from qcomplementarity.measures import ALL_KINDS, measure_values, purity_normalized
from qcomplementarity.states import SamplerConfig


def page_average_bits(m, n):
    """Mean entanglement entropy of a Haar-random pure state on C^m x C^n (m <= n)."""
    nats = sum(1 / k for k in range(n + 1, m * n + 1)) - (m - 1) / (2 * n)
    return nats / math.log(2)


def s_c(state):
    return qla.von_neumann_entropy(qla.partial_trace(state.rho, state.dims, [2]))


def test_page_oracle_value():
    assert page_average_bits(2, 4) == pytest.approx(0.7351, abs=1e-4)


def test_ghz():
    ghz = states.ghz_state()
    rho_ab = qla.partial_trace(ghz.rho, ghz.dims, [0, 1])
    np.testing.assert_allclose(rho_ab, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)
    assert qla.von_neumann_entropy(ghz.rho) == pytest.approx(0, abs=1e-12)
    assert qla.von_neumann_entropy(rho_ab) == pytest.approx(1)


def test_werner_endpoints_and_spectrum():
    np.testing.assert_allclose(states.werner_state(1).rho, states.bell_state().rho)
    np.testing.assert_allclose(states.werner_state(0).rho, np.eye(4) / 4)
    np.testing.assert_allclose(
        qla.hermitian_spectrum(states.werner_state(0.5).rho), [0.625, 0.125, 0.125, 0.125]
    )
    with pytest.raises(InputError):
        states.werner_state(1.1)


def test_haar_pure_is_pure_and_normalized():
    s = states.haar_pure([2, 2, 2], seed=3)
    assert qla.von_neumann_entropy(s.rho) == pytest.approx(0, abs=1e-9)
    assert abs(np.trace(s.rho) - 1) < 1e-12


def test_haar_pure_page_average():
    cfg = SamplerConfig((2, 2, 2), 1, seed=11, count=10_000)
    mean = np.mean([s_c(s) for s in states.haar_ranked(cfg)])
    assert mean == pytest.approx(page_average_bits(2, 4), abs=0.01)


def test_haar_ranked_rank_one_matches_haar_pure():
    cfg = SamplerConfig((2, 2, 2), 1, seed=5, count=1)
    np.testing.assert_array_equal(states.haar_ranked(cfg)[0].rho, states.haar_pure([2, 2, 2], 5).rho)


@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_haar_ranked_exact_rank(rank):
    cfg = SamplerConfig((2, 2, 2), rank, seed=rank, count=1000)
    for s in states.haar_ranked(cfg):
        ev = qla.hermitian_spectrum(s.rho)
        assert np.sum(ev > 1e-9) == rank
        assert abs(ev.sum() - 1) < 1e-9
        assert ev.min() > -1e-9


def test_haar_ranked_full_rank_matches_hilbert_schmidt():
    """Spectra at rank 8 against an independently drawn G G†/tr ensemble."""
    cfg = SamplerConfig((2, 2, 2), 8, seed=99, count=2000)
    ours = np.array([qla.hermitian_spectrum(s.rho) for s in states.haar_ranked(cfg)])
    rng = np.random.default_rng(12345)
    ref = []
    for _ in range(2000):
        g = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        w = g @ g.conj().T
        ref.append(np.linalg.eigvalsh(w / np.trace(w).real)[::-1])
    ref = np.array(ref)
    assert np.all(ours[:, -1] > 1e-9)
    for col in (0, 3, 7):
        assert stats.ks_2samp(ours[:, col], ref[:, col]).pvalue > 0.01
    # pooled eigenvalue density
    assert stats.ks_2samp(ours.ravel(), ref.ravel()).statistic < 1.628 * math.sqrt(2 / 2000)


def test_unitary_invariance_of_pure_ensemble():
    rng = np.random.default_rng(7)
    u = states.random_unitary(8, rng)
    a = [s_c(s) for s in states.haar_ranked(SamplerConfig((2, 2, 2), 1, 1, 1000))]
    b = []
    for s in states.haar_ranked(SamplerConfig((2, 2, 2), 1, 2, 1000)):
        rotated = u @ s.rho @ u.conj().T
        b.append(qla.von_neumann_entropy(qla.partial_trace(rotated, [2, 2, 2], [2])))
    critical = 1.628 * math.sqrt(2 / 1000)
    assert stats.ks_2samp(a, b).statistic < critical


def test_determinism_and_seed_sensitivity():
    cfg = SamplerConfig((2, 2, 2), 3, seed=42, count=5)
    first = [s.rho for s in states.haar_ranked(cfg)]
    second = [s.rho for s in states.haar_ranked(cfg)]
    for a, b in zip(first, second):
        assert a.tobytes() == b.tobytes()
    other = states.haar_ranked(SamplerConfig((2, 2, 2), 3, seed=43, count=1))[0].rho
    assert not np.allclose(other, first[0])


def test_sample_independent_of_batch():
    big = states.haar_ranked(SamplerConfig((2, 2, 2), 2, seed=8, count=10))
    single = states.haar_ranked_one(SamplerConfig((2, 2, 2), 2, seed=8, count=10), 7)
    assert big[7].rho.tobytes() == single.rho.tobytes()


def test_sampler_config_validation():
    with pytest.raises(InputError):
        SamplerConfig((2, 2, 2), 9, seed=1)
    with pytest.raises(InputError):
        SamplerConfig((2, 2), 0, seed=1)
    with pytest.raises(InputError):
        SamplerConfig((2, 2), 1, seed=-1)


def test_basis_product_state():
    s = states.basis_product_state([0, 0, 0], [2, 2, 2])
    assert purity_normalized(s, [0, 1]) == pytest.approx(1)
    raw, norm = measure_values(s, "AB:C", ALL_KINDS)
    for v in list(raw.values()) + list(norm.values()):
        assert v == pytest.approx(0, abs=1e-9)
    s = states.basis_product_state([0, 1, 1], [2, 2, 2])
    expected = np.zeros((4, 4))
    expected[1, 1] = 1
    np.testing.assert_allclose(qla.partial_trace(s.rho, s.dims, [0, 1]), expected)
    with pytest.raises(InputError):
        states.basis_product_state([0, 2], [2, 2])


def test_state_validation():
    with pytest.raises(InputError):
        states.MultipartiteState(np.diag([0.5, 0.6]), (2,))
    with pytest.raises(InputError):
        states.MultipartiteState(np.eye(4) / 4, (2, 3))
    with pytest.raises(InputError):
        states.MultipartiteState(np.array([[0.5, 0.5], [0, 0.5]]), (2,))


def test_json_round_trip():
    s = states.haar_ranked_one(SamplerConfig((2, 2, 2), 2, 1), 0)
    back = states.loads_state(states.dumps_state(s))
    assert back.dims == s.dims
    assert np.max(np.abs(back.rho - s.rho)) <= 1e-12
    doc = states.state_to_dict(s)
    assert doc["dims"] == [2, 2, 2]
    assert len(doc["rho"]) == 64 and len(doc["rho"][0]) == 2


@pytest.mark.parametrize(
    "text",
    ["not json", "[]", '{"dims": [2]}', '{"dims": [2], "rho": [[1, 0]]}',
     '{"dims": [2], "rho": [[1, 0], [0, 0], [0, 0], [1, 0]]}'],
)
def test_json_rejects_malformed(text):
    with pytest.raises(InputError):
        states.loads_state(text)
