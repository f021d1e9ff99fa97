import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from regrom.estimators import POD, ReducedOrderModel
from regrom.experiment import run_fom
from regrom.config import parse_config_text


@pytest.fixture(scope="module")
def fom():
    return run_fom(parse_config_text(
        "n_elements = 40\nnu = 1e-2\nn_steps = 20\nr = 4\n"))


def test_pod_params_and_clone():
    p = POD(n_components=3, center=False)
    assert p.get_params() == {"n_components": 3, "center": False,
                              "mass": None}
    q = clone(p).set_params(n_components=5)
    assert q.n_components == 5 and p.n_components == 3


def test_pod_not_fitted():
    with pytest.raises(NotFittedError):
        POD().transform(np.zeros((2, 3)))
    with pytest.raises(NotFittedError):
        ReducedOrderModel().predict(np.zeros(3), 2)


def test_pod_round_trip(rng):
    Z = rng.standard_normal((12, 3)) @ rng.standard_normal((3, 8)) + 1.0
    p = POD(n_components=3).fit(Z)
    assert p.components_.shape == (3, 8)
    assert np.allclose(p.components_ @ p.components_.T, np.eye(3),
                       atol=1e-12)
    coeffs = p.transform(Z)
    assert coeffs.shape == (12, 3)
    assert np.allclose(p.inverse_transform(coeffs), Z, atol=1e-10)
    with pytest.raises(ValueError):
        POD(n_components=5).fit(Z)


def test_pod_with_mass(fom):
    p = POD(n_components=4, mass=fom.mass).fit(fom.snapshots.T)
    gram = p.components_ @ (fom.mass @ p.components_.T)
    assert np.allclose(gram, np.eye(4), atol=1e-10)


def test_rom_fit_predict_score(fom):
    X = fom.snapshots.T
    est = ReducedOrderModel(model="grom", n_components=4, nu=1e-2,
                            dt=0.05).fit(X, system=fom.system)
    pred = est.predict(X[0], 20)
    assert pred.shape == X.shape
    score = est.score(X)
    assert score < 0 and np.isfinite(score)
    adl = clone(est).set_params(model="adlrom", delta=0.3, mu=0.0)
    adl.fit(X, system=fom.system)
    assert adl.score(X) == pytest.approx(score, abs=1e-9)


def test_rom_input_validation(fom):
    with pytest.raises(ValueError):
        ReducedOrderModel().fit(fom.snapshots.T)
    with pytest.raises(ValueError):
        ReducedOrderModel().fit(fom.snapshots.T[:, :5], system=fom.system)
    with pytest.raises(ValueError):
        ReducedOrderModel(model="x").fit(fom.snapshots.T, system=fom.system)
    est = ReducedOrderModel(model="grom", n_components=2).fit(
        fom.snapshots.T, system=fom.system)
    with pytest.raises(ValueError):
        est.predict(fom.snapshots[:, 0], 2)
