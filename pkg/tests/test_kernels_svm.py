import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sgembed.kernels import cosine_sim, cross_kernel, gram_matrix, hi_kernel, rank_models, retrieval_rho, rho_from_ranks
from sgembed.svm import cross_validate, svm_predict, svm_train, train_multiclass

hist = arrays(np.float64, st.integers(1, 12), elements=st.floats(0, 100, allow_subnormal=False))


def test_hi_examples():
    assert hi_kernel([1, 2, 3], [2, 1, 3]) == 5
    assert hi_kernel([3, 0, 4], [3, 0, 4]) == 7
    assert hi_kernel([0, 0], [4, 7]) == 0
    with pytest.raises(ValueError):
        hi_kernel([1, 2], [1])
    with pytest.raises(ValueError):
        hi_kernel([1, -2], [1, 1])


@given(st.data())
def test_hi_bounded_by_norms(data):
    x = data.draw(hist)
    y = data.draw(arrays(np.float64, len(x), elements=st.floats(0, 100, allow_subnormal=False)))
    assert hi_kernel(x, y) <= min(x.sum(), y.sum()) + 1e-9


def test_cosine_examples():
    x = np.array([1.0, 2.0, 2.0])
    assert cosine_sim(x, x) == pytest.approx(1.0)
    assert cosine_sim([1, 0], [0, 1]) == 0.0
    assert cosine_sim(x, 2 * x) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        cosine_sim([0, 0], [1, 1])


def test_gram_symmetry_and_diagonal():
    rng = np.random.default_rng(0)
    X = rng.random((30, 9))
    K = gram_matrix(X, "hi")
    assert np.array_equal(K, K.T)
    assert np.allclose(np.diag(K), X.sum(axis=1))
    assert K[3, 7] == pytest.approx(hi_kernel(X[3], X[7]))
    C = gram_matrix(X, "cosine")
    assert np.array_equal(C, C.T) and np.allclose(np.diag(C), 1.0)


def test_hi_gram_is_psd():
    rng = np.random.default_rng(1)
    for _ in range(5):
        X = rng.random((50, 20)) * (rng.random((50, 20)) < 0.5)
        assert np.linalg.eigvalsh(gram_matrix(X)).min() >= -1e-8


def test_gram_errors():
    with pytest.raises(ValueError):
        gram_matrix([[1, 2], [1, 2, 3]])
    with pytest.raises(ValueError):
        gram_matrix([[1, 2]], "rbf")
    with pytest.raises(ValueError):
        cross_kernel([[1, 2]], [[1, 2, 3]])


def test_two_point_svm():
    m = svm_train(np.eye(2), [1, -1], C=1e6)
    assert m.converged
    assert m.alpha == pytest.approx([1.0, 1.0], abs=1e-6)
    assert m.b == pytest.approx(0.0, abs=1e-6)
    assert svm_predict(m, np.eye(2)) == pytest.approx([1.0, -1.0], abs=1e-6)


def _toy(seed=0, n=40, d=6):
    rng = np.random.default_rng(seed)
    y = np.repeat([1, -1], n // 2)
    X = rng.random((n, d))
    X[y > 0, 0] += 2.0
    X[y < 0, 1] += 2.0
    return X, y


def test_separable_training_accuracy():
    X, y = _toy()
    K = gram_matrix(X)
    m = svm_train(K, y, C=100)
    assert np.all(np.sign(svm_predict(m, K)) == y)
    assert np.all((m.alpha >= 0) & (m.alpha <= m.C))
    assert m.kkt_gap < 1e-3


def test_duplicated_training_set():
    X, y = _toy(1, 20)
    K = gram_matrix(X)
    m1 = svm_train(K, y, C=1.0, tol=1e-8)
    X2, y2 = np.vstack([X, X]), np.concatenate([y, y])
    m2 = svm_train(gram_matrix(X2), y2, C=0.5, tol=1e-8)
    test = np.random.default_rng(5).random((15, X.shape[1])) * 3
    s1 = svm_predict(m1, cross_kernel(test, X))
    s2 = svm_predict(m2, cross_kernel(test, X2))
    assert s1 == pytest.approx(s2, abs=1e-5)


@pytest.mark.parametrize("scale", [0.01, 3.0, 250.0])
def test_scaling_invariance(scale):
    X, y = _toy(2, 30)
    K = gram_matrix(X)
    test = cross_kernel(np.random.default_rng(3).random((20, X.shape[1])) * 3, X)
    base = svm_predict(svm_train(K, y, C=2.0, tol=1e-8), test)
    scaled = svm_predict(svm_train(K * scale, y, C=2.0 / scale, tol=1e-8), test * scale)
    assert np.array_equal(np.sign(base), np.sign(scaled))


def test_svm_input_checks():
    with pytest.raises(ValueError):
        svm_train(np.eye(2), [0, 1])
    with pytest.raises(ValueError):
        svm_train(np.eye(3), [1, -1])
    with pytest.raises(ValueError):
        svm_train(np.eye(2), [1, -1], C=0)


def test_non_convergence_is_reported(caplog):
    X, y = _toy(4, 60)
    m = svm_train(gram_matrix(X), y, C=1000, max_iter=3)
    assert not m.converged and m.iterations == 3
    assert "SMO stopped" in caplog.text


def test_multiclass_one_vs_all():
    rng = np.random.default_rng(0)
    y = np.repeat([0, 1, 2], 15)
    X = rng.random((45, 3)) * 0.5
    X[np.arange(45), y] += 2
    K = gram_matrix(X)
    model = train_multiclass(K, y, C=10)
    assert len(model.models) == 3
    assert np.mean(model.predict(K) == y) == 1.0


def test_cv_separable():
    X, y = _toy(5, 40)
    r = cross_validate(gram_matrix(X), y, folds=5, seed=0)
    assert r.mean == 1.0 and r.std == 0.0


def test_cv_shuffled_labels_near_chance():
    X, y = _toy(6, 200, 8)
    y = np.random.default_rng(0).permutation(y)
    r = cross_validate(gram_matrix(X), y, folds=10, seed=0)
    assert 0.4 <= r.mean <= 0.6


def test_cv_deterministic():
    X, y = _toy(7, 60)
    y[::7] *= -1
    K = gram_matrix(X)
    a, b = cross_validate(K, y, 5, seed=3), cross_validate(K, y, 5, seed=3)
    assert a.fold_accuracies == b.fold_accuracies and a.chosen_C == b.chosen_C


def test_cv_errors():
    K = np.eye(6)
    with pytest.raises(ValueError):
        cross_validate(K, [0, 0, 0, 0, 0, 1], folds=2)
    with pytest.raises(ValueError):
        cross_validate(K, [0, 1] * 3, folds=1)


def test_rho():
    assert retrieval_rho(["a", "b", "c"], ["a", "c", "b"]) == 1.0
    assert rho_from_ranks(2, 1) == 0.75
    assert rho_from_ranks(4, 4) == 0.25
    # classifier top "b" is 2nd in truth; truth top "a" is 2nd for the classifier
    assert retrieval_rho(["b", "a", "c"], ["a", "b", "c"]) == 0.5
    with pytest.raises(ValueError):
        retrieval_rho([], [])
    with pytest.raises(ValueError):
        rho_from_ranks(0, 1)


@given(st.permutations(range(6)), st.permutations(range(6)))
def test_rho_range(a, b):
    r = retrieval_rho(a, b)
    assert 0 < r <= 1
    assert (r == 1) == (a[0] == b[0])


def test_rank_models():
    models = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    assert rank_models([1.0, 0.1], models, ids=["x", "y", "z"]) == ["x", "z", "y"]
