"""Stacked-ensemble structure: OOF bookkeeping, shapes, determinism, bundle IO."""

import json

import numpy as np
import pytest

from icstwin.ml import MissingClass, train
from icstwin.stacking import FoldTooSmall, StackedModel, stratified_kfold, train_stacked


def toy_five_class(n_per=25, seed=0):
    rng = np.random.default_rng(seed)
    centers = np.array([[0, 0], [6, 0], [0, 6], [6, 6], [3, 12]], dtype=float)
    X = np.vstack([rng.normal(c, 0.6, size=(n_per, 2)) for c in centers])
    y = np.repeat(np.arange(5), n_per)
    return X, y


class TestStratifiedKfold:
    def test_every_fold_gets_every_class(self):
        _, y = toy_five_class(n_per=10)
        folds = stratified_kfold(y, 5, seed=0)
        for fold in range(5):
            assert set(y[folds == fold]) == set(range(5))

    def test_fold_too_small(self):
        y = np.array([0] * 10 + [1] * 3)
        with pytest.raises(FoldTooSmall):
            stratified_kfold(y, 5, seed=0)

    def test_deterministic(self):
        _, y = toy_five_class()
        assert (stratified_kfold(y, 5, 3) == stratified_kfold(y, 5, 3)).all()


class TestTrainStacked:
    def test_meta_matrix_shape_and_no_leakage(self):
        X, y = toy_five_class(n_per=20)
        model = train_stacked(X, y, k=5, seed=0)
        assert model.meta_dim == 15
        assert model.level1.n_features == 15
        # no-leakage bookkeeping: each sample's fold-model training indices exclude it
        assert model.fold_assignments is not None
        for fold, rest in enumerate(model.fold_train_indices):
            holdout = np.flatnonzero(model.fold_assignments == fold)
            assert set(holdout).isdisjoint(set(rest.tolist()))
            assert len(holdout) + len(rest) == len(y)

    def test_level0_order_is_gb_dt_nb(self):
        X, y = toy_five_class(n_per=15)
        model = train_stacked(X, y, k=3, seed=0)
        assert [m.kind for m in model.level0] == ["GB", "DT", "NB"]

    def test_perfect_bases_give_perfect_stack(self):
        # fully separable toy set: all three level-0 kinds are perfect, so
        # the stacked model must be perfect on held-out data too
        X, y = toy_five_class(n_per=30, seed=1)
        Xte, yte = toy_five_class(n_per=10, seed=2)
        for kind in ("GB", "DT", "NB"):
            base = train(kind, X, y)
            assert (np.asarray(base.predict(Xte)) == yte).all()
        model = train_stacked(X, y, k=5, seed=0)
        assert (np.asarray(model.predict(Xte)) == yte).all()

    def test_missing_class_rejected(self):
        X, y = toy_five_class(n_per=10)
        with pytest.raises(MissingClass):
            train_stacked(X[y != 3], y[y != 3], k=3, seed=0)

    def test_same_seed_identical_bundle(self):
        X, y = toy_five_class(n_per=12)
        a = train_stacked(X, y, k=3, seed=7)
        b = train_stacked(X, y, k=3, seed=7)
        assert a.to_json() == b.to_json()

    def test_onehot_mode(self):
        X, y = toy_five_class(n_per=12)
        model = train_stacked(X, y, k=3, seed=0, level0_outputs="onehot")
        P = model.predict_proba(X[:5])
        assert np.allclose(P.sum(axis=1), 1.0, atol=1e-9)

    def test_repeats_average_out_of_fold_predictions(self):
        X, y = toy_five_class(n_per=12)
        model = train_stacked(X, y, k=3, seed=0, repeats=2)
        assert (np.asarray(model.predict(X)) == y).mean() > 0.95


class TestPredictStacked:
    def test_proba_sums_to_one_and_pure_function(self):
        X, y = toy_five_class(n_per=12)
        model = train_stacked(X, y, k=3, seed=0)
        P1 = model.predict_proba(X[:7])
        P2 = model.predict_proba(X[:7])
        assert np.allclose(P1, P2)
        assert np.abs(P1.sum(axis=1) - 1.0).max() < 1e-9

    def test_single_sample_api(self):
        X, y = toy_five_class(n_per=12)
        model = train_stacked(X, y, k=3, seed=0)
        label = model.predict(X[0])
        assert isinstance(label, int)

    def test_dimension_mismatch(self):
        from icstwin.ml import DimensionMismatch

        X, y = toy_five_class(n_per=12)
        model = train_stacked(X, y, k=3, seed=0)
        with pytest.raises(DimensionMismatch):
            model.predict(np.zeros((2, 9)))


class TestBundleSerialization:
    def test_roundtrip_preserves_predictions(self):
        X, y = toy_five_class(n_per=12)
        model = train_stacked(X, y, k=3, seed=0)
        clone = StackedModel.from_json(model.to_json())
        rng = np.random.default_rng(0)
        probe = rng.normal(3, 4, size=(30, 2))
        assert np.allclose(model.predict_proba(probe), clone.predict_proba(probe))

    def test_bundle_references_four_classifiers(self):
        X, y = toy_five_class(n_per=12)
        payload = json.loads(train_stacked(X, y, k=3, seed=0).to_json())
        assert len(payload["level0"]) == 3
        assert payload["level1"]["kind"] == "ANN"
        assert payload["schema_version"] == 1

    def test_version_mismatch_rejected(self):
        X, y = toy_five_class(n_per=12)
        payload = json.loads(train_stacked(X, y, k=3, seed=0).to_json())
        payload["schema_version"] = 2
        with pytest.raises(ValueError):
            StackedModel.from_dict(payload)
