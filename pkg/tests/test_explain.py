import numpy as np
import pytest

from boxlens import (
    Dataset,
    Feasible,
    feature_grid,
    ice_curve,
    impactful_changes,
    impute_missing,
    local_importance,
    partial_dependence,
    train_tree,
    predict,
    what_if,
)
from boxlens.explain import feature_order, write_curve_csv, write_histogram_csv
from conftest import ConstantPredictor, CountingPredictor, LinearPredictor


def _dataset(rows, labels, **kw):
    return impute_missing(Dataset.from_arrays(np.asarray(rows, dtype=float), labels, **kw))


# --- partial dependence -------------------------------------------------------


def test_pdp_constant_predictor(small_numeric_dataset):
    curve = partial_dependence(ConstantPredictor(0.7), small_numeric_dataset, 0)
    assert (curve.values == 0.7).all()
    assert curve.values.size == curve.grid.size
    assert curve.histogram.counts.sum() == small_numeric_dataset.n_rows


def test_pdp_identity_predictor():
    rng = np.random.default_rng(0)
    d = _dataset(rng.uniform(0, 1, size=(30, 1)), rng.integers(0, 2, 30))
    ident = CountingPredictor(lambda x: float(x[0]), "identity")
    curve = partial_dependence(ident, d, 0)
    # averaging N copies of v reproduces v up to summation rounding
    assert np.allclose(curve.values, curve.grid, rtol=0, atol=1e-12)


def test_pdp_hand_computed_two_row_example():
    d = _dataset([[0.0, 0.0], [1.0, 1.0]], [0, 1])
    mean_pred = LinearPredictor([0.5, 0.5], 0.0)  # (x0 + x1) / 2
    curve = partial_dependence(mean_pred, d, 0)
    v1 = np.where(curve.grid == 1.0)[0][0]
    assert curve.values[v1] == pytest.approx(0.75)  # (pred([1,0]) + pred([1,1])) / 2
    v0 = np.where(curve.grid == 0.0)[0][0]
    assert curve.values[v0] == pytest.approx(0.25)


def test_pdp_never_mutates_dataset(small_numeric_dataset):
    before = small_numeric_dataset.fingerprint()
    partial_dependence(ConstantPredictor(0.3), small_numeric_dataset, 1)
    assert small_numeric_dataset.fingerprint() == before


def test_pdp_equals_mean_of_ice_rows():
    rng = np.random.default_rng(4)
    d = _dataset(rng.uniform(0, 1, size=(12, 2)), rng.integers(0, 2, 12))
    model = LinearPredictor([0.4, 0.3], 0.1)
    f = 1
    grid = feature_grid(d.features[f])
    curve = partial_dependence(model, d, f)
    stacked = np.array([ice_curve(model, row, f, grid).values for row in d.rows])
    assert np.abs(curve.values - stacked.mean(axis=0)).max() < 1e-12
    # same evaluation order reproduces the sweep bitwise
    for j in range(grid.size):
        assert curve.values[j] == np.mean(np.ascontiguousarray(stacked[:, j]))


def test_pdp_linear_closed_form():
    rng = np.random.default_rng(8)
    d = _dataset(rng.uniform(0, 1, size=(200, 4)), rng.integers(0, 2, 200))
    w = np.array([0.05, -0.04, 0.08, 0.02])
    b = 0.5
    model = LinearPredictor(w, b)
    for f in range(4):
        curve = partial_dependence(model, d, f)
        offset = b + sum(w[g] * d.rows[:, g].mean() for g in range(4) if g != f)
        expected = w[f] * curve.grid + offset
        assert np.abs(curve.values - expected).max() < 1e-9


def make_valley_dataset(n_observed, n_missing):
    """Driver feature with a mean-imputed pile of outcome-independent rows.

    Observed values span [0, 10] with an exact-symmetric layout (mean 5),
    observed outcome is 1 iff x >= 2, and the missing rows' labels alternate
    0/1. After mean imputation the pile at x=5 has a ~0.5 positive rate
    while both sides of it are pure-positive, carving a valley into any
    tree fit.
    """
    x = np.concatenate([np.linspace(0.0, 10.0, n_observed), np.zeros(n_missing)])
    missing = np.zeros(x.size, dtype=bool)
    missing[n_observed:] = True
    labels = np.where(x >= 2.0, 1, 0)
    labels[n_observed:] = np.arange(n_missing) % 2
    return impute_missing(Dataset.from_arrays(x[:, None], labels, missing=missing[:, None]))


def test_pdp_imputation_valley():
    d = make_valley_dataset(n_observed=200, n_missing=300)
    model = train_tree(d, max_depth=4, min_leaf=1)
    curve = partial_dependence(model, d, 0)
    mean_v = d.imputed_value[0]
    sigma = float(np.std(d.rows[:, 0]))
    at = lambda v: curve.values[np.argmin(np.abs(curve.grid - v))]
    assert at(mean_v) < at(mean_v - sigma)
    assert at(mean_v) < at(mean_v + sigma)


# --- ICE ------------------------------------------------------------------------


def test_ice_anchor_value_reproduces_anchor_score(small_numeric_dataset):
    d = small_numeric_dataset
    model = LinearPredictor([0.2, 0.1, 0.3], 0.2)
    anchor = d.rows[3].copy()
    grid = np.array([0.0, anchor[1], 1.0])
    curve = ice_curve(model, anchor, 1, grid)
    assert curve.values[1] == curve.anchor_score


def test_ice_constant_predictor_flat(small_numeric_dataset):
    curve = ice_curve(ConstantPredictor(0.42), small_numeric_dataset.rows[0], 0, np.linspace(0, 1, 9))
    assert (curve.values == 0.42).all()


def test_ice_minus_pdp_constant_for_additive_model():
    rng = np.random.default_rng(14)
    d = _dataset(rng.uniform(0, 1, size=(40, 3)), rng.integers(0, 2, 40))

    class Additive:
        descriptor = "additive"

        def score(self, x):
            return float(0.1 * x[0] + 0.25 * np.clip(x[1], 0.2, 0.8) + 0.1 * x[2] ** 2 + 0.1)

    model = Additive()
    f = 1
    grid = feature_grid(d.features[f])
    pdp = partial_dependence(model, d, f)
    ice = ice_curve(model, d.rows[7], f, grid)
    diff = ice.values - pdp.values
    assert diff.max() - diff.min() < 1e-9


# --- local importance ------------------------------------------------------------


def test_importance_zero_weight_feature_scores_zero(small_numeric_dataset):
    model = LinearPredictor([0.5, 0.0, 0.2], 0.1)
    report = local_importance(model, small_numeric_dataset, small_numeric_dataset.rows[0])
    assert report.importance[1] == 0.0
    assert report.importance[0] > 0


def test_importance_constant_predictor_all_zero(small_numeric_dataset):
    report = local_importance(ConstantPredictor(0.5), small_numeric_dataset, small_numeric_dataset.rows[2])
    assert (report.importance == 0).all()


def test_importance_orders_by_weight_for_matched_columns():
    # identical range and std: column 1 is a shuffled copy of column 0
    rng = np.random.default_rng(6)
    col = rng.uniform(0, 1, size=50)
    rows = np.column_stack([col, rng.permutation(col)])
    d = _dataset(rows, rng.integers(0, 2, 50))
    model = LinearPredictor([0.3, 0.1], 0.2)
    anchor = d.rows[5]
    report = local_importance(model, d, anchor)
    assert report.importance[0] > report.importance[1]

    # brute-force oracle straight from the definition
    for f in range(2):
        grid = feature_grid(d.features[f])
        sigma = max(np.std(d.rows[:, f]), 1e-9)
        w = np.exp(-((grid - anchor[f]) ** 2) / (2 * sigma**2))
        dev = np.abs(
            np.array([predict(model, np.where(np.arange(2) == f, v, anchor)) for v in grid])
            - predict(model, anchor)
        )
        assert report.importance[f] == pytest.approx(float((w * dev).sum() / w.sum()), abs=1e-12)
        assert report.bandwidth[f] == sigma


def test_importance_binary_uniform_weights():
    rows = np.array([[0.0, 0.3], [1.0, 0.7], [1.0, 0.5], [0.0, 0.1]])
    d = _dataset(rows, [0, 1, 1, 0], kinds=["binary", "numeric"])
    model = LinearPredictor([0.4, 0.2], 0.1)
    anchor = d.rows[0]
    report = local_importance(model, d, anchor)
    s = predict(model, anchor)
    expected = (abs(predict(model, [0.0, 0.3]) - s) + abs(predict(model, [1.0, 0.3]) - s)) / 2
    assert report.importance[0] == pytest.approx(expected, abs=1e-15)


def test_importance_invariant_under_row_permutation(small_numeric_dataset):
    d = small_numeric_dataset
    model = LinearPredictor([0.2, 0.3, 0.1], 0.1)
    anchor = d.rows[4].copy()
    perm = np.random.default_rng(0).permutation(d.n_rows)
    d2 = impute_missing(Dataset.from_arrays(d.rows[perm], d.labels[perm]))
    r1 = local_importance(model, d, anchor)
    r2 = local_importance(model, d2, anchor)
    assert np.allclose(r1.importance, r2.importance, atol=1e-12)


# --- impactful changes ------------------------------------------------------------


def test_impactful_monotone_decrease_hits_feasible_minimum(small_numeric_dataset):
    d = small_numeric_dataset
    model = LinearPredictor([0.5, 0.1, 0.1], 0.05)
    changes = impactful_changes(model, d, d.rows[0], "decrease")
    by_feature = {c.feature: c for c in changes}
    grid0 = feature_grid(d.features[0])
    assert by_feature[0].suggested_value == grid0[0]
    assert by_feature[0].direction == "decrease"
    assert by_feature[0].delta <= 0


def test_impactful_constant_predictor_picks_nearest_grid_value(small_numeric_dataset):
    d = small_numeric_dataset
    anchor = d.rows[1]
    changes = impactful_changes(ConstantPredictor(0.6), d, anchor, "increase")
    for c in changes:
        grid = feature_grid(d.features[c.feature])
        nearest = min(grid, key=lambda v: (abs(v - anchor[c.feature]), v))
        assert c.delta == 0.0
        assert c.suggested_value == nearest


def test_impactful_sorted_by_abs_delta_then_feature(small_numeric_dataset):
    model = LinearPredictor([0.1, 0.4, 0.2], 0.1)
    changes = impactful_changes(model, small_numeric_dataset, small_numeric_dataset.rows[0], "increase")
    keys = [(-abs(c.delta), c.feature) for c in changes]
    assert keys == sorted(keys)


def _exhaustive_suggestions(model, d, anchor, objective):
    """Oracle: scan every (feature, grid value) pair with the declared tie rules."""
    sign = 1.0 if objective == "increase" else -1.0
    base = predict(model, anchor)
    out = {}
    for meta in d.features:
        f = meta.index
        best = None  # (gain, distance, value, delta)
        for v in feature_grid(meta):
            probe = anchor.copy()
            probe[f] = v
            s = predict(model, probe)
            gain = sign * (s - base)
            cand = (gain, -abs(v - anchor[f]), -v)
            if best is None or cand > best[0]:
                best = (cand, v, s - base)
        out[f] = (best[1], best[2])
    return out


def test_impactful_matches_exhaustive_search_on_cart():
    rng = np.random.default_rng(3)
    x = rng.uniform(0, 1, size=(60, 4))
    y = ((x[:, 0] > 0.4) & (x[:, 2] < 0.7)).astype(int)
    d = _dataset(x, y)
    model = train_tree(d, max_depth=3, min_leaf=2)
    anchor = d.rows[11].copy()
    for objective in ("increase", "decrease"):
        got = impactful_changes(model, d, anchor, objective)
        oracle = _exhaustive_suggestions(model, d, anchor, objective)
        for c in got:
            ov, odelta = oracle[c.feature]
            assert c.suggested_value == ov
            assert c.delta == odelta


def test_impactful_invariant_under_row_permutation(small_numeric_dataset):
    d = small_numeric_dataset
    model = LinearPredictor([0.2, 0.3, 0.1], 0.1)
    anchor = d.rows[9].copy()
    perm = np.random.default_rng(1).permutation(d.n_rows)
    d2 = impute_missing(Dataset.from_arrays(d.rows[perm], d.labels[perm]))
    c1 = impactful_changes(model, d, anchor, "decrease")
    c2 = impactful_changes(model, d2, anchor, "decrease")
    assert [(c.feature, c.suggested_value, c.delta) for c in c1] == [
        (c.feature, c.suggested_value, c.delta) for c in c2
    ]


def test_impactful_deltas_reproduce_through_what_if(small_numeric_dataset):
    d = small_numeric_dataset
    model = LinearPredictor([0.3, 0.25, 0.15], 0.1)
    anchor = d.rows[2]
    base = predict(model, anchor)
    for c in impactful_changes(model, d, anchor, "increase"):
        vec, score = what_if(model, anchor, {d.features[c.feature].name: c.suggested_value}, d.features)
        assert vec[c.feature] == c.suggested_value  # grid members are feasible: no snap
        assert score - base == c.delta


# --- what_if ----------------------------------------------------------------------


def test_what_if_noop_override(small_numeric_dataset):
    d = small_numeric_dataset
    model = LinearPredictor([0.2, 0.2, 0.2], 0.1)
    anchor = d.rows[0]
    vec, score = what_if(model, anchor, {"x0": float(anchor[0])}, d.features)
    assert np.array_equal(vec, anchor)
    assert score == predict(model, anchor)


def test_what_if_snaps_to_feasible_interval():
    rows = np.array([[2.0], [8.0]])
    d = impute_missing(
        Dataset.from_arrays(rows, [0, 1], feasible={"x0": Feasible.interval(0, 10)})
    )
    # observed range [2, 8] intersected with [0, 10] -> snap 12 to 8
    model = ConstantPredictor(0.5)
    vec, _ = what_if(model, d.rows[0], {"x0": 12.0}, d.features)
    assert vec[0] == 8.0


def test_what_if_snaps_beyond_observed_range_without_feasible():
    rows = np.array([[0.0], [10.0]])
    d = impute_missing(Dataset.from_arrays(rows, [0, 1]))
    vec, _ = what_if(ConstantPredictor(0.2), d.rows[0], {"x0": 12.0}, d.features)
    assert vec[0] == 10.0


def test_what_if_binary_snap():
    rows = np.array([[0.0], [1.0]])
    d = impute_missing(Dataset.from_arrays(rows, [0, 1], kinds=["binary"]))
    vec, _ = what_if(ConstantPredictor(0.2), d.rows[0], {"x0": 0.4}, d.features)
    assert vec[0] == 0.0


def test_what_if_unknown_feature_errors(small_numeric_dataset):
    with pytest.raises(ValueError, match="nope"):
        what_if(ConstantPredictor(0.1), small_numeric_dataset.rows[0], {"nope": 1.0}, small_numeric_dataset.features)


def test_what_if_rejects_non_finite(small_numeric_dataset):
    with pytest.raises(ValueError, match="finite"):
        what_if(ConstantPredictor(0.1), small_numeric_dataset.rows[0], {"x0": float("nan")}, small_numeric_dataset.features)


# --- ordering & export ----------------------------------------------------------


def test_feature_order_modes(small_numeric_dataset):
    d = small_numeric_dataset
    from boxlens import train_logistic

    model = train_logistic(d, lr=0.5, iters=100)
    report = local_importance(model, d, d.rows[0])
    changes = impactful_changes(model, d, d.rows[0], "decrease")
    assert feature_order("index", d=d) == [0, 1, 2]
    imp_order = feature_order("importance", importance=report)
    assert sorted(imp_order) == [0, 1, 2]
    assert report.importance[imp_order[0]] == report.importance.max()
    assert feature_order("impactful", changes=changes) == [c.feature for c in changes]
    weight_order = feature_order("weight", model=model, d=d)
    scale = np.abs(model.weights) * np.std(d.rows, axis=0)
    assert scale[weight_order[0]] == scale.max()


def test_feature_order_weight_rejects_trees(small_numeric_dataset):
    d = small_numeric_dataset
    model = train_tree(d, max_depth=2, min_leaf=1)
    with pytest.raises(ValueError, match="logistic"):
        feature_order("weight", model=model, d=d)


def test_curve_csv_round_trip(tmp_path, small_numeric_dataset):
    d = small_numeric_dataset
    curve = partial_dependence(ConstantPredictor(0.5), d, 0)
    curve_path = tmp_path / "pdp.csv"
    hist_path = tmp_path / "hist.csv"
    write_curve_csv(curve_path, curve)
    write_histogram_csv(hist_path, curve.histogram)
    lines = curve_path.read_text().strip().splitlines()
    assert lines[0] == "grid_value,pdp"
    assert len(lines) == 1 + curve.grid.size
    grid_back = [float(line.split(",")[0]) for line in lines[1:]]
    assert grid_back == [float(v) for v in curve.grid]  # repr round-trips exactly
    hist_lines = hist_path.read_text().strip().splitlines()
    assert hist_lines[0] == "bin_lo,bin_hi,count"
    assert sum(int(line.split(",")[2]) for line in hist_lines[1:]) == d.n_rows
