import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import orthogonal_procrustes

from orient.embedding import AlignedPair, Embedding
from orient.errors import DimMismatch, EmptyEvaluation, InputError
from orient.evaluation import (
    AnalogyDataset,
    EvalReport,
    NeighborIndex,
    NoiseSpec,
    SimilarityDataset,
    analogy_eval,
    gaussian_calibrate,
    load_analogy_dataset,
    load_similarity_dataset,
    mean_cosine,
    nearest_neighbors,
    rmse,
    similarity_eval,
    spearman,
)
from orient.rng import PortableRNG
from orient.synthetic import parallelogram_vocabulary, random_embedding, random_orthogonal


def rank_then_pearson(x, y):
    """Independent oracle: average ranks by explicit counting, then Pearson."""

    def ranks(v):
        out = []
        for value in v:
            below = sum(1 for w in v if w < value)
            equal = sum(1 for w in v if w == value)
            out.append(below + (equal + 1) / 2)
        return out

    rx, ry = ranks(list(x)), ranks(list(y))
    mx, my = sum(rx) / len(rx), sum(ry) / len(ry)
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry))
    return num / den


def scan_analogy(target, source, ds):
    """Exhaustive cosine scan with explicit loops and byte-order tie-break."""
    correct = evaluated = 0
    for a, b, c, d in ds.items:
        if not (a in source and b in source and c in source and d in target):
            continue
        evaluated += 1
        q = source.vector(c) + source.vector(b) - source.vector(a)
        best = None
        for tok in target.tokens:
            if tok in (a, b, c):
                continue
            v = target.vector(tok)
            cos = float(q @ v) / (np.linalg.norm(q) * np.linalg.norm(v))
            key = (-cos, tok.encode())
            if best is None or key < best[0]:
                best = (key, tok)
        correct += best[1] == d
    return correct / evaluated


def test_rmse_examples():
    a = np.arange(6.0).reshape(3, 2)
    assert rmse(a, a) == 0.0
    assert rmse([[0.0, 0.0]], [[3.0, 4.0]]) == 5.0
    assert rmse([[0.0, 0.0], [1.0, 1.0]], [[0.0, 0.0], [1.0, 3.0]]) == pytest.approx(math.sqrt(2))
    pair = AlignedPair.from_arrays([[0.0, 0.0]], [[3.0, 4.0]])
    assert rmse(pair) == 5.0
    with pytest.raises(DimMismatch):
        rmse(np.zeros((2, 2)), np.zeros((3, 2)))


def test_rmse_rotation_invariant(rng):
    a, b = rng.standard_normal((30, 6)), rng.standard_normal((30, 6))
    q = random_orthogonal(6, rng)
    assert rmse(a @ q, b @ q) == pytest.approx(rmse(a, b), abs=1e-10)
    b2 = a.copy()
    b2[3, 2] = np.nextafter(b2[3, 2], np.inf)
    assert rmse(a, b2) > 0


def test_mean_cosine_examples():
    u = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert mean_cosine(u, u) == 1.0
    assert mean_cosine(u, -u) == -1.0
    assert mean_cosine(u, u[::-1]) == 0.0
    with pytest.raises(InputError):
        mean_cosine(u, np.zeros((2, 2)))


def test_nearest_neighbors_examples(rng):
    emb = random_embedding(10, 4, rng)
    assert nearest_neighbors(emb, emb.vector("w3"), 1) == ["w3"]
    second = nearest_neighbors(emb, emb.vector("w3"), 2)[1]
    assert nearest_neighbors(emb, emb.vector("w3"), 1, exclude={"w3"}) == [second]


def test_nearest_neighbors_orthonormal_hand_order():
    # cosines to row0 + 0.9 row1: 0.743, 0.669, then 0 for the rest (byte order)
    emb = Embedding(("d", "c", "b", "a"), np.eye(4))
    q = emb.vector("d") + 0.9 * emb.vector("c")
    assert nearest_neighbors(emb, q, 4) == ["d", "c", "a", "b"]


def test_nearest_neighbors_errors(rng):
    emb = random_embedding(3, 2, rng)
    with pytest.raises(InputError):
        nearest_neighbors(emb, np.zeros(2), 1)
    with pytest.raises(InputError):
        nearest_neighbors(emb, np.ones(2), 3, exclude={"w0"})


def test_tie_break_is_byte_order():
    emb = Embedding(("é", "z", "B", "a"), np.ones((4, 2)))
    assert nearest_neighbors(emb, [1.0, 1.0], 4) == ["B", "a", "z", "é"]


def test_neighbor_blocks_thread_independent(rng, monkeypatch):
    import sys

    from orient import _parallel

    monkeypatch.setattr(sys.modules["orient.evaluation"], "QUERY_BLOCK", 7)
    emb = random_embedding(200, 5, rng)
    index = NeighborIndex.from_embedding(emb)
    q = rng.standard_normal((50, 5))
    _parallel.set_num_threads(1)
    one = index.search(q, 5)
    _parallel.set_num_threads(3)
    three = index.search(q, 5)
    _parallel.set_num_threads(None)
    assert all(np.array_equal(x, y) for x, y in zip(one, three))


def test_spearman_examples():
    assert spearman([1, 2, 3, 4], [10, 20, 30, 40]) == 1.0
    assert spearman([1, 2, 3, 4], [4, 3, 2, 1]) == -1.0
    x, y = [0.3, 0.1, 0.1, 0.9, 0.5], [2.0, 1.0, 3.0, 5.0, 4.0]
    assert spearman(x, y) == pytest.approx(rank_then_pearson(x, y), abs=1e-12)
    assert math.isnan(spearman([1, 1, 1], [1, 2, 3]))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=3, max_size=30), st.randoms())
def test_spearman_properties(items, random):
    x, y = [float(a) for a, _ in items], [float(b) for _, b in items]
    rho = spearman(x, y)
    if math.isnan(rho):
        return
    assert -1.0 <= rho <= 1.0
    assert rho == pytest.approx(rank_then_pearson(x, y), abs=1e-12)
    perm = list(range(len(x)))
    random.shuffle(perm)
    assert spearman([x[i] for i in perm], [y[i] for i in perm]) == pytest.approx(rho, abs=1e-12)


def test_similarity_eval_and_skip(rng):
    emb = random_embedding(8, 3, rng)
    pairs = [("w0", "w1"), ("w2", "w3"), ("w4", "w5"), ("w6", "w7")]
    cos = [float(emb.vector(a) @ emb.vector(b)) / (np.linalg.norm(emb.vector(a)) * np.linalg.norm(emb.vector(b)))
           for a, b in pairs]
    ds = SimilarityDataset(tuple((a, b, c) for (a, b), c in zip(pairs, cos)) + (("w0", "zz", 1.0),))
    report = similarity_eval(emb, None, ds)
    assert report.score == pytest.approx(1.0) and report.evaluated == 4 and report.skipped == 1
    assert report.total == len(ds)
    neg = SimilarityDataset(tuple((a, b, -c) for a, b, c in ds.items[:4]))
    assert similarity_eval(emb, None, neg).score == pytest.approx(-1.0)
    cross = similarity_eval(emb, emb, ds, mode="cross")
    assert cross.score == report.score
    with pytest.raises(EmptyEvaluation):
        similarity_eval(emb, None, SimilarityDataset((("w0", "w1", 1.0), ("x", "y", 2.0))))


def test_similarity_rotation_invariant(rng):
    emb = random_embedding(20, 4, rng)
    items = tuple((f"w{i}", f"w{i + 1}", float(rng.uniform())) for i in range(19))
    ds = SimilarityDataset(items)
    q = random_orthogonal(4, rng)
    rot = emb.with_matrix(emb.matrix @ q)
    assert similarity_eval(rot, rot, ds, "cross").score == pytest.approx(similarity_eval(emb, emb, ds, "cross").score,
                                                                          abs=1e-12)


def test_analogy_exact_offsets(rng):
    emb, ds = parallelogram_vocabulary(10, 6, rng)
    report = analogy_eval(emb, emb, ds)
    assert report.score == 1.0 and report.skipped == 0
    q = random_orthogonal(6, rng)
    rot = emb.with_matrix(emb.matrix @ q)
    assert analogy_eval(rot, rot, ds).score == 1.0


def test_analogy_skip_policy(rng):
    emb, ds = parallelogram_vocabulary(6, 4, rng)
    extended = AnalogyDataset(ds.items + (("x0", "y0", "x1", "missing"),))
    report = analogy_eval(emb, None, extended)
    assert report.evaluated == len(ds) and report.skipped == 1
    with pytest.raises(EmptyEvaluation):
        analogy_eval(emb, None, AnalogyDataset((("p", "q", "r", "s"),)))


def test_analogy_matches_scan_oracle(rng):
    for _ in range(5):
        emb, ds = parallelogram_vocabulary(10, 5, rng)
        noisy = emb.with_matrix(emb.matrix + 0.01 * rng.standard_normal(emb.matrix.shape))
        assert analogy_eval(noisy, emb, ds).score == scan_analogy(noisy, emb, ds)


def test_analogy_top_k_monotone(rng):
    emb, ds = parallelogram_vocabulary(10, 5, rng)
    noisy = emb.with_matrix(emb.matrix + 0.5 * rng.standard_normal(emb.matrix.shape))
    scores = [analogy_eval(noisy, emb, ds, k=k).score for k in (1, 3, 10)]
    assert scores == sorted(scores)


def test_noise_spec_validation():
    for bad in [dict(sigma=0), dict(sigma=1, fraction=0), dict(sigma=1, fraction=1.5), dict(sigma=1, seed=-1)]:
        with pytest.raises(InputError):
            NoiseSpec(**bad)


def test_calibrate_no_noise_limit(rng):
    emb = random_embedding(200, 10, rng)
    for variant in ["r", "rst", "c"]:
        assert gaussian_calibrate(emb, NoiseSpec(1e-12), variant).score <= 1e-9


def test_calibrate_deterministic(rng):
    emb = random_embedding(100, 5, rng)
    one = gaussian_calibrate(emb, NoiseSpec(0.1, 0.5, seed=3))
    two = gaussian_calibrate(emb, NoiseSpec(0.1, 0.5, seed=3))
    other = gaussian_calibrate(emb, NoiseSpec(0.1, 0.5, seed=4))
    assert one.score == two.score != other.score
    assert one.params["noisy_rows"] == 50


def test_calibrate_fraction_monte_carlo(rng):
    n, d, sigma = 2000, 40, 0.2
    emb = random_embedding(n, d, rng)
    full = gaussian_calibrate(emb, NoiseSpec(sigma, 1.0, seed=1)).score
    half = gaussian_calibrate(emb, NoiseSpec(sigma, 0.5, seed=1)).score
    # oracle with an unrelated generator and solver
    oracle = {}
    for p in (1.0, 0.5):
        runs = []
        for _ in range(3):
            b = emb.matrix.copy()
            rows = rng.choice(n, int(p * n), replace=False)
            b[rows] += sigma * rng.standard_normal((rows.size, d))
            r, _ = orthogonal_procrustes(b, emb.matrix)
            runs.append(np.sqrt(np.mean(np.sum((emb.matrix - b @ r) ** 2, axis=1))))
        oracle[p] = np.mean(runs)
    assert full == pytest.approx(oracle[1.0], rel=0.05)
    assert half == pytest.approx(oracle[0.5], rel=0.05)
    assert half / full == pytest.approx(1 / math.sqrt(2), rel=0.2)


def test_portable_rng_stream():
    a, b = PortableRNG(7), PortableRNG(7)
    assert np.array_equal(a.normal(11), b.normal(11))
    u = PortableRNG(0).uniform(10000)
    assert u.min() >= 0 and u.max() < 1
    z = PortableRNG(1).normal(20000)
    assert abs(z.mean()) < 0.05 and abs(z.std() - 1) < 0.05
    picks = PortableRNG(2).choice(100, 30)
    assert len(set(picks.tolist())) == 30 and list(picks) == sorted(picks)


def test_dataset_loaders(tmp_path):
    sim = tmp_path / "sim.tsv"
    sim.write_text("# header comment\nCat\tdog\t7.5\n\ncar\tauto\t9\n", encoding="utf-8")
    ds = load_similarity_dataset(sim)
    assert ds.items == (("Cat", "dog", 7.5), ("car", "auto", 9.0))
    assert load_similarity_dataset(sim, lower=True).items[0][0] == "cat"
    ana = tmp_path / "ana.txt"
    ana.write_text(": capital\nathens greece baghdad iraq\n# x\nA B C D\n", encoding="utf-8")
    assert load_analogy_dataset(ana).items == (("athens", "greece", "baghdad", "iraq"), ("A", "B", "C", "D"))
    bad = tmp_path / "bad.tsv"
    bad.write_text("a\tb\tnotanumber\n", encoding="utf-8")
    with pytest.raises(InputError):
        load_similarity_dataset(bad)
    with pytest.raises(InputError):
        AnalogyDataset((("a", "b", "a", "c"),))


def test_eval_report_rendering():
    r = EvalReport("P", {5: 0.5, 1: 0.25}, 4, 1)
    assert r.to_text() == "P@1\t0.25\t4\t1\nP@5\t0.5\t4\t1\n"
    doc = json.loads(r.to_json())
    assert doc["score"] == {"1": 0.25, "5": 0.5} and doc["evaluated"] == 4
    assert EvalReport("spearman", 0.5, 3, 0).to_text() == "spearman\t0.5\t3\t0\n"
