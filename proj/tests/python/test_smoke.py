"""End-to-end smoke tests for the Python bindings."""

import numpy as np
import pytest

import sgtk


def two_block_graph(seed=3):
    return sgtk.make_blockdense_graph(windows=4, tiles=2, seed=seed)


def random_csr(n=120, p=0.05, seed=7):
    return sgtk.make_random_graph(n, p, seed)


def scipy_or_none():
    try:
        import scipy.sparse as sp

        return sp
    except ImportError:  # pragma: no cover
        return None


def to_dense(g):
    a = np.zeros((g.num_nodes, g.num_nodes), dtype=np.float32)
    rows = np.repeat(
        np.arange(g.num_nodes), np.diff(g.node_pointer).astype(np.int64)
    )
    vals = g.values if g.values is not None else np.ones(g.num_edges)
    a[rows, g.edge_list] = vals
    return a


def test_transform_block_accounting():
    g = two_block_graph()
    t = sgtk.sgt_transform(g)
    s = sgtk.block_stats(t)
    assert s.block_counter == 8
    assert s.capacity == s.block_counter * 16 * 8
    assert s.nnz == g.num_edges
    assert s.mean_tile_density == pytest.approx(1.0)


def test_spmm_matches_dense_product():
    g = random_csr()
    t = sgtk.sgt_transform(g)
    x = np.random.default_rng(0).standard_normal((g.num_nodes, 16)).astype(
        np.float32
    )
    out = sgtk.spmm_hybrid(t, x)
    want = to_dense(g) @ x
    np.testing.assert_allclose(out, want, rtol=1e-4, atol=1e-5)

    sp = scipy_or_none()
    if sp is not None:
        a = sp.csr_matrix(
            (
                np.ones(g.num_edges, dtype=np.float32),
                g.edge_list,
                g.node_pointer,
            ),
            shape=(g.num_nodes, g.num_nodes),
        )
        np.testing.assert_allclose(out, a @ x, rtol=1e-4, atol=1e-5)


def test_sddmm_matches_edgewise_dots():
    g = random_csr(seed=11)
    t = sgtk.reblock(sgtk.sgt_transform(g), 16)
    rng = np.random.default_rng(1)
    x = rng.standard_normal((g.num_nodes, 8)).astype(np.float32)
    y = rng.standard_normal((g.num_nodes, 8)).astype(np.float32)
    out = sgtk.sddmm_hybrid(t, x, y)
    rows = np.repeat(
        np.arange(g.num_nodes), np.diff(g.node_pointer).astype(np.int64)
    )
    want = np.einsum("ek,ek->e", x[rows], y[g.edge_list])
    np.testing.assert_allclose(out, want, rtol=1e-4, atol=1e-5)


def test_split_plans_agree():
    g = random_csr(seed=23)
    t = sgtk.sgt_transform(g)
    x = np.random.default_rng(2).standard_normal((g.num_nodes, 32)).astype(
        np.float32
    )
    full = sgtk.spmm_hybrid(t, x, plan=sgtk.make_split_plan(t, 1.0))
    none = sgtk.spmm_hybrid(t, x, plan=sgtk.make_split_plan(t, 0.0))
    half = sgtk.spmm_hybrid(t, x, plan=sgtk.make_split_plan(t, 0.5))
    np.testing.assert_allclose(full, none, rtol=1e-4, atol=1e-6)
    np.testing.assert_allclose(full, half, rtol=1e-4, atol=1e-6)


def test_gcn_forward_against_dense_oracle():
    g = sgtk.normalize_graph(
        random_csr(n=80, seed=5), symmetrize=True, add_self_loops=True
    )
    g = sgtk.gcn_normalize_values(g)
    t = sgtk.sgt_transform(g)
    rng = np.random.default_rng(3)
    x = rng.standard_normal((g.num_nodes, 16)).astype(np.float32)
    layers = [
        (rng.uniform(-0.1, 0.1, (16, 16)).astype(np.float32), True),
        (rng.uniform(-0.1, 0.1, (16, 16)).astype(np.float32), False),
    ]
    out = sgtk.gcn_forward(t, x, layers)
    want = sgtk.oracle_dense_gcn(to_dense(g), x, layers)
    np.testing.assert_allclose(out, want, rtol=1e-4, atol=1e-5)


def test_agnn_forward_preserves_shape_and_rows_softmax():
    g = sgtk.normalize_graph(random_csr(n=60, seed=9), add_self_loops=True)
    t = sgtk.sgt_transform(g)
    x = np.random.default_rng(4).standard_normal((g.num_nodes, 32)).astype(
        np.float32
    )
    out = sgtk.agnn_forward(t, x, betas=[1.0, 0.5, 1.2, 0.8])
    assert out.shape == (g.num_nodes, 32)
    assert np.isfinite(out).all()

    logits = np.random.default_rng(5).standard_normal(g.num_edges).astype(
        np.float32
    )
    soft = sgtk.edge_softmax(g, logits)
    sums = np.add.reduceat(soft, g.node_pointer[:-1].astype(np.int64))
    degrees = np.diff(g.node_pointer)
    np.testing.assert_allclose(sums[degrees > 0], 1.0, atol=1e-6)


def test_tf32_rounding():
    m = np.array([[1.0, 1.0 + 2.0**-11, -3.14159]], dtype=np.float32)
    r = sgtk.tf32_round(m)
    assert r[0, 0] == 1.0
    assert r[0, 1] == 1.0
    assert abs(r[0, 2] + 3.14159) / 3.14159 <= 2.0**-11


def test_sgt_file_roundtrip(tmp_path):
    g = random_csr(seed=31)
    t = sgtk.sgt_transform(g)
    path = str(tmp_path / "g.sgt")
    sgtk.save_sgt(t, path)
    back = sgtk.load_sgt(path)
    assert back.block_counter == t.block_counter
    np.testing.assert_array_equal(back.edge_to_column, t.edge_to_column)
    with pytest.raises(OSError):
        sgtk.load_sgt(str(tmp_path / "missing.sgt"))


def test_shape_errors_surface_as_value_errors():
    g = two_block_graph()
    t = sgtk.sgt_transform(g)
    x_bad = np.zeros((3, 4), dtype=np.float32)
    with pytest.raises(ValueError):
        sgtk.spmm_hybrid(t, x_bad)
    with pytest.raises(ValueError):
        sgtk.make_split_plan(t, 1.5)


def test_csr_from_coo_and_normalize():
    rows = np.array([0, 1, 1], dtype=np.int64)
    cols = np.array([1, 0, 0], dtype=np.int64)
    g = sgtk.csr_from_coo(2, rows, cols)
    assert g.num_edges == 3
    deduped = sgtk.normalize_graph(g, dedupe=True)
    assert deduped.num_edges == 2
    looped = sgtk.normalize_graph(g, add_self_loops=True, dedupe=True)
    assert looped.num_edges == 4
