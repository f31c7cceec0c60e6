import random
from itertools import combinations

import pytest

from mbrr.encode import encode
from mbrr.layout import IntegrityError, NodeId, all_nodes, fill_message_matrix
from mbrr.reconstruct import (
    Decoder,
    ObservedColumn,
    oracle_reconstruct,
    reconstruct,
    take_columns,
)

from support import PARAM_SETS, params, random_stripe, encoded


def observe(cols, ids):
    return [ObservedColumn(n, cols[n]) for n in ids]


def test_reconstruct_from_sampled_subsets():
    rng = random.Random(100)
    for name in PARAM_SETS:
        p = params(name)
        nodes = list(all_nodes(p))
        for _ in range(5):
            data, C, cols = encoded(p, rng)
            for _ in range(8):
                ids = sorted(rng.sample(nodes, p.k))
                M = reconstruct(p, observe(cols, ids))
                assert M.rows == fill_message_matrix(p, data).rows


def test_every_subset_small_geometry():
    """All C(8,5) = 56 subsets on the two-per-rack geometry."""
    p = params("pairs")
    rng = random.Random(101)
    data, C, cols = encoded(p, rng)
    nodes = list(all_nodes(p))
    for picks in combinations(nodes, p.k):
        M = reconstruct(p, observe(cols, list(picks)))
        assert M.rows == fill_message_matrix(p, data).rows


def test_decoder_reuse_across_stripes():
    p = params("reference")
    rng = random.Random(102)
    nodes = list(all_nodes(p))
    ids = sorted(rng.sample(nodes, p.k))
    dec = Decoder(p, ids)
    for _ in range(20):
        data, C, cols = encoded(p, rng)
        M = dec.reconstruct(observe(cols, ids))
        assert M.rows == fill_message_matrix(p, data).rows


def test_observation_validation():
    p = params("reference")
    rng = random.Random(103)
    data, C, cols = encoded(p, rng)
    nodes = list(all_nodes(p))
    good = observe(cols, nodes[: p.k])
    with pytest.raises(ValueError, match="exactly k"):
        reconstruct(p, good[:-1])
    dup = good[:-1] + [good[0]]
    with pytest.raises(ValueError, match="duplicate"):
        reconstruct(p, dup)
    short = good[:-1] + [ObservedColumn(good[-1].id, good[-1].symbols[:-1])]
    with pytest.raises(ValueError, match="alpha"):
        reconstruct(p, short)
    bad_node = good[:-1] + [ObservedColumn(NodeId(7, 7), good[-1].symbols)]
    with pytest.raises(ValueError):
        reconstruct(p, bad_node)
    dec = Decoder(p, [c.id for c in good])
    other = observe(cols, nodes[1 : p.k + 1])
    with pytest.raises(ValueError, match="do not match"):
        dec.reconstruct(other)


def test_take_columns():
    p = params("reference")
    rng = random.Random(104)
    data, C, cols = encoded(p, rng)
    ids = list(all_nodes(p))[: p.k]
    obs = take_columns(C, ids)
    assert [o.id for o in obs] == ids
    assert all(list(o.symbols) == cols[o.id] for o in obs)


# ---------------------------------------------------------------- oracle


def test_oracle_matches_structured_decoder():
    rng = random.Random(105)
    for name in PARAM_SETS:
        p = params(name)
        nodes = list(all_nodes(p))
        for _ in range(10):
            data, C, cols = encoded(p, rng)
            ids = sorted(rng.sample(nodes, p.k))
            obs = observe(cols, ids)
            assert oracle_reconstruct(p, obs).rows == reconstruct(p, obs).rows


def test_oracle_uses_extra_columns():
    p = params("reference")
    rng = random.Random(106)
    data, C, cols = encoded(p, rng)
    obs = observe(cols, list(all_nodes(p)))  # all n columns
    assert oracle_reconstruct(p, obs).rows == fill_message_matrix(p, data).rows
    with pytest.raises(ValueError, match="at least k"):
        oracle_reconstruct(p, obs[: p.k - 1])


def test_oracle_detects_any_single_flip_given_redundancy():
    """With one spare column every symbol is cross-checked, so any single
    corrupted symbol leaves no consistent stripe at all."""
    p = params("pairs")
    rng = random.Random(107)
    data, C, cols = encoded(p, rng)
    nodes = list(all_nodes(p))
    ids = nodes[: p.k + 1]
    for victim in range(len(ids)):
        for row in range(p.alpha):
            tampered = {n: list(cols[n]) for n in ids}
            delta = rng.randrange(1, p.field.q)
            tampered[ids[victim]][row] = p.field.add(
                tampered[ids[victim]][row], delta
            )
            with pytest.raises(IntegrityError, match="inconsistent"):
                oracle_reconstruct(p, observe(tampered, ids))


def test_structured_decoder_flags_most_corruption():
    """Exactly k columns are still overdetermined; a flip either trips the
    structure checks or decodes to a different, self-consistent stripe."""
    p = params("reference")
    rng = random.Random(108)
    nodes = list(all_nodes(p))
    detected = 0
    trials = 40
    for _ in range(trials):
        data, C, cols = encoded(p, rng)
        ids = sorted(rng.sample(nodes, p.k))
        victim = rng.choice(ids)
        row = rng.randrange(p.alpha)
        tampered = {n: list(cols[n]) for n in ids}
        tampered[victim][row] ^= rng.randrange(1, p.field.q)
        try:
            M = reconstruct(p, observe(tampered, ids))
        except IntegrityError:
            detected += 1
        else:
            assert M.rows != fill_message_matrix(p, data).rows
    assert detected >= trials // 2
