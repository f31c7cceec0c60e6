"""Shared helpers for the test suite."""

import random

from mbrr import all_nodes, encode, fill_message_matrix, make_params

# Geometry of every set: n nodes in racks of u, any k readable, dbar helper
# racks per repair. "pairs" and "quads" have even u and land in prime fields;
# "aligned" has k an exact multiple of u (u0 = 0).
PARAM_SETS = {
    "reference": (12, 7, 3, 3),
    "wide": (15, 7, 3, 3),
    "aligned": (12, 6, 3, 3),
    "pairs": (8, 5, 2, 3),
    "quads": (20, 11, 4, 4),
}

_cache = {}


def params(name):
    got = _cache.get(name)
    if got is None:
        got = _cache.setdefault(name, make_params(*PARAM_SETS[name]))
    return got


def random_stripe(p, rng):
    return [rng.randrange(p.field.q) for _ in range(p.B)]


def coded_columns(C):
    """Node-keyed columns of a code matrix."""
    return {node: C.column(node) for node in all_nodes(C.params)}


def encoded(p, rng):
    """(data, CodeMatrix, columns) for one random stripe."""
    data = random_stripe(p, rng)
    C = encode(fill_message_matrix(p, data))
    return data, C, coded_columns(C)
