"""Random spanning trees of width-2 composition graphs.

Each step attaches the new vertex to both ends of the current window edge
and deletes one edge of the resulting triangle, biased toward keeping
short edges.  The output is a spanning subtree carrying original lengths,
so it never contracts any distance.
"""

from __future__ import annotations

from fractions import Fraction

from .graphs import MetricGraph, edge_key
from .pathwidth import LinearCompositionSequence

DEFAULT_TAU = Fraction(12)


class WrongWidth(ValueError):
    pass


class DegenerateZero(ZeroDivisionError):
    pass


class TooManyOutcomes(ValueError):
    pass


def pw2_deletion_probability(case: str, len_uw, len_vw, len_uv=None, tau=DEFAULT_TAU):
    """Probability of deleting the edge to the first window endpoint.

    ``same_window``: len_uw / (len_uw + len_vw).
    ``moved_window`` (window slid to the other endpoint): the deletion is
    capped, min(1, tau * len_uw / (len_uw + len_uv)).
    Raises DegenerateZero when the denominator vanishes; callers treat
    that as a fair coin since every distance involved is then zero.
    """
    len_uw = Fraction(len_uw)
    if case == "same_window":
        denom = len_uw + Fraction(len_vw)
        if denom == 0:
            raise DegenerateZero("both candidate edges have length zero")
        return len_uw / denom
    if case == "moved_window":
        denom = len_uw + Fraction(len_uv)
        if denom == 0:
            raise DegenerateZero("both candidate edges have length zero")
        return min(Fraction(1), Fraction(tau) * len_uw / denom)
    raise ValueError(f"unknown case {case!r}")


def _step_choices(g: MetricGraph, window, x, retained, tau):
    """The two possible deletions for one step: [(edge_to_delete, prob), ...].

    `window` is the current edge {u, v}, `x` the new vertex, `retained`
    the next window.  Exactly one listed edge is deleted.
    """
    u, v = sorted(window)
    if retained == frozenset((u, v)):
        try:
            p = pw2_deletion_probability(
                "same_window", g.length(u, x), g.length(v, x), tau=tau
            )
        except DegenerateZero:
            p = Fraction(1, 2)
        return [(edge_key(u, x), p), (edge_key(v, x), 1 - p)]
    if retained == frozenset((v, x)):
        keep_u, other = u, v
    elif retained == frozenset((u, x)):
        keep_u, other = v, u
    else:
        raise ValueError(f"retained window {sorted(retained)!r} not inside the triangle")
    # the slid window edge {other, x} always survives; the risk is between
    # the opposite new edge and the old window edge
    try:
        p = pw2_deletion_probability(
            "moved_window", g.length(keep_u, x), None, g.length(u, v), tau=tau
        )
    except DegenerateZero:
        p = Fraction(1, 2)
    return [(edge_key(keep_u, x), p), (edge_key(u, v), 1 - p)]


def embed_pathwidth2(seq: LinearCompositionSequence, g: MetricGraph, rng,
                     tau=DEFAULT_TAU) -> MetricGraph:
    """Sample a random spanning tree of the composed graph of `seq`.

    `g` must be the reduced metric graph on the composed edge set; the
    returned tree keeps the lengths of the edges it retains.
    """
    if seq.k != 2:
        raise WrongWidth(f"this construction needs k=2, got k={seq.k}")
    u0, v0 = sorted(seq.initial)
    tree = {edge_key(u0, v0)}
    window = frozenset((u0, v0))
    for x, retained in seq.steps:
        u, v = sorted(window)
        tree.add(edge_key(u, x))
        tree.add(edge_key(v, x))
        choices = _step_choices(g, window, x, retained, tau)
        (victim, p), (other, _) = choices
        tree.discard(victim if rng.random() < p else other)
        window = retained
        assert edge_key(*sorted(window)) in tree
    return g.with_edges({e: g.length(*e) for e in tree})


def enumerate_pw2_distribution(seq: LinearCompositionSequence, g: MetricGraph,
                               tau=DEFAULT_TAU, limit=1 << 20):
    """Exact output distribution as [(tree, probability)], probabilities sum to 1."""
    if seq.k != 2:
        raise WrongWidth(f"this construction needs k=2, got k={seq.k}")
    if 2 ** len(seq.steps) > limit:
        raise TooManyOutcomes(f"{len(seq.steps)} binary steps exceed the limit")
    u0, v0 = sorted(seq.initial)
    outcomes = {frozenset({edge_key(u0, v0)}): Fraction(1)}
    window = frozenset((u0, v0))
    for x, retained in seq.steps:
        nxt = {}
        for tree, prob in outcomes.items():
            grown = tree | {edge_key(sorted(window)[0], x), edge_key(sorted(window)[1], x)}
            for victim, p in _step_choices(g, window, x, retained, tau):
                if p == 0:
                    continue
                key = frozenset(grown - {victim})
                nxt[key] = nxt.get(key, Fraction(0)) + prob * p
        outcomes = nxt
        window = retained
    result = [
        (g.with_edges({e: g.length(*e) for e in tree}), prob)
        for tree, prob in outcomes.items()
    ]
    result.sort(key=lambda pair: sorted(pair[0].edge_keys()))
    assert sum(p for _, p in result) == 1
    return result
