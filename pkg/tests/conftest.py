import itertools

import numpy as np
import pytest


def enumerate_bag_marginals(p_pos, p_neg, pi_plus):
    """Marginals of the three bags by brute-force enumeration of all label
    patterns of a triplet (no closed forms involved).

    Returns (q1, q2, q3, n1_prob, n2_prob): distributions over the finite
    support for bag1, bag2 and bag3 and the keep/flip probabilities.
    """
    p_pos = np.asarray(p_pos, float)
    p_neg = np.asarray(p_neg, float)
    cond = {1: p_pos, -1: p_neg}
    prior = {1: pi_plus, -1: 1.0 - pi_plus}
    k = len(p_pos)
    acc = {"keep": np.zeros((3, k)), "flip": np.zeros((3, k))}
    mass = {"keep": 0.0, "flip": 0.0}
    for ys in itertools.product((1, -1), repeat=3):
        w = prior[ys[0]] * prior[ys[1]] * prior[ys[2]]
        kind = "flip" if ys[0] == ys[2] != ys[1] else "keep"
        mass[kind] += w
        for pos in range(3):
            acc[kind][pos] += w * cond[ys[pos]]
    keep = acc["keep"] / mass["keep"] if mass["keep"] else acc["keep"]
    flip = acc["flip"] / mass["flip"] if mass["flip"] else acc["flip"]
    # bag1 pools positions a and c of both sets; each position of each triplet
    # counts once, so the pool mixes keep/flip in proportion to their mass
    q1 = mass["keep"] * (keep[0] + keep[2]) / 2 + mass["flip"] * (flip[0] + flip[2]) / 2
    return q1, keep[1], flip[1], mass["keep"], mass["flip"]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
