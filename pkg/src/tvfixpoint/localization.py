"""
Convex range-based localization on a rotating sensor network.

Nodes and anchors are drawn in a square and rotate about the origin with
angular speed ``omega``. Range measurements carry noise drawn once per link.
Each sample is the convex least-squares surrogate

.. math:: \\sum_{(i,j)} \\tfrac12 \\|x_i - x_j - r_{ij} u_{ij}\\|^2
          + \\sum_{(i,l)} \\tfrac12 \\|x_i - a_l - v_{il} w_{il}\\|^2

where the unit directions ``u_ij`` and ``w_il`` are frozen at the previous
sampling instant. It is written in consensus form for ADMM: every node keeps
a local copy of itself and of its neighbours (``x``), the global positions
are ``z``, and the coupling is ``x - S z = 0`` with ``S`` the copy selector.
Each edge term is split evenly between its two endpoints.
"""

import numpy as np
from numpy import linalg as la

from . import functions as fn
from .errors import ConfigError

MAX_ATTEMPTS = 200


def rotation(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def _connected(N, edges):
    adj = {i: set() for i in range(N)}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    seen, stack = {0}, [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == N


def make_network(N, n_anchors, half_width, max_degree, anchor_range, seed):
    """
    Draw a connected, anchored network.

    Node links are added greedily by increasing length while both endpoints
    have fewer than `max_degree` links. Nodes link to every anchor within
    `anchor_range`. Layouts that are disconnected or have fewer than half of
    the nodes anchored are redrawn.

    Returns
    -------
    dict with ``nodes`` (N, 2), ``anchors`` (n_anchors, 2), ``edges`` and
    ``anchor_links`` (lists of index pairs).
    """
    from .problems import rng_for

    for attempt in range(MAX_ATTEMPTS):
        rng = rng_for(seed, 0, attempt)
        nodes = rng.uniform(-half_width, half_width, size=(N, 2))
        anchors = rng.uniform(-half_width, half_width, size=(n_anchors, 2))
        pairs = sorted(((la.norm(nodes[i] - nodes[j]), i, j) for i in range(N) for j in range(i + 1, N)))
        deg = np.zeros(N, dtype=int)
        edges = []
        for _, i, j in pairs:
            if deg[i] < max_degree and deg[j] < max_degree:
                edges.append((i, j))
                deg[i] += 1
                deg[j] += 1
        links = [(i, l) for i in range(N) for l in range(n_anchors)
                 if la.norm(nodes[i] - anchors[l]) <= anchor_range]
        anchored = len({i for i, _ in links})
        if _connected(N, edges) and 2 * anchored >= N:
            return {"nodes": nodes, "anchors": anchors, "edges": edges, "anchor_links": links}
    raise ConfigError("could not draw a connected, anchored network; relax max_degree or anchor_range")


def consensus_layout(N, edges):
    """
    Slot layout of the local copies.

    Returns
    -------
    slots : dict
        ``(i, j) -> slot index``: copy of node ``j`` held by node ``i``
        (``(i, i)`` is the node's own estimate).
    selector : ndarray
        Matrix ``S`` of shape ``(2 * n_slots, 2 * N)`` with ``x = S z`` at consensus.
    """
    nbrs = {i: [] for i in range(N)}
    for i, j in edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    slots = {}
    for i in range(N):
        for j in [i] + sorted(nbrs[i]):
            slots[(i, j)] = len(slots)
    S = np.zeros((2 * len(slots), 2 * N))
    for (i, j), s in slots.items():
        S[2 * s:2 * s + 2, 2 * j:2 * j + 2] = np.eye(2)
    return slots, S


def _add_term(Q, q, const, rows, weight, target):
    # weight * |P x - target|^2 / 2 where P picks +I / -I blocks
    P = np.zeros((2, Q.shape[0]))
    for slot, sign in rows:
        P[:, 2 * slot:2 * slot + 2] = sign * np.eye(2)
    Q += weight * P.T @ P
    q -= weight * P.T @ target
    return const + 0.5 * weight * target @ target


def localization_sampler(p):
    """Sampler of the ``localization_lite`` scenario for the parameters `p`."""
    from .problems import ProblemInstance, rng_for

    N, n_anchors = p["nodes"], p["anchors"]
    net = make_network(N, n_anchors, p["half_width"], p["max_degree"], p["anchor_range"], p["seed"])
    nodes0, anchors0 = net["nodes"], net["anchors"]
    edges, links = net["edges"], net["anchor_links"]
    noise = rng_for(p["seed"], 0, 1).normal(scale=p["noise"], size=len(edges) + len(links))
    ranges = np.array([la.norm(nodes0[i] - nodes0[j]) for i, j in edges]) + noise[:len(edges)]
    aranges = np.array([la.norm(nodes0[i] - anchors0[l]) for i, l in links]) + noise[len(edges):]
    dirs0 = np.array([(nodes0[i] - nodes0[j]) / la.norm(nodes0[i] - nodes0[j]) for i, j in edges]).reshape(-1, 2)
    adirs0 = np.array([(nodes0[i] - anchors0[l]) / la.norm(nodes0[i] - anchors0[l]) for i, l in links]).reshape(-1, 2)
    slots, S = consensus_layout(N, edges)
    D = S.shape[0]
    A = np.eye(D)
    g = fn.ZeroFunction(2 * N)
    omega, h = p["omega"], p["h"]

    def sampler(k):
        t = h * k
        R_now = rotation(omega * t)
        R_lag = rotation(omega * (t - h))
        anchors = anchors0 @ R_now.T
        Q, q, const = np.zeros((D, D)), np.zeros(D), 0.0
        for e, (i, j) in enumerate(edges):
            target = ranges[e] * (R_lag @ dirs0[e])
            for owner in (i, j):
                const = _add_term(Q, q, const, [(slots[(owner, i)], 1.0), (slots[(owner, j)], -1.0)], 0.5, target)
        for a, (i, l) in enumerate(links):
            target = anchors[l] + aranges[a] * (R_lag @ adirs0[a])
            const = _add_term(Q, q, const, [(slots[(i, i)], 1.0)], 1.0, target)
        f = fn.Quadratic(Q, q, const)
        info = {"positions": nodes0 @ R_now.T, "anchors": anchors, "edges": edges, "anchor_links": links}
        return ProblemInstance(f, g=g, admm=(A, -S, np.zeros(D)), t=t, k=k, info=info)

    return sampler
