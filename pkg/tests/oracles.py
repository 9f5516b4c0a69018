"""Brute-force reference implementations used as test oracles.

Nothing here calls the package's inference, d-separation or SID code; the
only shared pieces are the plain graph/net containers.
"""

from __future__ import annotations

import itertools

import numpy as np

from causal_eval.graph import Dag


def all_dags(variables):
    """Every DAG over ``variables`` (use only for n <= 4)."""
    pairs = list(itertools.combinations(variables, 2))
    out = []
    for states in itertools.product((0, 1, 2), repeat=len(pairs)):
        edges = []
        for (a, b), s in zip(pairs, states):
            if s == 1:
                edges.append((a, b))
            elif s == 2:
                edges.append((b, a))
        try:
            out.append(Dag(variables, edges))
        except Exception:
            continue
    return out


def random_small_dag(rng, n, p=0.5):
    names = [f"V{i}" for i in range(n)]
    order = list(rng.permutation(n))
    edges = [
        (names[order[a]], names[order[b]])
        for a in range(n)
        for b in range(a + 1, n)
        if rng.random() < p
    ]
    return Dag(names, edges)


# -- d-separation via the moralized ancestral graph ----------------------------

def moral_dsep(g: Dag, x, y, z) -> bool:
    z = set(z)
    keep = set()
    stack = [x, y, *z]
    while stack:
        v = stack.pop()
        if v not in keep:
            keep.add(v)
            stack.extend(g.parents(v))
    nbrs = {v: set() for v in keep}
    for v in keep:
        pa = [p for p in g.parents(v) if p in keep]
        for p in pa:
            nbrs[v].add(p)
            nbrs[p].add(v)
        for a, b in itertools.combinations(pa, 2):
            nbrs[a].add(b)
            nbrs[b].add(a)
    seen = {x}
    stack = [x]
    while stack:
        v = stack.pop()
        for w in nbrs[v]:
            if w in z or w in seen:
                continue
            if w == y:
                return False
            seen.add(w)
            stack.append(w)
    return True


def dsep_signature(g: Dag, dsep=moral_dsep) -> frozenset:
    """All (x, y, z) with x < y for which x and y are d-separated by z."""
    vs = sorted(g.variables)
    out = set()
    for x, y in itertools.combinations(vs, 2):
        rest = [v for v in vs if v not in (x, y)]
        for k in range(len(rest) + 1):
            for z in itertools.combinations(rest, k):
                if dsep(g, x, y, z):
                    out.add((x, y, z))
    return frozenset(out)


def class_pattern(members):
    """CPDAG of a Markov equivalence class given all its members.

    Returns (directed, undirected): an edge is directed iff every member
    orients it the same way.
    """
    first = members[0]
    directed, undirected = set(), set()
    for a, b in first.edges:
        if all((a, b) in m.edges for m in members):
            directed.add((a, b))
        else:
            undirected.add(frozenset((a, b)))
    return directed, undirected


# -- exact inference by enumeration -------------------------------------------

def joint_table(net, overrides=None):
    """Full joint probability array with axes in ``net.variables`` order.

    ``overrides`` maps a variable to a fixed code; that variable's CPT is
    replaced by a point mass (truncated factorization).
    """
    overrides = overrides or {}
    vs = list(net.variables)
    cards = [net.cardinality(v) for v in vs]
    joint = np.zeros(cards)
    for state in itertools.product(*[range(c) for c in cards]):
        assign = dict(zip(vs, state))
        p = 1.0
        for v in vs:
            if v in overrides:
                p *= 1.0 if assign[v] == overrides[v] else 0.0
                continue
            row = 0
            for parent in net.parents(v):
                row = row * net.cardinality(parent) + assign[parent]
            p *= net.cpts[v][row, assign[v]]
        joint[state] = p
    return joint


def enum_query(net, target, evidence=None):
    evidence = evidence or {}
    vs = list(net.variables)
    joint = joint_table(net)
    index = [slice(None)] * len(vs)
    for v, label in evidence.items():
        index[vs.index(v)] = net.labels[v].index(label)
    sub = joint[tuple(index)]
    kept = [v for v in vs if v not in evidence]
    axes = tuple(i for i, v in enumerate(kept) if v != target)
    marg = sub.sum(axis=axes)
    return marg / marg.sum()


def enum_do(net, outcome, treatment, t):
    vs = list(net.variables)
    joint = joint_table(net, {treatment: net.labels[treatment].index(t)})
    axes = tuple(i for i, v in enumerate(vs) if v != outcome)
    return joint.sum(axis=axes)


# -- SID from its definition, by numeric probing ------------------------------

def _adjusted(joint, vs, i, j, z):
    """sum_z p(j | i, z) p(z), returned with shape (card_i, card_j).

    ``z`` may contain ``j``; the conditional is then an indicator.
    """
    def marginal(keep):
        axes = tuple(a for a, v in enumerate(vs) if v not in keep)
        m = joint.sum(axis=axes)
        kept = [v for v in vs if v in keep]
        return m, kept

    cards = joint.shape
    ci, cj = cards[vs.index(i)], cards[vs.index(j)]
    m_all, kept_all = marginal({i, j, *z})
    m_z, kept_z = marginal(set(z))
    out = np.zeros((ci, cj))
    for zs in itertools.product(*[range(cards[vs.index(v)]) for v in kept_z]):
        zmap = dict(zip(kept_z, zs))
        pz = m_z[zs] if kept_z else float(m_z)
        for x in range(ci):
            cond = np.zeros(cj)
            for y in range(cj):
                if j in zmap and zmap[j] != y:
                    continue
                a = {**zmap, i: x, j: y}
                cond[y] = m_all[tuple(a[v] for v in kept_all)]
            total = cond.sum()
            if total > 0:
                out[x] += pz * cond / total
    return out


def sid_oracle(true_g: Dag, learned: Dag, n_draws: int = 2, seed: int = 0, tol: float = 1e-9) -> int:
    """Count (i, j) pairs where parent adjustment in ``learned`` misestimates p(j | do(i)).

    Parameters are Dirichlet draws on ``true_g`` (generic with probability 1);
    a pair counts as wrong if any draw shows a discrepancy.
    """
    from causal_eval.bayesnet import dirichlet_parameterize

    vs = list(true_g.variables)
    wrong = set()
    for d in range(n_draws):
        net = dirichlet_parameterize(true_g, 2, 1.0, seed=seed * 1000 + d)
        joint = joint_table(net)
        for i in vs:
            z = sorted(learned.parents(i))
            for x in range(2):
                mutilated = joint_table(net, {i: x})
                for j in vs:
                    if j == i or (i, j) in wrong:
                        continue
                    truth = mutilated.sum(axis=tuple(a for a, v in enumerate(vs) if v != j))
                    est = _adjusted(joint, vs, i, j, z)[x]
                    if np.max(np.abs(truth - est)) > tol:
                        wrong.add((i, j))
    return len(wrong)
