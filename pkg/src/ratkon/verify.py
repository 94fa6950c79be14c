"""Exact identity checks, one per verify subcommand.

Every check returns a ``VerifyReport``.  Randomized checks draw from a
``random.Random`` seeded by the caller, so reruns are reproducible.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Callable

from . import beads, randgen
from .diagrams import (
    DiagramSum,
    RawDiagram,
    describe,
    dual,
    exp_union,
    hair,
    recolor,
    strut,
    tripod,
    wheels_from_cyclic,
)
from .freegroup import GroupRingElement
from .gaussian import (
    ClasperSpec,
    Integrand,
    _place,
    _strut_components,
    complete_contraction,
    contract_h,
    covariance_struts,
    decompose,
    divergence,
    flat_glue,
    integrate,
    pair_all,
    phi_diagrams,
    wrapping_move,
)
from .helement import (
    HElement,
    chi_h,
    chi_prime,
    deg_h,
    direct_sum,
    eta,
    eta_bead,
    eta_hat,
    hmat_mul,
    hmatrix,
    inverse_times_phi,
    inverse_times_phi_series,
    phi_conj,
    series_matmul,
)
from .localization import (
    Core,
    LocElement,
    as_loc,
    eps_matrix,
    rational_det,
    herm_invert,
    loc_add,
    loc_constant,
    loc_equal,
    loc_invert,
    loc_mul,
    loc_neg,
    loc_scale,
    matrix_g,
)
from .series import CyclicSeries


@dataclass
class VerifyReport:
    name: str
    params: dict = field(default_factory=dict)
    passed: bool = False
    witness: str | None = None
    seconds: float = 0.0

    def line(self) -> str:
        ps = " ".join(f"{k}={v}" for k, v in self.params.items())
        status = "PASS" if self.passed else "FAIL"
        out = f"{status} {self.name} {ps} ({self.seconds:.2f}s)".replace("  ", " ")
        if self.witness:
            out += f"\n  witness: {self.witness}"
        return out


def _first_diff(a: DiagramSum, b: DiagramSum) -> str | None:
    diff = a - b
    if diff.is_zero():
        return None
    d, c = min(diff.terms.items(), key=lambda kv: kv[0])
    return f"{c} * {describe(d)}"


class _Run:
    def __init__(self, name: str, params: dict):
        self.report = VerifyReport(name, params)
        self.t0 = time.perf_counter()
        self.ok = True

    def fail(self, witness: str) -> None:
        if self.ok:
            self.report.witness = witness
        self.ok = False

    def finish(self) -> VerifyReport:
        self.report.passed = self.ok
        self.report.seconds = time.perf_counter() - self.t0
        return self.report


# ---------------------------------------------------------------- matrices


def wrap_example_matrix() -> list:
    g = 3
    t = lambda i, s=1: GroupRingElement.generator(g, i, s)  # noqa: E731
    one = GroupRingElement.constant(g, 1)
    return [[one, t(3) - t(2) * t(1, -1)], [t(3, -1) - t(1) * t(2, -1), one]]


def hermitian_part(m) -> list:
    """(M + M*)/2 for a matrix over the group ring."""
    n = len(m)
    return [[(m[i][j] + m[j][i].involute()).scale(Fraction(1, 2)) for j in range(n)] for i in range(n)]


def _is_hermitian(m) -> bool:
    n = len(m)
    return all(m[i][j] == m[j][i].involute() for i in range(n) for j in range(n))


# ---------------------------------------------------------------- wheels


def wheels_sides(m, degree: int) -> tuple[DiagramSum, DiagramSum]:
    """Pairing-enumerated integral of the haired Gaussian, and the exponential of chi-wheels."""
    n = len(m)
    X = [f"x{i + 1}" for i in range(n)]
    haired = hair(covariance_struts(m, X), degree)
    bare = haired.hair_part(0)
    R = exp_union(haired - bare, hair_cap=degree)
    lhs = integrate(Integrand(X, eps_matrix(m), R))
    sym = m if _is_hermitian(m) else hermitian_part(m)
    w = wheels_from_cyclic(chi_prime(sym, degree)).scale(Fraction(-1, 2))
    rhs = exp_union(w, hair_cap=degree) if w.terms else DiagramSum.one()
    return lhs, rhs


def verify_wheels(matrix=None, degree: int = 4, **_) -> VerifyReport:
    m = matrix if matrix is not None else [[GroupRingElement.generator(1, 1)]]
    run = _Run("wheels", {"g": matrix_g(m), "degree": degree, "size": len(m)})
    lhs, rhs = wheels_sides(m, degree)
    w = _first_diff(lhs, rhs)
    if w:
        run.fail(w)
    return run.finish()


# ---------------------------------------------------------------- eta example


def wrap_example_eta() -> list:
    """The entrywise form of eta_1 on the example matrix, typed in by hand."""
    z = HElement.zero(1)
    e01 = HElement({((2, -1), ()): -1, ((2,), (-1,)): 1}, 1)
    e10 = HElement({((1,), (-2,)): -1, ((), (1, -2)): 1}, 1)
    return [[z, e01], [e10, z]]


def verify_eta_example(**_) -> VerifyReport:
    run = _Run("eta-example", {"site": 1})
    got = eta(wrap_example_matrix(), 1)
    want = wrap_example_eta()
    for i in range(2):
        for j in range(2):
            a, b = got[i][j], want[i][j]
            if a.terms != b.terms or a.magnus(2) != b.magnus(2):
                run.fail(f"entry ({i},{j}): got {a!r}, expected {b!r}")
    return run.finish()


# ---------------------------------------------------------------- wrapping move


def wrap_example_trace() -> HElement:
    """-1/2 tr(M^-1 eta_1(M)) written as the four selector terms."""
    g = 3
    m = wrap_example_matrix()
    core = Core(m, g)
    R = lambda c=0, w=(): GroupRingElement(g, {w: c}) if c else GroupRingElement(g)  # noqa: E731
    half = Fraction(1, 2)
    terms = [
        ((R(half), R()), (R(), R(1, (1,))), (-2,)),
        ((R(half), R()), (R(), R(-1)), (1, -2)),
        ((R(), R(half)), (R(1, (2, -1)), R()), ()),
        ((R(), R(half)), (R(-1, (2,)), R()), (-1,)),
    ]
    out = HElement.zero(1)
    for sel, col, right in terms:
        b = beads.intern(LocElement(sel, core, col))
        out = out + HElement({(b, right): 1}, 1)
    return out


def verify_wrap_example(cases: int = 5, seed: int = 0, **_) -> VerifyReport:
    run = _Run("wrap-example", {"cases": cases, "seed": seed})
    m = wrap_example_matrix()
    prod = hmat_mul(hmatrix(herm_invert(m), 1), eta(m, 1))
    tr = (prod[0][0] + prod[1][1]).scale(Fraction(-1, 2))
    want = wrap_example_trace()
    if tr.magnus(4) != want.magnus(4):
        run.fail("trace term differs from the four-term expansion")
    rng = random.Random(seed)
    for case in range(cases):
        d = _random_dh_diagram(rng)
        got = wrapping_move([], d, 1)
        ref = _wrap_direct(d, 1)
        w = _first_diff(got, ref)
        if w:
            run.fail(f"case {case}: {w}")
    return run.finish()


def _random_dh_diagram(rng: random.Random) -> DiagramSum:
    cols = ["x", "y", dual("h")]
    r = tripod([dual("h"), rng.choice(cols[:2]), rng.choice(cols[:2])], [randgen.word(rng, 2, 2) for _ in range(3)])
    if rng.random() < 0.5:
        r.union(strut("x", "y", randgen.word(rng, 2, 3)))
    return DiagramSum.from_raw(r)


def _wrap_direct(s: DiagramSum, site: int) -> DiagramSum:
    """Empty-matrix wrapping move computed by splitting each t_site letter and gluing ∂h there."""
    out = DiagramSum.zero(s.cap)
    for d, c in s.terms.items():
        r = d.to_raw()
        (dh,) = r.legs(dual("h"))
        for e in list(r.edges):
            w = r.edges[e][2]
            for p, x in enumerate(w):
                if abs(x) != site:
                    continue
                for key, sign in (((w[: p + 1], w[p + 1 :]), 1), ((w[:p], w[p:]), -1)):
                    q = r.copy()
                    _place(q, e, key)
                    (hleg,) = q.legs("h")
                    q.weld(dh, hleg)
                    out = out + DiagramSum.from_raw(q, c * sign)
    return out


# ---------------------------------------------------------------- iterated integration


def _blocks(m, idx):
    return [[m[i][j] for j in idx] for i in idx]


def iterated_sides(rng: random.Random, D: int = 2, loc_prob: float = 0.25):
    nx = rng.randint(2, 3)
    X = [f"x{i + 1}" for i in range(nx)]
    g = 2
    k = rng.randint(2, nx)
    Xp = X[:k]
    kk = rng.randint(1, k - 1)
    inner = Xp[k - kk :]
    outer = Xp[: k - kk]
    oi = [Xp.index(x) for x in outer]
    ii = [Xp.index(x) for x in inner]
    while True:
        M = randgen.hermitian_matrix(rng, g, k, loc_prob=loc_prob)
        m_in = _blocks(M, ii)
        if rational_det(eps_matrix(m_in)):
            break
    while True:
        R = randgen.substantial_sum(rng, Xp, [x for x in X if x not in Xp] + ["y"], g, terms=2, max_degree=2)
        legs_in = max(sum(1 for c in d.leg_colors() if c in inner) for d in R.terms)
        # the inner pass enumerates matchings of up to 3 * legs_in + 4 legs
        if legs_in <= 3:
            break
    R = R + DiagramSum.one()
    rhs = integrate(Integrand(Xp, M, R))

    cross = [[M[i][j] if (Xp[i] in inner) != (Xp[j] in inner) else 0 for j in range(k)] for i in range(k)]
    S_cross = covariance_struts(cross, Xp)
    T = exp_union(S_cross, order=legs_in + 2).union(R)
    Y = integrate(Integrand(inner, m_in, T))
    S_out = covariance_struts(_blocks(M, oi), outer)
    Z = Y + S_out.union(_strut_free(Y, outer))
    I2 = decompose(Z, outer, max_struts=1)
    lhs = integrate(I2)
    return hair(lhs, D), hair(rhs, D)


def _strut_free(s: DiagramSum, X) -> DiagramSum:

    return DiagramSum._raw({d: c for d, c in s.terms.items() if not _strut_components(d, X)[0]}, s.cap)


def verify_iterated(cases: int = 50, seed: int = 0, degree: int = 3, **_) -> VerifyReport:
    run = _Run("iterated", {"cases": cases, "seed": seed, "degree": degree})
    rng = random.Random(seed)
    for case in range(cases):
        lhs, rhs = iterated_sides(rng, degree)
        w = _first_diff(lhs, rhs)
        if w:
            run.fail(f"case {case}: {w}")
    return run.finish()


# ---------------------------------------------------------------- integration by parts


def by_parts_sides(rng: random.Random, D: int = 3):
    """Both sides of integration by parts, compared through the hair map.

    Moving a derivative across the pairing costs a sign per ∂-leg, as in
    ∫ v t' = -∫ v' t, so s enters the divergence with (-1)^(number of ∂F legs).
    """
    nx = rng.randint(1, 3)
    X = [f"x{i + 1}" for i in range(nx)]
    g = 2
    k = rng.randint(1, nx)
    F = X[:k]
    G = X[k:]
    dF = {dual(f) for f in F}
    M = randgen.hermitian_matrix(rng, g, k, loc_prob=0.25)
    T = randgen.substantial_sum(rng, F, G + ["y"], g, terms=2, max_degree=2)
    s = randgen.operator_sum(rng, X, "z", g, terms=2)
    nd = max((_count_colors(d, dF) for d in s.terms), default=0)
    t_full = exp_union(covariance_struts(M, F), order=nd).union(T) if nd else T
    glued = flat_glue(s, t_full, X)
    lhs = integrate(Integrand(F, M, _strut_free(glued, F)))
    signed = DiagramSum._raw({d: c * (-1) ** _count_colors(d, dF) for d, c in s.terms.items()}, s.cap)
    rhs = integrate(Integrand(F, M, flat_glue(divergence(signed, F), T, G)))
    return hair(lhs, D), hair(rhs, D)


def _count_colors(d, colors) -> int:
    return sum(1 for c in d.leg_colors() if c in colors)


def verify_by_parts(cases: int = 50, seed: int = 0, degree: int = 3, **_) -> VerifyReport:
    run = _Run("by-parts", {"cases": cases, "seed": seed, "degree": degree})
    rng = random.Random(seed)
    for case in range(cases):
        lhs, rhs = by_parts_sides(rng, degree)
        w = _first_diff(lhs, rhs)
        if w:
            run.fail(f"case {case}: {w}")
    return run.finish()


# ---------------------------------------------------------------- integral of a conjugation


def varphi_sides(rng: random.Random, D: int = 3, site: int = 1):
    g = 2
    k = rng.randint(1, 2)
    X = [f"x{i + 1}" for i in range(k)]
    M = randgen.hermitian_matrix(rng, g, k, loc_prob=0.2)
    # the constant term keeps the wheels factor visible even when R integrates to zero
    R = randgen.substantial_sum(rng, X, ["y"], g, terms=2, max_degree=2) + DiagramSum.one()
    S = covariance_struts(M, X)
    # hair commutes with welding, so expanding before the pairing lets the
    # many equal but differently presented Loc beads collapse early
    P = hair(phi_diagrams(S, site, D) - S, D)
    R_phi = hair(phi_diagrams(R, site, D), D)
    if P.terms:
        R_phi = exp_union(P, hair_cap=D).union(R_phi, hair_cap=D)
    lhs = hair(integrate(Integrand(X, M, R_phi)), D)
    inner = phi_diagrams(integrate(Integrand(X, M, R)), site, D)
    w = wheels_from_cyclic(chi_h(inverse_times_phi_series(M, site, D), D)).scale(Fraction(-1, 2))
    rhs = hair(inner, D)
    if w.terms:
        rhs = exp_union(w, hair_cap=D).union(rhs, hair_cap=D)
    return lhs, rhs


def verify_varphi(cases: int = 20, seed: int = 0, degree: int = 3, site: int = 1, **_) -> VerifyReport:
    run = _Run("varphi", {"cases": cases, "seed": seed, "degree": degree, "site": site})
    rng = random.Random(seed)
    for case in range(cases):
        lhs, rhs = varphi_sides(rng, degree, site)
        w = _first_diff(lhs, rhs)
        if w:
            run.fail(f"case {case}: {w}")
    return run.finish()


# ---------------------------------------------------------------- eta powers


def verify_etadeg3(cases: int = 20, seed: int = 0, site: int = 1, **_) -> VerifyReport:
    run = _Run("etadeg3", {"cases": cases, "seed": seed, "site": site})
    rng = random.Random(seed)
    cap = 3
    for case in range(cases):
        x = randgen.presentation(rng, 2, max_core=2)
        ph = phi_conj(x, site, cap)
        power = HElement.of(x, cap)
        for n in range(1, cap + 1):
            power = eta_hat(power, site, cap)
            want = power.scale(Fraction(1, factorial(n)))
            got = deg_h(ph, n)
            if got.magnus(n + 3) != want.magnus(n + 3):
                run.fail(f"case {case}, n={n}")
    return run.finish()


# ---------------------------------------------------------------- chi additivity


def matrix_product(a, b, g: int) -> list:
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = loc_constant(g, 0)
            for l in range(k):
                acc = loc_add(acc, loc_mul(as_loc(a[i][l], g), as_loc(b[l][j], g)))
            row.append(acc)
        out.append(row)
    return out


def verify_chi_additivity(cases: int = 20, seed: int = 0, degree: int = 4, **_) -> VerifyReport:
    run = _Run("chi-additivity", {"cases": cases, "seed": seed, "degree": degree})
    rng = random.Random(seed)
    g = 2
    for case in range(cases):
        n = rng.randint(1, 2)
        A = randgen.hermitian_matrix(rng, g, n, loc_prob=0.2)
        B = randgen.hermitian_matrix(rng, g, rng.randint(1, 2), loc_prob=0.2)
        ca, cb = chi_prime(A, degree), chi_prime(B, degree)
        zero = GroupRingElement(g)
        if chi_prime(direct_sum(A, B, zero), degree) != ca + cb:
            run.fail(f"case {case}: direct sum")
        if len(B) == n:
            if chi_prime(matrix_product(A, B, g), degree) != ca + cb:
                run.fail(f"case {case}: product")
            na, nb = inverse_times_phi_series(A, 1, degree), inverse_times_phi_series(B, 1, degree)
            if chi_h(series_matmul(na, nb, degree), degree) != chi_h(na, degree) + chi_h(nb, degree):
                run.fail(f"case {case}: h-product")
    return run.finish()


# ---------------------------------------------------------------- linking block form


def verify_lkg(cases: int = 3, seed: int = 0, degree: int = 6, **_) -> VerifyReport:
    run = _Run("lkG", {"cases": cases, "seed": seed, "degree": degree})
    rng = random.Random(seed)
    g = 2
    for case in range(cases):
        L = randgen.hermitian_poly_matrix(rng, g, 3)
        z = GroupRingElement(g)
        one = GroupRingElement.constant(g, 1)
        eye = [[one if i == j else z for j in range(3)] for i in range(3)]
        zero = [[z] * 3 for _ in range(3)]
        big = [zero[i] + eye[i] for i in range(3)] + [eye[i] + L[i] for i in range(3)]
        inv = herm_invert(big)
        want = [[-L[i][j] for j in range(3)] + [eye[i][j] for j in range(3)] for i in range(3)]
        want += [[eye[i][j] for j in range(3)] + [z] * 3 for i in range(3)]
        for i in range(6):
            for j in range(6):
                if not loc_equal(inv[i][j], as_loc(want[i][j], g), degree):
                    run.fail(f"case {case}: entry ({i},{j})")
    return run.finish()


# ---------------------------------------------------------------- localization arithmetic


def verify_loc_arith(cases: int = 100, seed: int = 0, degree: int = 6, **_) -> VerifyReport:
    run = _Run("loc-arith", {"cases": cases, "seed": seed, "degree": degree})
    rng = random.Random(seed)
    g = 2
    for case in range(cases):
        s = randgen.presentation(rng, g, 3)
        while not s.augment():
            s = randgen.presentation(rng, g, 3)
        t = randgen.presentation(rng, g, 3)
        if not loc_equal(loc_mul(s, loc_invert(s)), loc_constant(g, 1), degree):
            run.fail(f"case {case}: s * s^-1")
        if not loc_equal(loc_add(loc_add(s, t), loc_neg(t)), s, degree):
            run.fail(f"case {case}: (s + t) - t")
    return run.finish()


# ---------------------------------------------------------------- complete contraction


def random_linking(rng: random.Random, g: int, n: int) -> list:
    z = GroupRingElement(g)
    m = [[z] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.8:
                e = randgen.ring_element(rng, g, 2)
                m[i][j], m[j][i] = e, e.involute()
    return m


def contraction_oracle(count: int, linking) -> DiagramSum:
    """Enumerate matchings through permutations and build every glued graph directly."""
    n = 3 * count
    seen = set()
    out = DiagramSum.zero()
    for perm in permutations(range(n)):
        m = frozenset(frozenset(perm[k : k + 2]) for k in range(0, n, 2))
        if m in seen:
            continue
        seen.add(m)
        r = RawDiagram()
        centres = [r.add_vertex() for _ in range(count)]
        halves = {}
        edges = []
        for pair in m:
            a, b = sorted(pair)
            e = r.new_id()
            r.edges[e] = [centres[a // 3], centres[b // 3], linking[a][b]]
            halves[a] = (e, 0)
            halves[b] = (e, 1)
            edges.append(e)
        for v in range(count):
            r.cyc[centres[v]] = [halves[3 * v + k] for k in range(3)]
        out = out + DiagramSum.from_raw(r)
    return out


def verify_contraction(cases: int = 10, seed: int = 0, **_) -> VerifyReport:
    run = _Run("contraction", {"cases": cases, "seed": seed})
    rng = random.Random(seed)
    for case in range(cases):
        L = random_linking(rng, 2, 6)
        got = complete_contraction(ClasperSpec(2, L))
        want = contraction_oracle(2, L)
        w = _first_diff(got, want)
        if w:
            run.fail(f"case {case}: {w}")
    return run.finish()


# ---------------------------------------------------------------- pairing identities


def split_color(s: DiagramSum, color: str, targets: list[str]) -> DiagramSum:
    """Replace every ``color`` leg by the sum over ``targets`` (all assignments)."""
    from itertools import product as iproduct

    def fn(r: RawDiagram):
        legs = r.legs(color)
        out = []
        for choice in iproduct(targets, repeat=len(legs)):
            q = r.copy()
            for v, c in zip(legs, choice):
                q.nodes[v] = c
            out.append((1, q))
        return out

    return s.map_raw(fn)


def substitute_legs(s: DiagramSum, color: str, images: list[tuple[str, object]]) -> DiagramSum:
    """x -> sum_i y_i q_i on every x leg: recolor and push q_i onto the outward bead."""
    from itertools import product as iproduct

    def fn(r: RawDiagram):
        legs = r.legs(color)
        out = []
        for choice in iproduct(range(len(images)), repeat=len(legs)):
            q = r.copy()
            variants = [(Fraction(1), q)]
            for v, k in zip(legs, choice):
                col, bead = images[k]
                nxt = []
                for c0, w in variants:
                    for c1, b in beads.split(bead) if not isinstance(bead, tuple) else [(Fraction(1), bead)]:
                        w2 = w.copy()
                        e, end = w2.leg_halfedge(v)
                        t, h, old = w2.edges[e]
                        w2.edges[e][2] = beads.mul(old, b) if end == 1 else beads.mul(beads.bar(b), old)
                        w2.nodes[v] = col
                        nxt.append((c0 * c1, w2))
                variants = nxt
            out.extend(variants)
        return out

    return s.map_raw(fn)


def _dstrut_exp(pairs, order: int, g: int = 2, beadmap=None) -> DiagramSum:
    out = DiagramSum.zero()
    for a, b in pairs:
        out = out + DiagramSum.from_raw(strut(a, b, beadmap[(a, b)] if beadmap else ()))
    return exp_union(out, order=order)


def _count(s: DiagramSum, color: str) -> int:
    return max((d.leg_colors().count(color) for d in s.terms), default=0)


def _connected(s: DiagramSum) -> DiagramSum:
    return DiagramSum._raw({d: c for d, c in s.terms.items() if len(d.comps) + len(d.circles) == 1}, s.cap)


def identity_checks(rng: random.Random) -> dict[str, tuple[DiagramSum, DiagramSum]]:
    g = 2
    x, y, z = "x", "y", "z"
    dx = dual(x)
    out = {}

    # (a) splitting a doubled variable
    A = randgen.diagram_sum(rng, [dx, z], g, terms=2, max_degree=2)
    B = randgen.diagram_sum(rng, [x, y, z], g, terms=2, max_degree=2)
    lhs = pair_all(A, recolor(B, {y: x}), [x])
    rhs = pair_all(split_color(A, dx, [dual("x'"), dual("x''")]), recolor(B, {x: "x'", y: "x''"}), ["x'", "x''"])
    out["a"] = (lhs, rhs)

    # (b) moving a factor across the pairing
    A1 = randgen.diagram_sum(rng, [dx, z], g, terms=1, max_degree=1)
    A2 = randgen.diagram_sum(rng, [dx, z], g, terms=1, max_degree=1)
    B = randgen.diagram_sum(rng, [x, z], g, terms=2, max_degree=2)
    out["b"] = (pair_all(A1.union(A2), B, [x]), pair_all(A2, flat_glue(A1, B, [x]), [x]))

    # (c) flat gluing as pairing with a shifted variable
    A = randgen.diagram_sum(rng, [dx, z], g, terms=2, max_degree=1)
    B = randgen.diagram_sum(rng, [x, z], g, terms=2, max_degree=2)
    shifted = split_color(B, x, [x, y])
    out["c"] = (flat_glue(A, B, [x]), pair_all(recolor(A, {dx: dual(y)}), shifted, [y]))

    # (d) flat gluing of exponentials is the exponential of the connected part
    a = randgen.diagram_sum(rng, [dx, z], g, terms=1, max_degree=1).with_cap(2)
    b = randgen.diagram_sum(rng, [x, z], g, terms=1, max_degree=1).with_cap(2)
    if any(d.degree() == 0 for d in a.terms) or any(d.degree() == 0 for d in b.terms):
        a = DiagramSum.from_raw(tripod([dx, z, z], [(1,), (), ()]), cap=2)
        b = DiagramSum.from_raw(tripod([x, x, z], [(), (2,), ()]), cap=2)
    glued = flat_glue(exp_union(a), exp_union(b), [x])
    c = _connected(glued)
    out["d"] = (glued, exp_union(c) if c.terms else DiagramSum.one(2))

    # (e) exponential of y -> ∂x struts substitutes x -> y M; pairing every
    # x leg gives A(yM), flat gluing keeps the unpaired x legs: A(x + yM)
    Aq = randgen.diagram_sum(rng, [x, z], g, terms=2, max_degree=2)
    q1, q2 = randgen.word(rng, g, 2), randgen.word(rng, g, 2)
    struts = DiagramSum.from_raw(strut("y1", dx, q1)) + DiagramSum.from_raw(strut("y2", dx, q2))
    n = _count(Aq, x)
    images = [("y1", beads.bar(q1)), ("y2", beads.bar(q2))]
    out["e"] = (pair_all(exp_union(struts, order=n), Aq, [x]), substitute_legs(Aq, x, images))
    out["e2"] = (flat_glue(exp_union(struts, order=n), Aq, [x]), substitute_legs(Aq, x, [(x, ())] + images))

    # (f) delta-function pairing
    Bf = randgen.diagram_sum(rng, [x, z], g, terms=2, max_degree=2)
    n = _count(Bf, x)
    delta = exp_union(DiagramSum.from_raw(strut(dx, y)), order=n)
    out["f"] = (pair_all(delta, Bf, [x]), recolor(Bf, {x: y}))

    # (f') flat version on an exponential
    Bg = randgen.diagram_sum(rng, [x, z], g, terms=1, max_degree=1).with_cap(2)
    if any(d.degree() == 0 for d in Bg.terms):
        Bg = DiagramSum.from_raw(tripod([x, x, z], [(1,), (), (-2,)]), cap=2)
    eB = exp_union(Bg)
    delta = exp_union(DiagramSum.from_raw(strut(dx, y)), order=2 * _count(eB, x))
    replaced = split_color(Bg, x, [x, y])
    out["f2"] = (flat_glue(delta, eB, [x]), exp_union(replaced))

    # (g) splitting h into two contracted copies
    base = randgen.diagram_sum(rng, [dual("h"), "h'", "h''", z], g, terms=2, max_degree=2)
    lhs = contract_h(split_color(base, dual("h"), [dual("h'"), dual("h''")]), ["h'", "h''"])
    rhs = contract_h(recolor(base, {"h'": "h", "h''": "h"}), ["h"])
    out["g"] = (lhs, rhs)
    return out


def verify_identities(cases: int = 10, seed: int = 0, **_) -> VerifyReport:
    run = _Run("identities", {"cases": cases, "seed": seed})
    rng = random.Random(seed)
    for case in range(cases):
        for part, (lhs, rhs) in identity_checks(rng).items():
            w = _first_diff(lhs, rhs)
            if w:
                run.fail(f"case {case}, part ({part}): {w}")
    return run.finish()


# ---------------------------------------------------------------- registry

CHECKS: dict[str, Callable[..., VerifyReport]] = {
    "wheels": verify_wheels,
    "eta-example": verify_eta_example,
    "wrap-example": verify_wrap_example,
    "iterated": verify_iterated,
    "by-parts": verify_by_parts,
    "varphi": verify_varphi,
    "etadeg3": verify_etadeg3,
    "chi-additivity": verify_chi_additivity,
    "lkG": verify_lkg,
    "loc-arith": verify_loc_arith,
    "contraction": verify_contraction,
    "identities": verify_identities,
}


def run_verify(command: str, **flags) -> VerifyReport:
    if command not in CHECKS:
        raise KeyError(f"unknown identity {command!r}; choose from {', '.join(CHECKS)}")
    return CHECKS[command](**{k: v for k, v in flags.items() if v is not None})
