"""A-infinity algebras and strongly homotopy morphisms on finite
rational complexes.

An algebra is a complex (V, d) with operations mu_n : V^(x n) -> V of
degree n-2 for 2 <= n <= N; coherence is the family of Stasheff
identities, checked exactly as operator equations.  A morphism is a
family f_n : V^(x n) -> W of degree n-1 whose coherence identities mix
the two structures.  Signs follow the conventions

    epsilon = ij + j + s(j+1) + j(|a_1| + ... + |a_s|)   (i = n+1-j)
    eta     = sum_{p<q} (r_p+1)
              + sum_{p>=2} (r_p+1)(degrees before block p)
    nu      = ij + j + s(j+1) + j(|a_1| + ... + |a_s|)   (i = n+1-j)

where the degree-dependent parts are exactly the Koszul signs produced
by tensoring graded maps, so the operator-level residuals below carry
only the scalar parts.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional

from .exactlin import (
    ChainComplex,
    GradedMap,
    hom_differential,
    map_sum,
    tensor_maps_many,
    tensor_power,
)
from .operadcore import (
    Element,
    builtin_presentation,
)


def _compositions(n, k):
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


# ------------------------------------------------------------------ signs


def sign_epsilon(i: int, j: int, s: int, degs=()) -> int:
    """Sign of the (i, j, s) term of the Stasheff identity in arity
    i+j-1, evaluated on leading arguments of the given degrees; an
    empty degs gives the scalar part only (all arguments even)."""
    if i < 2 or j < 2 or not 0 <= s <= i - 1 or (degs and len(degs) != s):
        raise ValueError("invalid (i, j, s, degs) for a Stasheff term")
    eps = i * j + j + s * (j + 1) + j * sum(degs)
    return -1 if eps % 2 else 1


def sign_eta(r, degs=None) -> int:
    """Sign of the partition term nu_k(f_{r_1} x ... x f_{r_k}) of the
    morphism identity; degs, when given, lists all input degrees."""
    r = tuple(r)
    if not r or any(x < 1 for x in r):
        raise ValueError("block sizes must be positive")
    n = sum(r)
    eta = sum((r[p] + 1)
              for p in range(len(r)) for q in range(p + 1, len(r)))
    if degs is not None:
        if len(degs) != n:
            raise ValueError("need one degree per input")
        pos = 0
        for p, rp in enumerate(r):
            if p >= 1:
                eta += (rp + 1) * sum(degs[:pos])
            pos += rp
    return -1 if eta % 2 else 1


def sign_nu(n: int, j: int, s: int, degs=()) -> int:
    """Sign of the (j, s) term on the structure side of the morphism
    identity in arity n; an empty degs gives the scalar part only."""
    if j < 2 or not 0 <= s <= n - j or (degs and len(degs) != s):
        raise ValueError("invalid (n, j, s, degs) for a morphism term")
    i = n + 1 - j
    nu = i * j + j + s * (j + 1) + j * sum(degs)
    return -1 if nu % 2 else 1


# ------------------------------------------------------------ structures


class AInfinityAlgebra:
    """Complex with higher products mu_n (n = 2..N); missing entries are
    zero maps."""

    def __init__(self, complex: ChainComplex, mu: Mapping[int, GradedMap],
                 N: int = 5):
        if N < 2:
            raise ValueError("truncation order must be at least 2")
        self.complex = complex
        self.N = N
        self._mu = {}
        for n, m in dict(mu).items():
            n = int(n)
            if not 2 <= n <= N:
                raise ValueError(f"mu_{n} outside truncation 2..{N}")
            if m.degree != n - 2:
                raise ValueError(f"mu_{n} must have degree {n - 2}")
            expected = tensor_power(complex.space, n)
            if m.source != expected or m.target != complex.space:
                raise ValueError(f"mu_{n} has wrong source or target")
            self._mu[n] = m

    def mu(self, n: int) -> GradedMap:
        if n in self._mu:
            return self._mu[n]
        return GradedMap.zero(tensor_power(self.complex.space, n),
                              self.complex.space, n - 2)

    @property
    def space(self):
        return self.complex.space

    def is_strict(self) -> bool:
        return all(self.mu(n).is_zero() for n in range(3, self.N + 1))


class AInfinityMorphism:
    """Taylor coefficients f_n : V^(x n) -> W (n = 1..N) of a strongly
    homotopy morphism; missing entries are zero maps."""

    def __init__(self, source: AInfinityAlgebra, target: AInfinityAlgebra,
                 f: Mapping[int, GradedMap], N: Optional[int] = None):
        self.source = source
        self.target = target
        self.N = N if N is not None else min(source.N, target.N)
        self._f = {}
        for n, m in dict(f).items():
            n = int(n)
            if not 1 <= n <= self.N:
                raise ValueError(f"f_{n} outside truncation 1..{self.N}")
            if m.degree != n - 1:
                raise ValueError(f"f_{n} must have degree {n - 1}")
            expected = tensor_power(source.space, n)
            if m.source != expected or m.target != target.space:
                raise ValueError(f"f_{n} has wrong source or target")
            self._f[n] = m

    def f(self, n: int) -> GradedMap:
        if n in self._f:
            return self._f[n]
        return GradedMap.zero(tensor_power(self.source.space, n),
                              self.target.space, n - 1)

    def is_strict(self) -> bool:
        return all(self.f(n).is_zero() for n in range(2, self.N + 1))


def underlying(m: AInfinityMorphism) -> GradedMap:
    """The chain map carried by a strongly homotopy morphism."""
    return m.f(1)


def identity_morphism(a: AInfinityAlgebra) -> AInfinityMorphism:
    return AInfinityMorphism(a, a, {1: GradedMap.identity(a.space)}, a.N)


# ------------------------------------------------------------ coherence


def _slotted(op: GradedMap, ident: GradedMap, i: int, s: int) -> GradedMap:
    """1^(x s) (x) op (x) 1^(x i-s-1) as a single graded map."""
    factors = [ident] * s + [op] + [ident] * (i - s - 1)
    return factors[0] if len(factors) == 1 else tensor_maps_many(factors)


def an_residual(a: AInfinityAlgebra, n: int) -> GradedMap:
    """Stasheff residual in arity n: the inner-sum operator minus the
    hom-complex differential of mu_n; zero exactly when the identity
    holds."""
    if not 2 <= n <= a.N:
        raise ValueError(f"arity must be within 2..{a.N}")
    ident = GradedMap.identity(a.space)
    terms = []
    coeffs = []
    for j in range(2, n):
        i = n + 1 - j
        if i < 2:
            continue
        for s in range(0, i):
            terms.append(a.mu(i).compose(_slotted(a.mu(j), ident, i, s)))
            coeffs.append(sign_epsilon(i, j, s))
    inner = (map_sum(terms, coeffs) if terms else
             GradedMap.zero(tensor_power(a.space, n), a.space, n - 3))
    bracket = hom_differential(a.mu(n), [a.complex] * n, a.complex)
    return inner.add(bracket, 1, -1)


def check_An(a: AInfinityAlgebra, n: int) -> dict:
    res = an_residual(a, n)
    return {"n": n, "ok": res.is_zero(), "residual": res}


def check_all_An(a: AInfinityAlgebra) -> dict:
    entries = [check_An(a, n) for n in range(2, a.N + 1)]
    return {"ok": all(e["ok"] for e in entries), "entries": entries}


def fn_residual(m: AInfinityMorphism, n: int) -> GradedMap:
    """Morphism residual in arity n; n = 1 reduces to the chain-map
    condition on f_1."""
    if not 1 <= n <= m.N:
        raise ValueError(f"arity must be within 1..{m.N}")
    V, W = m.source, m.target
    ident = GradedMap.identity(V.space)
    terms = []
    coeffs = []
    for k in range(2, n + 1):
        for r in _compositions(n, k):
            terms.append(W.mu(k).compose(
                tensor_maps_many([m.f(rp) for rp in r])))
            coeffs.append(sign_eta(r))
    for j in range(2, n + 1):
        i = n + 1 - j
        if i < 1:
            continue
        for s in range(0, i):
            terms.append(m.f(i).compose(_slotted(V.mu(j), ident, i, s)))
            coeffs.append(-sign_nu(n, j, s))
    inner = (map_sum(terms, coeffs) if terms else
             GradedMap.zero(tensor_power(V.space, n), W.space, n - 2))
    bracket = hom_differential(m.f(n), [V.complex] * n, W.complex)
    return inner.add(bracket, 1, -1)


def check_Fn(m: AInfinityMorphism, n: int) -> dict:
    res = fn_residual(m, n)
    return {"n": n, "ok": res.is_zero(), "residual": res}


def check_all_Fn(m: AInfinityMorphism) -> dict:
    entries = [check_Fn(m, n) for n in range(1, m.N + 1)]
    return {"ok": all(e["ok"] for e in entries), "entries": entries}


# ------------------------------------------------------------ composition


def compose_morphisms(g: AInfinityMorphism,
                      f: AInfinityMorphism) -> AInfinityMorphism:
    """Composite strongly homotopy morphism, with partition signs chosen
    to match the eta convention so coherence is preserved."""
    if f.target is not g.source and not (
            f.target.complex == g.source.complex):
        raise ValueError("morphisms are not composable")
    N = min(f.N, g.N)
    comps = {}
    for n in range(1, N + 1):
        terms = []
        coeffs = []
        for k in range(1, n + 1):
            for r in _compositions(n, k):
                terms.append(g.f(k).compose(
                    tensor_maps_many([f.f(rp) for rp in r])))
                coeffs.append(sign_eta(r))
        comps[n] = map_sum(terms, coeffs)
    return AInfinityMorphism(f.source, g.target, comps, N)


# ------------------------------------------------ bridge to operad actions


def minimal_model_differential(model_name: str, generator: str) -> Element:
    """Stored differential of a generator of a bundled minimal model."""
    pres = builtin_presentation(model_name)
    if generator not in pres.generators:
        raise ValueError(f"unknown generator {generator!r} "
                         f"of {model_name!r}")
    return dict(pres.d_image(generator))


def action_from_structure(a: AInfinityAlgebra):
    """Operad action of the associativity minimal model determined by an
    algebra: (presentation, action dict, complexes dict)."""
    pres = builtin_presentation("ass-minimal", a.N)
    action = {f"mu{n}": a.mu(n) for n in range(2, a.N + 1)}
    return pres, action, {"v": a.complex}


def structure_from_action(action: Mapping[str, GradedMap],
                          complexes: Mapping[str, ChainComplex],
                          N: int = 5) -> AInfinityAlgebra:
    mu = {n: action[f"mu{n}"] for n in range(2, N + 1)
          if f"mu{n}" in action}
    return AInfinityAlgebra(complexes["v"], mu, N)


def morphism_action(m: AInfinityMorphism):
    """Operad action of the two-colored arrow model determined by a
    morphism between algebras (truncated at the smaller order)."""
    N = m.N
    pres = builtin_presentation("ass-arrow-minimal", N)
    action = {}
    for n in range(2, N + 1):
        action[f"mu{n}"] = m.source.mu(n)
        action[f"nu{n}"] = m.target.mu(n)
    for n in range(1, N + 1):
        action[f"f{n}"] = m.f(n)
    return pres, action, {"v": m.source.complex, "w": m.target.complex}
