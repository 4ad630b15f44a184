"""Textbook Buchberger used as an independent oracle.

Polynomials are ``{exponent tuple: coefficient}`` dicts; nothing here uses
the package's packed monomials or its division code.
"""

from fractions import Fraction


def grevlex_key(e):
    return (sum(e), tuple(-x for x in reversed(e)))


class Rationals:
    def norm(self, c):
        return Fraction(c)

    def inv(self, c):
        return 1 / Fraction(c)


class ModP:
    def __init__(self, p):
        self.p = p

    def norm(self, c):
        if isinstance(c, Fraction):
            return c.numerator * pow(c.denominator, -1, self.p) % self.p
        return c % self.p

    def inv(self, c):
        return pow(c, -1, self.p)


def clean(f, K):
    out = {}
    for e, c in f.items():
        c = K.norm(c)
        if c:
            out[e] = c
    return out


def lead(f):
    return max(f, key=grevlex_key)


def monic(f, K):
    lc = f[lead(f)]
    inv = K.inv(lc)
    return clean({e: c * inv for e, c in f.items()}, K)


def sub_scaled(f, g, c, shift, K):
    out = dict(f)
    for e, v in g.items():
        k = tuple(a + b for a, b in zip(e, shift))
        out[k] = out.get(k, 0) - c * v
    return clean(out, K)


def divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def normal_form(f, G, K):
    """Full reduction of ``f`` by the monic polynomials ``G``."""
    f = dict(f)
    rem = {}
    while f:
        m = lead(f)
        c = f[m]
        for g in G:
            lg = lead(g)
            if divides(lg, m):
                f = sub_scaled(f, g, c, tuple(a - b for a, b in zip(m, lg)), K)
                break
        else:
            rem[m] = c
            del f[m]
    return rem


def spoly(f, g, K):
    lf, lg = lead(f), lead(g)
    L = tuple(max(a, b) for a, b in zip(lf, lg))
    a = sub_scaled({}, f, -1, tuple(x - y for x, y in zip(L, lf)), K)
    return sub_scaled(a, g, 1, tuple(x - y for x, y in zip(L, lg)), K)


def buchberger(F, K):
    """Reduced monic Groebner basis, sorted by decreasing leading monomial.

    Normal selection strategy plus Buchberger's coprime and chain criteria.
    """
    G = [monic(clean(f, K), K) for f in F if clean(f, K)]
    L = [lead(g) for g in G]
    pairs = {(i, j) for i in range(len(G)) for j in range(i + 1, len(G))}

    def lcm(i, j):
        return tuple(max(a, b) for a, b in zip(L[i], L[j]))

    while pairs:
        i, j = min(pairs, key=lambda pr: (grevlex_key(lcm(*pr)), pr))
        pairs.discard((i, j))
        if all(min(a, b) == 0 for a, b in zip(L[i], L[j])):
            continue
        m = lcm(i, j)
        if any(
            k not in (i, j)
            and divides(L[k], m)
            and (min(i, k), max(i, k)) not in pairs
            and (min(j, k), max(j, k)) not in pairs
            for k in range(len(G))
        ):
            continue
        r = normal_form(spoly(G[i], G[j], K), G, K)
        if r:
            G.append(monic(r, K))
            L.append(lead(G[-1]))
            pairs.update((k, len(G) - 1) for k in range(len(G) - 1))
    # minimalize
    G.sort(key=lambda g: grevlex_key(lead(g)))
    minimal = []
    for g in G:
        if not any(divides(lead(h), lead(g)) for h in minimal):
            minimal.append(g)
    reduced = []
    for k, g in enumerate(minimal):
        others = minimal[:k] + minimal[k + 1:]
        lg = lead(g)
        tail = {e: c for e, c in g.items() if e != lg}
        reduced.append({lg: K.norm(1), **normal_form(tail, others, K)})
    reduced.sort(key=lambda g: grevlex_key(lead(g)), reverse=True)
    return reduced


def as_sorted_terms(f):
    return sorted(f.items(), key=lambda t: grevlex_key(t[0]), reverse=True)
