"""Modular arithmetic over Z_N for composite N built from known odd factors.

The modulus N is a product of m pairwise coprime values f_i = p_i * q_i.
Everything downstream (key generation, encryption, the structural lemmas)
leans on two facts collected here: inverses exist exactly when gcd is 1,
and the Chinese remainder fold reassembles a value from its residues.
"""

import math
from dataclasses import dataclass


class NotInvertibleError(ValueError):
    """An element has no inverse mod n. Carries the offending gcd."""

    def __init__(self, value, modulus, gcd):
        super().__init__(f"{value} is not invertible mod {modulus} (gcd {gcd})")
        self.value = value
        self.modulus = modulus
        self.gcd = gcd


class NonCoprimeModuliError(ValueError):
    """CRT moduli share a factor, so no unique solution exists."""


class GenerationError(RuntimeError):
    """Randomized generation exhausted its retry budget."""


def egcd(a, b):
    """Extended gcd: returns (g, s, t) with a*s + b*t == g."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_s, s = s, old_s - quot * s
        old_t, t = t, old_t - quot * t
    return old_r, old_s, old_t


def mod_inverse(a, n):
    """Inverse of a mod n, or NotInvertibleError carrying gcd(a, n)."""
    if n <= 1:
        raise ValueError("modulus must be > 1")
    a %= n
    g, s, _ = egcd(a, n)
    if g != 1:
        raise NotInvertibleError(a, n, g)
    return s % n


def crt_solve(residues):
    """Solve x = r_i (mod n_i) for pairwise coprime moduli n_i.

    residues is a sequence of (r_i, n_i) pairs. Returns the unique solution
    in [0, prod n_i). The congruences are folded left to right, so a shared
    factor between the accumulated modulus and the next n_i raises
    NonCoprimeModuliError.
    """
    if not residues:
        raise ValueError("need at least one congruence")
    x = 0
    modulus = 1
    for r, n in residues:
        if n <= 1:
            raise ValueError("moduli must be > 1")
        if not 0 <= r < n:
            raise ValueError(f"residue {r} out of range for modulus {n}")
        g = math.gcd(modulus, n)
        if g != 1:
            raise NonCoprimeModuliError(f"moduli share a factor ({g})")
        t = ((r - x) * mod_inverse(modulus % n, n)) % n
        x += modulus * t
        modulus *= n
    return x


@dataclass(frozen=True)
class RingModulus:
    """Modulus n with its secret factors f_1..f_m.

    f_i = p_i * q_i for 2m odd values, pairwise coprime across the union.
    Encryption and decryption need only the f_i, and key files store only
    those, so p and q may be None on a modulus parsed back from disk; the
    split is required only by key generation and the structural witness
    constructions. bits records the security parameter the factors were
    drawn for (each p_i, q_i is a bits/2-bit number in production;
    injected test values may be smaller).
    """

    m: int
    bits: int
    p: tuple
    q: tuple
    f: tuple
    n: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if (self.p is None) != (self.q is None):
            raise ValueError("p and q must be given together")
        if len(self.f) != self.m:
            raise ValueError("need m factors")
        if self.p is not None:
            if len(self.p) != self.m or len(self.q) != self.m:
                raise ValueError("need m factors on each side")
            parts = self.p + self.q
            if self.f != tuple(a * b for a, b in zip(self.p, self.q)):
                raise ValueError("f_i must equal p_i * q_i")
        else:
            parts = self.f
        if any(v < 3 or v % 2 == 0 for v in parts):
            raise ValueError("factors must be odd and >= 3")
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                if math.gcd(parts[i], parts[j]) != 1:
                    raise ValueError("factors must be pairwise coprime")
        if self.n != math.prod(self.f):
            raise ValueError("n must be the product of the f_i")

    @property
    def has_split(self):
        return self.p is not None


def generate_coprime_set(m, bits, rng=None, candidates=None):
    """Draw 2m pairwise coprime odd numbers and assemble a RingModulus.

    Production draws come from rng as odd numbers of exactly bits/2 bits;
    compositeness is fine, only coprimality matters. candidates, when given,
    replaces the random stream and relaxes the bit-length rule so small
    worked examples stay expressible. The first m accepted values become p,
    the next m become q. Raises GenerationError after 64*m draws without
    success.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if bits < 8 or bits % 2:
        raise ValueError("security parameter must be an even number >= 8")
    if candidates is None and rng is None:
        raise ValueError("need an rng when no candidates are injected")
    half = bits // 2
    lo = 1 << (half - 1)
    hi = 1 << half
    source = iter(candidates) if candidates is not None else None
    accepted = []
    budget = 64 * m
    for _ in range(budget):
        if source is not None:
            try:
                c = next(source)
            except StopIteration:
                break
        else:
            c = rng.randrange(lo, hi) | 1
        if c < 3 or c % 2 == 0:
            continue
        if all(math.gcd(c, a) == 1 for a in accepted):
            accepted.append(c)
        if len(accepted) == 2 * m:
            p = tuple(accepted[:m])
            q = tuple(accepted[m:])
            f = tuple(a * b for a, b in zip(p, q))
            return RingModulus(m=m, bits=bits, p=p, q=q, f=f, n=math.prod(f))
    raise GenerationError(
        f"could not find {2 * m} pairwise coprime values in {budget} draws")
