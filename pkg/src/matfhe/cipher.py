"""Encryption, decryption, and re-keying of conjugated diagonal ciphertexts.

A plaintext x sits in the top-left slot of a diagonal matrix whose other
slots blend x with blind values through per-factor CRT choices; the
ciphertext is that diagonal conjugated by the secret key. Decryption
conjugates back and reads the top-left entry. Because conjugation is a ring
homomorphism, ciphertext sums and products track plaintext sums and
products.
"""

from dataclasses import dataclass

from .matrix import Matrix, diagonal, mat_mul
from .ring import crt_solve


@dataclass(frozen=True)
class Ciphertext:
    """A dim x dim matrix over Z_N. Carries no other metadata."""

    body: Matrix

    @property
    def dim(self):
        return self.body.dim

    @property
    def modulus(self):
        return self.body.modulus


@dataclass(frozen=True)
class Enc4Randomness:
    """Coins for enc4: one blind r and one base-row choice per factor.

    Row choice j (1-based) for factor f_i selects the row of
    [[x, r, r], [r, x, r], [r, r, x]] with x in position j.
    """

    r: int
    row_choices: tuple

    def __post_init__(self):
        if any(c not in (1, 2, 3) for c in self.row_choices):
            raise ValueError("row choices must be 1, 2, or 3")


@dataclass(frozen=True)
class Enc8Randomness:
    """Coins for enc8: blinds r1, r2 and one 7-slot arrangement per factor.

    Each arrangement is a tuple over {"x", "r1", "r2"} placing x once and
    each blind three times (140 distinct arrangements).
    """

    r1: int
    r2: int
    rows: tuple

    def __post_init__(self):
        for row in self.rows:
            if len(row) != 7 or sorted(row) != ["r1", "r1", "r1",
                                                "r2", "r2", "r2", "x"]:
                raise ValueError(
                    "each row must arrange x once and r1, r2 three times each")


def sample_enc4_randomness(x, modulus, rng):
    """Uniform enc4 coins: r from Z_n minus {x}, row choices uniform."""
    n = modulus.n
    r = rng.randrange(n)
    while r == x:
        r = rng.randrange(n)
    return Enc4Randomness(
        r=r, row_choices=tuple(rng.randrange(1, 4) for _ in range(modulus.m)))


def sample_enc8_randomness(x, modulus, rng):
    """Uniform enc8 coins: distinct blinds, arrangements uniform over 140."""
    n = modulus.n
    r1 = rng.randrange(n)
    while r1 == x:
        r1 = rng.randrange(n)
    r2 = rng.randrange(n)
    while r2 == x or r2 == r1:
        r2 = rng.randrange(n)
    rows = []
    for _ in range(modulus.m):
        slots = ["r2"] * 7
        x_pos = rng.randrange(7)
        slots[x_pos] = "x"
        rest = [i for i in range(7) if i != x_pos]
        for i in rng.sample(rest, 3):
            slots[i] = "r1"
        rows.append(tuple(slots))
    return Enc8Randomness(r1=r1, r2=r2, rows=tuple(rows))


def encryption_diagonal(x, modulus, rnd):
    """The enc4 diagonal (x, x1, x2, x3) before conjugation.

    Column j of the stacked base rows is folded with crt_solve against the
    f_i, so x_j agrees with row i's entry j mod each f_i.
    """
    r = rnd.r
    base = ((x, r, r), (r, x, r), (r, r, x))
    rows = [base[c - 1] for c in rnd.row_choices]
    cols = [crt_solve([(rows[i][j] % modulus.f[i], modulus.f[i])
                       for i in range(modulus.m)])
            for j in range(3)]
    return (x, cols[0], cols[1], cols[2])


def _check_plaintext(x, modulus):
    if not 0 <= x < modulus.n:
        raise ValueError(f"plaintext must lie in [0, {modulus.n})")


def enc4(x, key, rnd):
    """Encrypt x under a dim 4 key as k_inv * diag(x, x1, x2, x3) * k.

    rnd is either an Enc4Randomness (deterministic, for reproducibility)
    or an rng to sample fresh coins from.
    """
    modulus = key.modulus
    if key.dim != 4:
        raise ValueError("enc4 needs a dim 4 key")
    _check_plaintext(x, modulus)
    if not isinstance(rnd, Enc4Randomness):
        rnd = sample_enc4_randomness(x, modulus, rnd)
    if not 0 <= rnd.r < modulus.n or rnd.r == x:
        raise ValueError("blind r must lie in [0, n) and differ from x")
    if len(rnd.row_choices) != modulus.m:
        raise ValueError("need one row choice per factor")
    diag = diagonal(encryption_diagonal(x, modulus, rnd), modulus.n)
    return Ciphertext(mat_mul(mat_mul(key.k_inv, diag), key.k))


def enc8(x, key, rnd):
    """Encrypt x under a dim 8 key: diagonal (x, x1..x7), two blinds."""
    modulus = key.modulus
    if key.dim != 8:
        raise ValueError("enc8 needs a dim 8 key")
    _check_plaintext(x, modulus)
    if not isinstance(rnd, Enc8Randomness):
        rnd = sample_enc8_randomness(x, modulus, rnd)
    for blind in (rnd.r1, rnd.r2):
        if not 0 <= blind < modulus.n or blind == x:
            raise ValueError("blinds must lie in [0, n) and differ from x")
    if rnd.r1 == rnd.r2:
        raise ValueError("blinds must be distinct")
    if len(rnd.rows) != modulus.m:
        raise ValueError("need one arrangement per factor")
    values = {"x": x, "r1": rnd.r1, "r2": rnd.r2}
    diag = [x]
    for j in range(7):
        diag.append(crt_solve([(values[rnd.rows[i][j]] % modulus.f[i],
                                modulus.f[i])
                               for i in range(modulus.m)]))
    body = mat_mul(mat_mul(key.k_inv, diagonal(tuple(diag), modulus.n)), key.k)
    return Ciphertext(body)


def encrypt_value(x, key, rng):
    """enc4 or enc8 depending on the key dimension."""
    return enc4(x, key, rng) if key.dim == 4 else enc8(x, key, rng)


def dec(ct, key):
    """Recover the plaintext: top-left entry of k * C * k_inv.

    Nothing about the recovered diagonal is validated; decrypting with the
    wrong key silently yields an arbitrary value.
    """
    return dec_diagonal(ct, key)[0]


def dec_diagonal(ct, key):
    """The full recovered diagonal, for diagnostics and structural tests."""
    inner = mat_mul(mat_mul(key.k, ct.body), key.k_inv)
    return tuple(inner[i, i] for i in range(inner.dim))


def _conjugate(obj, left, right):
    body = obj.body if isinstance(obj, Ciphertext) else obj
    out = mat_mul(mat_mul(left, body), right)
    return Ciphertext(out) if isinstance(obj, Ciphertext) else out


def lock(obj, key):
    """Add a key layer: k_inv * body * k.

    Accepts a Matrix or Ciphertext and returns the same kind. Locking an
    enc4 output under k2 yields a ciphertext of the composed key k1 * k2.
    """
    return _conjugate(obj, key.k_inv, key.k)


def unlock(obj, key):
    """Remove a key layer: k * body * k_inv. Inverse of lock under one key."""
    return _conjugate(obj, key.k, key.k_inv)
