"""Key material: conjugation key pairs and multiplicative key sets."""

from dataclasses import dataclass

from .matrix import Matrix, identity, inverse, mat_mul, random_invertible
from .ring import GenerationError, RingModulus, generate_coprime_set

KEY_DIMS = (4, 8)


@dataclass(frozen=True)
class KeyTuple:
    """Secret key: the modulus with its factors, plus k and its inverse."""

    modulus: RingModulus
    k: Matrix
    k_inv: Matrix

    def __post_init__(self):
        if self.k.dim not in KEY_DIMS:
            raise ValueError(f"key dimension must be one of {KEY_DIMS}")
        if self.k.dim != self.k_inv.dim:
            raise ValueError("key pair must share one dimension")
        if self.k.modulus != self.modulus.n or self.k_inv.modulus != self.modulus.n:
            raise ValueError("key matrices must be taken mod n")

    @property
    def dim(self):
        return self.k.dim

    def verify(self):
        """True when k * k_inv is the identity mod n."""
        return mat_mul(self.k, self.k_inv) == identity(self.k.dim, self.k.modulus)


@dataclass(frozen=True)
class KeySet:
    """Component keys plus the master key for a re-keying chain.

    The master matrix is the ordered product of the component matrices,
    components[0].k * components[1].k * ... in that order.
    """

    modulus: RingModulus
    components: tuple
    master: KeyTuple

    def __post_init__(self):
        if len(self.components) < 2:
            raise ValueError("need at least two component keys")
        if any(kt.modulus != self.modulus for kt in self.components + (self.master,)):
            raise ValueError("all keys must share one modulus")
        if any(kt.dim != self.master.dim for kt in self.components):
            raise ValueError("all keys must share one dimension")


class _EntryStream:
    """Feeds fixed values to random_invertible, for deterministic tests."""

    def __init__(self, values):
        self._it = iter(values)

    def randrange(self, *_args):
        try:
            return next(self._it)
        except StopIteration:
            raise GenerationError("injected entry stream exhausted") from None


def key_tuple_from_matrix(modulus, k):
    """Build a KeyTuple by inverting k. Raises if k is not invertible."""
    return KeyTuple(modulus, k, inverse(k))


def _keygen(dim, m, bits, rng, candidates=None, entries=None):
    modulus = generate_coprime_set(m, bits, rng, candidates=candidates)
    source = _EntryStream(entries) if entries is not None else rng
    k = random_invertible(dim, modulus.n, source)
    return key_tuple_from_matrix(modulus, k)


def keygen4(m, bits, rng=None, candidates=None, entries=None):
    """Generate a fresh dim 4 key: a modulus from 2m coprime factors and an
    invertible conjugation matrix with its inverse.

    candidates and entries are injection points for deterministic tests:
    candidates feeds the factor search, entries feeds the matrix draw.
    """
    return _keygen(4, m, bits, rng, candidates=candidates, entries=entries)


def keygen8(m, bits, rng=None, candidates=None, entries=None):
    """Dim 8 variant of keygen4."""
    return _keygen(8, m, bits, rng, candidates=candidates, entries=entries)


def keyset_gen(dim, count, m, bits, rng):
    """Generate count component keys and their master key.

    The master inverse is computed from the product matrix itself rather
    than by multiplying component inverses in reverse, so the two routes
    stay independently checkable.
    """
    if count < 2:
        raise ValueError("need at least two component keys")
    modulus = generate_coprime_set(m, bits, rng)
    components = []
    for _ in range(count):
        components.append(
            key_tuple_from_matrix(modulus, random_invertible(dim, modulus.n, rng)))
    product = components[0].k
    for kt in components[1:]:
        product = mat_mul(product, kt.k)
    return KeySet(modulus, tuple(components), key_tuple_from_matrix(modulus, product))
