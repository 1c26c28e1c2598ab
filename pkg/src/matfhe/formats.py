"""On-disk text formats for keys, key sets, and ciphertexts.

Every file is line-oriented ASCII: a versioned header, then key=value
lines in a fixed order. Newlines are LF, no trailing whitespace, all
integers decimal. parse(serialize(x)) is the identity byte for byte.

Key files carry the factors f_i (secret material the CRT step needs);
ciphertext files carry only the public modulus N.
"""

from .cipher import Ciphertext
from .keys import KeySet, KeyTuple
from .matrix import Matrix
from .ring import RingModulus

_VERSION = "v1"


class MalformedFileError(ValueError):
    """A file does not match its declared format."""


def entries_text(matrix):
    """Matrix entries as comma-separated decimals, row-major."""
    return ",".join(str(v) for v in matrix.entries)


def matrix_from_text(text, dim, modulus):
    parts = text.split(",") if text else []
    if len(parts) != dim * dim:
        raise MalformedFileError(
            f"expected {dim * dim} matrix entries, got {len(parts)}")
    entries = []
    for part in parts:
        value = _parse_int(part, "matrix entry")
        if value >= modulus:
            raise MalformedFileError(f"matrix entry {value} not reduced mod {modulus}")
        entries.append(value)
    return Matrix(dim, modulus, tuple(entries))


def _parse_int(text, what):
    if not text or text.strip() != text or not all(c in "0123456789" for c in text):
        raise MalformedFileError(f"bad {what}: {text!r}")
    return int(text)


def _parse_int_list(text, what):
    return tuple(_parse_int(part, what) for part in text.split(","))


class _LineReader:
    def __init__(self, text, kind):
        if not text.endswith("\n"):
            raise MalformedFileError("missing final newline")
        self.lines = text[:-1].split("\n")
        self.pos = 0
        header = self.next_raw()
        expected = f"MATFHE-{kind} {_VERSION}"
        if header != expected:
            raise MalformedFileError(f"bad header {header!r}, expected {expected!r}")

    def next_raw(self):
        if self.pos >= len(self.lines):
            raise MalformedFileError("unexpected end of file")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def next_field(self, name):
        line = self.next_raw()
        prefix = name + "="
        if not line.startswith(prefix):
            raise MalformedFileError(f"expected {name}= line, got {line!r}")
        return line[len(prefix):]

    def finish(self):
        if self.pos != len(self.lines):
            raise MalformedFileError(f"trailing data: {self.lines[self.pos]!r}")


def _modulus_lines(modulus, secret):
    lines = [f"m={modulus.m}", f"lambda={modulus.bits}"]
    if secret:
        lines.append("f=" + ",".join(str(v) for v in modulus.f))
    lines.append(f"N={modulus.n}")
    return lines


def _read_modulus(reader, secret):
    m = _parse_int(reader.next_field("m"), "m")
    bits = _parse_int(reader.next_field("lambda"), "lambda")
    f = _parse_int_list(reader.next_field("f"), "factor") if secret else None
    n = _parse_int(reader.next_field("N"), "N")
    return m, bits, f, n


def serialize_key(key):
    lines = [f"MATFHE-KEY {_VERSION}"]
    lines += _modulus_lines(key.modulus, secret=True)
    lines.append(f"dim={key.dim}")
    lines.append("k=" + entries_text(key.k))
    lines.append("kinv=" + entries_text(key.k_inv))
    return "\n".join(lines) + "\n"


def parse_key(text):
    reader = _LineReader(text, "KEY")
    m, bits, f, n = _read_modulus(reader, secret=True)
    try:
        modulus = RingModulus(m=m, bits=bits, p=None, q=None, f=f, n=n)
    except ValueError as err:
        raise MalformedFileError(str(err)) from err
    dim = _parse_int(reader.next_field("dim"), "dim")
    if dim not in (4, 8):
        raise MalformedFileError(f"bad key dimension {dim}")
    k = matrix_from_text(reader.next_field("k"), dim, n)
    k_inv = matrix_from_text(reader.next_field("kinv"), dim, n)
    reader.finish()
    return KeyTuple(modulus, k, k_inv)


def serialize_ciphertext(ct, modulus):
    """Ciphertext file. Stores the public N only, never the factors."""
    if ct.modulus != modulus.n:
        raise ValueError("ciphertext and modulus disagree")
    lines = [f"MATFHE-CT {_VERSION}"]
    lines += _modulus_lines(modulus, secret=False)
    lines.append(f"dim={ct.dim}")
    lines.append("c=" + entries_text(ct.body))
    return "\n".join(lines) + "\n"


def parse_ciphertext(text):
    """Returns (Ciphertext, m, bits, n). Factors are not in the file."""
    reader = _LineReader(text, "CT")
    m, bits, _, n = _read_modulus(reader, secret=False)
    dim = _parse_int(reader.next_field("dim"), "dim")
    if dim not in (4, 8):
        raise MalformedFileError(f"bad ciphertext dimension {dim}")
    body = matrix_from_text(reader.next_field("c"), dim, n)
    reader.finish()
    return Ciphertext(body), m, bits, n


def serialize_keyset(keyset):
    lines = [f"MATFHE-KEYSET {_VERSION}"]
    lines += _modulus_lines(keyset.modulus, secret=True)
    lines.append(f"dim={keyset.master.dim}")
    lines.append(f"l={len(keyset.components)}")
    lines.append("k=" + entries_text(keyset.master.k))
    lines.append("kinv=" + entries_text(keyset.master.k_inv))
    for i, kt in enumerate(keyset.components, start=1):
        lines.append(f"k{i}=" + entries_text(kt.k))
        lines.append(f"kinv{i}=" + entries_text(kt.k_inv))
    return "\n".join(lines) + "\n"


def parse_keyset(text):
    reader = _LineReader(text, "KEYSET")
    m, bits, f, n = _read_modulus(reader, secret=True)
    try:
        modulus = RingModulus(m=m, bits=bits, p=None, q=None, f=f, n=n)
    except ValueError as err:
        raise MalformedFileError(str(err)) from err
    dim = _parse_int(reader.next_field("dim"), "dim")
    count = _parse_int(reader.next_field("l"), "l")
    if count < 2:
        raise MalformedFileError("key set needs at least two components")
    master = KeyTuple(modulus,
                      matrix_from_text(reader.next_field("k"), dim, n),
                      matrix_from_text(reader.next_field("kinv"), dim, n))
    components = []
    for i in range(1, count + 1):
        k = matrix_from_text(reader.next_field(f"k{i}"), dim, n)
        k_inv = matrix_from_text(reader.next_field(f"kinv{i}"), dim, n)
        components.append(KeyTuple(modulus, k, k_inv))
    reader.finish()
    return KeySet(modulus, tuple(components), master)


def read_key(path):
    with open(path, "r", encoding="ascii", newline="") as fh:
        return parse_key(fh.read())


def write_key(path, key):
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(serialize_key(key))


def read_ciphertext(path):
    with open(path, "r", encoding="ascii", newline="") as fh:
        return parse_ciphertext(fh.read())


def write_ciphertext(path, ct, modulus):
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(serialize_ciphertext(ct, modulus))
