"""Homomorphic arithmetic and a small formula language over ciphertexts.

Evaluation needs no key for +, -, *: the operations are plain matrix
arithmetic on ciphertext bodies. Constants are the one exception; they are
encrypted with fresh coins at evaluation time, so an environment used with
constant-bearing formulas must carry a key and an rng.
"""

from dataclasses import dataclass, field

from .cipher import Ciphertext, encrypt_value
from .matrix import inverse, mat_add, mat_mul, mat_sub
from .ring import NotInvertibleError


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


class ExprSyntaxError(ValueError):
    """Formula syntax error. Carries the byte offset and what was expected."""

    def __init__(self, offset, expected, found):
        super().__init__(
            f"expected {expected} at offset {offset}, found {found}")
        self.offset = offset
        self.expected = expected
        self.found = found


class UnboundInputError(LookupError):
    """A formula references an input name the environment does not bind."""

    def __init__(self, name):
        super().__init__(f"unbound input {name!r}")
        self.name = name


class DivisorNotInvertibleError(ValueError):
    """Division is undefined: the divisor matrix is not invertible mod N."""

    def __init__(self, gcd):
        super().__init__(f"divisor is not invertible (gcd {gcd} with modulus)")
        self.gcd = gcd


def he_add(c1, c2):
    """Ciphertext of the sum: plain matrix addition."""
    return Ciphertext(mat_add(c1.body, c2.body))


def he_sub(c1, c2):
    """Ciphertext of the difference mod N."""
    return Ciphertext(mat_sub(c1.body, c2.body))


def he_mul(c1, c2):
    """Ciphertext of the product: matrix multiplication."""
    return Ciphertext(mat_mul(c1.body, c2.body))


def he_div(c1, c2):
    """Multiply by the divisor's matrix inverse: modular division.

    Defined only when the divisor matrix is invertible, which for these
    ciphertexts means every diagonal slot of c2 is a unit mod N. This is
    division in Z_N (multiplication by the inverse), not integer division.
    """
    try:
        inv = inverse(c2.body)
    except NotInvertibleError as err:
        raise DivisorNotInvertibleError(err.gcd) from err
    return Ciphertext(mat_mul(c1.body, inv))


_DIGITS = "0123456789"


def _is_name_start(ch):
    return ch == "_" or "a" <= ch <= "z" or "A" <= ch <= "Z"


def _is_name_char(ch):
    return _is_name_start(ch) or ch in _DIGITS


def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in " \t":
            i += 1
        elif ch in _DIGITS:
            j = i
            while j < len(text) and text[j] in _DIGITS:
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
        elif _is_name_start(ch):
            j = i
            while j < len(text) and _is_name_char(text[j]):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
        elif ch in "+-*/()":
            tokens.append((ch, ch, i))
            i += 1
        else:
            raise ExprSyntaxError(i, "integer, name, or operator", repr(ch))
    tokens.append(("end", "", len(text)))
    return tokens


def parse_expr(text):
    """Parse a formula into an AST.

    Grammar (left associative, usual precedence, no unary minus):
        expr   := term (('+' | '-') term)*
        term   := factor (('*' | '/') factor)*
        factor := integer | name | '(' expr ')'
    """
    tokens = _tokenize(text)
    pos = 0

    def current():
        return tokens[pos]

    def fail(expected):
        kind, value, offset = current()
        found = "end of input" if kind == "end" else repr(value)
        raise ExprSyntaxError(offset, expected, found)

    def take(kind):
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def factor():
        kind, value, _ = current()
        if kind == "int":
            take(kind)
            return Const(int(value))
        if kind == "name":
            take(kind)
            return Ref(value)
        if kind == "(":
            take(kind)
            node = expr()
            if current()[0] != ")":
                fail("')'")
            take(")")
            return node
        fail("integer, name, or '('")

    def term():
        node = factor()
        while current()[0] in ("*", "/"):
            op = take(current()[0])[0]
            node = BinOp(op, node, factor())
        return node

    def expr():
        node = term()
        while current()[0] in ("+", "-"):
            op = take(current()[0])[0]
            node = BinOp(op, node, term())
        return node

    node = expr()
    if current()[0] != "end":
        fail("operator or end of input")
    return node


def format_expr(node):
    """Render an AST back to formula text, fully parenthesized."""
    if isinstance(node, Const):
        return str(node.value)
    if isinstance(node, Ref):
        return node.name
    if isinstance(node, BinOp):
        return f"({format_expr(node.left)}{node.op}{format_expr(node.right)})"
    raise TypeError(f"not an expression node: {node!r}")


@dataclass
class CipherEnv:
    """Evaluation context: named ciphertexts, plus key and rng so literal
    constants can be encrypted on the fly."""

    bindings: dict = field(default_factory=dict)
    key: object = None
    rng: object = None


_OPS = {"+": he_add, "-": he_sub, "*": he_mul, "/": he_div}


def eval_expr(node, env):
    """Evaluate an AST over ciphertexts. Returns a Ciphertext."""
    if isinstance(node, Ref):
        try:
            return env.bindings[node.name]
        except KeyError:
            raise UnboundInputError(node.name) from None
    if isinstance(node, Const):
        if env.key is None or env.rng is None:
            raise ValueError("constants need a key and rng in the environment")
        return encrypt_value(node.value % env.key.modulus.n, env.key, env.rng)
    if isinstance(node, BinOp):
        left = eval_expr(node.left, env)
        right = eval_expr(node.right, env)
        return _OPS[node.op](left, right)
    raise TypeError(f"not an expression node: {node!r}")


def collect_refs(node):
    """All Ref names in an AST, in first-appearance order."""
    out = []

    def walk(n):
        if isinstance(n, Ref):
            if n.name not in out:
                out.append(n.name)
        elif isinstance(n, BinOp):
            walk(n.left)
            walk(n.right)

    walk(node)
    return out


def has_const(node):
    if isinstance(node, Const):
        return True
    if isinstance(node, BinOp):
        return has_const(node.left) or has_const(node.right)
    return False
