"""Four-party delegation protocol over locked ciphertexts.

Five roles: the data owner holds the raw values, the delegator and the
mapper are the two divisions of the processing center, the computation
center evaluates formulas over masked operands, and the data user receives
the result. Key distribution happens out of band: the owner holds k1 and
the masking key k2, the mapper holds k3, the user holds the master key
k1*k2*k3, and the computation center holds nothing. The message types have
no key-bearing variant, so a well-typed transcript cannot ship key material
as anything but a forged ciphertext body; the audit checks for exactly
that.
"""

from dataclasses import dataclass
from enum import Enum

from .cipher import dec, enc4, lock
from .evaluate import (CipherEnv, collect_refs, eval_expr, format_expr,
                       has_const, parse_expr)
from .formats import entries_text


class Role(Enum):
    DATA_OWNER = "data_owner"
    DELEGATOR = "delegator"
    MAPPER = "mapper"
    COMPUTATION_CENTER = "computation_center"
    DATA_USER = "data_user"


@dataclass(frozen=True)
class DataRequest:
    indices: tuple


@dataclass(frozen=True)
class FormulaAnnouncement:
    formula: object


@dataclass(frozen=True)
class MaskedOperand:
    index: int
    ciphertext: object


@dataclass(frozen=True)
class EvalResult:
    ciphertext: object


@dataclass(frozen=True)
class MappedResult:
    ciphertext: object


@dataclass(frozen=True)
class Message:
    sender: Role
    recipient: Role
    payload: object


@dataclass(frozen=True)
class Transcript:
    messages: tuple
    result: int


class ProtocolError(RuntimeError):
    """The protocol's own preconditions were violated."""


def _required_indices(formula, table_size):
    names = collect_refs(formula)
    if not names:
        raise ProtocolError("formula references no data inputs")
    if has_const(formula):
        raise ProtocolError(
            "formulas with literal constants are not supported; the "
            "computation center holds no key to encrypt them under")
    indices = []
    for name in names:
        if not (name.startswith("x") and name[1:].isdigit()):
            raise ProtocolError(f"data inputs must be named x1, x2, ...; got {name!r}")
        i = int(name[1:])
        if not 1 <= i <= table_size:
            raise ProtocolError(f"input {name} is outside the data table")
        indices.append(i)
    return tuple(sorted(set(indices)))


def run_protocol(formula, data, keyset, rng):
    """Run the full flow and return (result, transcript).

    formula is an expression AST (or text, parsed here) over inputs named
    x1..xt, 1-based into data. keyset needs exactly three components: the
    owner encrypts under component 1 and masks under component 2, the
    mapper locks under component 3, and the user decrypts with the master.
    """
    if isinstance(formula, str):
        formula = parse_expr(formula)
    if len(keyset.components) != 3:
        raise ProtocolError("protocol needs a key set with exactly 3 components")
    k1, k2, k3 = keyset.components
    required = _required_indices(formula, len(data))

    messages = []

    # The data user announces the formula; the delegator forwards it to the
    # computation center and asks the owner for the operands it needs.
    messages.append(Message(Role.DATA_USER, Role.DELEGATOR,
                            FormulaAnnouncement(formula)))
    messages.append(Message(Role.DELEGATOR, Role.COMPUTATION_CENTER,
                            FormulaAnnouncement(formula)))
    messages.append(Message(Role.DELEGATOR, Role.DATA_OWNER,
                            DataRequest(required)))

    # The owner keeps Y_i = enc4(x_i, k1) for its whole table and sends the
    # requested entries masked one layer deeper, Z_i = lock(Y_i, k2).
    held = [enc4(x, k1, rng) for x in data]
    operands = {}
    for i in required:
        z = lock(held[i - 1], k2)
        operands[f"x{i}"] = z
        messages.append(Message(Role.DATA_OWNER, Role.COMPUTATION_CENTER,
                                MaskedOperand(i, z)))

    evaluated = eval_expr(formula, CipherEnv(bindings=operands))
    messages.append(Message(Role.COMPUTATION_CENTER, Role.MAPPER,
                            EvalResult(evaluated)))

    mapped = lock(evaluated, k3)
    messages.append(Message(Role.MAPPER, Role.DATA_USER,
                            MappedResult(mapped)))

    result = dec(mapped, keyset.master)
    transcript = Transcript(messages=tuple(messages), result=result)
    violations = audit_transcript(transcript, keyset)
    if violations:
        raise ProtocolError(f"protocol run produced a dirty transcript: {violations}")
    return result, transcript


def audit_transcript(transcript, keyset):
    """Check a transcript against the protocol's disclosure rules.

    Returns violation descriptions, empty when clean. Checks that no
    transmitted matrix equals any key matrix or key inverse, that the
    computation center received only masked operands and formula
    announcements, and that the data user received exactly one mapped
    result.
    """
    key_material = set()
    for kt in keyset.components + (keyset.master,):
        key_material.add(kt.k)
        key_material.add(kt.k_inv)
    violations = []
    mapped_count = 0
    for pos, msg in enumerate(transcript.messages):
        ct = getattr(msg.payload, "ciphertext", None)
        if ct is not None and ct.body in key_material:
            violations.append(
                f"message {pos}: payload matrix equals key material "
                f"({msg.sender.value} to {msg.recipient.value})")
        if (msg.recipient is Role.COMPUTATION_CENTER
                and not isinstance(msg.payload, (MaskedOperand, FormulaAnnouncement))):
            violations.append(
                f"message {pos}: computation center received "
                f"{type(msg.payload).__name__}")
        if msg.recipient is Role.DATA_USER and isinstance(msg.payload, MappedResult):
            mapped_count += 1
    if mapped_count != 1:
        violations.append(
            f"data user received {mapped_count} mapped results, expected 1")
    return violations


def _payload_fields(payload):
    if isinstance(payload, DataRequest):
        return ("data_request", ",".join(str(i) for i in payload.indices))
    if isinstance(payload, FormulaAnnouncement):
        return ("formula", format_expr(payload.formula))
    if isinstance(payload, MaskedOperand):
        return ("masked_operand", str(payload.index),
                entries_text(payload.ciphertext.body))
    if isinstance(payload, EvalResult):
        return ("eval_result", entries_text(payload.ciphertext.body))
    if isinstance(payload, MappedResult):
        return ("mapped_result", entries_text(payload.ciphertext.body))
    raise TypeError(f"unknown payload: {payload!r}")


def serialize_transcript(transcript):
    """Line-oriented text log: one tab-separated line per message, then the
    result line. Matrices render as comma-separated entries."""
    lines = []
    for msg in transcript.messages:
        fields = (msg.sender.value, msg.recipient.value) + _payload_fields(msg.payload)
        lines.append("\t".join(fields))
    lines.append(f"result\t{transcript.result}")
    return "\n".join(lines) + "\n"
