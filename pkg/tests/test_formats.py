import pytest

from sl3jones.arith import M1, M2, Q, QLaurent
from sl3jones.formats import (
    FormatError,
    RunManifest,
    parse_comm,
    parse_document,
    parse_laurent,
    parse_op_expression,
    parse_operator,
    parse_qmm,
    serialize_operator,
    serialize_operators,
)
from sl3jones.ore import OreOp


def test_parse_qmm():
    assert parse_qmm("q M1^2 - 3 M2") == Q * M1**2 - 3 * M2
    assert parse_qmm("(1+q)^2") == (1 + Q) ** 2
    assert parse_qmm("tau(M1 + 2 q M2)") == M2 + 2 * Q * M1
    assert parse_qmm("M1^{2}/2") == M1**2 / 2
    assert parse_qmm("2*(-M1)^3") == -2 * M1**3


def test_parse_laurent():
    assert parse_laurent("q^-2 + v^3") == QLaurent.q_power(-2) + QLaurent.v_power(3)
    assert parse_laurent("q^(-1)*(q+1)") == 1 + QLaurent.q_power(-1)


def test_parse_errors():
    with pytest.raises(FormatError) as e:
        parse_qmm("M1 + * 2")
    assert e.value.col is not None
    with pytest.raises(FormatError):
        parse_qmm("M3")
    with pytest.raises(FormatError):
        parse_qmm("(M1")
    with pytest.raises(FormatError):
        parse_op_expression("M1 / L1")


def test_operator_expression_normal_form():
    P = parse_op_expression("L1 M1")
    assert P == OreOp.q() * OreOp.M(1) * OreOp.L(1)
    assert parse_op_expression("L1 L2 - L2 L1").is_zero()


def test_document():
    text = """vars: q M1 M2 L1 L2
# comment
A := M1 + q
  - 1
[P]
A * L1
- tau(A) * L2
"""
    doc = parse_document(text)
    want = (OreOp.M(1) + OreOp.q() - 1) * OreOp.L(1) - (OreOp.M(2) + OreOp.q() - 1) * OreOp.L(2)
    assert doc["P"] == want
    with pytest.raises(FormatError) as e:
        parse_document("[P]\nL1 +\n")
    assert e.value.line == 2


def test_serialize_round_trip():
    P = parse_op_expression("(q^2 M1 - 1) L1^2 + (3 M2^5 - q^-1) L2 + 7")
    text = serialize_operator(P, "P")
    assert text.startswith("vars:")
    assert parse_operator(text, "P") == P
    multi = serialize_operators({"A": P, "B": OreOp.L(1) - 1})
    assert parse_operator(multi, "B") == OreOp.L(1) - 1


def test_comm_and_manifest():
    assert parse_comm("L1 M1 - L2") == parse_comm("M1*L1 - L2")
    m = RunManifest("jones", {"b": "3"}, {"table": "ab"}, {"out": "cd"}, {"eval": 1.5})
    back = RunManifest.loads(m.dumps())
    assert back.command == "jones" and back.parameters == {"b": "3"}
    assert back.inputs == m.inputs and back.outputs == m.outputs
    assert back.timings == {"eval": 1.5}
