import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from braket_qdmi import qasm
from braket_qdmi.errors import InvalidArgumentError, StatusCode
from braket_qdmi.qasm import (
    BitRef,
    GateApplication,
    Measurement,
    Program,
    QasmSemanticError,
    QasmSyntaxError,
    QubitRef,
)

BELL = "OPENQASM 3; qubit[2] q; bit[2] c; h q[0]; cx q[0], q[1]; c = measure q;"


def test_bell_program_matches_hand_built_ast():
    q0, q1 = QubitRef("q", 0), QubitRef("q", 1)
    expected = Program(
        version="3",
        qubit_decls={"q": 2},
        bit_decls={"c": 2},
        statements=[
            GateApplication("h", (), (q0,)),
            GateApplication("cx", (), (q0, q1)),
            Measurement(BitRef("c", 0), q0),
            Measurement(BitRef("c", 1), q1),
        ],
    )
    assert qasm.parse(BELL) == expected
    assert len(expected.gates) == 2


def test_header_forms_and_include_are_accepted():
    for header in ("OPENQASM 3;", "OPENQASM 3.0;", ""):
        program = qasm.parse(f'{header}\ninclude "stdgates.inc";\nqubit[1] q;\nx q[0];')
        assert program.version == ("3" if header else None)
        assert program.gates == [GateApplication("x", (), (QubitRef("q", 0),))]


def test_comments_and_whitespace_are_insignificant():
    noisy = """// leading comment
    OPENQASM 3;   /* block
    comment */ qubit [2]   q ;
    bit[2] c; h q [ 0 ] ; // trailing
    cx q[0],q[1];
    c = measure q;"""
    assert qasm.parse(noisy) == qasm.parse(BELL)


def test_angle_expressions():
    src = "qubit[1] q; rx(pi/2) q[0]; ry(-π/4) q[0]; rz(2*pi - 0.5) q[0]; rx(-(1.5e-1 + 1)) q[0]; rz(--3/2) q[0];"
    params = [g.params[0] for g in qasm.parse(src).gates]
    assert params == pytest.approx([math.pi / 2, -math.pi / 4, 2 * math.pi - 0.5, -1.15, 1.5])


def test_indexed_measurement_order_defines_measured_qubits():
    program = qasm.parse("qubit[3] q; bit[2] c; c[0] = measure q[2]; c[1] = measure q[0];")
    assert program.measured_qubits == [2, 0]


def test_unmeasured_program_measures_every_qubit():
    program = qasm.parse("qubit[2] a; qubit[1] b; h b[0];")
    assert program.num_qubits == 3
    assert program.qubit_index(QubitRef("b", 0)) == 2
    assert program.measured_qubits == [0, 1, 2]


@pytest.mark.parametrize(
    "source, kind",
    [
        ("", QasmSyntaxError),
        ("// only a comment", QasmSyntaxError),
        ("qubit[1] q; h q[1];", QasmSemanticError),
        ("qubit[1] q; h r[0];", QasmSemanticError),
        ("qubit[1] q; qubit[2] q;", QasmSemanticError),
        ("qubit[2] q; cx q[0];", QasmSemanticError),
        ("qubit[2] q; cx q[0], q[0];", QasmSemanticError),
        ("qubit[1] q; rx q[0];", QasmSemanticError),
        ("qubit[1] q; h(0.1) q[0];", QasmSemanticError),
        ("qubit[1] q; foo q[0];", QasmSemanticError),
        ("qubit[1] q; rx(1/0) q[0];", QasmSemanticError),
        ("qubit[1] q; bit[1] c; c[0] = measure q[0]; h q[0];", QasmSemanticError),
        ("qubit[1] q; bit[2] c; c[0] = measure q[0]; c[1] = measure q[0];", QasmSemanticError),
        ("qubit[2] q; bit[1] c; c = measure q;", QasmSemanticError),
        ("qubit[0] q;", QasmSemanticError),
        ("qubit[1] h;", QasmSemanticError),
        ("qubit[1] q h q[0];", QasmSyntaxError),
        ("OPENQASM 2; qubit[1] q;", QasmSyntaxError),
        ("qubit[1] q; if (c) x q[0];", QasmSemanticError),
        ("qubit[1] q; x q[0]", QasmSyntaxError),
        ('qubit[1] q; rx("a") q[0];', QasmSyntaxError),
    ],
)
def test_rejections_carry_positions(source, kind):
    with pytest.raises(kind) as info:
        qasm.parse(source)
    err = info.value
    assert err.line >= 1 and err.column >= 1
    assert isinstance(err, InvalidArgumentError)
    assert err.status is StatusCode.ERROR_INVALID_ARGUMENT


def test_error_position_points_at_offending_token():
    with pytest.raises(QasmSemanticError) as info:
        qasm.parse("qubit[1] q;\nbit[1] c;\n  h q[1];")
    assert (info.value.line, info.value.column) == (3, 7)


def test_deep_nesting_and_huge_literals_are_errors_not_crashes():
    with pytest.raises(qasm.QasmError):
        qasm.parse("qubit[1] q; rx(" + "(" * 5000 + "1" + ")" * 5000 + ") q[0];")
    # a long unary chain is legal and must not exhaust the stack
    assert qasm.parse("qubit[1] q; rx(" + "-" * 100000 + "1) q[0];").gates[0].params == (1.0,)
    with pytest.raises(qasm.QasmError):
        qasm.parse("qubit[" + "9" * 5000 + "] q;")


_FRAGMENTS = st.sampled_from(
    [
        "OPENQASM", "3", ";", "qubit", "bit", "[", "]", "q", "c", "(", ")", ",", "=", "measure", "h", "cx",
        "rx", "pi", "π", "-", "/", "*", "+", "0", "1", "2.5", "1e9", "//", "/*", "*/", '"', "include", "\n", " ",
    ]
)


@settings(max_examples=400, deadline=None)
@given(st.one_of(st.text(max_size=80), st.lists(_FRAGMENTS, max_size=40).map(" ".join)))
def test_parse_is_total(source):
    try:
        program = qasm.parse(source)
    except qasm.QasmError as err:
        assert err.line >= 1 and err.column >= 1
    else:
        assert program.num_qubits >= 1
