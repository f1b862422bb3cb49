"""Model-program text form, interpreter, generated sources, and toolchains."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import INIT, STEPS, TARGET, make_rng
from metastable import ann, autoprog, ca, core
from metastable.errors import (
    CompileFailed,
    NoBackendConfigured,
    OutOfRange,
    ParseError,
    RunTimeout,
    SemanticError,
    UnsupportedKind,
)


def ca_document(rule=110, init="0010110", steps=3, target=None):
    return autoprog.Document(
        system=ca.make_automaton(rule, init),
        steps=steps,
        target=None if target is None else core.parse_state_string(target),
    )


def ann_document(seed=4, layers=3, width=3, steps=None, target=None):
    rng = make_rng(seed)
    pattern = rng.integers(0, 2, size=width)
    system = ann.make_network(layers, width, pattern, rng=rng)
    return autoprog.Document(
        system=system,
        steps=(layers - 1) if steps is None else steps,
        target=None if target is None else core.parse_state_string(target),
    )


# --- round trips -----------------------------------------------------------


@given(
    st.integers(0, 255),
    st.text(alphabet="01", min_size=3, max_size=12),
    st.integers(0, 6),
    st.booleans(),
)
@settings(max_examples=40)
def test_ca_text_round_trip(rule, init, steps, with_target):
    target = core.parse_state_string(init[::-1]) if with_target else None
    doc = autoprog.Document(system=ca.make_automaton(rule, init), steps=steps, target=target)
    assert autoprog.parse(autoprog.emit(doc)) == doc


@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(1, 4), st.integers(0, 6))
@settings(max_examples=25)
def test_ann_text_round_trip(seed, layers, width, steps):
    rng = make_rng(seed)
    pattern = rng.integers(0, 2, size=width)
    system = ann.make_network(layers, width, pattern, rng=rng)
    target = core.parse_state_string("1" * width)
    doc = autoprog.Document(system=system, steps=steps, target=target)
    assert autoprog.parse(autoprog.emit(doc)) == doc


def test_comments_and_blank_lines_are_ignored():
    text = autoprog.emit(ca_document())
    sprinkled = "# a note\n\n" + text.replace("steps 3", "steps 3  # three steps")
    assert autoprog.parse(sprinkled) == ca_document()


def test_emit_requires_a_fresh_system():
    doc = ca_document()
    stepped = dataclasses.replace(doc.system, current=core.step(doc.system).current)
    with pytest.raises(SemanticError):
        autoprog.emit(dataclasses.replace(doc, system=stepped))


def test_document_normalizes_string_targets():
    doc = autoprog.Document(system=ca.make_automaton(110, "00100"), steps=3, target="11101")
    assert "target 11101" in autoprog.emit(doc)
    assert doc == ca_document(init="00100", target="11101")


def test_document_rejects_bad_targets():
    from metastable.errors import DimensionMismatch, StateDomainViolation

    with pytest.raises(DimensionMismatch):
        autoprog.Document(system=ca.make_automaton(110, "00100"), steps=3, target="111")
    with pytest.raises(StateDomainViolation):
        autoprog.Document(system=ca.make_automaton(110, "00100"), steps=3, target=[1, 1, 1, 0, 2])
    with pytest.raises(DimensionMismatch):
        ann_document(width=3, target="11")


# --- parse errors ----------------------------------------------------------


def _lines(doc_text):
    return doc_text.splitlines()


def _swap(text, old, new):
    assert old in text
    return text.replace(old, new)


def test_parse_rejects_wrong_header():
    text = autoprog.emit(ca_document())
    with pytest.raises(ParseError):
        autoprog.parse(_swap(text, "amp 1", "amp 2"))
    with pytest.raises(ParseError):
        autoprog.parse(_swap(text, "amp 1", "mpa 1"))
    with pytest.raises(ParseError):
        autoprog.parse("")


def test_parse_error_carries_the_line_number():
    text = _swap(autoprog.emit(ca_document()), "p 7", "p seven")
    with pytest.raises(ParseError) as err:
        autoprog.parse(text)
    assert err.value.line == 3
    assert "line 3" in str(err.value)


def test_parse_rejects_unknown_kind():
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(autoprog.emit(ca_document()), "kind ca", "kind turing"))


def test_parse_rejects_other_alphabets():
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(autoprog.emit(ca_document()), "states 01", "states 012"))


def test_parse_rejects_bad_schedule():
    with pytest.raises(ParseError):
        autoprog.parse(_swap(autoprog.emit(ca_document()), "schedule synchronous", "schedule sometimes"))


def test_parse_rejects_rows_out_of_order():
    text = autoprog.emit(ca_document())
    lines = _lines(text)
    i = lines.index("row 0: 0 1 6")
    lines[i], lines[i + 1] = lines[i + 1], lines[i]
    with pytest.raises(ParseError):
        autoprog.parse("\n".join(lines) + "\n")


def test_parse_rejects_row_index_out_of_range():
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(autoprog.emit(ca_document()), "row 6:", "row 9:"))


def test_parse_rejects_column_out_of_range():
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(autoprog.emit(ca_document()), "row 0: 0 1 6", "row 0: 0 1 7"))


def test_parse_rejects_duplicate_columns():
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(autoprog.emit(ca_document()), "row 0: 0 1 6", "row 0: 0 1 1 6"))


def test_parse_rejects_weighted_entries_in_cell_documents():
    with pytest.raises(ParseError):
        autoprog.parse(_swap(autoprog.emit(ca_document()), "row 0: 0 1 6", "row 0: 0=1 1 6"))


def test_parse_rejects_bare_entries_in_weighted_documents():
    text = autoprog.emit(ann_document())
    lines = _lines(text)
    target = next(l for l in lines if l.startswith("row "))
    broken = target.split(":")[0] + ": 0"
    with pytest.raises(ParseError):
        autoprog.parse(text.replace(target, broken))


def test_parse_rejects_short_tables():
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(autoprog.emit(ca_document()), "table 0 1 1 1 0 1 1 0", "table 0 1 1"))


def test_parse_rejects_non_bit_tables():
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(autoprog.emit(ca_document()), "table 0 1 1 1 0 1 1 0", "table 0 1 1 1 0 1 1 2"))


def test_parse_rejects_update_schedule_disagreement():
    text = autoprog.emit(ann_document(layers=3, width=3))
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(text, "layers 3\n", "layers 4\n"))


def test_parse_rejects_unknown_strategy():
    text = autoprog.emit(ann_document())
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(text, "strategy threshold", "strategy sigmoid"))


def test_parse_rejects_bias_on_the_input_layer():
    text = autoprog.emit(ann_document(width=3))
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(text, "strategy threshold\n", "strategy threshold\nbias 0 0.5\n"))


def test_parse_rejects_non_finite_weights():
    text = autoprog.emit(ann_document())
    first_bias = next(l for l in text.splitlines() if l.startswith("bias "))
    parts = first_bias.split()
    with pytest.raises(SemanticError):
        autoprog.parse(text.replace(first_bias, "%s %s nan" % (parts[0], parts[1])))


def test_parse_rejects_wrong_init_length():
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(autoprog.emit(ca_document()), "init 0010110", "init 00101"))


def test_parse_rejects_bad_init_characters():
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(autoprog.emit(ca_document()), "init 0010110", "init 0010210"))


def test_parse_rejects_negative_steps():
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(autoprog.emit(ca_document()), "steps 3", "steps -1"))


def test_parse_rejects_wrong_target_length():
    doc = ca_document(target="0000000")
    with pytest.raises(SemanticError):
        autoprog.parse(_swap(autoprog.emit(doc), "target 0000000", "target 000"))


def test_parse_rejects_trailing_content():
    with pytest.raises(ParseError):
        autoprog.parse(autoprog.emit(ca_document()) + "more stuff\n")


def test_parse_rejects_non_ring_milieus():
    text = autoprog.emit(ca_document(init="00100"))
    with pytest.raises(UnsupportedKind):
        autoprog.parse(_swap(text, "row 0: 0 1 4", "row 0: 0 1 2"))


# --- interpreter -----------------------------------------------------------

def test_interpreter_matches_direct_running():
    doc = ca_document(rule=110, init=INIT, steps=STEPS)
    rows = autoprog.interpret(doc)
    assert np.array_equal(rows, core.run(doc.system, STEPS))
    text = autoprog.interpret_text(doc)
    lines = text.splitlines()
    assert len(lines) == STEPS + 1
    assert lines[0] == INIT
    assert lines[-1] == TARGET
    assert text.endswith("\n")


def test_interpreter_handles_layered_documents():
    doc = ann_document(layers=3, width=4)
    rows = autoprog.interpret(doc)
    assert rows.shape == (doc.steps + 1, 12)
    assert np.array_equal(rows[0], doc.system.init)


# --- generation ------------------------------------------------------------


@pytest.mark.parametrize("backend,comment", [("c", "/* %s */"), ("python", "# %s")])
@pytest.mark.parametrize("docmaker", [ca_document, ann_document])
def test_generated_source_has_the_four_sections(backend, comment, docmaker):
    source = autoprog.generate(docmaker(), backend)
    for section in ("structure", "milieu", "update", "main loop"):
        assert comment % section in source


def test_generate_rejects_unknown_backends():
    with pytest.raises(NoBackendConfigured):
        autoprog.generate(ca_document(), "fortran")
    with pytest.raises(NoBackendConfigured):
        autoprog.source_suffix("fortran")
    with pytest.raises(NoBackendConfigured):
        autoprog.default_toolchain("fortran")


# --- toolchain -------------------------------------------------------------


def test_toolchain_config_requires_src_placeholder():
    with pytest.raises(ParseError):
        autoprog.ToolchainConfig(command="cc -O2 prog.c")
    with pytest.raises(OutOfRange):
        autoprog.ToolchainConfig(command="cc {src}", timeout=0)


def test_toolchain_rejects_unknown_placeholders():
    config = autoprog.ToolchainConfig(command="cc {src} {flags}")
    with pytest.raises(ParseError):
        autoprog.compile_and_run("int main(void){}", config)


def test_compile_and_run_returns_stdout():
    config = autoprog.ToolchainConfig(command="cat {src}")
    assert autoprog.compile_and_run("hello\n", config, suffix=".txt") == "hello\n"


def test_compile_and_run_reports_failures():
    config = autoprog.ToolchainConfig(command="test -f {src} && false")
    with pytest.raises(CompileFailed):
        autoprog.compile_and_run("x", config)


def test_compile_and_run_times_out():
    config = autoprog.ToolchainConfig(command="cat {src} && sleep 5", timeout=0.2)
    with pytest.raises(RunTimeout):
        autoprog.compile_and_run("x", config)


def test_compile_failures_carry_diagnostics():
    config = autoprog.ToolchainConfig(command="ls {src}.missing")
    with pytest.raises(CompileFailed) as err:
        autoprog.compile_and_run("x", config)
    assert err.value.diagnostics


# --- verification ----------------------------------------------------------


def test_compare_spots_the_first_differing_line():
    report = autoprog.VerifyReport.compare("a\nb\nc\n", "a\nx\nc\n")
    assert not report.equal
    assert report.mismatch_line == 2
    report = autoprog.VerifyReport.compare("a\n", "a\nb\n")
    assert not report.equal
    assert report.mismatch_line == 2
    report = autoprog.VerifyReport.compare("a\nb\n", "a\n")
    assert not report.equal
    assert report.mismatch_line == 2
    assert autoprog.VerifyReport.compare("a\n", "a\n").equal


def test_python_backend_agrees_with_the_interpreter():
    for doc in (ca_document(rule=110, init=INIT, steps=STEPS), ann_document()):
        report = autoprog.verify(doc, "python")
        assert report.equal, report.mismatch_line


@pytest.mark.skipif(not autoprog.toolchain_available("c"), reason="no C toolchain")
def test_c_backend_agrees_with_the_interpreter():
    for doc in (ca_document(rule=110, init=INIT, steps=STEPS), ann_document()):
        report = autoprog.verify(doc, "c")
        assert report.equal, report.mismatch_line


def test_verify_surfaces_wrong_programs():
    doc = ca_document()
    config = autoprog.ToolchainConfig(command="test -f {src} && echo nonsense")
    report = autoprog.verify(doc, "python", toolchain=config)
    assert not report.equal
    assert report.mismatch_line == 1
