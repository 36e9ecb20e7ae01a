#!/usr/bin/env python3
"""
Tests for rule application and trace replay.
"""

from fractions import Fraction

import pytest

from app.coeff import RingSpec
from app.freealg import AlgebraElement, Word
from app.rewrite import (
    TRACE_DIR, PatternMismatchError, RewriteRule, RewriteStep, TraceFormatError, apply_rule, check_trace,
    load_trace, parse_trace, replay, representation_check, shipped_traces,
)

RING = RingSpec(("c",))
RULES = {
    "b12": RewriteRule("b12", Word.parse("s1 s2 s1"), AlgebraElement.of(Word.parse("s2 s1 s2"), RING.one())),
    "o1": RewriteRule("o1", Word.parse("s1^3"), AlgebraElement.parse("[c]", RING), kind="order"),
}


def test_forward_braid_step():
    x = AlgebraElement.parse("[c] s2 s1 s2 s1", RING)
    y = apply_rule(x, RewriteStep(0, 1, "b12"), RULES)
    assert y == AlgebraElement.parse("[c] s2^2 s1 s2", RING)


def test_backward_braid_step():
    x = AlgebraElement.parse("s2 s1 s2", RING)
    assert apply_rule(x, RewriteStep(0, 0, "b12", "bwd"), RULES) == AlgebraElement.parse("s1 s2 s1", RING)


def test_order_step_multiplies_coefficient():
    x = AlgebraElement.parse("[c] s2 s1^3 s2", RING)
    assert apply_rule(x, RewriteStep(0, 1, "o1"), RULES) == AlgebraElement.parse("[c^2] s2^2", RING)


def test_backward_order_step_divides_exactly():
    x = AlgebraElement.parse("[c] s2", RING)
    assert apply_rule(x, RewriteStep(0, 1, "o1", "bwd"), RULES) == AlgebraElement.parse("s2 s1^3", RING)
    with pytest.raises(PatternMismatchError):
        apply_rule(AlgebraElement.parse("s2", RING), RewriteStep(0, 0, "o1", "bwd"), RULES)


def test_mismatch_reports_the_place():
    x = AlgebraElement.parse("s1 s2 s2", RING)
    with pytest.raises(PatternMismatchError) as excinfo:
        apply_rule(x, RewriteStep(0, 0, "b12"), RULES)
    assert excinfo.value.pos == 0
    assert excinfo.value.rule == "b12"
    with pytest.raises(PatternMismatchError):
        apply_rule(x, RewriteStep(3, 0, "b12"), RULES)
    with pytest.raises(PatternMismatchError):
        apply_rule(x, RewriteStep(0, 0, "nope"), RULES)


def test_shipped_trace_names():
    names = {p.stem for p in shipped_traces()}
    assert names == {"g4_torsion", "c_expansion", "c_central_s1", "c_central_s2", "c_central_t"}


@pytest.mark.parametrize("path", shipped_traces(), ids=lambda p: p.stem)
def test_shipped_trace_certifies(path):
    cert = check_trace(load_trace(path))
    assert cert.certified, cert.error


def test_torsion_trace_ends_at_c9():
    trace = load_trace("g4_torsion")
    elements = replay(trace)
    assert len(elements) == len(trace.steps) + 1 == 16
    assert elements[-1] == AlgebraElement.parse("[c^9]", trace.ring)
    # the inserted s2^3 carries the whole coefficient after the first step
    assert elements[1] == AlgebraElement.parse("s1 s2^3 s1 s2^2 (s1^2 s2^2)^5", trace.ring)


def test_perturbed_trace_is_rejected_at_the_changed_step():
    text = (TRACE_DIR / "g4_torsion.trace").read_text()
    perturbed = text.replace("term=0 pos=3 rule=b12 dir=bwd", "term=0 pos=2 rule=b12 dir=bwd", 1)
    cert = check_trace(parse_trace(perturbed))
    assert not cert.certified
    assert cert.counterexample["step"] == 1


def test_wrong_end_is_rejected():
    text = (TRACE_DIR / "c_expansion.trace").read_text().replace("end: t s2 s1 t s2 t s1 s2 s1", "end: t s2 s1 t s2 s1 t s2 s1")
    cert = check_trace(parse_trace(text))
    assert not cert.certified
    assert "difference" in cert.counterexample


def test_trace_format_errors():
    with pytest.raises(TraceFormatError):
        parse_trace("start: s1\nend: s1\n")
    with pytest.raises(TraceFormatError):
        parse_trace("# hecke-trace v1\nstart: s1\n")
    with pytest.raises(TraceFormatError):
        parse_trace("# hecke-trace v1\nstart: s1\nend: s1\nterm=0 pos=x rule=r\n")
    with pytest.raises(TraceFormatError):
        parse_trace("# hecke-trace v1\nrule r: s1 s2\nstart: s1\nend: s1\n")
    with pytest.raises(TraceFormatError):
        parse_trace("# hecke-trace v1\nfixed: a\nstart: s1\nend: s1\n")


def test_presentation_and_fixed_headers():
    trace = load_trace("g4_torsion")
    assert trace.presentation == "G4"
    assert trace.fixed == {"a": Fraction(0), "b": Fraction(0)}
    assert load_trace("c_expansion").presentation == "G26"


def test_empty_trace():
    text = "# hecke-trace v1\nring: c\npresentation: G4\nstart: [c] s1 s2\nend: [c] s1 s2\n"
    trace = parse_trace(text, name="empty")
    assert trace.steps == []
    assert replay(trace) == [trace.start]
    cert = check_trace(trace)
    assert cert.certified
    assert cert.details["steps"] == 0
    assert representation_check(trace, points=2).certified


def test_torsion_trace_has_the_same_image_at_ten_points():
    cert = representation_check(load_trace("g4_torsion"), points=10, seed=7)
    assert cert.certified, cert.error
    assert cert.details["elements"] == 17
    assert cert.details["fixed"] == {"a": "0", "b": "0"}


def test_corrupted_rule_coefficient_changes_the_image():
    text = (TRACE_DIR / "g4_torsion.trace").read_text().replace("rule o1: s1^3 -> [c]", "rule o1: s1^3 -> [2*c]")
    trace = parse_trace(text)
    assert len(replay(trace)) == 16
    cert = representation_check(trace, points=10, seed=7)
    assert not cert.certified
    # steps 0-2 do not use o1
    assert cert.counterexample["step"] == 3
    assert cert.counterexample["seed"] == 7
    assert cert.counterexample["specialization"]["a"] == "0"


def test_wrong_declared_end_changes_the_image():
    text = (TRACE_DIR / "g4_torsion.trace").read_text().replace("end: [c^9]", "end: [c^8]")
    cert = representation_check(parse_trace(text), points=3)
    assert not cert.certified
    assert cert.counterexample["step"] is None
    assert "declared end" in cert.error


def test_unreplayable_trace_fails_the_representation_check():
    text = (TRACE_DIR / "g4_torsion.trace").read_text()
    text = text.replace("term=0 pos=3 rule=b12 dir=bwd", "term=0 pos=2 rule=b12 dir=bwd", 1)
    cert = representation_check(parse_trace(text), points=1)
    assert not cert.certified
    assert "does not replay" in cert.error


def test_representation_check_needs_a_presentation():
    trace = parse_trace("# hecke-trace v1\nstart: s1\nend: s1\n")
    with pytest.raises(TraceFormatError):
        representation_check(trace)
    foreign = parse_trace("# hecke-trace v1\nring: z\npresentation: G4\nstart: [z] s1\nend: [z] s1\n")
    with pytest.raises(TraceFormatError):
        representation_check(foreign)


@pytest.mark.slow
@pytest.mark.parametrize("name", ["c_expansion", "c_central_s1", "c_central_s2", "c_central_t"])
def test_g26_traces_have_the_same_image(name):
    cert = representation_check(load_trace(name), points=2, seed=7)
    assert cert.certified, cert.error
