from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor

import pytest

import support
from gandyfix.decide import (
    Derivation, bench_exponent, chain_generator, check_cost_bound, decide_pred, replay,
)
from gandyfix.errors import InsufficientSizes, UnknownRule
from gandyfix.instance import loads

SIZES = [8, 16, 32, 64, 128, 256, 512]


@pytest.mark.parametrize("word, value", [
    ("<aa>", True), ("<ab>", False), ("<<aa>,bb>", True), ("aa", False),
    ("<>", False), ("<a,>", False), ("<<ab>,bb>", False), ("<a,b,c>", False), ("<aa", False),
])
def test_decide_examples(evena, word, value):
    assert decide_pred(evena.families, evena.model, "P", word).value is value


def test_examples_agree_with_oracle(evena):
    truth = support.oracle("evena", 12).members("P")
    assert {"<aa>", "<<aa>,bb>"} <= truth and "<ab>" not in truth


def test_unknown_predicate(evena):
    with pytest.raises(UnknownRule):
        decide_pred(evena.families, evena.model, "EvenA", "<aa>")


def test_base_extension_answers_base_words():
    inst = support.instance("unary")
    fs, model = inst.families, inst.model
    assert decide_pred(fs, model, "Q", "aa").value
    assert not decide_pred(fs, model, "Q", "a").value
    assert decide_pred(fs, model, "R", "<aa,aa>").value


# -- cost bounds -------------------------------------------------------------------

def test_base_case_tight_bound(evena):
    word = "<aa>"
    v = decide_pred(evena.families, evena.model, "P", word)
    report = check_cost_bound(v, evena.families.family("P"), word)
    assert report.n == 1 and report.length == 4
    C, p = report.C, report.p
    assert report.tight_bound == C * 2 * len(word) ** p
    assert v.units <= report.tight_bound and report.tight_ok


def test_base_word_cost(evena):
    v = decide_pred(evena.families, evena.model, "P", "abab")
    report = check_cost_bound(v, evena.families.family("P"), "abab")
    assert report.n == 0 and v.units <= report.C * 4 ** report.p


def test_right_nested_chain_of_depth_20(evena):
    word = "<aa>"
    for _ in range(19):
        word = f"<{word},bb>"
    v = decide_pred(evena.families, evena.model, "P", word)
    report = check_cost_bound(v, evena.families.family("P"), word)
    assert v.value and report.n == 20
    assert report.relaxed_ok, report.record()


def test_memo_reports_unmemoized_cost(name):
    inst = support.instance(name)
    rng = random.Random(7)
    words = rng.sample(support.pool(name, 12).words(), 200)
    for p in inst.families.enrichable:
        for w in words:
            a = decide_pred(inst.families, inst.model, p, w, memo=True)
            b = decide_pred(inst.families, inst.model, p, w, memo=False)
            assert (a.value, a.meter.breakdown()) == (b.value, b.meter.breakdown())


def test_memo_replays_repeated_subqueries():
    # Both components are the same T-tree, so the second lookup is a cache hit.
    inst = support.instance("forest")
    word = "<b,<a,<b,<a>>>,<b,<a,<b,<a>>>>>"
    a = decide_pred(inst.families, inst.model, "F", word)
    b = decide_pred(inst.families, inst.model, "F", word, memo=False)
    assert a.value == b.value and a.units == b.units


def test_recursion_shrinks_left_count(name):
    inst = support.instance(name)
    for p, w in support.generated(name, 14)[::5]:
        v = decide_pred(inst.families, inst.model, p, w, trace=True)

        def check(node: Derivation) -> None:
            for child in node.children:
                assert child.word.count("<") < node.word.count("<")
                check(child)
        check(v.trace)


def test_one_recursive_call_per_variable():
    # A rule using P twice on one variable is still separable but must issue
    # a single recursive call for it.
    inst = loads("alphabet 'ab'\nmodel words\npred EvenA/1 = evencount('a') bound C=1 p=1\n"
                 "family P bound C=8 p=1 {\n rule r1 arity=1 : EvenA(x1)\n"
                 " rule r2 arity=2 : P(x1) & EvenA(x2) | P(x1) & x2 = 'b'\n}\n")
    v = decide_pred(inst.families, inst.model, "P", "<<aa>,b>", trace=True)
    assert v.value and len(v.trace.children) == 1


# -- traces ------------------------------------------------------------------------

def test_trace_replays(name):
    inst = support.instance(name)
    for p, w in support.generated(name, 12)[::3]:
        v = decide_pred(inst.families, inst.model, p, w, trace=True)
        assert replay(v.trace, inst.families, inst.model) == v.value
    for w in support.pool(name, 10).words()[::11]:
        for p in inst.families.enrichable:
            v = decide_pred(inst.families, inst.model, p, w, trace=True)
            assert replay(v.trace, inst.families, inst.model) == v.value


def test_trace_lines(evena):
    v = decide_pred(evena.families, evena.model, "P", "<<aa>,bb>", trace=True)
    assert v.trace.lines() == ["P(<<aa>,bb>) = true by r2", "  P(<aa>) = true by r1"]


# -- exponent fit ------------------------------------------------------------------

def test_bench_on_nested_chains(name):
    inst = support.instance(name)
    (pred, setting), = inst.bench.items()
    fam = inst.families.family(pred)
    result = bench_exponent(inst.families, inst.model, pred, SIZES,
                            chain_generator(setting.seed, setting.wrap))
    assert result.slope <= fam.bound.p + 1 + 0.3
    assert all(report.relaxed_ok for *_, report in result.rows)


def test_linear_predicate_on_chains_is_quadratic(evena):
    result = bench_exponent(evena.families, evena.model, "P", SIZES,
                            chain_generator("<aa>", "<#,bb>"))
    assert result.slope == pytest.approx(2.0, abs=0.3)


def test_linear_predicate_on_flat_lists_is_near_linear(evena):
    flat = lambda n: "<" + "b" * (n - 2) + ">"
    result = bench_exponent(evena.families, evena.model, "P", SIZES, flat)
    assert 1.0 <= result.slope <= 1.0 + 0.3


def test_constant_sizes_are_rejected(evena):
    with pytest.raises(InsufficientSizes):
        bench_exponent(evena.families, evena.model, "P", [8, 8, 8, 8], lambda n: "<aa>")
    with pytest.raises(InsufficientSizes):
        bench_exponent(evena.families, evena.model, "P", [8, 16, 32], chain_generator("<aa>", "<#,bb>"))


def test_chain_generator_validation():
    with pytest.raises(ValueError):
        chain_generator("<a>", "<b>")
    assert chain_generator("<a>", "<#,b>")(10) == "<<<a>,b>,b>"


def test_concurrent_queries_have_independent_meters(evena):
    words = support.pool("evena", 10).words()[:300]
    serial = [decide_pred(evena.families, evena.model, "P", w).units for w in words]
    with ThreadPoolExecutor(4) as ex:
        parallel = list(ex.map(lambda w: decide_pred(evena.families, evena.model, "P", w).units,
                               words))
    assert parallel == serial
