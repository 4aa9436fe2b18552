import os

import _syncpat as sp

MA_M = "open n1.0 | n1[0] | n1[in n2.0] | n2[0]"


def test_parse_render_roundtrip():
    t = sp.parse(MA_M, "ma")
    assert t.calculus == "ma"
    assert sp.parse(str(t.canonical()), "ma") == t


def test_parse_file_header():
    t = sp.parse_file("%calculus pi-asyn\ny!<u> | y?(x).0\n")
    assert t.calculus == "pi-asyn"
    assert len(sp.steps(t)) == 1


def test_steps_and_apply():
    t = sp.parse(MA_M, "ma")
    steps = sp.steps(t)
    assert len(steps) == 3
    assert sorted(s.axiom for s in steps) == ["ma-in", "ma-open", "ma-open"]
    for s in steps:
        r = sp.apply_step(t, s)
        assert r == s.residual


def test_pair_classification():
    t = sp.parse(MA_M, "ma")
    a, b, c = sp.steps(t)
    kinds = sorted(
        sp.classify_pair(t, x, y)["kind"]
        for x, y in [(a, b), (a, c), (b, c)]
    )
    assert kinds.count("conflict-symmetric") == 2
    assert kinds.count("parallel-distributable") == 1


def test_find_m():
    ws = sp.find_m(sp.parse(MA_M, "ma"))
    assert len(ws) == 1
    assert ws[0].non_local and ws[0].b_uses_open


def test_find_great_m():
    star = " | ".join(
        f"{x}!<> + {y}?().0"
        for x, y in zip("abcde", "bcdea")
    )
    ws = sp.find_great_m(sp.parse(star, "pi-mix"))
    assert len(ws) == 1
    assert ws[0].non_local and len(ws[0].cycle) == 5


def test_success():
    t = sp.parse("open n1.0 | n1[n3[0]] | n1[in n2.in n3.ok] | n2[open n1.0]", "ma")
    assert sp.reach_success(t) == "true"
    assert sp.must_reach_success(t) == "false"


def test_decompose_degree():
    t = sp.parse("def a<> |> 0 in (def b<> |> c<a> in (a<> | b<>))", "join")
    assert sp.degree_of_distributability(t) == 4
    assert len(sp.decompose(t)) == 4


def test_enumerate_terms():
    terms = sp.enumerate_terms(2, name_pool=3)
    assert len(terms) == 170
    assert len(set(terms)) == 170
    assert "ok" in terms


def test_sweep():
    rep = sp.check_lemma3(4, name_pool=3, jobs=2)
    assert rep.terms_checked == 27717
    assert rep.violations == []


def test_corpus_terms_parse():
    d = os.environ.get("SYNCPAT_CORPUS_DIR")
    if not d:
        return
    names = [n for n in os.listdir(d) if n.endswith(".term")]
    assert names
    for n in names:
        with open(os.path.join(d, n)) as f:
            sp.parse_file(f.read())
