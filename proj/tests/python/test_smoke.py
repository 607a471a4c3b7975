import pytest

import pagesel

CHAIN = (
    "pages 2\npage_size 64\n"
    "func main:\nb0:\n  call g\n  call h\n  ret\n"
    "func g:\nb0:\n  pti 1\n  ret\n"
    "func h:\nb0:\n  pti 1\n  ret\n"
)


def test_generate_is_deterministic():
    a = pagesel.generate(seed=7)
    b = pagesel.generate(seed=7)
    assert a == b
    assert a.startswith("pages ")
    assert pagesel.generate(seed=8) != a


def test_analyze_shapes():
    out = pagesel.analyze(CHAIN)
    names = [f["name"] for f in out["functions"]]
    assert names == ["main", "g", "h"]
    main = out["functions"][0]
    b0 = main["blocks"][0]
    assert b0["in"] == ["main"]
    # relation before "call h" is {g}
    assert b0["vop"][1]["before"] == ["g"]
    assert out["iterations"] > 0


def test_frg_edges():
    out = pagesel.frg(CHAIN)
    edges = {(g, h): w for g, h, w in out["edges"]}
    assert edges[("main", "g")] == "1"
    assert edges[("g", "h")] == "1"
    assert out["total"] == "2"


def test_partition_and_exhaustive_agree_here():
    greedy = pagesel.partition(CHAIN)
    best = pagesel.partition(CHAIN, exhaustive=True)
    assert set(greedy["func_page"]) == {"main", "g", "h"}
    assert greedy["residual"] == "0"
    assert best["residual"] == "0"


def test_optimize_report_and_reparse():
    out = pagesel.optimize(CHAIN, name="chain")
    rep = out["report"]
    assert rep["schema"] == 1
    assert rep["program"] == "chain"
    assert rep["psi_opt"] == 0
    assert rep["s_opt"] <= rep["s_naive"]
    # optimized text parses back when selects are allowed
    pagesel.analyze(out["ir"], allow_psi=True)


def test_verify_runs_clean():
    v = pagesel.verify(CHAIN, seeds=10, steps=10000)
    assert v["ok"]
    assert v["faults"] == 0
    assert v["divergences"] == 0


def test_generated_pipeline_end_to_end():
    text = pagesel.generate(seed=123, funcs=(4, 8), pages=2)
    out = pagesel.optimize(text)
    assert out["report"]["s_opt"] <= out["report"]["s_naive"]
    v = pagesel.verify(text, seeds=5, steps=20000)
    assert v["ok"]


def test_corpus_program_is_stable():
    assert pagesel.corpus_program(0) == pagesel.corpus_program(0)
    with pytest.raises(pagesel.Error):
        pagesel.corpus_program(10_000)


def test_merge_reports():
    a = pagesel.optimize(CHAIN, name="a")["report"]
    b = pagesel.optimize(CHAIN, name="b")["report"]
    import json

    merged = pagesel.merge_reports([json.dumps(a), json.dumps(b)])
    assert merged["programs"] == 2
    assert merged["kind"] == "corpus_summary"


def test_errors_are_typed():
    with pytest.raises(pagesel.Error):
        pagesel.optimize("pages 0\npage_size 1\n")
    with pytest.raises(pagesel.Error):
        pagesel.analyze("pages 2\npage_size 8\nfunc f:\nb0:\n  psi 1\n  ret\n")
