import io
import json
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from dualspine import certificate as cert
from dualspine import formats as fm
from dualspine.chain import ChainMap
from dualspine.cli import main, sniff
from dualspine.complex2 import MoveSequence, Presentation, fox_boundary
from dualspine.errors import ParseError
from dualspine.grpring import GroupSpec

import helpers as hp
from test_complex2 import random_sequence

RP2_TEXT = "format: presentation 1\ngens: x\npi: 1\nrels: x^2\n"
CIRCLE_TEXT = "gens: x; rels:\n"


def run(*argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


# -- file formats --------------------------------------------------------------------


PIS = [GroupSpec.trivial(), GroupSpec.cyclic(2), GroupSpec.cyclic(5), GroupSpec.free_abelian(2),
       GroupSpec.free(2)]


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(PIS))
def test_complex_round_trip(seed, pi):
    rng = random.Random(seed)
    C = fox_boundary(hp.random_presentation(rng, pi)) if rng.random() < 0.5 or pi.kind != "trivial" \
        else hp.random_complex(rng, 3)
    text = fm.format_complex(C)
    back = fm.parse_complex(text)
    assert back.same_as(C)
    assert fm.format_complex(back) == text
    assert fm.complex_from_json(json.loads(json.dumps(fm.complex_to_json(C)))).same_as(C)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(PIS))
def test_presentation_round_trip(seed, pi):
    K = hp.random_presentation(random.Random(seed), pi)
    text = fm.format_presentation(K)
    back = fm.parse_presentation(text)
    assert back == K
    assert fm.format_presentation(back) == text


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(PIS[:4]))
def test_move_script_round_trip(seed, pi):
    rng = random.Random(seed)
    K = hp.random_presentation(rng, pi)
    seq = MoveSequence(K, tuple(random_sequence(rng, K, 8)))
    text = fm.format_move_script(seq)
    back = fm.parse_move_script(text)
    assert back == seq
    assert fm.format_move_script(back) == text


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_chain_map_round_trip(seed):
    f = hp.random_homology_equivalence(random.Random(seed))
    text = fm.format_chain_map(f)
    back = fm.parse_chain_map(text)
    assert back.same_as(f)
    assert fm.format_chain_map(back) == text


def test_one_line_presentation():
    K = fm.parse_presentation("gens: x1 x2; pi: Z/2; map: x1->t, x2->1; rels: x1^2, x1*x2*x1^-1*x2^-1, 1")
    assert K.free_rank == 2 and K.num_relators == 3
    assert K.relators[2] == ()


def test_parse_errors_carry_positions():
    with pytest.raises(ParseError) as ei:
        fm.parse_complex("ring: 1\nranks: 1 1\nd1: y\n")
    assert ei.value.line == 3
    with pytest.raises(ParseError) as ei:
        fm.parse_presentation("gens: x\nrels: x^2, y\n")
    assert (ei.value.line, ei.value.column) == (2, 12)
    with pytest.raises(ParseError):
        fm.parse_presentation("gens: x\nfoo: 1\n")


def test_sniff():
    assert sniff(RP2_TEXT) == "presentation"
    assert sniff(fm.format_complex(fox_boundary(Presentation(1, ((1, 1),))))) == "complex"
    assert sniff("{}") == "certificate"


# -- verbs and exit codes -------------------------------------------------------------


def test_homology_rp2(tmp_path):
    code, out = run("homology", write(tmp_path, "rp2.txt", RP2_TEXT))
    assert code == 0
    assert "H0=Z, H1=Z/2, H2=0" in out


def test_check_dual_circles(tmp_path):
    c = write(tmp_path, "c.txt", CIRCLE_TEXT)
    code, out = run("check-dual", c, c)
    assert code == 1 and out.strip() == "not dual"
    r = write(tmp_path, "rp2.txt", RP2_TEXT)
    assert run("check-dual", r, r) == (0, "dual\n")


def test_snf_inline_and_file(tmp_path):
    code, out = run("snf", "2,4;6,8")
    assert code == 0
    assert "divisors: 2, 4" in out
    assert run("snf", write(tmp_path, "m.txt", "2,4\n6,8\n"))[1] == out
    assert run("snf", "2,x")[0] == 2


def test_invalid_inputs_exit_2(tmp_path):
    assert run("frobnicate")[0] == 2
    assert run("homology", "--bogus", "x")[0] == 2
    assert run("homology", tmp_path / "missing.txt")[0] == 2
    assert run("homology", write(tmp_path, "bad.txt", "gens: x\nrels: y\n"))[0] == 2
    assert run("validate", write(tmp_path, "junk.txt", "hello\n"))[0] == 2


def test_version():
    r = subprocess.run([sys.executable, "-m", "dualspine.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == cert.VERSION


def test_fox_then_homology(tmp_path):
    code, out = run("fox", write(tmp_path, "rp2.txt", RP2_TEXT))
    assert code == 0
    C = fm.parse_complex(out)
    assert C.d(2).to_ints() == [[2]]


def test_batch_output_keeps_input_order(tmp_path):
    files = []
    for n in range(2, 8):
        files.append(write(tmp_path, f"p{n}.txt", f"gens: x\nrels: x^{n}\n"))
    code, out = run("homology", "--jobs", "3", *files)
    assert code == 0
    lines = out.strip().splitlines()
    assert [ln.split("H1=")[1].split(",")[0] for ln in lines] == [f"Z/{n}" for n in range(2, 8)]


def test_make_dual_and_verify(tmp_path):
    src = write(tmp_path, "k.txt", "gens: x y\nrels: x^2, x*y*x^-1*y^-1\n")
    code, out = run("make-dual", src)
    assert code == 0
    L = fm.parse_presentation(out)
    dual = write(tmp_path, "l.txt", out)
    assert run("check-dual", src, dual)[0] == 0
    assert run("verify-duality", src, dual)[0] == 0
    assert L.free_rank >= 1


def test_realize_reports_duality(tmp_path):
    code, out = run("realize", write(tmp_path, "rp2.txt", RP2_TEXT))
    assert code == 0
    assert "dual homology: yes" in out
    assert "simple algebraic duality: verified" in out


def test_realize_rejects_high_homology(tmp_path):
    text = "format: chain-complex 1\nring: 1\nranks: 1 0 0 1\nd1:\nd2:\nd3:\n"
    C = fm.parse_complex(text)
    assert C.ranks == (1, 0, 0, 1)
    assert run("realize", write(tmp_path, "h3.txt", text))[0] == 1


def test_undecided_over_nontrivial_group(tmp_path):
    text = "gens: x\npi: Z/2\nmap: x->t\nrels: x^2\n"
    p = write(tmp_path, "k.txt", text)
    assert run("moves-synthesize", p, p)[0] == 1
    assert run("homology", p)[0] == 1
    code, out = run("homology", "--augment", p)
    assert code == 0 and "H1=Z/2" in out


# -- certificates ----------------------------------------------------------------------


def _script(tmp_path):
    K = Presentation(2, ((1, 1), (2, 2, 2)))
    seq = MoveSequence(K, tuple(random_sequence(random.Random(7), K, 6)))
    return write(tmp_path, "s.txt", fm.format_move_script(seq))


def _align_map(tmp_path):
    f = hp.extend_with_kernel(random.Random(1), hp.random_homology_equivalence(random.Random(5)))
    return write(tmp_path, "f.txt", fm.format_chain_map(f))


def _emitters(tmp_path):
    rp2 = write(tmp_path, "rp2.txt", RP2_TEXT)
    dual = write(tmp_path, "dual.txt", "gens: y\nrels: y^2\n")
    return {
        "moves": ("moves-apply", _script(tmp_path)),
        "align": ("align", _align_map(tmp_path)),
        "reduce2": ("reduce2", rp2),
        "realize": ("realize", rp2),
        "duality": ("verify-duality", rp2, dual),
        "synthesis": ("moves-synthesize", rp2, dual),
    }


@pytest.mark.parametrize("kind", ["moves", "align", "reduce2", "realize", "duality", "synthesis"])
def test_certificates_reverify_in_fresh_process(tmp_path, kind):
    verb, *files = _emitters(tmp_path)[kind]
    bundle = tmp_path / f"{kind}.json"
    code, _ = run(verb, *files, "--emit-certificate", bundle)
    assert code == 0
    b = json.loads(bundle.read_text())
    assert b["format"] == "dualspine-certificate" and b["version"] == cert.VERSION
    checker = "verify-duality" if kind in ("duality", "realize") else "moves-verify"
    r = subprocess.run([sys.executable, "-m", "dualspine.cli", checker, str(bundle)], capture_output=True,
                       text=True)
    assert r.returncode == 0, r.stdout + r.stderr


def test_split_certificate(tmp_path):
    f = ChainMap.identity(fox_boundary(Presentation(1, ((1, 1),))))
    p = write(tmp_path, "f.txt", fm.format_chain_map(f))
    code, out = run("split", p, "--emit-certificate", tmp_path / "s.json")
    assert code == 0
    assert run("moves-verify", tmp_path / "s.json")[0] == 0


def test_corrupted_certificates_fail(tmp_path):
    rng = random.Random(11)
    verb, *files = _emitters(tmp_path)["align"]
    path = tmp_path / "a.json"
    run(verb, *files, "--emit-certificate", path)
    b = json.loads(path.read_text())
    sites = hp.matrix_entry_sites(b)
    assert sites
    for site in rng.sample(sites, min(10, len(sites))):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(hp.corrupt(b, site, rng)))
        code, out = run("moves-verify", bad)
        assert code == 1, site


def test_verify_duality_requires_datum(tmp_path):
    verb, *files = _emitters(tmp_path)["reduce2"]
    path = tmp_path / "r.json"
    run(verb, *files, "--emit-certificate", path)
    assert run("verify-duality", path)[0] == 2
    assert run("moves-verify", path)[0] == 0


def test_malformed_bundle_is_invalid(tmp_path):
    assert run("moves-verify", write(tmp_path, "x.json", "{not json"))[0] == 2
    assert run("moves-verify", write(tmp_path, "y.json", '{"format": "other"}'))[0] == 2
