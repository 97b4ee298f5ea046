import csv
import io
import json
from fractions import Fraction

import pytest

from permcorr.cli import main
from permcorr.families import t_band, thm2_pair, u_ij
from permcorr.permset import PermSet
from permcorr.specs import SpecError, load_json_arg, parse_family, parse_measure


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_measures():
    assert parse_measure({"measure": "uniform"}, 3).density((2, 1, 3)) == Fraction(1, 6)
    assert parse_measure({"measure": "mallows", "q": "1/2"}, 3).density((1, 2, 3)) == Fraction(8, 21)
    ig = parse_measure({"measure": "ig", "dists": [[1], ["1/2", "1/2"], [0, 0, 1]]}, 3)
    assert ig.density((2, 1, 3)) == Fraction(1, 2)
    assert parse_measure({"measure": "boltzmann", "x": [1, 2, 3], "V": "abs", "q": "1/2"}, 3).exact
    assert not parse_measure({"measure": "mallows", "q": "1/2"}, 3, exact=False).exact
    for bad in ({"measure": "nope"}, {"measure": "mallows"}, {"measure": "middle_gap", "q": "1/2"},
                {"measure": "ig", "dists": [[1]]}):
        with pytest.raises(SpecError):
            parse_measure(bad, 3)


def test_parse_families():
    assert parse_family({"family": "u_ij", "i": 1, "j": 2}, 3) == u_ij(3, 1, 2)
    assert parse_family({"family": "t_band", "t": 1}, 4) == t_band(4, 1)
    assert parse_family({"family": "band_like", "preset": "max", "t": 2}, 4) == t_band(4, 2)
    a, b = thm2_pair(5, Fraction(1, 2), Fraction(1, 2))
    assert parse_family({"family": "thm2", "alpha": "1/2", "beta": "1/2", "side": "B"}, 5) == b
    assert parse_family({"family": "explicit", "perms": ["2,1,3", [1, 2, 3]]}, 3) == \
        PermSet.from_perms(3, [(2, 1, 3), (1, 2, 3)])
    hexed = parse_family({"family": "explicit", "hex": a.to_hex()}, 5)
    assert hexed == a
    assert len(parse_family({"family": "seq_dom", "w": [1, 0, 0], "t": [1, 0, 0]}, 3)) == 2
    assert len(parse_family({"family": "prefix_count", "u": 1, "v": 1, "w": 1}, 3)) == 2
    for bad in ({"family": "u_ij", "i": 1, "j": 1}, {"family": "zzz"},
                {"family": "band_like", "vectors": [[1, 0, 0]]},
                {"family": "thm2", "alpha": "1/2", "beta": "1/2", "side": "C"}):
        with pytest.raises(SpecError):
            parse_family(bad, 3)


def test_load_json_arg(tmp_path):
    path = tmp_path / "m.json"
    path.write_text('{"measure": "uniform"}')
    assert load_json_arg(str(path)) == {"measure": "uniform"}
    assert load_json_arg('{"a": 1}') == {"a": 1}
    with pytest.raises(SpecError):
        load_json_arg(str(tmp_path / "missing.json"))


def test_cli_correlate(capsys, tmp_path):
    fa = tmp_path / "a.json"
    fa.write_text('{"family": "u_ij", "i": 1, "j": 2}')
    code, out, _ = run(capsys, "correlate", "--n", "3", "--measure", '{"measure":"uniform"}',
                       "--family-a", str(fa), "--family-b", '{"family":"u_ij","i":2,"j":3}')
    assert code == 0
    rep = json.loads(out)
    assert (rep["p_ab"], rep["product"], rep["slack"]) == ("1/6", "1/4", "-1/12")


def test_cli_scan(capsys):
    code, out, _ = run(capsys, "scan", "--n", "3", "--order", "weak", "--mode", "exhaustive")
    assert code == 0 and json.loads(out)["min_slack"] == "-1/12"
    code, _, err = run(capsys, "scan", "--n", "4", "--mode", "random", "--pairs", "10")
    assert code == 2 and "--seed" in err
    code, out, _ = run(capsys, "scan", "--n", "5", "--order", "t:2", "--mode", "random",
                       "--pairs", "200", "--seed", "3", "--density-range", "0,0.3")
    assert code == 0 and json.loads(out)["pairs_tested"] == 200


def test_cli_thm2(capsys, tmp_path):
    out_path = tmp_path / "t.csv"
    code, _, _ = run(capsys, "thm2", "--alpha", "1/2", "--beta", "1/2", "--n-list", "4,6",
                     "--out", str(out_path))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out_path.read_text())))
    assert list(rows[0]) == ["n", "density_a", "density_b", "density_ab", "lower_bound"]
    assert rows[1] == {"n": "6", "density_a": "2/3", "density_b": "3/4",
                       "density_ab": "13/30", "lower_bound": "5/12"}
    code, _, _ = run(capsys, "thm2", "--alpha", "3/2", "--beta", "1/2")
    assert code == 2


def test_cli_openq_and_tscan(capsys):
    code, out, _ = run(capsys, "openq", "--q", "3", "--n", "4", "--qparam", "1/2")
    assert code == 0 and json.loads(out)["question"] == 3
    code, _, _ = run(capsys, "openq", "--q", "2", "--n", "5", "--qparam", "1/2")
    assert code == 2
    code, out, _ = run(capsys, "tscan", "--n", "4", "--t-list", "1,4", "--trials", "100", "--seed", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["t"] for r in rows] == ["1", "4"]
    assert run(capsys, "tscan", "--n", "4")[0] == 2


def test_cli_bad_arguments(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "correlate", "--n", "3")[0] == 2
    assert run(capsys, "scan", "--n", "3", "--order", "sideways")[0] == 2
    assert run(capsys, "correlate", "--n", "3", "--measure", '{"measure":"uniform"}',
               "--family-a", "{not json", "--family-b", "{}")[0] == 2
