import json

import pytest

from gaussforms.docs import (dump_form, form_document, lens_space_linking_form, load_form,
                             load_matrix, parse_decomposition, parse_form, parse_matrix)
from gaussforms.enhance import uf
from gaussforms.errors import MalformedDecomposition, NotWellDefined, ParseError
from gaussforms.exactnum import QmodZ
from gaussforms.modp import OdqDecomposition, ReducedDecomposition, reduce_mod_pr


def test_form_round_trip(tmp_path):
    for m in (2, 3, 8):
        path = tmp_path / f"u{m}.json"
        path.write_text(dump_form(uf(m)))
        assert load_form(path) == uf(m)
    doc = form_document([2], [("1/4", "1/4")], [["1/2"]])
    assert parse_form(json.dumps(doc)) == uf(2)


@pytest.mark.parametrize("text", ["", "{", "[]", '{"group": {"orders": [2]}}',
                                  '{"group": {"orders": [2]}, "genvals": [["a", "b"]], "gram": [["0"]]}'])
def test_bad_form_documents(text):
    with pytest.raises(ParseError):
        parse_form(text)


def test_form_document_with_bad_values():
    with pytest.raises(NotWellDefined):
        parse_form(json.dumps(form_document([2], [("1/3", "1/3")], [["2/3"]])))


def test_matrix_formats(tmp_path):
    assert parse_matrix("2\n1 0\n0 3\n") == [[1, 0], [0, 3]]
    assert parse_matrix("[[2, 1], [1, 2]]") == [[2, 1], [1, 2]]
    assert parse_matrix('{"matrix": [[5]]}') == [[5]]
    assert parse_matrix("[[1, 1], [0, 1]]", symmetric=False) == [[1, 1], [0, 1]]
    p = tmp_path / "m.txt"
    p.write_text("1\n7\n")
    assert load_matrix(p) == [[7]]


@pytest.mark.parametrize("text", ["", "2\n1 0\n", "[[1, 2], [3, 4]]", "[[1, 2]]", "x", "2\n1 a\n0 1"])
def test_bad_matrices(text):
    with pytest.raises(ParseError):
        parse_matrix(text)


def test_missing_file():
    with pytest.raises(ParseError):
        load_matrix("/nonexistent/matrix.txt")


def test_decompositions():
    dec = reduce_mod_pr([[1, 0], [0, 2]], 2, 3)
    assert parse_decomposition(json.dumps(dec.to_json())) == dec
    odq = parse_decomposition('{"p": 3, "layers": [{"i": 1, "blocks": [{"diag": 2}]}]}')
    assert isinstance(odq, OdqDecomposition) and not isinstance(odq, ReducedDecomposition)
    with pytest.raises(MalformedDecomposition):
        parse_decomposition('{"p": 3, "layers": [{"i": 1, "blocks": [{"cube": 2}]}]}')
    with pytest.raises(ParseError):
        parse_decomposition("[1]")


def test_lens_space_fixture():
    b = lens_space_linking_form(5, 2)
    assert b.group.orders == (5,) and b.gram[0][0] == QmodZ(2, 5)
