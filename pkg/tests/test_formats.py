import pytest

from core.cancellation import flag_catalog
from core.encoding import EncodingEdge, EncodingGraph
from core.enumeration import Catalog
from core.errors import FormatError, StructuralError
from core.kirby import ShadowedPolyhedron, attach_external_summand, shadow_to_kirby
from data.formats import (
    parse_catalog,
    parse_encoding,
    parse_model,
    read_catalog,
    render_catalog,
    render_encoding,
    render_model,
    write_catalog,
    write_kirby,
)
from tests.builders import y12_assembly


# ─── catalog ─────────────────────────────────────────────────────────────────

def test_catalog_text_is_stable(catalog_n1):
    text = render_catalog(catalog_n1)
    assert text.splitlines()[:4] == ["catalog-version 1", "vertices 1", "histogram 2 5 3 1", "records 11"]
    parsed = parse_catalog(text)
    assert parsed == catalog_n1
    assert render_catalog(parsed) == text


def test_catalog_keeps_cancel_flags(catalog_n1, tmp_path):
    flagged = flag_catalog(catalog_n1)
    path = tmp_path / "n1.txt"
    write_catalog(flagged, path)
    assert read_catalog(path) == flagged
    assert "cancel=-" not in path.read_text()


def test_empty_catalog_round_trips():
    text = render_catalog(Catalog(4))
    assert "histogram" in text
    assert parse_catalog(text) == Catalog(4)


def test_truncated_catalog_points_at_its_last_line(catalog_n1):
    lines = render_catalog(catalog_n1).splitlines()
    text = "\n".join(lines[:-2]) + "\n"
    with pytest.raises(FormatError) as excinfo:
        parse_catalog(text)
    assert excinfo.value.line == len(text.splitlines())
    assert "truncated" in str(excinfo.value)


@pytest.mark.slow
def test_two_vertex_catalog_header(catalog_n2):
    text = render_catalog(catalog_n2)
    assert text.splitlines()[:4] == [
        "catalog-version 1", "vertices 2", "histogram 36 59 51 21 5 1", "records 173",
    ]
    assert parse_catalog(text) == catalog_n2


def test_catalog_errors_carry_line_numbers(catalog_n1):
    lines = render_catalog(catalog_n1).splitlines()

    wrong_version = ["catalog-version 9"] + lines[1:]
    with pytest.raises(FormatError) as excinfo:
        parse_catalog("\n".join(wrong_version))
    assert excinfo.value.line == 1

    wrong_histogram = lines[:2] + ["histogram 2 5 3 2"] + lines[3:]
    with pytest.raises(FormatError) as excinfo:
        parse_catalog("\n".join(wrong_histogram))
    assert excinfo.value.line == 3

    bad_flag = lines[:5] + [lines[5].replace("acyclic=0", "acyclic=1")] + lines[6:]
    with pytest.raises(FormatError) as excinfo:
        parse_catalog("\n".join(bad_flag))
    assert excinfo.value.line == 6


def test_catalog_rejects_key_mismatch(catalog_n1):
    lines = render_catalog(catalog_n1).splitlines()
    other_key = lines[5].split()[0]
    lines[4] = other_key + " " + lines[4].split(" ", 1)[1]
    with pytest.raises(FormatError) as excinfo:
        parse_catalog("\n".join(lines))
    assert excinfo.value.line == 5


# ─── model ───────────────────────────────────────────────────────────────────

def test_model_round_trip_with_gleams(composite):
    gleams = (1, -2, 0, 3)
    text = render_model(composite, gleams)
    assert "gleam 3 3" in text
    model, parsed_gleams = parse_model(text)
    assert model == composite
    assert parsed_gleams == gleams
    assert render_model(model, parsed_gleams) == text


def test_model_without_gleams():
    model, gleams = parse_model(render_model(y12_assembly(False)))
    assert model == y12_assembly(False)
    assert gleams is None


def test_model_slot_text():
    text = render_model(y12_assembly(True))
    assert "region 1 genus=0 orientable=1 slots=C0.1+,free" in text
    assert "circle 0 monodromy=transposition" in text


@pytest.mark.parametrize("line, expected", [
    ("region 0 genus=0 orientable=1 slots=X0.0+", "bad slot"),
    ("region 0 genus=0 orientable=2 slots=free", "orientable"),
    ("region 1 genus=0 orientable=1 slots=free", "out of order"),
    ("wing 0 a=b", "unknown line"),
])
def test_model_errors(line, expected):
    with pytest.raises(FormatError) as excinfo:
        parse_model("model-version 1\n" + line + "\n")
    assert expected in str(excinfo.value)
    assert excinfo.value.line == 2


def test_model_gleams_must_cover_every_region():
    text = render_model(y12_assembly(True)) + "gleam 0 1\n"
    with pytest.raises(FormatError):
        parse_model(text)


def test_empty_model_file():
    with pytest.raises(FormatError) as excinfo:
        parse_model("# nothing here\n")
    assert excinfo.value.line == 1


# ─── encoding ────────────────────────────────────────────────────────────────

def _pants_with_y12() -> EncodingGraph:
    return EncodingGraph(
        ("P:4", "Y12", "Y12"),
        (
            EncodingEdge(0, 1, None, "single"),
            EncodingEdge(0, 1, None, "double"),
            EncodingEdge(0, 2, None, "single"),
            EncodingEdge(0, 2, None, "double"),
        ),
        ((0, 1), (1, 0)),
        ((0, 1), (0, 1, 2, 3)),
    )


def test_encoding_round_trip():
    g = _pants_with_y12()
    text = render_encoding(g)
    assert "edge 0 1 mark=double" in text
    assert "cycle 1 0 1 2 3" in text
    assert parse_encoding(text) == g
    assert render_encoding(parse_encoding(text)) == text


def test_encoding_header_is_optional():
    g = parse_encoding("vertex 0 kind=D\nvertex 1 kind=B\nedge 0 1\n")
    assert g.kinds == ("D", "B")
    with pytest.raises(FormatError) as excinfo:
        parse_encoding("encoding-version 2\nvertex 0 kind=D\n")
    assert excinfo.value.line == 1


@pytest.mark.parametrize("text, line", [
    ("vertex 1 kind=D\n", 1),
    ("vertex 0 kind=D\nedge 0 3\n", 2),
    ("vertex 0 kind=Y12\nvertex 1 kind=D\nedge 0 1\n", 3),
    ("vertex 0 kind=D\nvertex 1 kind=B\nedge 0 1\nvertex 2 kind=D\n", 4),
    ("vertex 0 kind=D\nloop 0\n", 2),
])
def test_encoding_errors(text, line):
    with pytest.raises(FormatError) as excinfo:
        parse_encoding(text)
    assert excinfo.value.line == line


def test_encoding_structure_errors_pass_through():
    with pytest.raises(StructuralError):
        parse_encoding("vertex 0 kind=D\nvertex 1 kind=D\nvertex 2 kind=D\nedge 0 1\n")


# ─── kirby ───────────────────────────────────────────────────────────────────

def test_kirby_text_is_stable(special_a, tmp_path):
    k = shadow_to_kirby(ShadowedPolyhedron(special_a, (3, -2)), ())
    k = attach_external_summand(k, 1, "K")
    text = k.render()
    assert text.splitlines() == [
        "C0 framing=3/2 tags=[] inc=[(0,1,1)]",
        "C1 framing=-2/2 tags=[K] inc=[(0,2,0),(1,3,1)]",
        "U0",
        "U1",
    ]
    path = tmp_path / "k.txt"
    write_kirby(k, path)
    assert path.read_text() == text
