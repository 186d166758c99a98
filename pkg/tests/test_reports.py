from core.cancellation import admits_canceling_pairs
from core.enumeration import Catalog, classify_catalog
from data.reports import cancellation_frame, catalog_frame, histogram_frame, to_text


def test_catalog_frame(catalog_n1):
    df = catalog_frame(catalog_n1)
    assert len(df) == 11
    assert df["Label"].iloc[0] == "n1r1.1"
    assert (df["Acyclic"] == "yes").sum() == 2
    assert set(df["Cancel"]) == {"-"}
    assert (df["Chi"] == df["Regions"] - 1).all()


def test_histogram_frame(catalog_n1):
    df = histogram_frame(catalog_n1, classify_catalog(catalog_n1))
    assert df["Classes"].tolist() == [2, 5, 3, 1]
    assert df["Acyclic"].tolist() == [0, 2, 0, 0]
    assert histogram_frame(catalog_n1)["Acyclic"].sum() == 0


def test_cancellation_frame(catalog_n1):
    results = [admits_canceling_pairs(rec.model()) for rec in catalog_n1.records]
    df = cancellation_frame(catalog_n1, results)
    acyclic = df[df["Acyclic"] == "yes"]
    assert (acyclic["Admits"] == "yes").all()
    assert acyclic["Witness"].str.startswith("(e").all()
    assert (df["Trees"] == 1).all()
    assert (df["TreeDep"] == "no").all()


def test_to_text():
    assert to_text(catalog_frame(Catalog(2))) == "(no rows)\n"
    text = to_text(histogram_frame(Catalog(2)))
    assert text == "(no rows)\n"
