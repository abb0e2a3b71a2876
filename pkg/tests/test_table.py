import math

import pytest

from coreep.table import ROWS, comparison_table, format_short, short

REFERENCE = {
    "Exact": ["0.0909", "0.0099", "0.0010", "1.0000e-04"],
    "(3.5)": ["0.1647", "0.0143", "0.0014", "1.4143e-04"],
    "(3.12)": ["0.7070", "0.0705", "0.0070", "7.0710e-04"],
}


def test_display_matches_reference_values():
    t = comparison_table()
    assert t.display == REFERENCE


def test_raw_values_closed_form():
    t = comparison_table()
    r2 = math.sqrt(2)
    for i, eps in enumerate(t.epsilons):
        assert t.raw["Exact"][i] == pytest.approx(eps / (1 + eps), rel=1e-10)
        assert t.raw["(3.5)"][i] == pytest.approx(r2 * eps / (1 - r2 * eps), rel=1e-10)
        assert t.raw["(3.12)"][i] == pytest.approx(5 * r2 * eps, rel=1e-12)


@pytest.mark.parametrize(
    "x, s, txt",
    [(0.0909090, 0.0909, "0.0909"), (1.41441e-4, 1.4144e-4, "1.4144e-04"), (0.0, 0.0, "0.0000"),
     (0.001, 0.001, "0.0010")],
)
def test_short_and_format(x, s, txt):
    assert short(x) == s
    assert format_short(x) == txt


def test_csv_rows_layout():
    rows = comparison_table().csv_rows()
    assert [r[0] for r in rows[1:]] == list(ROWS)
    assert all(len(r) == 5 for r in rows)
