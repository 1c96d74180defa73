from __future__ import annotations

from classorder.plots import census_figure, min_order_figure, order_figure, split_histogram_figure
from classorder.split_order import HistogramRow

PNG = b"\x89PNG\r\n\x1a\n"


def render_all(d):
    rows = [HistogramRow(1, 1, 5, (5,)), HistogramRow(4, 3, 1, (11, 2, 3))]
    return [
        census_figure([("has_instance", 7), ("any_of", 9)], d / "census.png"),
        min_order_figure({"instance": [7, 5, 4, 3], "any": [9, 6, 4, 3]}, d / "min.png"),
        split_histogram_figure(rows, d / "split.png"),
        order_figure({1: 2, 2: 1}, d / "orders.png"),
    ]


def test_figures_are_png_and_byte_identical(tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    for x, y in zip(render_all(tmp_path / "a"), render_all(tmp_path / "b")):
        assert x.read_bytes().startswith(PNG)
        assert x.read_bytes() == y.read_bytes()


def test_empty_inputs_render(tmp_path):
    assert census_figure([("any_of", 0)], tmp_path / "c.png").exists()
    assert split_histogram_figure([], tmp_path / "s.png").exists()
    assert order_figure({}, tmp_path / "o.png").exists()
