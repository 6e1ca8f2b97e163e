import xml.etree.ElementTree as ET

from compdesign import moo
from compdesign.svgplot import emit_svg_scatter, svg_scatter

NS = "{http://www.w3.org/2000/svg}"


def circles(svg):
    root = ET.fromstring(svg)
    return [c.get("class") for c in root.iter(f"{NS}circle")]


def test_empty_is_axes_only():
    svg = svg_scatter([], "E (GPa)", "sigma (MPa)")
    root = ET.fromstring(svg)
    assert circles(svg) == []
    assert len(list(root.iter(f"{NS}line"))) == 2
    texts = [t.text for t in root.iter(f"{NS}text")]
    assert "E (GPa)" in texts and "sigma (MPa)" in texts


def test_table1_points_with_front_highlighted(table1):
    points = [(r[3], r[4]) for r in table1]
    front = moo.fast_nondominated_sort(points, (moo.Sense.MAXIMIZE, moo.Sense.MAXIMIZE))[0]
    kinds = circles(svg_scatter(points, "E", "sigma", front))
    assert len(kinds) == 14
    assert kinds.count("highlight") == 3


def test_points_inside_plot_area():
    svg = svg_scatter([(0.0, 0.0), (10.0, 5.0), (3.0, 3.0)], "x", "y")
    root = ET.fromstring(svg)
    for c in root.iter(f"{NS}circle"):
        assert 70 <= float(c.get("cx")) <= 620
        assert 20 <= float(c.get("cy")) <= 425


def test_single_point_and_escaping():
    svg = svg_scatter([(5.0, 5.0)], "a < b & c", "y")
    assert "a &lt; b &amp; c" in svg
    ET.fromstring(svg)


def test_identical_calls_identical_bytes(tmp_path):
    pts = [(1.5, 2.25), (3.0, 1.0)]
    emit_svg_scatter(tmp_path / "a.svg", pts, "x", "y", [1])
    emit_svg_scatter(tmp_path / "b.svg", pts, "x", "y", [1])
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
