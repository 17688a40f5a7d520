"""SVG rendering of the confidence distribution."""

import xml.etree.ElementTree as ET

import numpy as np

from conftest import make_family

from mtcherry.localtests import get_test
from mtcherry.profile import confidence_profile
from mtcherry.svg import pmf_bar_chart

SVG_NS = "{http://www.w3.org/2000/svg}"


def worked_profile():
    return confidence_profile(make_family([0.01, 0.02, 0.30]), get_test("simes"))


def bars(root):
    return [r for r in root.iter(f"{SVG_NS}rect") if r.get("class") == "bar"]


class TestBarChart:
    def test_parses_as_xml(self):
        root = ET.fromstring(pmf_bar_chart(worked_profile()))
        assert root.tag == f"{SVG_NS}svg"

    def test_viewport(self):
        root = ET.fromstring(pmf_bar_chart(worked_profile()))
        assert root.get("width") == "800"
        assert root.get("height") == "500"
        assert root.get("viewBox") == "0 0 800 500"

    def test_one_bar_per_count(self):
        root = ET.fromstring(pmf_bar_chart(worked_profile()))
        assert len(bars(root)) == 4

    def test_cumulative_percent_labels(self):
        text = pmf_bar_chart(worked_profile())
        for label in ("70%", "96%", "97%", "100%"):
            assert label in text

    def test_axis_captions(self):
        text = pmf_bar_chart(worked_profile())
        assert "number of true hypotheses" in text
        assert "confidence mass" in text

    def test_default_title_avoids_probability_language(self):
        # the displayed object is a random quantity, not a posterior
        text = pmf_bar_chart(worked_profile())
        assert "posterior" not in text.lower()
        assert "Confidence distribution" in text

    def test_title_is_escaped(self):
        text = pmf_bar_chart(worked_profile(), title="a < b & c")
        assert "a &lt; b &amp; c" in text
        ET.fromstring(text)

    def test_many_bars_thin_labels_but_not_rects(self):
        rng = np.random.default_rng(137)
        prof = confidence_profile(make_family(rng.random(150)), get_test("simes"))
        root = ET.fromstring(pmf_bar_chart(prof))
        assert len(bars(root)) == 151
        ticks = [
            t
            for t in root.iter(f"{SVG_NS}text")
            if t.text and t.text.isdigit()
        ]
        assert 0 < len(ticks) <= 76

    def test_bar_heights_track_masses(self):
        prof = worked_profile()
        root = ET.fromstring(pmf_bar_chart(prof))
        heights = [float(r.get("height")) for r in bars(root)]
        masses = prof.masses()
        # tallest bar belongs to the largest mass
        assert int(np.argmax(heights)) == int(np.argmax(masses))
        ratio = heights[0] / max(masses[0], 1e-9)
        np.testing.assert_allclose(heights, np.asarray(masses) * ratio, atol=0.5)
