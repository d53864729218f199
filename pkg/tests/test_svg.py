import xml.etree.ElementTree as ET

import numpy as np

from geodepth.bisector import trace_bisector, trace_point
from geodepth.polygon import Instance
from geodepth.svg import disk_cells, figure

NS = "{http://www.w3.org/2000/svg}"


def test_figure_elements(lshape):
    S = np.array([[0.2, 1.8], [1.8, 0.3], [0.4, 0.4], [0.7, 0.2]])
    inst = Instance(lshape.polygon, S, ("red", "blue", "red", "blue"))
    tr = trace_bisector(lshape, S[0], S[1])
    disk = trace_point(lshape, tr, 0.5)
    svg = figure(inst, lshape, [lshape.path(S[0], S[1])], [tr], [disk], title="a <b>")
    root = ET.fromstring(svg)
    classes = [el.get("class") for el in root.iter() if el.get("class")]
    assert classes.count("point") == 4
    assert {"polygon", "geodesic", "bisector", "disk"} <= set(classes)
    assert root.find(NS + "title").text == "a <b>"
    fills = [el.get("fill") for el in root.iter(NS + "circle")]
    assert fills[0] == fills[2] != fills[1]


def test_disk_cells_area(square):
    # a Euclidean disk of radius 3 inside the big square
    runs = disk_cells(square, np.array([0.0, 0.0]), 3.0, res=200)
    area = sum((x1 - x0) * h for x0, x1, _, h in runs)
    assert abs(area - np.pi * 9) / (np.pi * 9) < 0.02


def test_disk_cells_respect_walls(lshape):
    runs = disk_cells(lshape, np.array([0.5, 1.8]), 0.9, res=100)
    for x0, x1, y, h in runs:
        # nothing in the notch [1,2]x[1,2]
        assert not (x1 > 1.0 + 1e-9 and y + h > 1.0 + 1e-9 and x0 < 2.0)
