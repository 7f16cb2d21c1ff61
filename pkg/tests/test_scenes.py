import math

import numpy as np
import pytest

from cubicmars.errors import ConfigError, InvalidGraphError
from cubicmars.scenes import BUILTIN_SCENES, Arc, Segment, dump_scene, get_scene, load_scene
from cubicmars.topology import partition_edge_set


@pytest.mark.parametrize("name", sorted(BUILTIN_SCENES))
def test_builtin_scenes_validate(name):
    get_scene(name).validate()


@pytest.mark.parametrize("name", sorted(BUILTIN_SCENES))
def test_scene_round_trip(name, tmp_path):
    scene = get_scene(name)
    path = tmp_path / f"{name}.json"
    dump_scene(scene, path)
    again = load_scene(path)
    again.validate()
    assert again.to_dict() == scene.to_dict()
    s = np.linspace(0, 1, 17)
    for g0, g1 in zip(scene.geometries, again.geometries):
        assert np.allclose(g0.point(s), g1.point(s), atol=1e-14)


def test_unknown_scene():
    with pytest.raises(ConfigError):
        get_scene("no_such_scene")


def test_geometry_endpoint_mismatch_rejected():
    scene = get_scene("quartered_disk")
    scene.geometries[4] = Segment((0.5, 0.75), (0.66, 0.75))
    with pytest.raises(InvalidGraphError):
        scene.validate()


def test_arc_curvature_radius():
    arc = Arc((0.5, 0.5), 0.15, 0.0, math.pi)
    assert np.allclose(arc.curvature_radius(np.linspace(0, 1, 11)), 0.15)
    seg = Segment((0, 0), (1, 1))
    assert np.all(np.isinf(seg.curvature_radius(np.linspace(0, 1, 5))))


def test_sample_walk_marks_vertices():
    scene = get_scene("quartered_disk")
    part = partition_edge_set(scene.graph)
    circuit = part.circuits[0]
    pts, ch = scene.sample_walk(circuit, 0.15 * math.pi / 2 / 8)
    assert len(ch) == 4
    assert np.array_equal(pts[0], pts[-1])
    # 8 markers per arc gives 32 breakpoints plus the closing copy
    assert len(pts) == 33
    for v, i in zip(circuit.characteristic_vertices, ch):
        assert np.array_equal(pts[i], scene.graph.vertices[v].position)
    chords = np.hypot(*np.diff(pts, axis=0).T)
    assert chords.max() / chords.min() < 1.0 + 1e-6


def test_sample_walk_diameter_trail():
    scene = get_scene("quartered_disk")
    trail = partition_edge_set(scene.graph).trails[0]
    pts, ch = scene.sample_walk(trail, 0.01)
    assert len(ch) == 3
    assert np.array_equal(pts[ch[1]], (0.5, 0.75))
