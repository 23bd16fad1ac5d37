import math

import pytest

from orthoslice.pipeline import reconstruct_document
from orthoslice.shapes import Box, Cylinder, Sphere, Union
from orthoslice.slicer import slice_analytic


def steps(start, step, count):
    return [start + i * step for i in range(count)]


@pytest.fixture(scope="session")
def box_document():
    shape = Box((0.25, 0.25, 0.25), (1.75, 1.75, 1.75))
    return slice_analytic(shape, {a: [0.0, 1.0, 2.0] for a in "xyz"})


@pytest.fixture(scope="session")
def box_result(box_document):
    return reconstruct_document(box_document)


@pytest.fixture(scope="session")
def sphere_shape():
    return Sphere((1.0, 1.0, 1.0), 0.75)


@pytest.fixture(scope="session")
def sphere_document(sphere_shape):
    return slice_analytic(sphere_shape, {a: steps(0.0, 0.25, 9) for a in "xyz"})


@pytest.fixture(scope="session")
def sphere_result(sphere_document):
    return reconstruct_document(sphere_document)


@pytest.fixture(scope="session")
def torus_result():
    from orthoslice.geometry import Axis
    from orthoslice.shapes import Torus

    shape = Torus((1.0, 1.0, 1.0), 0.6, 0.25, Axis.Z)
    doc = slice_analytic(shape, {a: steps(0.0, 0.125, 17) for a in "xyz"})
    return reconstruct_document(doc)


@pytest.fixture(scope="session")
def two_spheres_shape():
    return Union((Sphere((0.5, 0.5, 0.5), 0.3), Sphere((1.5, 1.5, 1.5), 0.3)))


@pytest.fixture(scope="session")
def two_spheres_document(two_spheres_shape):
    return slice_analytic(two_spheres_shape, {a: steps(0.0, 0.2, 11) for a in "xyz"})


@pytest.fixture(scope="session")
def two_spheres_result(two_spheres_document):
    return reconstruct_document(two_spheres_document)


@pytest.fixture(scope="session")
def tilted_cylinder_shape():
    tilt = math.radians(60.0)
    return Cylinder((0.35, 1.0, 0.3), (math.sin(tilt), 0.0, math.cos(tilt)), 0.2, 4.4)


@pytest.fixture(scope="session")
def tilted_cylinder_document(tilted_cylinder_shape):
    planes = {
        "z": steps(0.0, 0.5, 7),
        "x": steps(0.0, 0.5, 10),
        "y": steps(0.0, 0.5, 5),
    }
    return slice_analytic(tilted_cylinder_shape, planes)


@pytest.fixture(scope="session")
def tilted_cylinder_result(tilted_cylinder_document):
    return reconstruct_document(tilted_cylinder_document)
