"""Pytest configuration and fixtures."""

import os
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from motionstage.models import NavGrid, SceneCatalog, SceneObject

from .synthetic import standing

os.environ.setdefault("LLM_ENDPOINT", "")
os.environ.setdefault("LOG_LEVEL", "INFO")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def toy_dir() -> Path:
    """The bundled toy scene directory."""
    return Path(str(resources.files("motionstage.data").joinpath("toy")))


@pytest.fixture
def open_navgrid():
    """10 x 10 m fully walkable grid with 0.5 m cells."""
    return NavGrid(walkable=np.ones((20, 20), dtype=bool), origin=(0.0, 0.0), resolution=0.5)


@pytest.fixture
def catalog(open_navgrid):
    """Room with a sofa and a chair on an open grid."""
    return SceneCatalog(
        objects=[
            SceneObject(name="sofa", bbox_min=(1.0, 1.0, 0.0), bbox_max=(2.5, 1.8, 0.9)),
            SceneObject(name="chair", bbox_min=(6.0, 6.0, 0.0), bbox_max=(6.6, 6.6, 1.0)),
        ],
        navgrid=open_navgrid,
    )


@pytest.fixture
def standing_pair():
    """Two still bodies 5 m apart, 20 frames at 40 fps."""
    return standing((0.0, 0.0), frames=20), standing((5.0, 0.0), frames=20)
