"""Service layer: the algorithms behind every command."""

from . import geometry, hands, llm, metrics, motion, pipeline, plot, quaternion, revision, routes, scene, sync
