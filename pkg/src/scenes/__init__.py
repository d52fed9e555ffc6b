"""
Scene Generation
================

Source banks, scene mixing, seeded scene streams and scene export.
"""

from .export import (
    ManifestEntry,
    manifest_entry,
    read_manifest,
    read_scene,
    write_manifest,
    write_scene,
)
from .mixing import (
    SUBSET_TAGS,
    AerScene,
    SceneMetadata,
    SubsetTag,
    assemble_scene,
    build_switch_scenario,
    mix_scene,
)
from .sampling import (
    GeometryBank,
    SceneSettings,
    dataset_iter,
    draw_geometry,
    sample_scene,
    scene_rng,
)
from .sources import (
    LABELS,
    NON_SPEECH_CLASSES,
    SourceBank,
    SourceEntry,
    synth_source,
)

__all__ = [
    "LABELS",
    "NON_SPEECH_CLASSES",
    "SUBSET_TAGS",
    "AerScene",
    "GeometryBank",
    "ManifestEntry",
    "SceneMetadata",
    "SceneSettings",
    "SourceBank",
    "SourceEntry",
    "SubsetTag",
    "assemble_scene",
    "build_switch_scenario",
    "dataset_iter",
    "draw_geometry",
    "manifest_entry",
    "mix_scene",
    "read_manifest",
    "read_scene",
    "sample_scene",
    "scene_rng",
    "synth_source",
    "write_manifest",
    "write_scene",
]
