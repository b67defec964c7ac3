from bubforge.engine.assembler.bubble_list import BubbleInstance, place_with_boundary, sample_bubble_list
from bubforge.engine.assembler.density import density_map
from bubforge.engine.assembler.export import export, export_scene, read_labels, synthesize_scenes
from bubforge.engine.assembler.flow_spec import FlowSpec, load_example_flow, load_flow_spec
from bubforge.engine.assembler.labels import BubbleLabel, LabelSet
from bubforge.engine.assembler.painter import make_stamp, paint
from bubforge.engine.assembler.profiles import (
    AbstractLateralProfile,
    CenterProfile,
    DoubleProfile,
    SideProfile,
    UniformProfile,
    make_profile,
)
from bubforge.engine.assembler.scene import Scene, synthesize
from bubforge.engine.assembler.sources import AbstractBubbleSource, CcaBubbleSource, DatabaseBubbleSource

__all__ = [
    "AbstractBubbleSource",
    "AbstractLateralProfile",
    "BubbleInstance",
    "BubbleLabel",
    "CcaBubbleSource",
    "CenterProfile",
    "DatabaseBubbleSource",
    "DoubleProfile",
    "FlowSpec",
    "LabelSet",
    "Scene",
    "SideProfile",
    "UniformProfile",
    "density_map",
    "export",
    "export_scene",
    "load_example_flow",
    "load_flow_spec",
    "make_profile",
    "make_stamp",
    "paint",
    "place_with_boundary",
    "read_labels",
    "sample_bubble_list",
    "synthesize",
    "synthesize_scenes",
]
