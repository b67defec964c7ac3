from typing import Dict, Optional

from bubforge.engine.models.field_mapping import FieldMapping


class LabelMapping(FieldMapping):
    """
    Column names of the per-bubble label table.

    The defaults are the exported ``labels.csv`` header, in order.
    """

    def __init__(self, overrides: Optional[Dict[str, str]] = None) -> None:
        defaults = {
            "id": "id",
            "x": "x_px",
            "y": "y_px",
            "z": "z",
            "a": "a_px",
            "b": "b_px",
            "phi": "phi_rad",
            "aspect_ratio": "E",
            "circularity": "circularity",
            "edge_ratio": "edge_ratio",
            "area": "area_px2",
            "clipped": "clipped",
        }
        super().__init__(defaults=defaults, overrides=overrides)

    @property
    def id(self) -> str:
        return self.get_value("id")

    @property
    def aspect_ratio(self) -> str:
        return self.get_value("aspect_ratio")

    @property
    def clipped(self) -> str:
        return self.get_value("clipped")
