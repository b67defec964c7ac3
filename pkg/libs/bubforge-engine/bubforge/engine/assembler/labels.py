from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from bubforge.engine.assembler.flow_spec import FlowSpec
from bubforge.engine.errors import FormatError, ValidationError
from bubforge.engine.models.label_mapping import LabelMapping

BBox = Tuple[float, float, float, float]


@dataclass(frozen=True)
class BubbleLabel:
    """
    Ground truth of one painted bubble.

    Center and semi-axes are the placed geometry; ``phi``, ``e``, ``psi`` and ``m`` are
    extracted from the painted patch. ``area`` is the analytic ``pi a b`` even when the
    bubble is cropped by the image edge, ``bbox`` is the analytic box clipped to the image.
    """

    id: int
    x: float
    y: float
    z: float
    a: float
    b: float
    phi: float
    aspect_ratio: float
    circularity: float
    edge_ratio: float
    area: float
    clipped: bool
    bbox: BBox = (0.0, 0.0, 0.0, 0.0)
    record: int = -1

    def __post_init__(self) -> None:
        if not self.area > 0:
            raise ValidationError(f"label {self.id} has non-positive area {self.area}")


@dataclass
class LabelSet:
    labels: List[BubbleLabel]
    spec: FlowSpec
    seed: int
    extra: Dict[str, Any] = field(default_factory=lambda: {})

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def count(self) -> int:
        return len(self.labels)

    def to_frame(self, mapping: Optional[LabelMapping] = None) -> pd.DataFrame:
        """Label table with the mapping's column names, in mapping order."""
        mapping = mapping or LabelMapping()
        rows = [{k: v for k, v in asdict(label).items() if k in mapping.fields} for label in self.labels]
        df = mapping.to_external(pd.DataFrame(rows, columns=mapping.fields))
        return df.astype({mapping.id: "int64", mapping.clipped: "int64"})

    @classmethod
    def from_frame(
        cls,
        df: pd.DataFrame,
        spec: FlowSpec,
        seed: int,
        bboxes: Optional[List[BBox]] = None,
        records: Optional[List[int]] = None,
        mapping: Optional[LabelMapping] = None,
    ) -> "LabelSet":
        """
        Builds a LabelSet from a label table with the mapping's column names.

        Raises:
            FormatError: If a mapped column is missing or an aspect ratio is outside (0, 1].
        """
        mapping = mapping or LabelMapping()
        internal = mapping.to_internal(df)
        ratio = df[mapping.aspect_ratio]
        bad = df[~((ratio > 0) & (ratio <= 1))]
        if len(bad):
            raise FormatError(
                f"label {bad[mapping.id].iloc[0]}: {mapping.aspect_ratio}={bad[mapping.aspect_ratio].iloc[0]}"
                " is outside (0, 1]"
            )
        labels = []
        for i, row in enumerate(internal.itertuples(index=False)):
            values = row._asdict()
            values["id"] = int(values["id"])
            values["clipped"] = bool(int(values["clipped"]))
            if bboxes is not None:
                values["bbox"] = tuple(float(v) for v in bboxes[i])
            if records is not None:
                values["record"] = int(records[i])
            labels.append(BubbleLabel(**values))
        return cls(labels=labels, spec=spec, seed=seed)
