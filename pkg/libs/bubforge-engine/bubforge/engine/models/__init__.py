from bubforge.engine.models.bubble_record import BubbleRecord, TrainingRecord
from bubforge.engine.models.field_mapping import FieldMapping
from bubforge.engine.models.label_mapping import LabelMapping

__all__ = ["BubbleRecord", "FieldMapping", "LabelMapping", "TrainingRecord"]
