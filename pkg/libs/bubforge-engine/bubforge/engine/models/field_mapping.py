from typing import Dict, List, Optional

import pandas as pd

from bubforge.engine.errors import FormatError, ValidationError


class FieldMapping:
    """
    Maps internal field names to external column names.

    Defaults are provided at initialization and an override dictionary can replace any of
    them. The default order is the column order of every table written through the mapping.
    """

    def __init__(
        self,
        defaults: Optional[Dict[str, str]] = None,
        overrides: Optional[Dict[str, str]] = None,
    ) -> None:
        self._columns: Dict[str, str] = dict(defaults) if defaults else {}
        if overrides:
            unknown = sorted(set(overrides) - set(self._columns))
            if unknown:
                raise ValidationError(f"unknown field(s) in mapping override: {', '.join(unknown)}")
            self._columns.update(overrides)

    def get_value(self, field: str) -> str:
        """External column name of an internal field."""
        try:
            return self._columns[field]
        except KeyError:
            raise ValidationError(f"unknown field {field!r}") from None

    def set_value(self, field: str, column: str) -> None:
        self.get_value(field)
        self._columns[field] = column

    @property
    def fields(self) -> List[str]:
        return list(self._columns)

    @property
    def columns(self) -> List[str]:
        return list(self._columns.values())

    def get_rename_mapping(self) -> Dict[str, str]:
        """External column name -> internal field name, for ``DataFrame.rename(columns=...)``."""
        return {column: field for field, column in self._columns.items()}

    def to_external(self, df: pd.DataFrame) -> pd.DataFrame:
        """Renames internal fields to external columns, in mapping order."""
        return df.rename(columns=self._columns)[self.columns]

    def to_internal(self, df: pd.DataFrame) -> pd.DataFrame:
        """
        Renames external columns back to internal fields.

        Raises:
            FormatError: If a mapped column is missing.
        """
        missing = [c for c in self.columns if c not in df.columns]
        if missing:
            raise FormatError(f"missing column(s): {', '.join(missing)}")
        return df[self.columns].rename(columns=self.get_rename_mapping())
