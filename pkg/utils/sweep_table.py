"""
Dimple Trap - Sweep Table

Parametre ızgarası → gözlenebilir tablo.
CSV (başlık satırı, '.' ondalık, repr float) ve JSON çıktısı,
'# provenance:' yorum satırında RunConfig yankısı.
"""

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Union

logger = logging.getLogger(__name__)

PROVENANCE_PREFIX = "# provenance: "


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    if isinstance(value, complex):
        return repr(value)
    return str(value)


def _json_default(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "model_dump"):
        return value.model_dump(mode="json")
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


@dataclass
class SweepTable:
    """Sütun adları, sıralı satırlar ve provenance metadata"""
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def add_row(self, **values: Any) -> None:
        unknown = set(values) - set(self.columns)
        if unknown:
            raise KeyError(f"Unknown column(s): {', '.join(sorted(unknown))}")
        self.rows.append({c: values.get(c) for c in self.columns})

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[Dict[str, Any]]:
        return iter(self.rows)

    def column(self, name: str) -> List[Any]:
        if name not in self.columns:
            raise KeyError(f"Unknown column: {name}")
        return [row[name] for row in self.rows]

    def with_column(self, name: str, values: Sequence[Any]) -> "SweepTable":
        """Yeni sütunla kopya (satır sayısı eşleşmeli)"""
        if len(values) != len(self.rows):
            raise ValueError(f"Column {name} has {len(values)} values for {len(self.rows)} rows")
        columns = self.columns + ([name] if name not in self.columns else [])
        rows = [dict(row, **{name: v}) for row, v in zip(self.rows, values)]
        return SweepTable(columns, rows, dict(self.metadata))

    def degraded_rows(self) -> List[Dict[str, Any]]:
        """flag sütunu 'ok' olmayan satırlar"""
        if "flag" not in self.columns:
            return []
        return [row for row in self.rows if _format_cell(row["flag"]) not in ("ok", "")]

    def stamp(self, config: Optional[Dict[str, Any]] = None, version: Optional[str] = None) -> "SweepTable":
        """RunConfig yankısı, araç sürümü ve zaman damgası ekle"""
        if config is not None:
            self.metadata["config"] = config
        if version is not None:
            self.metadata["version"] = version
        self.metadata["timestamp"] = datetime.now(timezone.utc).isoformat()
        return self

    # === Serialization ===

    def to_csv(self, path: Optional[Union[str, Path]] = None) -> str:
        """
        CSV metni üret (path verilirse dosyaya da yaz)

        Metadata varsa ilk satır '# provenance: <json>' olur.
        """
        buffer = io.StringIO()
        if self.metadata:
            buffer.write(PROVENANCE_PREFIX)
            buffer.write(json.dumps(self.metadata, sort_keys=True, default=_json_default))
            buffer.write("\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_format_cell(row.get(c)) for c in self.columns])
        text = buffer.getvalue()

        if path is not None:
            target = Path(path)
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8")
            logger.info(f"Wrote {len(self.rows)} rows to {target}")
        return text

    def to_json(self, path: Optional[Union[str, Path]] = None) -> str:
        text = json.dumps(
            {"metadata": self.metadata, "rows": self.rows},
            indent=2,
            sort_keys=True,
            default=_json_default,
        )
        if path is not None:
            target = Path(path)
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8")
            logger.info(f"Wrote {len(self.rows)} rows to {target}")
        return text
