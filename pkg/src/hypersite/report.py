"""Named per-hyper-site residual arrays with summary statistics."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ResidualReport:
    residuals: dict[str, np.ndarray] = field(default_factory=dict)
    gauge: str = "canonical"
    violations: list[str] = field(default_factory=list)

    def add(self, name: str, values) -> None:
        self.residuals[name] = np.abs(np.atleast_1d(np.asarray(values, dtype=float)))

    def merge(self, other: "ResidualReport", prefix: str = "") -> None:
        for name, values in other.residuals.items():
            self.residuals[prefix + name] = values
        self.violations.extend(other.violations)

    def max(self, name: str) -> float:
        values = self.residuals[name]
        return float(values.max()) if values.size else 0.0

    def summary(self) -> dict[str, dict[str, float]]:
        out = {}
        for name, values in self.residuals.items():
            if values.size == 0:
                out[name] = {"max": 0.0, "mean": 0.0, "rms": 0.0}
                continue
            # np.sum is pairwise on contiguous arrays
            out[name] = {
                "max": float(values.max()),
                "mean": float(np.sum(values) / values.size),
                "rms": float(np.sqrt(np.sum(values * values) / values.size)),
            }
        return out

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_csv(self) -> str:
        names = list(self.residuals)
        rows = max((v.size for v in self.residuals.values()), default=0)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["hyper_site_index", *names])
        for i in range(rows):
            writer.writerow([i, *(format_float(self.residuals[n][i]) if i < self.residuals[n].size else ""
                                  for n in names)])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {"gauge": self.gauge, "summary": self.summary(), "violations": self.violations}
        return json.dumps(payload, indent=2) + "\n"


def format_float(x: float) -> str:
    return format(float(x), ".17g")
