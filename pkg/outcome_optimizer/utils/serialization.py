"""
JSON schema and file I/O

Pydantic models validate the shape of every JSON input; conversion to the
domain types then checks the physical invariants (Hermiticity, PSD effects,
completeness). Loaders accept either a bare object or a RunReport whose
results carry the object under "object" (the output of the catalog command).
"""

import hashlib
import json
import sys
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, ValidationError as PydanticValidationError, model_validator

from ..core.exceptions import ValidationError
from ..core.models import Ensemble, HermitianMatrix, MeasurementAssemblage, Povm


class HermitianMatrixModel(BaseModel):
    """{"dim", "re", "im"} with row-major real and imaginary parts"""
    dim: int = Field(..., ge=1)
    re: List[List[float]]
    im: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def check_shape(self):
        parts = [self.re] if self.im is None else [self.re, self.im]
        for part in parts:
            if len(part) != self.dim or any(len(row) != self.dim for row in part):
                raise ValueError(f"matrix parts must be {self.dim} x {self.dim}")
        return self

    def to_domain(self) -> HermitianMatrix:
        return HermitianMatrix.from_dict(self.model_dump(exclude_none=True))


class PovmModel(BaseModel):
    dim: int = Field(..., ge=1)
    effects: List[HermitianMatrixModel] = Field(..., min_length=1)

    def to_domain(self) -> Povm:
        return Povm.from_dict(self.model_dump(exclude_none=True))


class EnsembleModel(BaseModel):
    dim: int = Field(..., ge=1)
    states: List[HermitianMatrixModel] = Field(..., min_length=1)

    def to_domain(self) -> Ensemble:
        return Ensemble.from_dict(self.model_dump(exclude_none=True))


class AssemblageModel(BaseModel):
    dim: int = Field(..., ge=1)
    settings: List[PovmModel] = Field(..., min_length=1)

    def to_domain(self) -> MeasurementAssemblage:
        return MeasurementAssemblage.from_dict(self.model_dump(exclude_none=True))


class ScoreCoefficientsModel(BaseModel):
    X: int = Field(..., ge=1)
    Y: int = Field(..., ge=1)
    B: int = Field(..., ge=1)
    c: List[List[List[float]]]

    @model_validator(mode="after")
    def check_shape(self):
        if len(self.c) != self.X or any(len(row) != self.Y for row in self.c) or \
                any(len(cell) != self.B for row in self.c for cell in row):
            raise ValueError(f"c must have shape ({self.X}, {self.Y}, {self.B})")
        return self

    def to_domain(self):
        from ..algorithms.generalized import ScoreCoefficients
        return ScoreCoefficients.from_dict(self.model_dump())


class RunReport(BaseModel):
    """Envelope of every CLI result"""
    command: str
    inputs_digest: str
    version: str
    solver_statistics: Dict[str, Any] = Field(default_factory=dict)
    results: Dict[str, Any] = Field(default_factory=dict)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)


def read_text(path: str) -> str:
    """Read a file, or stdin when path is '-'"""
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as f:
            return f.read()
    except OSError as e:
        raise ValidationError(f"Cannot read {path}: {e}")


def parse_json(text: str, source: str = "input") -> Dict[str, Any]:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{source} is not valid JSON: {e}")
    if not isinstance(payload, dict):
        raise ValidationError(f"{source} must contain a JSON object")
    return unwrap_report(payload)


def unwrap_report(payload: Dict[str, Any]) -> Dict[str, Any]:
    """The object inside a catalog RunReport, or the payload itself"""
    results = payload.get("results")
    if "command" in payload and isinstance(results, dict) and isinstance(results.get("object"), dict):
        return results["object"]
    return payload


def _validate(model, payload: Dict[str, Any], source: str):
    try:
        return model.model_validate(payload).to_domain()
    except PydanticValidationError as e:
        raise ValidationError(f"{source} does not match the {model.__name__} schema: {e}")


def povm_from_payload(payload: Dict[str, Any], source: str = "povm") -> Povm:
    return _validate(PovmModel, payload, source)


def ensemble_from_payload(payload: Dict[str, Any], source: str = "ensemble") -> Ensemble:
    return _validate(EnsembleModel, payload, source)


def assemblage_from_payload(payload: Dict[str, Any], source: str = "assemblage") -> MeasurementAssemblage:
    """An assemblage, or a single POVM taken as a one-setting assemblage"""
    if "effects" in payload and "settings" not in payload:
        return MeasurementAssemblage((povm_from_payload(payload, source),))
    return _validate(AssemblageModel, payload, source)


def coefficients_from_payload(payload: Dict[str, Any], source: str = "coefficients"):
    return _validate(ScoreCoefficientsModel, payload, source)


def digest(texts: List[str]) -> str:
    """sha256 over the raw input texts, in argument order"""
    h = hashlib.sha256()
    for text in texts:
        h.update(text.encode())
        h.update(b"\0")
    return h.hexdigest()


def dumps(payload: Any) -> str:
    """Stable JSON: insertion order kept, floats as shortest round-trip repr"""
    return json.dumps(payload, indent=2, allow_nan=False)


def write_json(path: str, payload: Any):
    with open(path, "w") as f:
        f.write(dumps(payload))
        f.write("\n")
