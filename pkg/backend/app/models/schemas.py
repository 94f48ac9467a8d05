"""
Pydantic models for every JSON file and report the command line reads or writes.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator


class CameraEntry(BaseModel):
    """Either a full 3x4 matrix or focal length, rotation (row-major) and centre"""

    id: str
    P: Optional[List[List[float]]] = None
    f: Optional[float] = Field(default=None, gt=0)
    R: Optional[List[float]] = None
    C: Optional[List[float]] = None

    @model_validator(mode="after")
    def check_form(self):
        if self.P is not None:
            if len(self.P) != 3 or any(len(row) != 4 for row in self.P):
                raise ValueError("P must be 3x4")
        elif self.f is None or self.R is None or self.C is None:
            raise ValueError("camera needs P, or all of f, R and C")
        elif len(self.R) != 9 or len(self.C) != 3:
            raise ValueError("R needs 9 values and C needs 3")
        return self


class CameraFileModel(BaseModel):
    cameras: List[CameraEntry]


class RotationEdgeModel(BaseModel):
    i: int
    j: int
    R: List[float] = Field(min_length=9, max_length=9)


class RotationGraphModel(BaseModel):
    nodes: List[int]
    edges: List[RotationEdgeModel]
    truth: Optional[Dict[int, List[float]]] = None


class FocalEstimateModel(BaseModel):
    pair_id: str
    image_i: int
    image_j: int
    f_i: float = Field(gt=0)
    f_j: float = Field(gt=0)


class FocalPoolModel(BaseModel):
    estimates: List[FocalEstimateModel]
    truth: Optional[Dict[int, float]] = None


class CandidateReport(BaseModel):
    P1: List[List[float]]
    P2: List[List[float]]
    plane: List[float]
    front_votes_camera1: int
    front_votes_camera2: int


class GeometryCheckReport(BaseModel):
    name: str
    value: float
    tolerance: float
    passed: bool


class PairSolutionReport(BaseModel):
    f1: float
    f2: float
    chosen: Optional[int]
    block_scale: float
    forward_f2: float
    reverse_f1: float
    consistent: bool
    coordinate_scale: float
    inliers: int
    correspondences: int
    candidates: List[CandidateReport]
    geometry_checks: List[GeometryCheckReport]
    rotation: Optional[List[List[float]]] = None
    translation: Optional[List[float]] = None


class RotationAverageReport(BaseModel):
    sweeps: int
    rotations: Dict[int, List[float]]
    errors_deg: Optional[Dict[int, float]] = None


class FocalSelection(BaseModel):
    image: int
    f: float
    delta_f: Optional[float] = None


class FocalAverageReport(BaseModel):
    method: str
    beta: float
    selections: List[FocalSelection]
