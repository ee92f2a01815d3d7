"""
Pydantic schemas for the JSON files read and written by the toolkit.

Node and element indices are 1-based in every file and 0-based in memory.
"""
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SubsetValue(BaseModel):
    """One entry of an explicit measure table"""
    subset: List[int] = Field(..., description="1-based element indices")
    value: float


class MeasureFile(BaseModel):
    """Schema for a fuzzy measure file"""
    n: int = Field(..., ge=1, description="Size of the ground set")
    form: Literal["explicit", "additive"] = "explicit"
    values: Optional[List[SubsetValue]] = None
    weights: Optional[List[float]] = None

    @model_validator(mode='after')
    def check_payload(self):
        """Explicit measures carry values, additive ones weights"""
        if self.form == "explicit":
            if self.values is None:
                raise ValueError("explicit measure needs 'values'")
            for entry in self.values:
                if any(i < 1 or i > self.n for i in entry.subset):
                    raise ValueError(f"subset {entry.subset} outside 1..{self.n}")
        else:
            if self.weights is None or len(self.weights) != self.n:
                raise ValueError(f"additive measure needs {self.n} weights")
        return self

    model_config = ConfigDict(json_schema_extra={
        "example": {
            "n": 2,
            "form": "explicit",
            "values": [
                {"subset": [], "value": 0.0},
                {"subset": [1], "value": 0.3},
                {"subset": [2], "value": 0.5},
                {"subset": [1, 2], "value": 1.0}
            ]
        }
    })


class BipolarMeasureFile(BaseModel):
    """Schema for one source of bipolar evidence"""
    negative: MeasureFile
    positive: MeasureFile

    @model_validator(mode='after')
    def check_sizes(self):
        if self.negative.n != self.positive.n:
            raise ValueError(
                f"negative measure has n={self.negative.n}, positive has n={self.positive.n}"
            )
        return self


class AggregatorSchema(BaseModel):
    """Schema for an aggregation operator; a bare string such as "min" is accepted"""
    kind: Literal["min", "max", "mean", "owa"]
    weights: Optional[List[float]] = None

    @model_validator(mode='before')
    @classmethod
    def from_shorthand(cls, data: Any) -> Any:
        if isinstance(data, str):
            name, _, rest = data.strip().lower().partition(':')
            if name == 'average':
                name = 'mean'
            payload: Dict[str, Any] = {"kind": name}
            if rest:
                payload["weights"] = [w for w in rest.split(',') if w.strip()]
            return payload
        return data


class PipelineConfigFile(BaseModel):
    """Schema for the pipeline configuration file"""
    phi_neg: List[AggregatorSchema] = Field(default_factory=lambda: [AggregatorSchema(kind="max")])
    phi_pos: List[AggregatorSchema] = Field(default_factory=lambda: [AggregatorSchema(kind="max")])
    multi_neg: AggregatorSchema = Field(default_factory=lambda: AggregatorSchema(kind="max"), alias="Phi_neg")
    multi_pos: AggregatorSchema = Field(default_factory=lambda: AggregatorSchema(kind="max"), alias="Phi_pos")
    negation: Literal["standard"] = "standard"
    psi: AggregatorSchema = Field(default_factory=lambda: AggregatorSchema(kind="min"))
    gamma: float = Field(default=0.5, ge=0.0, le=1.0)

    model_config = ConfigDict(populate_by_name=True)

    @field_validator('phi_neg', 'phi_pos', mode='before')
    @classmethod
    def single_operator(cls, v):
        """A single operator stands for one per source"""
        if isinstance(v, (str, dict)):
            return [v]
        return v


class PartitionFile(BaseModel):
    """Schema for a partition file"""
    n: int = Field(..., ge=1)
    communities: List[List[int]] = Field(..., description="1-based node ids, smallest member first")

    @field_validator('communities')
    @classmethod
    def validate_communities(cls, v):
        """Communities must be nonempty"""
        if any(len(c) == 0 for c in v):
            raise ValueError('Communities cannot be empty')
        return v


class MatrixSummary(BaseModel):
    min: float
    max: float
    mean: float
    density: float = Field(..., description="Share of nonzero off-diagonal entries")


class RunReport(BaseModel):
    """Schema for the report written by detect"""
    algorithm: str
    n: int
    seed: Optional[int]
    gamma: float
    modularity: float = Field(..., description="Q of the final partition on M")
    communities: int
    levels: int
    level_modularity: List[float]
    group_notion: Dict[str, str] = Field(default_factory=dict)
    matrices: Dict[str, MatrixSummary] = Field(default_factory=dict)
    elapsed_seconds: float


class NmiReport(BaseModel):
    """Schema for evaluate output"""
    nmi: float
    mutual_information: Optional[float] = None
    entropy_x: Optional[float] = None
    entropy_y: Optional[float] = None


class BenchmarkManifest(BaseModel):
    """Schema for the manifest of a generated instance"""
    case: Optional[int]
    graph_label: Optional[int]
    relations_label: Optional[int]
    n: int
    graph_sizes: List[int]
    relation_sizes: List[int]
    alpha: float
    beta: float
    alpha_rel: float
    beta_rel: float
    seed: int
    files: Dict[str, str]


class ErrorResponse(BaseModel):
    """Schema for error responses"""
    detail: str
    error_type: Optional[str] = None
