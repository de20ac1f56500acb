"""HTTP service wrapping the experiment harness.

One POST endpoint runs a suite selection and returns the report with
its determinism hash; the CLI is a thin client of this app.
"""

from __future__ import annotations

import time

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .errors import ConfigError
from .harness import (
    SUITES,
    ExperimentConfig,
    exit_code,
    report_hash,
    run_experiment,
)

app = FastAPI(title="cckit", version="0.1.0")


class ExperimentRequest(BaseModel):
    suites: list[str] = Field(default_factory=lambda: list(SUITES))
    seed: int = 0
    trials: int = 1000
    tolerance: float = 1e-6
    options: dict = Field(default_factory=dict)


class RecordModel(BaseModel):
    id: str
    metric: str
    value: object
    bound: object
    passed: bool
    provenance: str
    seed: int


class ReportResponse(BaseModel):
    records: list[RecordModel]
    exit_code: int
    determinism_hash: str
    started_at: float  # volatile; excluded from the determinism hash


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "suites": list(SUITES)}


@app.post("/experiments", response_model=ReportResponse)
def experiments(req: ExperimentRequest) -> ReportResponse:
    started = time.time()
    try:
        config = ExperimentConfig.from_dict(req.model_dump())
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    records = run_experiment(config)
    return ReportResponse(
        records=[RecordModel(**r.to_doc()) for r in records],
        exit_code=exit_code(records),
        determinism_hash=report_hash(records),
        started_at=started,
    )
