"""HTTP API: project listing, queries, authenticated uploads, ingest jobs,
and the generated project HTML pages."""

from __future__ import annotations

import secrets
from pathlib import Path
from typing import List, Optional

from fastapi import FastAPI, Header, HTTPException
from fastapi.responses import FileResponse, HTMLResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .core import AdvisorState, UnknownProject


class ProjectInfo(BaseModel):
    name: str
    theorems: int
    definitions: int
    conjuncts: int
    atp_proved: int
    features: dict


class QueryRequest(BaseModel):
    project: str
    goal: str
    budget: Optional[float] = Field(default=None, gt=0)


class QueryResponse(BaseModel):
    events: List[dict]


class UploadRequest(BaseModel):
    corpus: str


class JobInfo(BaseModel):
    id: str
    project: str
    status: str
    stage: Optional[str] = None
    error: Optional[str] = None


def _check_token(state: AdvisorState, authorization: Optional[str]):
    if not state.config.upload_tokens:
        raise HTTPException(status_code=401, detail="uploads disabled")
    if not authorization or not authorization.startswith("Bearer "):
        raise HTTPException(status_code=401, detail="bearer token required")
    token = authorization[len("Bearer "):].strip()
    if not any(secrets.compare_digest(token, t) for t in state.config.upload_tokens):
        raise HTTPException(status_code=401, detail="bad token")


def create_app(state: AdvisorState) -> FastAPI:
    app = FastAPI(title="hammer advisor", version="1.0")
    app.state.advisor = state

    @app.get("/projects", response_model=List[ProjectInfo])
    def projects():
        out = []
        for name in state.project_names():
            out.append(ProjectInfo(**state.project(name).stats()))
        return out

    @app.post("/query", response_model=QueryResponse)
    def query(req: QueryRequest):
        try:
            events = list(state.query(req.project, req.goal, budget_s=req.budget))
        except UnknownProject:
            raise HTTPException(status_code=404,
                                detail=f"unknown project {req.project!r}")
        return QueryResponse(events=events)

    @app.post("/project/{name}", response_model=JobInfo, status_code=202)
    def upload(name: str, req: UploadRequest,
               authorization: Optional[str] = Header(default=None)):
        _check_token(state, authorization)
        if not name.replace("_", "").replace("-", "").isalnum():
            raise HTTPException(status_code=400, detail="bad project name")
        try:
            job = state.start_ingest(name, req.corpus)
        except RuntimeError as e:
            raise HTTPException(status_code=409, detail=str(e))
        return JobInfo(**job.as_dict())

    @app.get("/job/{job_id}", response_model=JobInfo)
    def job(job_id: str):
        j = state.job(job_id)
        if j is None:
            raise HTTPException(status_code=404, detail="no such job")
        return JobInfo(**j.as_dict())

    @app.get("/project/{name}/html/{page}", response_class=HTMLResponse)
    def html_page(name: str, page: str):
        try:
            proj = state.project(name)
        except UnknownProject:
            raise HTTPException(status_code=404,
                                detail=f"unknown project {name!r}")
        if "/" in page or ".." in page or not page.endswith(".html"):
            raise HTTPException(status_code=404, detail="no such page")
        f = Path(proj.root) / "html" / page
        if not f.exists():
            raise HTTPException(status_code=404, detail="no such page")
        return FileResponse(f)

    ui_dir = Path(__file__).resolve().parents[3] / "frontend" / "dist"
    if ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
