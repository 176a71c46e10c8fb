"""HTTP facade over the solver.

Endpoints:

  POST /v1/solve    solve a scenario document, return the decision tree
  POST /v1/resolve  solve onward from a mid-mission state
  GET  /v1/health   liveness and version

Validation problems map to 400 with a field diagnostic, capacity and
timeout to 422, broken internal invariants to 500.  The service keeps no
state between requests.
"""

from __future__ import annotations

import dataclasses
import os

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import __version__
from .errors import (
    CapacityError,
    InternalCheckError,
    ScenarioError,
    SolveTimeoutError,
)
from .export import tree_document
from .graph import DEFAULT_NODE_CAP
from .pipeline import SolveResult, resolve, solve, with_budget
from .scenario_io import _number, scenario_from_document
from .tree import TIE_BREAKS

DEFAULT_TIMEOUT_S = 60.0
TIMEOUT_ENV = "TREESOLVE_SOLVE_TIMEOUT"
CORS_ENV = "TREESOLVE_CORS_ORIGINS"
NODE_CAP_ENV = "TREESOLVE_NODE_CAP"

_SOLVE_KEYS = {"scenario", "budget", "tie_break", "seed"}
_RESOLVE_KEYS = _SOLVE_KEYS | {"current_state", "remaining_budget"}


def _error_body(message: str, field: str | None = None) -> dict:
    return {"error": {"message": message, "field": field}}


def _check_keys(payload: dict, allowed: set[str]) -> None:
    unknown = sorted(set(payload) - allowed)
    if unknown:
        raise ScenarioError("unknown field %r" % unknown[0], field=unknown[0])


def _scenario_of(payload: dict):
    if "scenario" not in payload:
        raise ScenarioError("missing field 'scenario'", field="scenario")
    if not isinstance(payload["scenario"], dict):
        raise ScenarioError("'scenario' must be an object", field="scenario")
    scn = scenario_from_document(payload["scenario"])
    if "budget" in payload and payload["budget"] is not None:
        budget = _number(payload["budget"], "budget")
        if budget < 0:
            raise ScenarioError("budget must be >= 0", field="budget")
        scn = with_budget(scn, budget)
    return scn


def _solve_options(payload: dict) -> dict:
    tie_break = payload.get("tie_break", "node-count")
    if tie_break not in TIE_BREAKS:
        raise ScenarioError(
            "tie_break must be one of %s" % ", ".join(TIE_BREAKS), field="tie_break"
        )
    seed = payload.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ScenarioError("seed must be an integer", field="seed")
    return {"tie_break": tie_break, "seed": seed}


def _state_of(payload: dict) -> tuple[int, ...]:
    raw = payload.get("current_state")
    if not isinstance(raw, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in raw
    ):
        raise ScenarioError(
            "current_state must be a list of integers", field="current_state"
        )
    return tuple(raw)


def _response_of(result: SolveResult) -> dict:
    return {
        "tree": tree_document(result.tree, result.scenario),
        "score": {
            "normalized": float(result.score_normalized),
            "raw": float(result.score_raw),
        },
        "stats": dataclasses.asdict(result.stats),
    }


def create_app(
    *,
    cors_origins: list[str] | None = None,
    solve_timeout: float | None = None,
    node_cap: int | None = None,
) -> FastAPI:
    """Build the FastAPI application.

    Arguments default to the TREESOLVE_CORS_ORIGINS, TREESOLVE_SOLVE_TIMEOUT
    and TREESOLVE_NODE_CAP environment variables.
    """
    if cors_origins is None:
        env = os.environ.get(CORS_ENV, "")
        cors_origins = [o.strip() for o in env.split(",") if o.strip()]
    if solve_timeout is None:
        solve_timeout = float(os.environ.get(TIMEOUT_ENV, DEFAULT_TIMEOUT_S))
    if node_cap is None:
        node_cap = int(os.environ.get(NODE_CAP_ENV, DEFAULT_NODE_CAP))

    app = FastAPI(title="treesolve", version=__version__)

    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    limits = {"node_cap": node_cap, "timeout": solve_timeout}

    @app.exception_handler(ScenarioError)
    async def _scenario_error(request: Request, exc: ScenarioError):
        return JSONResponse(status_code=400, content=_error_body(str(exc), exc.field))

    @app.exception_handler(CapacityError)
    async def _capacity_error(request: Request, exc: CapacityError):
        return JSONResponse(status_code=422, content=_error_body(str(exc)))

    @app.exception_handler(SolveTimeoutError)
    async def _timeout_error(request: Request, exc: SolveTimeoutError):
        return JSONResponse(status_code=422, content=_error_body(str(exc)))

    @app.exception_handler(InternalCheckError)
    async def _internal_error(request: Request, exc: InternalCheckError):
        return JSONResponse(status_code=500, content=_error_body(str(exc)))

    @app.exception_handler(RequestValidationError)
    async def _body_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content=_error_body("request body must be a JSON object")
        )

    @app.post("/v1/solve")
    def solve_endpoint(payload: dict = Body(...)):
        _check_keys(payload, _SOLVE_KEYS)
        scn = _scenario_of(payload)
        result = solve(scn, **_solve_options(payload), **limits)
        return _response_of(result)

    @app.post("/v1/resolve")
    def resolve_endpoint(payload: dict = Body(...)):
        _check_keys(payload, _RESOLVE_KEYS)
        scn = _scenario_of(payload)
        state = _state_of(payload)
        if "remaining_budget" not in payload:
            raise ScenarioError(
                "missing field 'remaining_budget'", field="remaining_budget"
            )
        remaining = _number(payload["remaining_budget"], "remaining_budget")
        result = resolve(scn, state, remaining, **_solve_options(payload), **limits)
        return _response_of(result)

    @app.get("/v1/health")
    def health_endpoint():
        return {"status": "ok", "version": __version__}

    return app
