"""HTTP what-if service.

Three JSON endpoints back the schedule-editing UI:

* ``POST /api/solve``   - body is a scenario document; synchronous solve.
* ``POST /api/whatif``  - ``{"base": <scenario>, "edits": [...], "metrics": {...}}``;
  edits are applied to the base document, the result re-validated and solved.
* ``GET  /api/examples`` - named canned scenarios at UI-friendly sizes.

Every solve is stateless and isolated per request.  Schema violations map
to 400, an infeasible error budget to 422, a state space over the ceiling
to 413 and an overrunning solve to 504.
"""

from __future__ import annotations

import asyncio
from concurrent.futures import ThreadPoolExecutor

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .metrics import expected_state, service_level, tail_probability
from .scenario import BudgetError, Scenario, Timeline, solve_scenario
from .scenario_io import (
    EXAMPLE_KINDS,
    ScenarioFormatError,
    gen_example,
    load_scenario,
    scenario_to_document,
    timeline_servers,
)

DEFAULT_CEILING = 10000
DEFAULT_TIMEOUT_S = 30.0
DEFAULT_SL_WAIT_S = 20.0

EXAMPLE_UI_SIZES = (210, 600, 1500)

_EDIT_FIELDS = ("servers", "lambda_per_s", "mu_per_s")
_EDIT_OPS = ("set", "add")


class _RequestError(Exception):
    def __init__(self, status: int, message: str) -> None:
        super().__init__(message)
        self.status = status


def _solve_payload(sc: Scenario, tl: Timeline, sl_wait: float) -> dict:
    servers, rates = timeline_servers(sc)
    timeline = {
        "t": [r.t for r in tl.records],
        "ES": [expected_state(r.p) for r in tl.records],
        "SL": [
            service_level(r.p, servers[i], rates[i], sl_wait)
            for i, r in enumerate(tl.records)
        ],
        "p_tail": [tail_probability(r.p) for r in tl.records],
        "eps_accum": [r.eps_accum for r in tl.records],
        "iterations": [r.iterations for r in tl.records],
        "outcome": [r.outcome for r in tl.records],
    }
    summary = {
        "total_mvm": tl.total_mvm,
        "max_eps_accum": tl.max_eps_accum,
        "delta": tl.delta_first,
        "max_p_tail": tl.max_tail,
        "capacity_flag": tl.max_tail > sc.tail_alert,
        "ssd_steps": tl.ssd_steps,
        "sl_wait_s": sl_wait,
    }
    return {"timeline": timeline, "summary": summary}


def _parse_metrics(body: dict) -> float:
    metrics = body.pop("metrics", None)
    if metrics is None:
        return DEFAULT_SL_WAIT_S
    if not isinstance(metrics, dict):
        raise _RequestError(400, "metrics: expected object")
    wait = metrics.get("sl_d", DEFAULT_SL_WAIT_S)
    if isinstance(wait, bool) or not isinstance(wait, (int, float)) or wait < 0:
        raise _RequestError(400, "metrics.sl_d: expected number >= 0")
    return float(wait)


def _apply_edits(doc: dict, edits: list) -> dict:
    if not isinstance(edits, list):
        raise _RequestError(400, "edits: expected array")
    periods = doc.get("periods")
    if not isinstance(periods, list):
        raise _RequestError(400, "base.periods: expected array")
    out = dict(doc)
    out["periods"] = [dict(p) if isinstance(p, dict) else p for p in periods]
    for idx, edit in enumerate(edits):
        where = f"edits[{idx}]"
        if not isinstance(edit, dict):
            raise _RequestError(400, f"{where}: expected object")
        rng = edit.get("period_range")
        if (not isinstance(rng, list) or len(rng) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in rng)):
            raise _RequestError(400, f"{where}.period_range: expected [first, last]")
        first, last = rng
        if not 0 <= first <= last < len(out["periods"]):
            raise _RequestError(
                400, f"{where}.period_range: [{first}, {last}] outside "
                     f"0..{len(out['periods']) - 1}")
        field = edit.get("field")
        if field not in _EDIT_FIELDS:
            raise _RequestError(400, f"{where}.field: expected one of {_EDIT_FIELDS}")
        op = edit.get("op")
        if op not in _EDIT_OPS:
            raise _RequestError(400, f"{where}.op: expected one of {_EDIT_OPS}")
        value = edit.get("value")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise _RequestError(400, f"{where}.value: expected number")
        for p in range(first, last + 1):
            entry = out["periods"][p]
            if not isinstance(entry, dict):
                raise _RequestError(400, f"base.periods[{p}]: expected object")
            current = entry.get(field, 0)
            new = value if op == "set" else current + value
            if field == "servers":
                new = int(new)
            entry[field] = new
    return out


def create_app(
    n_ceiling: int = DEFAULT_CEILING,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> FastAPI:
    app = FastAPI(title="transq what-if service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    executor = ThreadPoolExecutor(max_workers=4)

    async def _run_solve(body: dict) -> JSONResponse:
        sl_wait = _parse_metrics(body)
        try:
            sc = load_scenario(body)
        except ScenarioFormatError as exc:
            raise _RequestError(400, str(exc)) from exc
        if sc.capacity > n_ceiling:
            raise _RequestError(
                413, f"capacity_n={sc.capacity} exceeds ceiling {n_ceiling}")
        loop = asyncio.get_running_loop()
        try:
            tl = await asyncio.wait_for(
                loop.run_in_executor(executor, solve_scenario, sc),
                timeout=timeout_s,
            )
        except asyncio.TimeoutError:
            raise _RequestError(504, f"solve exceeded {timeout_s:g} s") from None
        except BudgetError as exc:
            raise _RequestError(422, str(exc)) from exc
        except RuntimeError as exc:
            # Budget failures surface wrapped per solve step as well.
            if isinstance(exc.__cause__, BudgetError):
                raise _RequestError(422, str(exc)) from exc
            raise
        return JSONResponse(_solve_payload(sc, tl, sl_wait))

    @app.exception_handler(_RequestError)
    async def _request_error(_: Request, exc: _RequestError) -> JSONResponse:
        return JSONResponse({"error": str(exc)}, status_code=exc.status)

    async def _json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise _RequestError(400, "request body is not valid JSON") from None
        if not isinstance(body, dict):
            raise _RequestError(400, "request body must be a JSON object")
        return body

    @app.post("/api/solve")
    async def api_solve(request: Request) -> JSONResponse:
        return await _run_solve(await _json_body(request))

    @app.post("/api/whatif")
    async def api_whatif(request: Request) -> JSONResponse:
        body = await _json_body(request)
        base = body.get("base")
        if not isinstance(base, dict):
            raise _RequestError(400, "base: expected scenario object")
        edited = _apply_edits(base, body.get("edits", []))
        if "metrics" in body:
            edited["metrics"] = body["metrics"]
        return await _run_solve(edited)

    @app.get("/api/examples")
    async def api_examples() -> JSONResponse:
        examples = [
            {
                "name": f"{kind}-{size}",
                "scenario": scenario_to_document(gen_example(kind, size)),
            }
            for kind in EXAMPLE_KINDS
            for size in EXAMPLE_UI_SIZES
        ]
        return JSONResponse({"examples": examples})

    return app


app = create_app()
