"""HTTP API over sweep results: fronts, what-if re-evaluation, decision curves.

Data responses are canonical JSON rendered with 17 significant digits, so
repeated calls are byte-identical and agree bitwise with the CLI's files. At
most one sweep executes per config hash; duplicate submissions await it.
"""

from __future__ import annotations

import os
import threading
from dataclasses import replace

import anyio.to_thread
import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request, Response

from .canonical import canonical_json
from .errors import ConfigError, DataError
from .experiment import (
    CLASSES,
    FRONTS_DIR,
    JUSTICE_NONE,
    SCHEMA_VERSION,
    SPLIT_TEST,
    SPLIT_TRAIN,
    SYNTHETIC_DATASETS,
    ExperimentConfig,
    SweepResult,
    cell_name,
    config_from_dict,
    decision_curve,
    is_complete,
    load_result_dir,
    point_payload,
    result_dir_for,
    run_sweep,
    stakeholders_from_dict,
    whatif_fronts,
)
from .moo import SPACE_PREDICTIVE, SPACE_UTILITY
from .policy import SCOPE_GROUP, SCOPE_SHARED, policy_from_descriptor
from .stakeholders import JUSTICE_EGALITARIAN, JUSTICES, StakeholderSpec

CURVE_POINTS = 257
DEFAULT_GRID_CAP = 10**6

_SPLITS = (SPLIT_TRAIN, SPLIT_TEST)
_SPACES = (SPACE_UTILITY, SPACE_PREDICTIVE)
_CELL_JUSTICES = JUSTICES + (JUSTICE_NONE,)
_SCOPES = (SCOPE_SHARED, SCOPE_GROUP)

_KIND_OF_CLASS = {"det": "deterministic", "stoch": "stochastic"}


def _json_response(payload: dict, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json(payload) + "\n",
        status_code=status_code,
        media_type="application/json",
    )


class _SweepStore:
    """Runs sweeps under per-hash locks and caches loaded results in memory."""

    def __init__(self, out_root: str, grid_cap: int):
        self.out_root = out_root
        self.grid_cap = grid_cap
        self._guard = threading.Lock()
        self._hash_locks: dict[str, threading.Lock] = {}
        self._loaded: dict[str, SweepResult] = {}
        self._row_index: dict[str, dict] = {}

    def _lock_for(self, h: str) -> threading.Lock:
        with self._guard:
            lock = self._hash_locks.get(h)
            if lock is None:
                lock = threading.Lock()
                self._hash_locks[h] = lock
            return lock

    def grid_size(self, cfg: ExperimentConfig) -> int:
        total = 0
        for klass in cfg.classes:
            for scope in cfg.scopes:
                total += cfg.grid.policy_count(_KIND_OF_CLASS[klass], scope, cfg.group_count)
        return total

    def submit(self, cfg: ExperimentConfig) -> tuple[str, bool]:
        """Run (or reuse) the sweep; duplicates await the in-flight execution."""
        h = cfg.config_hash
        with self._lock_for(h):
            if is_complete(result_dir_for(cfg)):
                return h, True
            sweep = run_sweep(cfg)
            with self._guard:
                self._loaded[h] = sweep
            return h, False

    def result_dir(self, h: str) -> str:
        return os.path.join(self.out_root, h)

    def get(self, h: str) -> SweepResult:
        with self._guard:
            hit = self._loaded.get(h)
        if hit is not None:
            return hit
        result_dir = self.result_dir(h)
        if not is_complete(result_dir):
            raise HTTPException(status_code=404, detail="unknown sweep handle %s" % h)
        sweep = load_result_dir(result_dir)
        with self._guard:
            self._loaded[h] = sweep
        return sweep

    def find_row(self, h: str, policy_id: str):
        sweep = self.get(h)
        with self._guard:
            index = self._row_index.get(h)
            if index is None:
                index = {}
                for row in sweep.rows:
                    index.setdefault(row.policy_id, row)
                self._row_index[h] = index
        return sweep, index.get(policy_id)


def create_app(out_root: str, grid_cap: int = DEFAULT_GRID_CAP) -> FastAPI:
    store = _SweepStore(out_root=out_root, grid_cap=grid_cap)
    app = FastAPI(title="fairfront", docs_url=None, redoc_url=None)
    app.state.store = store

    @app.exception_handler(ConfigError)
    def _config_error(_req: Request, exc: ConfigError) -> Response:
        return _json_response({"error": "invalid_config", "detail": str(exc)}, status_code=400)

    @app.exception_handler(DataError)
    def _data_error(_req: Request, exc: DataError) -> Response:
        return _json_response({"error": "data_unavailable", "detail": str(exc)}, status_code=422)

    @app.get("/health")
    def health() -> Response:
        return _json_response({"schema_version": SCHEMA_VERSION, "status": "ok"})

    @app.post("/sweeps")
    async def post_sweep(request: Request) -> Response:
        try:
            body = await request.json()
        except Exception as exc:
            raise ConfigError("request body is not valid JSON: %s" % exc) from exc
        # the service owns result placement; any out_dir in the body is ignored
        cfg = replace(config_from_dict(body), out_dir=store.out_root)
        size = store.grid_size(cfg)
        if size > store.grid_cap:
            return _json_response(
                {
                    "error": "grid_too_large",
                    "detail": "grid enumerates %d policies, above the cap of %d"
                    % (size, store.grid_cap),
                },
                status_code=413,
            )
        if cfg.dataset not in SYNTHETIC_DATASETS and not os.path.isfile(cfg.dataset):
            return _json_response(
                {
                    "error": "data_unavailable",
                    "detail": "dataset file %s does not exist" % cfg.dataset,
                },
                status_code=422,
            )
        handle, cached = await anyio.to_thread.run_sync(store.submit, cfg)
        return _json_response(
            {
                "schema_version": SCHEMA_VERSION,
                "handle": handle,
                "status": "complete",
                "cached": cached,
                "result_dir": store.result_dir(handle),
            }
        )

    @app.get("/sweeps/{handle}/fronts")
    def get_front(
        handle: str,
        space: str = Query(SPACE_UTILITY),
        justice: str = Query(JUSTICE_EGALITARIAN),
        klass: str = Query("stoch", alias="class"),
        scope: str = Query(SCOPE_SHARED),
        split: str = Query(SPLIT_TRAIN),
    ) -> Response:
        if not is_complete(store.result_dir(handle)):
            raise HTTPException(status_code=404, detail="unknown sweep handle %s" % handle)
        for value, universe, what in (
            (space, _SPACES, "space"),
            (justice, _CELL_JUSTICES, "justice"),
            (klass, CLASSES, "class"),
            (scope, _SCOPES, "scope"),
            (split, _SPLITS, "split"),
        ):
            if value not in universe:
                raise HTTPException(status_code=404, detail="unknown %s %r" % (what, value))
        name = cell_name(space, justice, klass, scope, split)
        path = os.path.join(store.result_dir(handle), FRONTS_DIR, name)
        if not os.path.isfile(path):
            raise HTTPException(status_code=404, detail="unknown cell %s" % name)
        with open(path, "rb") as fh:
            data = fh.read()
        return Response(content=data, media_type="application/json")

    @app.get("/sweeps/{handle}/policies/{policy_id}/curve")
    def get_curve(handle: str, policy_id: str) -> Response:
        sweep, row = store.find_row(handle, policy_id)
        if row is None:
            raise HTTPException(
                status_code=404, detail="unknown policy %s in sweep %s" % (policy_id, handle)
            )
        policy = policy_from_descriptor(row.descriptor)
        grid = np.linspace(0.0, 1.0, CURVE_POINTS)
        curves = decision_curve(policy, grid, sweep.group_count)
        return _json_response(
            {
                "schema_version": SCHEMA_VERSION,
                "handle": handle,
                "policy_id": policy_id,
                "policy": row.descriptor,
                "grid": [float(v) for v in grid],
                "groups": [[float(v) for v in curves[g]] for g in range(sweep.group_count)],
            }
        )

    @app.post("/sweeps/{handle}/whatif")
    async def post_whatif(handle: str, request: Request) -> Response:
        sweep = store.get(handle)
        try:
            body = await request.json()
        except Exception as exc:
            raise ConfigError("request body is not valid JSON: %s" % exc) from exc
        if isinstance(body, dict) and "stakeholders" in body:
            body = body["stakeholders"]
        spec = stakeholders_from_dict(body)
        payload = await anyio.to_thread.run_sync(_whatif_payload, sweep, spec, handle)
        return _json_response(payload)

    return app


def _whatif_payload(sweep: SweepResult, spec: StakeholderSpec, handle: str) -> dict:
    fronts, anchor_sets, cells, regime, utilities = whatif_fronts(sweep, spec)
    rows_index = sweep.row_index()
    nhv_by_key = {(c.space, c.justice, c.klass, c.scope, c.split): c.nhv for c in cells}
    front_payloads = []
    for key in sorted(fronts):
        space, justice, klass, scope, split_name = key
        front = fronts[key]
        front_payloads.append(
            {
                "space": space,
                "justice": justice,
                "class": klass,
                "scope": scope,
                "split": split_name,
                "anchors_key": ".".join((space, justice, split_name)),
                "nhv": nhv_by_key[key],
                "points": [
                    point_payload(
                        p,
                        rows_index[(p.policy_id, split_name)],
                        utilities[(split_name, p.policy_id)],
                    )
                    for p in front.points
                ],
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "handle": handle,
        "fronts": front_payloads,
        "anchors": {k: a.to_dict() for k, a in sorted(anchor_sets.items())},
        "regime": None
        if regime is None
        else {
            "asymmetry_ratio": regime.asymmetry_ratio,
            "alignments": list(regime.alignments),
            "egal_prediction": regime.egal_prediction,
            "rawls_prediction": regime.rawls_prediction,
            "curvature_violations": [list(v) for v in regime.curvature_violations],
        },
    }
