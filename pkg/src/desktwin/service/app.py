"""HTTP facade over sessions, prompting, scene editing, and rendered frames.

Endpoints are synchronous handlers, so the framework runs them on a thread
pool: a prompt in flight never blocks render requests. Renders draw from an
atomic deep copy of the session scene, so every frame corresponds to exactly
one accepted revision.
"""
from __future__ import annotations

import copy
import itertools
import threading
import time
from dataclasses import dataclass

import numpy as np
from fastapi import Body, FastAPI, HTTPException, Response

from ..errors import (BackendError, CatalogError, DeskTwinError,
                      PipelineError, SceneError)
from ..geometry import RigidTransform, quat_to_matrix
from ..imageio import to_bytes
from ..agents.pipeline import run_pipeline
from ..agents.session import SessionContext, accept_pending, reject_pending, undo_last
from ..scene.environment import EnvironmentState
from ..scene.graph import load_scene
from ..scene.render import AssetLibrary, default_camera, render_scene
from ..splats.types import PinholeCamera
from .config import ServiceConfig


@dataclass
class SessionRecord:
    ctx: SessionContext
    created: float
    last_active: float


def _camera_from_query(params: dict, scene) -> PinholeCamera:
    names = ("px", "py", "pz", "qw", "qx", "qy", "qz")
    given = [params.get(k) is not None for k in names]
    if not any(given):
        width = int(params.get("width") or 320)
        height = int(params.get("height") or 240)
        return default_camera(scene, width=width, height=height)
    if not all(given):
        raise HTTPException(422, "camera needs all of px,py,pz,qw,qx,qy,qz")
    pos = np.array([float(params["px"]), float(params["py"]),
                    float(params["pz"])])
    q = np.array([float(params["qw"]), float(params["qx"]),
                  float(params["qy"]), float(params["qz"])])
    if np.linalg.norm(q) == 0:
        raise HTTPException(422, "zero quaternion")
    R_c2w = quat_to_matrix(q)
    width = int(params.get("width") or 320)
    height = int(params.get("height") or 240)
    fx = float(params.get("fx") or 0.8 * max(width, height))
    fy = float(params.get("fy") or fx)
    try:
        return PinholeCamera(
            fx=fx, fy=fy, cx=(width - 1) / 2.0, cy=(height - 1) / 2.0,
            width=width, height=height, near=0.05, far=500.0,
            world_to_camera=RigidTransform(R_c2w.T, -R_c2w.T @ pos))
    except ValueError as e:
        raise HTTPException(422, str(e)) from e


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="desktwin", docs_url=None, redoc_url=None)
    sessions: dict[str, SessionRecord] = {}
    lock = threading.Lock()
    library = AssetLibrary()
    backend = config.make_backend()
    ids = itertools.count(1)

    def sweep(now: float):
        dead = [sid for sid, rec in sessions.items()
                if now - rec.last_active > config.session_ttl_s]
        for sid in dead:
            del sessions[sid]

    def get_record(session_id: str) -> SessionRecord:
        with lock:
            now = time.time()
            sweep(now)
            rec = sessions.get(session_id)
            if rec is None:
                raise HTTPException(404, f"unknown session '{session_id}'")
            rec.last_active = now
            return rec

    catalog = None
    if config.catalog_path:
        from ..scene.catalog import load_catalog

        catalog = load_catalog(config.catalog_path)

    @app.post("/sessions")
    def create_session():
        scene = load_scene(config.scene_path, catalog=catalog)
        ctx = SessionContext(scene=scene)
        with lock:
            now = time.time()
            sweep(now)
            sid = f"s{next(ids)}"
            ctx.session_id = sid
            sessions[sid] = SessionRecord(ctx=ctx, created=now, last_active=now)
        return {"session_id": sid, "revision": scene.revision}

    @app.post("/sessions/{session_id}/prompt")
    def prompt(session_id: str, body: dict = Body(...)):
        rec = get_record(session_id)
        text = (body.get("text") or "").strip()
        if not text:
            raise HTTPException(422, "prompt text is empty")
        if rec.ctx.pending is not None:
            raise HTTPException(409, "a pending diff already exists")
        try:
            diff, trace = run_pipeline(text, rec.ctx, backend)
        except PipelineError as e:
            trace_dict = e.trace.to_dict() if e.trace else None
            cause = e.__cause__
            if isinstance(cause, BackendError) or "backend" in str(e).lower():
                raise HTTPException(
                    502, {"error": str(e), "trace": trace_dict}) from e
            raise HTTPException(
                422, {"error": str(e), "trace": trace_dict}) from e
        except BackendError as e:
            raise HTTPException(502, {"error": str(e), "stage": e.stage}) from e
        return {
            "pending_diff": diff.to_dict(),
            "summary": diff.summary(),
            "trace": trace.to_dict(),
            "revision": rec.ctx.scene.revision,
        }

    @app.post("/sessions/{session_id}/accept")
    def accept(session_id: str):
        rec = get_record(session_id)
        try:
            diff = accept_pending(rec.ctx)
        except SceneError as e:
            raise HTTPException(409, str(e)) from e
        return {"applied": diff.to_dict(), "revision": rec.ctx.scene.revision}

    @app.post("/sessions/{session_id}/reject")
    def reject(session_id: str):
        rec = get_record(session_id)
        try:
            reject_pending(rec.ctx)
        except SceneError as e:
            raise HTTPException(409, str(e)) from e
        return {"revision": rec.ctx.scene.revision}

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        rec = get_record(session_id)
        try:
            diff = undo_last(rec.ctx)
        except SceneError as e:
            raise HTTPException(409, str(e)) from e
        return {"undone": diff.to_dict(), "revision": rec.ctx.scene.revision}

    @app.get("/sessions/{session_id}/scene")
    def scene_json(session_id: str):
        rec = get_record(session_id)
        scene = rec.ctx.scene
        with scene._lock:
            return {"scene": scene.snapshot(), "revision": scene.revision,
                    "history": rec.ctx.history,
                    "pending": rec.ctx.pending.to_dict()
                    if rec.ctx.pending else None}

    @app.post("/sessions/{session_id}/edit")
    def edit(session_id: str, body: dict = Body(...)):
        rec = get_record(session_id)
        scene = rec.ctx.scene
        op = body.get("op")
        try:
            if op == "add_asset":
                pose = RigidTransform.from_dict(body["pose"]) \
                    if "pose" in body else RigidTransform()
                aid, diff = scene.add_asset(body["class_name"], pose,
                                            overrides=body.get("overrides"))
                rec.ctx.undo_stack.append(diff)
                return {"id": aid, "diff": diff.to_dict(),
                        "revision": scene.revision}
            if op == "remove_asset":
                diff = scene.remove_asset(body["id"])
            elif op == "set_pose":
                diff = scene.set_pose(body["id"],
                                      RigidTransform.from_dict(body["pose"]))
            elif op == "set_property":
                diff = scene.set_property(body["id"], body["key"], body["value"])
            elif op == "set_environment":
                diff = scene.set_environment(
                    EnvironmentState.from_dict(body["environment"]))
            elif op == "arrange":
                diff = scene.arrange(body["ids"], body["pattern"],
                                     float(body["spacing"]),
                                     body.get("origin", "scene_center"))
            else:
                raise HTTPException(422, f"unknown edit op '{op}'")
        except (SceneError, CatalogError, ValueError, KeyError) as e:
            raise HTTPException(422, f"invalid edit: {e}") from e
        rec.ctx.undo_stack.append(diff)
        return {"diff": diff.to_dict(), "revision": scene.revision}

    @app.get("/sessions/{session_id}/render")
    def render(session_id: str, px: float | None = None, py: float | None = None,
               pz: float | None = None, qw: float | None = None,
               qx: float | None = None, qy: float | None = None,
               qz: float | None = None, fx: float | None = None,
               fy: float | None = None, width: int | None = None,
               height: int | None = None, t: float = 0.0):
        rec = get_record(session_id)
        scene = rec.ctx.scene
        with scene._lock:  # atomic snapshot: frames match exact revisions
            snapshot = copy.deepcopy(scene)
            revision = scene.revision
        cam = _camera_from_query(
            {"px": px, "py": py, "pz": pz, "qw": qw, "qx": qx, "qy": qy,
             "qz": qz, "fx": fx, "fy": fy, "width": width, "height": height},
            snapshot)
        try:
            img = render_scene(snapshot, cam, library=library, time_s=t)
        except DeskTwinError as e:
            raise HTTPException(422, f"render failed: {e}") from e
        return Response(content=to_bytes(img), media_type="image/png",
                        headers={"X-Scene-Revision": str(revision)})

    return app
