"""HTTP service exposing the engine for the web UI and scripted clients.

Sessions are in-memory; queries run against immutable snapshots while
mutations are serialized per session through a writer lock (a busy writer
yields 409).
"""
from __future__ import annotations

import threading
import uuid
from contextlib import contextmanager

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import errors
from .camera import Camera
from .errors import EngineError
from .mip import ClipSet, render_mip
from .plan import plan_reach, simulate_insertion
from .robot_config import default_registry
from .scene import Scene, load_scene, save_scene, stroke_edit
from .slices import extract_slice
from .transfer import TransferFunction, ValueWindow
from .volume import parse_nrrd

MUTATION_TIMEOUT = 2.0  # seconds before a busy writer turns into 409

_NOT_FOUND = (errors.UnknownId,)
_BAD_REQUEST = (
    errors.BadRange, errors.BadParameter, errors.BadStep, errors.BadAngle,
    errors.IndexOutOfRange, errors.OutOfBounds, errors.DegenerateNormal,
)


class Session:
    def __init__(self):
        self.id = uuid.uuid4().hex[:12]
        self.scene = Scene()
        self.volumes = {}
        self.meshes = {}
        self.models = default_registry()
        self.lock = threading.Lock()
        self._volume_counter = 0

    def new_volume_id(self) -> str:
        self._volume_counter += 1
        return f"vol-{self._volume_counter}"


def _error_body(exc: EngineError) -> dict:
    return {"error": exc.name, "detail": str(exc)}


def create_app(models: dict = None) -> FastAPI:
    app = FastAPI(title="surgiplan", version="0.1.0")
    sessions: dict[str, Session] = {}
    app.state.sessions = sessions
    base_models = models

    def get_session(sid: str) -> Session:
        if sid not in sessions:
            raise errors.UnknownId(f"unknown session {sid!r}")
        return sessions[sid]

    def get_volume(session: Session, vid: str):
        if vid not in session.volumes:
            raise errors.UnknownId(f"unknown volume {vid!r}")
        return session.volumes[vid]

    @contextmanager
    def writer(session: Session):
        if not session.lock.acquire(timeout=MUTATION_TIMEOUT):
            raise _WriterBusy()
        try:
            yield
        finally:
            session.lock.release()

    class _WriterBusy(Exception):
        pass

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        if isinstance(exc, _NOT_FOUND):
            status = 404
        elif isinstance(exc, _BAD_REQUEST):
            status = 400
        else:
            status = 422
        return JSONResponse(status_code=status, content=_error_body(exc))

    @app.exception_handler(_WriterBusy)
    async def writer_busy_handler(request: Request, exc: _WriterBusy):
        return JSONResponse(status_code=409,
                            content={"error": "WriterBusy",
                                     "detail": "a mutation is in progress"})

    @app.post("/sessions")
    def create_session():
        session = Session()
        if base_models is not None:
            session.models = dict(base_models)
        sessions[session.id] = session
        return {"id": session.id}

    # --- volumes ---

    @app.post("/sessions/{sid}/volumes")
    async def upload_volume(sid: str, request: Request):
        session = get_session(sid)
        data = await request.body()
        volume = parse_nrrd(data)
        with writer(session):
            vid = session.new_volume_id()
            session.volumes[vid] = volume
        lo, hi = volume.value_range()
        return {"id": vid, "sizes": list(volume.sizes), "value_range": [lo, hi]}

    @app.get("/sessions/{sid}/volumes/{vid}/info")
    def volume_info(sid: str, vid: str):
        volume = get_volume(get_session(sid), vid)
        lo, hi = volume.value_range()
        h = volume.header
        return {
            "id": vid,
            "sizes": list(volume.sizes),
            "type": h.scalar_kind,
            "value_range": [lo, hi],
            "space_directions": [list(map(float, h.space_directions[:, c]))
                                 for c in range(3)],
            "space_origin": [float(c) for c in h.space_origin],
        }

    @app.get("/sessions/{sid}/volumes/{vid}/slice")
    def volume_slice(sid: str, vid: str, plane: str, index: int,
                     lo: float, hi: float):
        volume = get_volume(get_session(sid), vid)
        image = extract_slice(volume, plane, index, ValueWindow(lo, hi))
        return Response(content=image.to_png(), media_type="image/png")

    # --- rendering ---

    @app.post("/sessions/{sid}/render/mip")
    async def render_endpoint(sid: str, request: Request):
        session = get_session(sid)
        doc = await request.json()
        volume = get_volume(session, doc.get("volume_id"))
        cam = Camera.from_dict(doc["camera"])
        window = ValueWindow(float(doc["window"]["lo"]), float(doc["window"]["hi"]))
        tf = (TransferFunction.from_dict(doc["transfer_function"])
              if doc.get("transfer_function") else None)
        clips = ClipSet.from_dict(doc.get("clips", {}))
        image = render_mip(volume, cam, window, tf=tf, clips=clips,
                           step=doc.get("step"),
                           sampling=doc.get("sampling", "trilinear"))
        return Response(content=image.to_png(), media_type="image/png")

    # --- scene ---

    @app.get("/sessions/{sid}/scene")
    def get_scene(sid: str):
        session = get_session(sid)
        return Response(content=save_scene(session.scene),
                        media_type="application/json")

    @app.put("/sessions/{sid}/scene")
    async def put_scene(sid: str, request: Request):
        session = get_session(sid)
        data = await request.body()
        with writer(session):
            session.scene = load_scene(data, models=session.models,
                                       meshes=session.meshes)
        return _scene_summary(session.scene)

    @app.post("/sessions/{sid}/scene/strokes")
    async def strokes(sid: str, request: Request):
        session = get_session(sid)
        doc = await request.json()
        action = doc.get("action")
        with writer(session):
            stroke_edit(
                session.scene, action,
                point=doc.get("point"),
                color=doc.get("color"),
                stroke_id=doc.get("stroke_id"),
                created_at=doc.get("created_at", 0.0),
            )
        return _scene_summary(session.scene)

    @app.get("/sessions/{sid}/structures/{structure_id}/mesh")
    def structure_mesh(sid: str, structure_id: str):
        session = get_session(sid)
        structure = session.scene.structure(structure_id)
        return {
            "id": structure.id,
            "name": structure.name,
            "color": [float(c) for c in structure.color],
            "vertices": structure.world_vertices().tolist(),
            "triangles": structure.mesh.triangles.tolist(),
        }

    # --- planning ---

    @app.post("/sessions/{sid}/plan/reach")
    async def plan_endpoint(sid: str, request: Request):
        session = get_session(sid)
        doc = await request.json()
        report = plan_reach(session.scene, doc["robot_id"], doc["trocar_id"],
                            doc["target_id"])
        return report.to_dict()

    @app.post("/sessions/{sid}/simulate")
    async def simulate_endpoint(sid: str, request: Request):
        session = get_session(sid)
        doc = await request.json()
        report = plan_reach(session.scene, doc["robot_id"], doc["trocar_id"],
                            doc["target_id"])
        if not report.feasible:
            return JSONResponse(status_code=422, content={
                "error": "InfeasiblePlan", "report": report.to_dict()})
        trajectory = simulate_insertion(
            session.scene, doc["robot_id"], doc["trocar_id"],
            doc["target_id"], int(doc.get("n_steps", 50)), report=report)
        return trajectory.to_dict()

    return app


def _scene_summary(scene: Scene) -> dict:
    return {
        "volume_id": scene.volume_id,
        "structures": [s.id for s in scene.structures],
        "robots": [r.id for r in scene.robots],
        "trocars": sorted(scene.trocars),
        "targets": sorted(scene.targets),
        "strokes": [s.id for s in scene.annotations],
        "patient_preset": {"kind": scene.patient_preset[0],
                           "angle_deg": scene.patient_preset[1]},
    }
