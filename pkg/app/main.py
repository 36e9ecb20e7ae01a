"""FastAPI server exposing the Hecke algebra verifications."""

import asyncio
import json as json_lib
import logging
import os
import uuid
from functools import partial
from pathlib import Path
from typing import Optional

import aiofiles
from fastapi import FastAPI, File, HTTPException, Request, UploadFile, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse
from fastapi.templating import Jinja2Templates
from pydantic import BaseModel

from . import __version__
from .cli import FAMILIES, cmd_catalogue, cmd_certify, cmd_demazure, cmd_enumerate, cmd_torsion, cmd_trace, cmd_verify_all, cmd_witness
from .config import load_settings
from .presentations import catalogue_names
from .reports import RunReport
from .rewrite import shipped_traces
from .witness import witness_names

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


# WebSocket connection manager for progress tracking
class ConnectionManager:
    def __init__(self):
        self.active_connections: list[WebSocket] = []

    async def connect(self, websocket: WebSocket):
        await websocket.accept()
        self.active_connections.append(websocket)

    def disconnect(self, websocket: WebSocket):
        if websocket in self.active_connections:
            self.active_connections.remove(websocket)

    async def send_progress(self, message: str, progress: int):
        """Send progress update to all connected clients."""
        data = {"message": message, "progress": progress}
        for connection in list(self.active_connections):
            try:
                await connection.send_text(json_lib.dumps(data))
            except Exception:
                # Remove disconnected clients
                self.disconnect(connection)


manager = ConnectionManager()
settings = load_settings()

app = FastAPI(
    title="Hecke Freeness Verifier",
    description="Exact verification of Hecke algebra dimensions, witnesses and rewriting traces",
    version=__version__,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

UPLOAD_DIR = Path(os.getenv("HECKE_UPLOAD_DIR", "uploads"))

templates = Jinja2Templates(directory=str(Path(__file__).parent / "templates"))


class WitnessRequest(BaseModel):
    name: str
    R: int = 100
    k: int = 50
    m: Optional[int] = None


class EnumerateRequest(BaseModel):
    presentation: str
    spec: Optional[str] = None
    seed: Optional[int] = None
    group: bool = False


class CertifyRequest(BaseModel):
    family: str
    spec: Optional[str] = None
    seed: Optional[int] = None
    group: bool = False


def _progress_callback(loop: asyncio.AbstractEventLoop):
    """Forward progress from a worker thread to the WebSocket clients."""
    def callback(message: str, progress: int):
        logger.info(f"📊 Progress: {progress}% - {message}")
        asyncio.run_coroutine_threadsafe(manager.send_progress(message, progress), loop)
    return callback


async def _in_thread(fn, *args, **kwargs) -> RunReport:
    loop = asyncio.get_running_loop()
    return await loop.run_in_executor(None, partial(fn, *args, **kwargs))


@app.get("/", response_class=HTMLResponse)
async def root(request: Request):
    """Serve the overview page."""
    return templates.TemplateResponse(request, "index.html", {
        "request": request,
        "version": __version__,
        "presentations": catalogue_names(),
        "families": sorted(FAMILIES),
        "traces": [t.stem for t in shipped_traces()],
        "witness_modules": witness_names(),
    })


@app.websocket("/ws")
async def websocket_endpoint(websocket: WebSocket):
    """WebSocket endpoint for real-time progress updates."""
    await manager.connect(websocket)
    try:
        while True:
            # Keep connection alive
            await websocket.receive_text()
    except WebSocketDisconnect:
        manager.disconnect(websocket)


@app.get("/health")
async def health_check():
    return {"status": "healthy", "version": __version__}


@app.get("/catalogue", response_model=RunReport)
async def get_catalogue():
    return await _in_thread(cmd_catalogue)


@app.get("/demazure", response_model=RunReport)
async def get_demazure(max_degree: int = 12):
    return await _in_thread(cmd_demazure, max_degree, settings.seed)


@app.get("/torsion", response_model=RunReport)
async def get_torsion(include_enumeration: bool = True):
    return await _in_thread(cmd_torsion, settings.seed, include_enumeration)


@app.post("/witness", response_model=RunReport)
async def post_witness(body: WitnessRequest):
    return await _in_thread(cmd_witness, body.name, body.R, body.k, body.m)


@app.post("/enumerate", response_model=RunReport)
async def post_enumerate(body: EnumerateRequest):
    callback = _progress_callback(asyncio.get_running_loop())
    return await _in_thread(cmd_enumerate, body.presentation, body.spec, body.seed, body.group,
                            settings=settings, progress_callback=callback)


@app.post("/certify", response_model=RunReport)
async def post_certify(body: CertifyRequest):
    if body.family not in FAMILIES:
        raise HTTPException(status_code=400, detail=f"Unknown family: {body.family}")
    callback = _progress_callback(asyncio.get_running_loop())
    return await _in_thread(cmd_certify, body.family, body.spec, body.seed, body.group,
                            settings=settings, progress_callback=callback)


@app.post("/trace", response_model=RunReport)
async def post_trace(file: UploadFile = File(...)):
    """Replay an uploaded trace file."""
    if Path(file.filename or "").suffix.lower() not in (".trace", ".txt"):
        raise HTTPException(status_code=400, detail=f"Unsupported file: {file.filename}")
    UPLOAD_DIR.mkdir(parents=True, exist_ok=True)
    file_path = UPLOAD_DIR / f"{uuid.uuid4()}.trace"
    async with aiofiles.open(file_path, "wb") as f:
        await f.write(await file.read())
    logger.info(f"📥 Replaying uploaded trace {file.filename}")
    try:
        return await _in_thread(cmd_trace, str(file_path))
    finally:
        try:
            os.unlink(file_path)
        except OSError:
            pass


@app.post("/verify-all", response_model=RunReport)
async def post_verify_all(seed: Optional[int] = None):
    callback = _progress_callback(asyncio.get_running_loop())
    return await _in_thread(cmd_verify_all, seed, 1, settings, callback)
