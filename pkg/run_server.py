#!/usr/bin/env python3
"""Launch the Hecke verification service with uvicorn."""

import os
import sys

import uvicorn

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from app import __version__  # noqa: E402
from app.config import ConfigError, load_settings  # noqa: E402


def serve() -> int:
    """Read PORT/HOST/ENVIRONMENT and the Hecke settings, then block in uvicorn."""
    port = int(os.getenv("PORT", 3030))
    host = os.getenv("HOST", "0.0.0.0")
    environment = os.getenv("ENVIRONMENT", "production")
    try:
        settings = load_settings()
    except ConfigError as e:
        print(f"❌ {e}")
        return 2

    print(f"🚀 Hecke Freeness Verifier v{__version__} ({environment})")
    print(f"💾 Enumeration cache: {settings.cache_dir.resolve()}")
    if settings.config_file:
        print(f"📂 Config: {settings.config_file} ({len(settings.specializations)} named specializations)")
    print(f"🎲 Default seed: {settings.seed}")
    print(f"📚 Overview at http://{host}:{port}, API docs at /docs")

    # WebSocket clients only see progress from this process
    uvicorn.run(
        "app.main:app",
        host=host,
        port=port,
        reload=environment == "development",
        log_level="info",
        workers=1,
        timeout_keep_alive=300,
        access_log=environment == "development",
    )
    return 0


if __name__ == "__main__":
    try:
        sys.exit(serve())
    except KeyboardInterrupt:
        print("\n👋 Server stopped")
