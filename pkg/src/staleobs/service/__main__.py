"""Run the record service: ``python -m staleobs.service --config cfg.json``."""

from __future__ import annotations

import argparse

from . import create_app
from .config import load_config


def main() -> int:
    parser = argparse.ArgumentParser(prog="staleobs.service")
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8321)
    args = parser.parse_args()

    import uvicorn

    config = load_config(args.config)
    uvicorn.run(create_app(config), host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
