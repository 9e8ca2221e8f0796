"""Run the HTTP service: ``python -m litkb.service --data-dir DATA --tokens-file TOKENS``.

The tokens file is YAML mapping bearer tokens to user ids::

    tokens:
      s3cret-token: alice
"""

from __future__ import annotations

import argparse
from pathlib import Path

import uvicorn
import yaml

from litkb.service.app import create_app
from litkb.service.store import ServiceConfig


def main() -> None:
    parser = argparse.ArgumentParser(prog="litkb-service")
    parser.add_argument("--data-dir", required=True)
    parser.add_argument("--tokens-file", required=True)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8800)
    args = parser.parse_args()

    with open(args.tokens_file, "r", encoding="utf-8") as fp:
        tokens = (yaml.safe_load(fp) or {}).get("tokens", {})
    config = ServiceConfig(data_dir=Path(args.data_dir), tokens=dict(tokens))
    uvicorn.run(create_app(config), host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
