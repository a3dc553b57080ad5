"""Client for external forecasters speaking the line-delimited JSON protocol.

A bridge is a separate process (or TCP service) that wraps a reference
model implementation.  The harness sends one JSON object per line and
reads one JSON response per line, strictly one request in flight per
connection:

    request:  {"id", "model", "context", "start_date", "horizon",
               "quantiles", "num_samples", "seed"}
    response: {"id", "status": "ok", "quantile_rows": 9 x horizon}
              {"id", "status": "error", "message": "..."}

``start_date`` is the calendar date of the first context value.  The
bridge address is either ``tcp:HOST:PORT`` or a shell command to spawn
with stdio pipes, e.g. ``node bridge/dist/main.js``.
"""

from __future__ import annotations

import datetime as dt
import json
import shlex
import socket
import subprocess
from typing import Sequence

import numpy as np

from .data import DailySeries
from .errors import BridgeError
from .forecast import QUANTILE_LEVELS, ForecasterSpec, QuantileForecast


def encode_request(payload: dict) -> bytes:
    return (json.dumps(payload, separators=(",", ":"), sort_keys=True) + "\n").encode("utf-8")


def decode_response(line: bytes) -> dict:
    try:
        obj = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BridgeError(f"malformed bridge response: {exc}") from exc
    if not isinstance(obj, dict):
        raise BridgeError("bridge response is not an object")
    return obj


class BridgeClient:
    """One bridge connection; use as a context manager."""

    def __init__(self, address: str, timeout: float = 120.0):
        self.address = address
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._sock_file = None
        self._counter = 0

    def __enter__(self) -> "BridgeClient":
        if self.address.startswith("tcp:"):
            rest = self.address[4:].lstrip("/")
            host, _, port = rest.rpartition(":")
            try:
                sock = socket.create_connection((host, int(port)), timeout=self.timeout)
            except OSError as exc:
                raise BridgeError(f"cannot connect to bridge {self.address}: {exc}") from exc
            self._sock_file = sock.makefile("rwb")
        else:
            try:
                self._proc = subprocess.Popen(
                    shlex.split(self.address),
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                )
            except OSError as exc:
                raise BridgeError(f"cannot start bridge '{self.address}': {exc}") from exc
        return self

    def __exit__(self, *exc_info) -> None:
        if self._sock_file is not None:
            self._sock_file.close()
            self._sock_file = None
        if self._proc is not None:
            if self._proc.stdin:
                self._proc.stdin.close()
            try:
                self._proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                self._proc.kill()
            self._proc = None

    def request(self, payload: dict) -> dict:
        line = encode_request(payload)
        if self._sock_file is not None:
            self._sock_file.write(line)
            self._sock_file.flush()
            raw = self._sock_file.readline()
        elif self._proc is not None and self._proc.stdin and self._proc.stdout:
            self._proc.stdin.write(line)
            self._proc.stdin.flush()
            raw = self._proc.stdout.readline()
        else:
            raise BridgeError("bridge is not connected")
        if not raw:
            raise BridgeError("bridge closed the stream mid-request")
        response = decode_response(raw)
        if response.get("id") != payload.get("id"):
            raise BridgeError(
                f"bridge response id {response.get('id')!r} does not echo "
                f"request id {payload.get('id')!r}"
            )
        return response

    def next_id(self) -> str:
        self._counter += 1
        return f"req-{self._counter}"


def quantile_forecast_from_rows(
    rows: Sequence[Sequence[float]], start: dt.date, horizon_days: int
) -> QuantileForecast:
    arr = np.asarray(rows, dtype=float)
    if arr.shape != (len(QUANTILE_LEVELS), horizon_days):
        raise BridgeError(
            f"bridge returned shape {arr.shape}, expected "
            f"({len(QUANTILE_LEVELS)}, {horizon_days})"
        )
    return QuantileForecast(start, np.clip(arr, 0.0, None))


def forecast_external(
    spec: ForecasterSpec, context: DailySeries, horizon_days: int, seed: int
) -> tuple[QuantileForecast, str]:
    address = spec.parameters.get("bridge")
    if not address:
        raise BridgeError("external forecaster needs a 'bridge' address parameter")
    model = str(spec.parameters.get("model", "echo"))
    num_samples = int(spec.parameters.get("num_samples", 20))

    with BridgeClient(str(address)) as client:
        payload = {
            "id": client.next_id(),
            "model": model,
            "context": [float(v) for v in context.values],
            "start_date": context.start_date.isoformat(),
            "horizon": int(horizon_days),
            "quantiles": list(QUANTILE_LEVELS),
            "num_samples": num_samples,
            "seed": int(seed),
        }
        response = client.request(payload)
    if response.get("status") != "ok":
        raise BridgeError(
            f"bridge error for model '{model}': {response.get('message', 'unknown')}"
        )
    start = context.end_date + dt.timedelta(days=1)
    qf = quantile_forecast_from_rows(
        response.get("quantile_rows", []), start, horizon_days
    )
    return qf, f"external(model={model},bridge={address})"
