"""Newline-delimited JSON session server over TCP.

Each connection gets its own independent session. All behavior lives in
:class:`fovea.protocol.SessionEngine`; this module only moves bytes, paces
frames in timer mode, and writes session logs on disconnect.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

from .model_io import canonical_json
from .protocol import SessionEngine, next_session_id
from .simulator import PolicyConfig, Scenario


class SessionServer:
    def __init__(
        self,
        scenario: Scenario,
        policy: PolicyConfig,
        host: str = "127.0.0.1",
        port: int = 0,
        lockstep: bool = False,
        interval: float = 1.0,
        log_dir: str | None = None,
    ):
        self.scenario = scenario
        self.policy = policy
        self.host = host
        self.port = port
        self.lockstep = lockstep
        self.interval = interval
        self.log_dir = log_dir
        self._server: asyncio.AbstractServer | None = None

    async def start(self) -> tuple[str, int]:
        self._server = await asyncio.start_server(
            self._handle_connection, self.host, self.port
        )
        sock = self._server.sockets[0]
        host, port = sock.getsockname()[:2]
        self.port = port
        return host, port

    async def serve_forever(self) -> None:
        assert self._server is not None, "call start() first"
        async with self._server:
            await self._server.serve_forever()

    async def close(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    async def _handle_connection(self, reader, writer) -> None:
        engine = SessionEngine(self.scenario, self.policy, next_session_id())
        lock = asyncio.Lock()

        def send(messages) -> None:
            for msg in messages:
                writer.write((canonical_json(msg) + "\n").encode("utf-8"))

        async with lock:
            send([engine.start()])
            await writer.drain()

        ticker = None
        if not self.lockstep:
            ticker = asyncio.create_task(self._tick_loop(engine, lock, send, writer))

        try:
            while True:
                line = await reader.readline()
                if not line:
                    break
                try:
                    msg = json.loads(line)
                except json.JSONDecodeError:
                    async with lock:
                        send([{"type": "ack", "n": engine.frame, "ok": False,
                               "err": "malformed message"}])
                        await writer.drain()
                    continue
                async with lock:
                    send(engine.handle(msg))
                    await writer.drain()
        except (ConnectionResetError, asyncio.IncompleteReadError):
            pass
        finally:
            if ticker is not None:
                ticker.cancel()
            self._write_log(engine)
            writer.close()
            try:
                await writer.wait_closed()
            except (ConnectionResetError, BrokenPipeError):
                pass

    async def _tick_loop(self, engine, lock, send, writer) -> None:
        try:
            while not engine.done:
                await asyncio.sleep(self.interval)
                async with lock:
                    if engine.done:
                        break
                    send(engine.handle({"type": "tick"}))
                    await writer.drain()
        except (asyncio.CancelledError, ConnectionResetError, BrokenPipeError):
            pass

    def _write_log(self, engine: SessionEngine) -> None:
        if self.log_dir is None:
            return
        path = Path(self.log_dir) / f"session-{engine.session_id}.jsonl"
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [canonical_json(record) for record in engine.log]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")


async def _amain(server: SessionServer) -> None:
    host, port = await server.start()
    # one machine-readable line so callers (tests, consoles) can find the port
    print(json.dumps({"listening": {"host": host, "port": port}}), flush=True)
    await server.serve_forever()


def run_server(server: SessionServer) -> None:
    try:
        asyncio.run(_amain(server))
    except KeyboardInterrupt:
        pass
