/**
 * Browser entry point.
 *
 * The session server speaks NDJSON over TCP, which a browser cannot open
 * directly; point any WebSocket-to-TCP bridge at the server and load the
 * page with ``?ws=ws://bridge-host:port``. Everything else (panels, actions,
 * manual expand) is handled by the shared client core.
 */

import { ConsoleClient } from "./client.js";
import { LineDecoder } from "./lines.js";
import type { Transport } from "./transport.js";

function wsTransport(
  url: string,
  onLine: (line: string) => void,
  onClose: () => void,
): Promise<Transport> {
  return new Promise((resolve, reject) => {
    const decoder = new LineDecoder();
    const ws = new WebSocket(url);
    ws.onopen = () =>
      resolve({ send: (line) => ws.send(line), close: () => ws.close() });
    ws.onerror = () => reject(new Error(`cannot reach ${url}`));
    ws.onmessage = (ev) => {
      for (const line of decoder.push(String(ev.data))) onLine(line);
    };
    ws.onclose = onClose;
  });
}

async function start(): Promise<void> {
  const mount = document.getElementById("app");
  if (mount === null) throw new Error("missing #app mount point");
  const url =
    new URLSearchParams(location.search).get("ws") ??
    `ws://${location.hostname}:8765`;
  const client = new ConsoleClient(mount);
  const transport = await wsTransport(
    url,
    (line) => client.onLine(line),
    () => client.onDisconnect(),
  );
  client.attach(transport);
  const tick = document.getElementById("tick");
  tick?.addEventListener("click", () => client.tick());
}

start().catch((err) => {
  document.body.textContent = String(err);
});
