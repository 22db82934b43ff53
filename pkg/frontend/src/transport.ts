/**
 * Line-delimited transports. The console core only needs something that can
 * send a line and hand back complete received lines; the TCP transport here
 * covers tests and the terminal demo, and the browser entry wraps a
 * WebSocket bridge behind the same interface.
 */

import * as net from "node:net";

import { LineDecoder } from "./lines.js";

export { LineDecoder } from "./lines.js";

export interface Transport {
  send(line: string): void;
  close(): void;
}

export interface TransportHandlers {
  onLine(line: string): void;
  onClose?(): void;
}

export function connectTcp(
  host: string,
  port: number,
  handlers: TransportHandlers,
): Promise<Transport> {
  return new Promise((resolve, reject) => {
    const decoder = new LineDecoder();
    const socket = net.createConnection({ host, port }, () => {
      socket.off("error", reject);
      resolve({
        send: (line) => socket.write(line),
        close: () => socket.end(),
      });
    });
    socket.setEncoding("utf8");
    socket.once("error", reject);
    socket.on("data", (chunk: string) => {
      for (const line of decoder.push(chunk)) handlers.onLine(line);
    });
    socket.on("close", () => handlers.onClose?.());
  });
}
