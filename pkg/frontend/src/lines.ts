/** Newline framing shared by the TCP and WebSocket transports. */

export class LineDecoder {
  private buffer = "";

  /** Add a chunk; returns the complete non-blank lines it finished. */
  push(chunk: string): string[] {
    this.buffer += chunk;
    const parts = this.buffer.split("\n");
    this.buffer = parts.pop() ?? "";
    return parts.filter((p) => p.trim() !== "");
  }
}
