/**
 * Wire messages spoken by the session server, one JSON object per line.
 *
 * Inbound to the server: tick (advance one frame in lockstep mode), action
 * (commit a decision for the current frame), expand (manual detail request;
 * level -1 returns a panel to the directed level). Outbound: hello, then per
 * frame a frame/inference/directive triple, acks, and a final end with the
 * scored outcome.
 */

export interface ActionInfo {
  id: string;
  name: string;
}

export interface TemplateInfo {
  subsystem: string;
  /** Variable ids visible at each detail level; level k includes level k-1. */
  levels: string[][];
}

export interface PhaseInfo {
  start: number;
  end: number;
  phase: string;
}

export interface HelloMsg {
  type: "hello";
  session: string;
  actions: ActionInfo[];
  subsystems: string[];
  templates: TemplateInfo[];
  clusters: Record<string, string[]>;
  phases: PhaseInfo[];
}

export interface FrameMsg {
  type: "frame";
  n: number;
}

export interface InferenceMsg {
  type: "inference";
  n: number;
  posterior: Record<string, number>;
}

export interface HighlightInfo {
  id: string;
  intensity: number;
}

export interface FaultRow {
  state: string;
  p: number;
}

export interface ActionRow {
  id: string;
  eu: number;
}

export interface DirectiveMsg {
  type: "directive";
  n: number;
  levels: Record<string, number>;
  aux: string[];
  highlights: HighlightInfo[];
  faults: FaultRow[];
  actions: ActionRow[];
  /** The only channel through which sensor readings reach the console. */
  values: Record<string, string>;
}

export interface AckMsg {
  type: "ack";
  n: number;
  ok: boolean;
  err?: string;
}

export interface EndMsg {
  type: "end";
  n: number;
  action: string | null;
  delay: number;
  utility: number;
}

export type ServerMsg =
  | HelloMsg
  | FrameMsg
  | InferenceMsg
  | DirectiveMsg
  | AckMsg
  | EndMsg;

export interface TickMsg {
  type: "tick";
}

export interface ActionMsg {
  type: "action";
  n: number;
  id: string;
}

export interface ExpandMsg {
  type: "expand";
  subsystem: string;
  level: number;
}

export type ClientMsg = TickMsg | ActionMsg | ExpandMsg;

const SERVER_TYPES = new Set([
  "hello",
  "frame",
  "inference",
  "directive",
  "ack",
  "end",
]);

export class ProtocolError extends Error {}

/** Parse one line from the server; rejects non-objects and unknown types. */
export function parseServerLine(line: string): ServerMsg {
  let doc: unknown;
  try {
    doc = JSON.parse(line);
  } catch (e) {
    throw new ProtocolError(`not valid JSON: ${line.slice(0, 80)}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new ProtocolError("message is not an object");
  }
  const type = (doc as { type?: unknown }).type;
  if (typeof type !== "string" || !SERVER_TYPES.has(type)) {
    throw new ProtocolError(`unknown server message type ${JSON.stringify(type)}`);
  }
  return doc as ServerMsg;
}

/** Encode one client message as a wire line (newline terminated). */
export function encodeClientMsg(msg: ClientMsg): string {
  return JSON.stringify(msg) + "\n";
}
