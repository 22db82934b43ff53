/**
 * Console session state, independent of any DOM.
 *
 * Invariants: at most one action is pending at a time; directives and frames
 * older than the newest one seen are discarded; once an end message arrives
 * no further action can be sent. Manual expand requests are logged with the
 * frame they were issued on so automated and operator-driven disclosure can
 * be compared afterwards.
 */

import type {
  AckMsg,
  ActionMsg,
  DirectiveMsg,
  EndMsg,
  ExpandMsg,
  HelloMsg,
  InferenceMsg,
  ServerMsg,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "live" | "ended" | "closed";

export interface ExpandLogEntry {
  frame: number;
  subsystem: string;
  level: number;
}

export class ConsoleStore {
  status: ConnectionStatus = "connecting";
  hello: HelloMsg | null = null;
  frame = -1;
  directive: DirectiveMsg | null = null;
  posterior: Record<string, number> | null = null;
  pending: string | null = null;
  outcome: EndMsg | null = null;
  notices: string[] = [];
  expandLog: ExpandLogEntry[] = [];

  /** Apply one server message; returns false when it was stale/ignored. */
  apply(msg: ServerMsg): boolean {
    switch (msg.type) {
      case "hello":
        this.hello = msg;
        this.status = "live";
        return true;
      case "frame":
        if (msg.n < this.frame) return false;
        this.frame = msg.n;
        return true;
      case "inference":
        return this.applyInference(msg);
      case "directive":
        return this.applyDirective(msg);
      case "ack":
        return this.applyAck(msg);
      case "end":
        this.outcome = msg;
        this.status = "ended";
        this.pending = null;
        return true;
    }
  }

  private applyInference(msg: InferenceMsg): boolean {
    if (msg.n < this.frame) return false;
    this.posterior = msg.posterior;
    return true;
  }

  private applyDirective(msg: DirectiveMsg): boolean {
    if (this.directive !== null && msg.n < this.directive.n) return false;
    this.directive = msg;
    if (msg.n > this.frame) this.frame = msg.n;
    return true;
  }

  private applyAck(msg: AckMsg): boolean {
    if (!msg.ok) {
      this.notices.push(msg.err ?? "request refused");
    }
    this.pending = null;
    return true;
  }

  canAct(): boolean {
    return (
      this.status === "live" && this.directive !== null && this.pending === null
    );
  }

  /** Claim the pending-action slot; null when a click must be ignored. */
  beginAction(id: string): ActionMsg | null {
    if (!this.canAct()) return null;
    this.pending = id;
    return { type: "action", n: this.directive!.n, id };
  }

  /** Record a manual detail request; display-only, always allowed while live. */
  beginExpand(subsystem: string, level: number): ExpandMsg | null {
    if (this.status !== "live") return null;
    this.expandLog.push({ frame: this.frame, subsystem, level });
    return { type: "expand", subsystem, level };
  }

  markClosed(): void {
    if (this.status !== "ended") this.status = "closed";
  }
}
